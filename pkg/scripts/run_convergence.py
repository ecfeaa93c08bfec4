#!/usr/bin/env python3
"""Infinity-norm errors and observed orders over a doubling mesh family.

Defaults reproduce the published oscillator table (N = 10, 20, 40); pass
--system pendulum for the N = 50, 100, 200 table, e.g.

    python3 scripts/run_convergence.py --system pendulum --out -
"""

import sys

from lobvi.cli import main

if __name__ == "__main__":
    raise SystemExit(main(["convergence", *sys.argv[1:]]))
