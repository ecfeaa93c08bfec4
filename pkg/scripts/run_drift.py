#!/usr/bin/env python3
"""Running energy-error maxima over many periods (default 1000).

    python3 scripts/run_drift.py --periods 1000 --out -
    python3 scripts/run_drift.py --system pendulum --out -
"""

import sys

from lobvi.cli import main

if __name__ == "__main__":
    raise SystemExit(main(["drift", *sys.argv[1:]]))
