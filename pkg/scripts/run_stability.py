#!/usr/bin/env python3
"""Boundedness scan of the closed-form oscillator update near its limit.

    python3 scripts/run_stability.py --out -
"""

import sys

from lobvi.cli import main

if __name__ == "__main__":
    raise SystemExit(main(["stability", *sys.argv[1:]]))
