#!/usr/bin/env python3
"""Sample one integrator run against the exact solution, node by node.

Thin wrapper over the `trajectory` subcommand; all flags pass through, e.g.

    python3 scripts/run_trajectory.py --system pendulum --meshes 50 --out -
"""

import sys

from lobvi.cli import main

if __name__ == "__main__":
    raise SystemExit(main(["trajectory", *sys.argv[1:]]))
