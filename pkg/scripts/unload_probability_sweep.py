#!/usr/bin/env python3
"""Sweep the column-empty (padding) frequency against the closed form.

Runs the fresh-accumulation experiment for phi = 8, 16, 32 over an
occupancy grid spanning [1, 12*phi] and writes CSV with the empirical
frequency, the analytic rho = ((phi-1)/phi)^M, and Wilson 95% bounds.
Any oblink `unload` flag can be appended to override the defaults, e.g.:

    python3 scripts/unload_probability_sweep.py --trials 100000 --out unload.csv
"""

import sys

from oblink.cli import main

DEFAULTS = ["unload", "--trials", "40000", "--seed", "7"]

if __name__ == "__main__":
    sys.exit(main(DEFAULTS + sys.argv[1:]))
