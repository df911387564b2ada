#!/usr/bin/env python3
"""Uncoded BER sweep: both schemes on a 0-9 dB Eb/N0 grid.

The index bits of the proposed scheme ride on slot positions for free,
so at equal information-bit energy its curve sits ~0.58 dB left of the
conventional one (energy ratio 36/32 plus the error-free index bits).
Emits the standard CSV plus a measured-gap footer at BER 1e-4. Extra
`ber` flags can be appended, e.g.:

    python3 scripts/ber_sweep_uncoded.py --snr-step 0.5 --out uncoded.csv
"""

import sys

from oblink.cli import main

DEFAULTS = [
    "ber",
    "--snr-start", "0", "--snr-stop", "9", "--snr-step", "1",
    "--n-bus", "400000",
    "--min-errors", "150",
    "--seed", "4242",
    "--summary", "--gap-ber", "1e-4",
]

if __name__ == "__main__":
    sys.exit(main(DEFAULTS + sys.argv[1:]))
