#!/usr/bin/env python3
"""Linearization-scheme comparison on identical initial data (T = 10).

od2 runs at dt = 5e-3; ls and ey need dt = 1e-4 (100k steps each, several
minutes); wvv is included to demonstrate the blow-up path and terminates
within seconds. Pass --skip-slow to drop the two 100k-step runs.
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))

from chono.cli import main as chono_main

CONFIG = os.path.join(os.path.dirname(__file__), os.pardir, "configs", "comparison.cfg")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--skip-slow", action="store_true")
    args = parser.parse_args()

    schemes, dts = "od2,wvv", "5e-3,5e-3"
    if not args.skip_slow:
        schemes += ",ls,ey"
        dts += ",1e-4,1e-4"
    return chono_main(["compare", "--config", CONFIG,
                       "--schemes", schemes, "--dts", dts])


if __name__ == "__main__":
    sys.exit(main())
