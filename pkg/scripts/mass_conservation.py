#!/usr/bin/env python3
"""Mass behavior of v under three prescribed means (v_bar = 0, mass(v0), 0.6).

Runs the bundled mass_behavior.cfg once per choice and prints the discrete
v-mass at t = 1, 7.5 and 15. With v_bar = mass(v0) the mass stays constant;
otherwise it relaxes geometrically toward v_bar * |Omega|.
"""

import argparse
import dataclasses
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))

from chono.cli import execute_run
from chono.io import load_config, read_series

CONFIG = os.path.join(os.path.dirname(__file__), os.pardir, "configs", "mass_behavior.cfg")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output", default="out/mass_behavior")
    parser.add_argument("--config", default=CONFIG)
    args = parser.parse_args()

    base = load_config(args.config)
    for v_bar in (0.0, "auto", 0.6):
        label = "auto" if v_bar == "auto" else f"{v_bar:g}"
        cfg = dataclasses.replace(base, v_bar=v_bar)
        out_dir = os.path.join(args.output, f"v_bar_{label}")
        code = execute_run(cfg, out_dir)
        if code != 0:
            print(f"v_bar={label}: run failed with exit code {code}", file=sys.stderr)
            return code
        records = {round(r.t, 6): r for r in read_series(os.path.join(out_dir, "series.csv"))}
        masses = ", ".join(f"m({t:g}) = {records[t].mass_v:.6g}" for t in (1.0, 7.5, 15.0))
        print(f"v_bar = {label:>5}: {masses}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
