#!/usr/bin/env python3
"""Regenerate sample_output/: a short decaying-mass run used by the plotting
frontend's tests (series.csv plus u/v snapshots at t = 2 on the 20x20 grid).

v_bar = 0 with sigma = 100 makes the v-mass decay monotonically, which the
frontend asserts when rendering the curve.
"""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))

from chono.cli import execute_run
from chono.io import parse_config

SAMPLE_CONFIG = """
nx = 20
ny = 20
dt = 0.005
t_end = 2
tau_v = 100
sigma = 100
alpha = 0.01
beta = -0.9
v_bar = 0
snapshot_times = 2
series_every = 10
"""


def main():
    out_dir = os.path.join(os.path.dirname(__file__), os.pardir, "sample_output")
    code = execute_run(parse_config(SAMPLE_CONFIG), out_dir)
    print(f"wrote {out_dir} (exit {code})")
    return code


if __name__ == "__main__":
    sys.exit(main())
