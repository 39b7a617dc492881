#!/usr/bin/env python3
"""Parameter studies on the 20x20 grid: one sweep per bundled sweep_* config.

Each sweep writes per-value run directories (series.csv plus u/v snapshots at
the configured times) and a sweep_manifest.csv. Expect a few minutes per
study at 3000 steps per run; use --jobs to parallelize across values.
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))

from chono.cli import main as chono_main

CONFIG_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "configs")

SWEEPS = [
    ("sweep_tau_v.cfg", "tau_v", "10,250"),
    ("sweep_eps_v.cfg", "eps_v", "0.01,0.03,0.05"),
    ("sweep_sigma.cfg", "sigma", "0,50,150"),
    ("sweep_beta.cfg", "beta", "-0.3,-0.5,-0.9"),
    ("sweep_alpha.cfg", "alpha", "-0.4,-0.08,0.01,0.1,0.4"),
]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--only", help="substring filter on the config name")
    args = parser.parse_args()

    worst = 0
    for config, param, values in SWEEPS:
        if args.only and args.only not in config:
            continue
        print(f"== sweep {param} from {config} ==", flush=True)
        code = chono_main([
            "sweep", "--config", os.path.join(CONFIG_DIR, config),
            "--param", param, "--values", values, "--jobs", str(args.jobs),
        ])
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
