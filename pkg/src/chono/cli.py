"""Command-line entry point: run, compare, sweep, verify, mesh-info.

Exit codes are stable: 0 success, 1 configuration error, 2 linear-solver
failure, 3 blow-up (non-finite solution), 4 verification failure.
"""

import argparse
import dataclasses
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import expr as expr_mod
from . import io as io_mod
from . import selfcheck
from .assembly import mass_matrix
from .diagnostics import DiagnosticsEngine
from .io import ConfigError
from .mesh import Domain, build_structured
from .stepper import LinearSolveFailure, NonFiniteState, Stepper, initialize, run

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2
EXIT_BLOWUP = 3
EXIT_VERIFY = 4

# |u| or |v| beyond this counts as an observed blow-up in compare summaries
BLOWUP_THRESHOLD = 1e3

_SWEEPABLE = ("tau_u", "tau_v", "eps_u", "eps_v", "alpha", "beta", "sigma",
              "v_bar", "dt", "stab", "t_end")


def _prepare(cfg):
    """Mesh, initial state and fully resolved Params for a config."""
    mesh = build_structured(cfg.domain(), cfg.nx, cfg.ny)
    state0 = initialize(mesh, cfg.u0, cfg.v0)
    if cfg.v_bar == "auto":
        M = mass_matrix(mesh)
        v_bar = float((M @ state0.v).sum()) / cfg.domain().area
    else:
        v_bar = float(cfg.v_bar)
    return mesh, state0, cfg.to_params(v_bar)


def execute_run(cfg, out_dir, snapshot_format="csv", fields=("u", "v")):
    """Run one simulation, writing series.csv, snapshots and a config echo."""
    os.makedirs(out_dir, exist_ok=True)
    mesh, state0, params = _prepare(cfg)
    formats = ("csv", "vtk") if snapshot_format == "both" else (snapshot_format,)

    def on_snapshot(state):
        for name in fields:
            snap = io_mod.make_snapshot(mesh, state, name)
            for fmt in formats:
                path = os.path.join(out_dir, f"snapshot_{name}_t{state.t:g}.{fmt}")
                io_mod.write_snapshot(snap, fmt, path)

    exit_code = EXIT_OK
    try:
        _, records = run(mesh, params, state0.u, state0.v,
                         series_every=cfg.series_every,
                         snapshot_times=cfg.snapshot_times,
                         on_snapshot=on_snapshot)
    except LinearSolveFailure as exc:
        records = exc.series
        print(f"linear solver failed at step {exc.step}: {exc}", file=sys.stderr)
        exit_code = EXIT_SOLVER
    except NonFiniteState as exc:
        records = exc.series
        print(f"blow-up at step {exc.step}: {exc}", file=sys.stderr)
        exit_code = EXIT_BLOWUP
    io_mod.write_series(records, os.path.join(out_dir, "series.csv"))
    with open(os.path.join(out_dir, "run_config.cfg"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(io_mod.dump_config(cfg))
    return exit_code


def _watched_run(cfg):
    """Step a run to completion or until blow-up; returns a compare-table row."""
    mesh, state, params = _prepare(cfg)
    stepper = Stepper(mesh, params)
    engine = DiagnosticsEngine(mesh, stepper.M, stepper.K, params, assembler=stepper.asm)
    n = params.n_steps
    every = max(1, n // 50)
    last = engine.record(state)
    status = "ok"
    steps_done = 0
    try:
        for k in range(1, n + 1):
            state = stepper.step(state)
            steps_done = k
            if max(np.abs(state.u).max(), np.abs(state.v).max()) > BLOWUP_THRESHOLD:
                status = "blowup"
                break
            if k % every == 0 or k == n:
                last = engine.record(state)
    except NonFiniteState:
        status = "blowup"
    except LinearSolveFailure:
        status = "solver_failure"
    completed = status == "ok" and steps_done == n
    return {
        "scheme": params.scheme.value,
        "dt": params.dt,
        "completed": completed,
        "steps": steps_done,
        "status": status,
        "final_mass_u": last.mass_u,
        "final_mass_v": last.mass_v,
        "final_energy": last.energy,
    }


def cmd_run(args):
    try:
        cfg = io_mod.load_config(args.config)
        if args.dump_config:
            print(io_mod.dump_config(cfg), end="")
            return EXIT_OK
        out_dir = io_mod.resolve_output_dir(cfg.output_dir, args.output)
        return execute_run(cfg, out_dir, snapshot_format=args.snapshot_format,
                           fields=tuple(args.fields.split(",")))
    except (ConfigError, OSError, expr_mod.ParseError, expr_mod.EvalError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def cmd_compare(args):
    try:
        cfg = io_mod.load_config(args.config)
        schemes = [s.strip() for s in args.schemes.split(",") if s.strip()]
        dts = [float(s) for s in args.dts.split(",") if s.strip()]
        if not schemes or not dts:
            raise ConfigError("empty --schemes or --dts list")
        if len(schemes) == 1:
            schemes = schemes * len(dts)
        if len(dts) == 1:
            dts = dts * len(schemes)
        if len(schemes) != len(dts):
            raise ConfigError(f"cannot pair {len(schemes)} schemes with {len(dts)} dts")
        pairs = list(zip(schemes, dts))
        out_dir = io_mod.resolve_output_dir(cfg.output_dir, args.output)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    os.makedirs(out_dir, exist_ok=True)
    header = "scheme,dt,completed,steps,status,final_mass_u,final_mass_v,final_energy"
    lines = [header]
    for scheme, dt in pairs:
        row = _watched_run(dataclasses.replace(cfg, scheme=scheme, dt=dt))
        lines.append(",".join([
            row["scheme"], f"{row['dt']:.17g}", str(row["completed"]).lower(),
            str(row["steps"]), row["status"], f"{row['final_mass_u']:.17g}",
            f"{row['final_mass_v']:.17g}", f"{row['final_energy']:.17g}",
        ]))
    table = "\n".join(lines) + "\n"
    with open(os.path.join(out_dir, "compare.csv"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(table)
    print(table, end="")
    return EXIT_OK


def _sweep_value(base_cfg, param, raw_value, out_root, snapshot_format):
    if param == "v_bar" and raw_value == "auto":
        value = "auto"
        label = "auto"
    else:
        value = float(raw_value)
        label = f"{value:g}"
    cfg = dataclasses.replace(base_cfg, **{param: value})
    cfg.validate()
    run_dir = os.path.join(out_root, f"{param}_{label}")
    code = execute_run(cfg, run_dir, snapshot_format=snapshot_format)
    return label, run_dir, code


def cmd_sweep(args):
    try:
        cfg = io_mod.load_config(args.config)
        if args.param not in _SWEEPABLE:
            raise ConfigError(f"--param must be one of {', '.join(_SWEEPABLE)}", key=args.param)
        raw_values = [s.strip() for s in args.values.split(",") if s.strip()]
        if not raw_values:
            raise ConfigError("empty --values list")
        out_root = io_mod.resolve_output_dir(cfg.output_dir, args.output)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    os.makedirs(out_root, exist_ok=True)
    jobs = [(cfg, args.param, raw, out_root, args.snapshot_format) for raw in raw_values]
    try:
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(_sweep_worker, jobs))
        else:
            results = [_sweep_worker(job) for job in jobs]
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    status_name = {EXIT_OK: "ok", EXIT_SOLVER: "solver_failure", EXIT_BLOWUP: "blowup"}
    lines = ["param,value,path,status"]
    for (raw, (label, run_dir, code)) in zip(raw_values, results):
        lines.append(f"{args.param},{label},{run_dir},{status_name.get(code, str(code))}")
    manifest = "\n".join(lines) + "\n"
    with open(os.path.join(out_root, "sweep_manifest.csv"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(manifest)
    print(manifest, end="")
    return max((code for (_, _, code) in results), default=EXIT_OK)


def _sweep_worker(job):
    return _sweep_value(*job)


def cmd_verify(args):
    ok = selfcheck.run_checks(level=args.level)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_mesh_info(args):
    try:
        if args.config:
            cfg = io_mod.load_config(args.config)
            domain, nx, ny = cfg.domain(), cfg.nx, cfg.ny
        else:
            if args.nx is None or args.ny is None:
                raise ConfigError("provide --config or both --nx and --ny")
            domain = Domain(args.x_min, args.x_max, args.y_min, args.y_max)
            nx, ny = args.nx, args.ny
        mesh = build_structured(domain, nx, ny)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"domain:    ({domain.x_min}, {domain.x_max}) x ({domain.y_min}, {domain.y_max})")
    print(f"grid:      {nx} x {ny}")
    print(f"vertices:  {mesh.n_vertices}")
    print(f"triangles: {mesh.n_triangles}")
    print(f"h:         {mesh.h:.17g}")
    print(f"area:      {domain.area:.17g}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="chono",
        description="Coupled Cahn-Hilliard / Cahn-Hilliard-Ono finite-element solver",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one simulation run")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--dump-config", action="store_true",
                       help="echo the parsed config (with defaults) and exit")
    p_run.add_argument("--output", help="override the config output_dir")
    p_run.add_argument("--snapshot-format", choices=("csv", "vtk", "both"), default="csv")
    p_run.add_argument("--fields", default="u,v", help="comma list of fields to snapshot")
    p_run.set_defaults(func=cmd_run)

    p_cmp = sub.add_parser("compare", help="run (scheme, dt) pairs on the same initial data")
    p_cmp.add_argument("--config", required=True)
    p_cmp.add_argument("--schemes", required=True, help="comma list, e.g. od2,ls,ey")
    p_cmp.add_argument("--dts", required=True, help="comma list, e.g. 5e-3,1e-4,1e-4")
    p_cmp.add_argument("--output", help="override the config output_dir")
    p_cmp.set_defaults(func=cmd_compare)

    p_sw = sub.add_parser("sweep", help="one run per parameter value")
    p_sw.add_argument("--config", required=True)
    p_sw.add_argument("--param", required=True, help=f"one of {', '.join(_SWEEPABLE)}")
    p_sw.add_argument("--values", required=True, help="comma list of values")
    p_sw.add_argument("--jobs", type=int, default=1, help="parallel value-runs")
    p_sw.add_argument("--snapshot-format", choices=("csv", "vtk", "both"), default="csv")
    p_sw.add_argument("--output", help="override the config output_dir")
    p_sw.set_defaults(func=cmd_sweep)

    p_ver = sub.add_parser("verify", help="run the built-in verification suite")
    p_ver.add_argument("--level", choices=("quick", "full"), default="quick")
    p_ver.set_defaults(func=cmd_verify)

    p_mi = sub.add_parser("mesh-info", help="print mesh statistics")
    p_mi.add_argument("--config")
    p_mi.add_argument("--nx", type=int)
    p_mi.add_argument("--ny", type=int)
    p_mi.add_argument("--x-min", type=float, default=0.0)
    p_mi.add_argument("--x-max", type=float, default=1.0)
    p_mi.add_argument("--y-min", type=float, default=0.0)
    p_mi.add_argument("--y-max", type=float, default=1.0)
    p_mi.set_defaults(func=cmd_mesh_info)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
