"""Run configuration files, time-series CSV, and field snapshots (CSV / VTK).

Config grammar (line oriented):

    key = value          # '#' starts a comment
    u0 = "sin(10*x*y)"   # strings are double-quoted
    snapshot_times = 3, 6, 15
    tag.note = "anything"   # tag.* keys collect into the free-form tag map

Unknown or duplicate keys are errors. `nx`, `ny`, `dt`, `t_end` are required;
every other key has a default (see DEFAULTS). `v_bar = auto` resolves at run
start to the discrete mass of the initial v divided by the domain area, which
is the exactly-conserved choice.

Reals are written with 17 significant digits everywhere, so CSV and config
round-trips are lossless for doubles.
"""

import dataclasses
import os
from dataclasses import dataclass, field

import numpy as np

from .diagnostics import TimeSeriesRecord
from .mesh import Domain, Mesh
from .schemes import SchemeKind
from .stepper import Params


class ConfigError(ValueError):
    def __init__(self, message, line=None, key=None):
        where = f" (line {line})" if line is not None else ""
        what = f"key {key!r}: " if key else ""
        super().__init__(f"{what}{message}{where}")
        self.line = line
        self.key = key


def _fmt(x: float) -> str:
    return f"{x:.17g}"


@dataclass
class RunConfig:
    """Everything needed to reproduce one simulation run."""

    nx: int
    ny: int
    dt: float
    t_end: float
    x_min: float = 0.0
    x_max: float = 1.0
    y_min: float = 0.0
    y_max: float = 1.0
    tau_u: float = 1.0
    tau_v: float = 1.0
    eps_u: float = 0.05
    eps_v: float = 0.05
    alpha: float = 0.0
    beta: float = 0.0
    sigma: float = 0.0
    v_bar: float | str = "auto"
    scheme: str = "od2"
    stab: float = 0.0
    solver_tol: float = 1e-10
    solver_max_iter: int = 50
    u0: str = "sin(10*x*y)"
    v0: str = "cos(10*(x-y))*x*y"
    snapshot_times: tuple = ()
    series_every: int = 1
    output_dir: str = "out"
    tags: dict = field(default_factory=dict)

    def domain(self) -> Domain:
        return Domain(self.x_min, self.x_max, self.y_min, self.y_max)

    def to_params(self, v_bar: float) -> Params:
        return Params(
            dt=self.dt, t_end=self.t_end, tau_u=self.tau_u, tau_v=self.tau_v,
            eps_u=self.eps_u, eps_v=self.eps_v, alpha=self.alpha, beta=self.beta,
            sigma=self.sigma, v_bar=v_bar, scheme=SchemeKind.from_name(self.scheme),
            stab=self.stab, solver_tol=self.solver_tol,
            solver_max_iter=self.solver_max_iter,
        )

    def validate(self):
        try:
            self.domain()
            self.to_params(0.0 if self.v_bar == "auto" else float(self.v_bar))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.nx < 1 or self.ny < 1:
            raise ConfigError(f"nx and ny must be >= 1, got {self.nx}, {self.ny}")
        if self.series_every < 1:
            raise ConfigError(f"series_every must be >= 1, got {self.series_every}")
        for t in self.snapshot_times:
            if not 0.0 <= t <= self.t_end:
                raise ConfigError(f"snapshot time {t} outside [0, {self.t_end}]")
        if isinstance(self.v_bar, str) and self.v_bar != "auto":
            raise ConfigError(f"v_bar must be a number or 'auto', got {self.v_bar!r}")
        return self


_INT_KEYS = {"nx", "ny", "series_every", "solver_max_iter"}
_FLOAT_KEYS = {"x_min", "x_max", "y_min", "y_max", "tau_u", "tau_v", "eps_u",
               "eps_v", "alpha", "beta", "sigma", "dt", "t_end", "stab", "solver_tol"}
_STR_KEYS = {"scheme", "u0", "v0", "output_dir"}
_REQUIRED = ("nx", "ny", "dt", "t_end")


def _strip_comment(line):
    out = []
    quoted = False
    for ch in line:
        if ch == '"':
            quoted = not quoted
        if ch == "#" and not quoted:
            break
        out.append(ch)
    return "".join(out)


def _parse_scalar(raw, lineno, key):
    raw = raw.strip()
    if raw.startswith('"'):
        if not (len(raw) >= 2 and raw.endswith('"')):
            raise ConfigError("unterminated string", line=lineno, key=key)
        return raw[1:-1]
    return raw


def parse_config(text, source="<config>") -> RunConfig:
    values = {}
    tags = {}
    lines = {}
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = _strip_comment(rawline).strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, _, raw = line.partition("=")
        key = key.strip()
        if key in values or key in tags:
            raise ConfigError("duplicate key", line=lineno, key=key)
        if key.startswith("tag."):
            tags[key[4:]] = _parse_scalar(raw, lineno, key)
            continue
        try:
            if key in _INT_KEYS:
                values[key] = int(_parse_scalar(raw, lineno, key))
            elif key in _FLOAT_KEYS:
                values[key] = float(_parse_scalar(raw, lineno, key))
            elif key in _STR_KEYS:
                values[key] = _parse_scalar(raw, lineno, key)
            elif key == "v_bar":
                token = _parse_scalar(raw, lineno, key)
                values[key] = "auto" if token == "auto" else float(token)
            elif key == "snapshot_times":
                parts = [p for p in raw.split(",") if p.strip()]
                values[key] = tuple(float(p) for p in parts)
            else:
                raise ConfigError("unknown key", line=lineno, key=key)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"bad value: {exc}", line=lineno, key=key) from exc
        lines[key] = lineno
    for key in _REQUIRED:
        if key not in values:
            raise ConfigError(f"missing required key in {source}", key=key)
    cfg = RunConfig(tags=tags, **values)
    try:
        return cfg.validate()
    except ConfigError as exc:
        if exc.line is None and exc.key in lines:
            raise ConfigError(str(exc), line=lines[exc.key], key=exc.key) from exc
        raise


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read(), source=str(path))


def dump_config(cfg: RunConfig) -> str:
    """Config text that parses back to an equivalent RunConfig."""
    out = []
    for f in dataclasses.fields(cfg):
        value = getattr(cfg, f.name)
        if f.name == "tags":
            for k in sorted(value):
                out.append(f'tag.{k} = "{value[k]}"')
        elif f.name == "snapshot_times":
            if value:
                out.append(f"snapshot_times = {', '.join(_fmt(t) for t in value)}")
        elif f.name in _STR_KEYS:
            out.append(f'{f.name} = "{value}"')
        elif f.name == "v_bar":
            out.append(f"v_bar = {value if value == 'auto' else _fmt(value)}")
        elif f.name in _INT_KEYS:
            out.append(f"{f.name} = {value}")
        else:
            out.append(f"{f.name} = {_fmt(value)}")
    return "\n".join(out) + "\n"


SERIES_HEADER = "t,mass_u,mass_v,energy,energy_nonlocal,u_min,u_max,v_min,v_max"


def series_text(records) -> str:
    lines = [SERIES_HEADER]
    for r in records:
        lines.append(",".join(_fmt(x) for x in (
            r.t, r.mass_u, r.mass_v, r.energy, r.energy_nonlocal,
            r.u_min, r.u_max, r.v_min, r.v_max)))
    return "\n".join(lines) + "\n"


def write_series(records, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(series_text(records))


def read_series(path):
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != SERIES_HEADER:
            raise ValueError(f"unexpected series header {header!r} in {path}")
        records = []
        for line in fh:
            if not line.strip():
                continue
            records.append(TimeSeriesRecord(*(float(x) for x in line.split(","))))
    return records


@dataclass
class Snapshot:
    """One nodal field frozen at one completed step time."""

    t: float
    name: str
    x: np.ndarray
    y: np.ndarray
    values: np.ndarray
    triangles: np.ndarray | None = None  # required for the VTK variant

    def __post_init__(self):
        if not (len(self.x) == len(self.y) == len(self.values)):
            raise ValueError("snapshot arrays must have equal length")


def make_snapshot(mesh: Mesh, state, name: str) -> Snapshot:
    fields = {"u": state.u, "v": state.v, "w_u": state.w_u, "w_v": state.w_v}
    if name not in fields:
        raise ValueError(f"unknown field {name!r} (expected one of {sorted(fields)})")
    return Snapshot(
        t=state.t, name=name,
        x=mesh.vertices[:, 0].copy(), y=mesh.vertices[:, 1].copy(),
        values=np.asarray(fields[name], dtype=float).copy(),
        triangles=mesh.triangles,
    )


def write_snapshot(snap: Snapshot, fmt: str, path):
    if fmt == "csv":
        lines = ["x,y,value"]
        for x, y, val in zip(snap.x, snap.y, snap.values):
            lines.append(f"{_fmt(x)},{_fmt(y)},{_fmt(val)}")
        text = "\n".join(lines) + "\n"
    elif fmt == "vtk":
        if snap.triangles is None:
            raise ValueError("VTK output needs snapshot connectivity")
        tris = snap.triangles
        lines = [
            "# vtk DataFile Version 3.0",
            f"{snap.name} at t={_fmt(snap.t)}",
            "ASCII",
            "DATASET UNSTRUCTURED_GRID",
            f"POINTS {len(snap.x)} double",
        ]
        lines += [f"{_fmt(x)} {_fmt(y)} 0" for x, y in zip(snap.x, snap.y)]
        lines.append(f"CELLS {len(tris)} {4 * len(tris)}")
        lines += [f"3 {a} {b} {c}" for a, b, c in tris]
        lines.append(f"CELL_TYPES {len(tris)}")
        lines += ["5"] * len(tris)
        lines.append(f"POINT_DATA {len(snap.x)}")
        lines.append(f"SCALARS {snap.name} double 1")
        lines.append("LOOKUP_TABLE default")
        lines += [_fmt(v) for v in snap.values]
        text = "\n".join(lines) + "\n"
    else:
        raise ValueError(f"unknown snapshot format {fmt!r} (expected csv or vtk)")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def read_snapshot_csv(path):
    """(x, y, values) arrays from a snapshot CSV; bit-exact round trip."""
    xs, ys, vals = [], [], []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "x,y,value":
            raise ValueError(f"unexpected snapshot header {header!r} in {path}")
        for line in fh:
            if not line.strip():
                continue
            x, y, val = line.split(",")
            xs.append(float(x))
            ys.append(float(y))
            vals.append(float(val))
    return np.array(xs), np.array(ys), np.array(vals)


def resolve_output_dir(cfg_dir: str, override=None) -> str:
    """Output directory: CLI override > config value, under CHONO_OUTPUT_ROOT if relative."""
    out = override if override else cfg_dir
    root = os.environ.get("CHONO_OUTPUT_ROOT")
    if root and not os.path.isabs(out):
        out = os.path.join(root, out)
    return out
