"""Built-in verification suite behind `chono verify`.

Each check returns (ok, detail). The quick level exercises the assembly
oracles, scheme identities, mass recurrences and decoupling on a 4x4 mesh in
a few seconds; the full level adds the 200-step energy-decay run and 50-step
recurrence runs for every scheme on the 20x20 mesh.
"""

import numpy as np

from . import assembly
from .diagnostics import DiagnosticsEngine, mass
from .expr import evaluate, parse
from .mesh import Domain, Mesh, build_structured
from .schemes import SchemeKind, linearize
from .stepper import Params, Stepper, initialize


def _reference_triangle():
    return Mesh(vertices=np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
                triangles=np.array([[0, 1, 2]]))


def check_local_matrices():
    mesh = _reference_triangle()
    area = 0.5
    M = assembly.mass_matrix(mesh).toarray()
    M_want = area / 12.0 * np.array([[2.0, 1, 1], [1, 2, 1], [1, 1, 2]])
    K = assembly.stiffness_matrix(mesh).toarray()
    K_want = 0.5 * np.array([[2.0, -1, -1], [-1, 1, 0], [-1, 0, 1]])
    W = assembly.weighted_mass_matrix(mesh, np.array([1.0, 0.0, 0.0])).toarray()
    W_want = area / 60.0 * np.array([[6.0, 2, 2], [2, 2, 1], [2, 1, 2]])
    err = max(np.abs(M - M_want).max(), np.abs(K - K_want).max(), np.abs(W - W_want).max())
    return err <= 1e-14, f"max deviation from closed forms {err:.2e}"


def check_mass_sum(n=4):
    domain = Domain()
    mesh = build_structured(domain, n, n)
    err = abs(assembly.mass_matrix(mesh).sum() - domain.area)
    return err <= 1e-12, f"|sum(M) - |Omega|| = {err:.2e}"


def check_stiffness_kernel(n=4):
    mesh = build_structured(Domain(), n, n)
    K = assembly.stiffness_matrix(mesh)
    err = np.abs(K @ np.ones(mesh.n_vertices)).max()
    return err <= 1e-12, f"||K 1||_inf = {err:.2e}"


def check_symmetry(n=4):
    mesh = build_structured(Domain(), n, n)
    rng = np.random.default_rng(1)
    c = rng.standard_normal(mesh.n_vertices)
    worst = 0.0
    for A in (assembly.mass_matrix(mesh), assembly.stiffness_matrix(mesh),
              assembly.weighted_mass_matrix(mesh, c)):
        worst = max(worst, np.abs(A - A.T).max())
    return worst == 0.0, f"max |A - A^T| = {worst:.2e}"


def check_weighted_linearity(n=4):
    mesh = build_structured(Domain(), n, n)
    rng = np.random.default_rng(2)
    c1 = rng.standard_normal(mesh.n_vertices)
    c2 = rng.standard_normal(mesh.n_vertices)
    a, b = 0.7, -1.3
    left = assembly.weighted_mass_matrix(mesh, a * c1 + b * c2)
    right = a * assembly.weighted_mass_matrix(mesh, c1) + b * assembly.weighted_mass_matrix(mesh, c2)
    err = np.abs(left - right).max()
    return err <= 1e-12, f"linearity deviation {err:.2e}"


def check_scheme_consistency():
    rng = np.random.default_rng(3)
    p = rng.uniform(-2.0, 2.0, 1000)
    worst = 0.0
    for kind in (SchemeKind.OD2, SchemeKind.EY, SchemeKind.LS):
        lp = linearize(kind, p)
        worst = max(worst, np.abs(lp.a * p + lp.g - (p - p**3)).max())
    q = rng.uniform(-1.0, 1.0, 1000)
    lw = linearize(SchemeKind.WVV, q)
    wvv_err = np.abs(lw.a * q + lw.g - (5.0 * q - q**3)).max()
    ok = worst <= 1e-13 and wvv_err <= 1e-13
    return ok, f"fixed-point errs: od2/ey/ls {worst:.2e}, wvv(middle) {wvv_err:.2e}"


def check_wvv_continuity():
    worst = 0.0
    for p in (-1.0, 1.0):
        mid = linearize(SchemeKind.WVV, np.array([p]))
        outer = linearize(SchemeKind.WVV, np.array([p * (1.0 + 1e-15)]))
        worst = max(worst, abs(float(mid.a[0] - outer.a[0])), abs(float(mid.g[0] - outer.g[0])))
    return worst <= 1e-12, f"branch mismatch at p=+-1: {worst:.2e}"


def check_mass_recurrence(n=4, steps=20, scheme="od2", dt=1e-3):
    mesh = build_structured(Domain(), n, n)
    M = assembly.mass_matrix(mesh)
    params = Params(dt=dt, t_end=1.0, tau_v=100.0, sigma=100.0, alpha=0.01,
                    beta=-0.9, v_bar=0.0, scheme=scheme)
    state = initialize(mesh, "sin(10*x*y)", "cos(10*(x-y))*x*y")
    stepper = Stepper(mesh, params, assembler=None)
    omega = float((M @ np.ones(mesh.n_vertices)).sum())
    worst_u = worst_v = 0.0
    for _ in range(steps):
        new = stepper.step(state)
        bound_u = 100 * params.solver_tol * max(np.linalg.norm(state.u), 1e-30)
        bound_v = 100 * params.solver_tol * max(np.linalg.norm(state.v), 1e-30)
        drift = abs(mass(M, new.u) - mass(M, state.u))
        predicted = (params.tau_v * mass(M, state.v)
                     + params.dt * params.sigma * omega * params.v_bar) \
            / (params.tau_v + params.dt * params.sigma)
        resid = abs(mass(M, new.v) - predicted)
        worst_u = max(worst_u, drift / bound_u)
        worst_v = max(worst_v, resid / bound_v)
        state = new
    ok = worst_u <= 1.0 and worst_v <= 1.0
    return ok, f"{scheme}: worst drift/bound u {worst_u:.2e}, v {worst_v:.2e}"


def check_decoupling(n=4, steps=10):
    mesh = build_structured(Domain(), n, n)
    params = Params(dt=1e-3, t_end=1.0, alpha=0.0, beta=0.0, sigma=0.3,
                    v_bar=0.0, solver_tol=1e-12)
    finals = []
    for v0 in ("cos(10*(x-y))*x*y", "sin(3*x)+0.5*y"):
        state = initialize(mesh, "sin(10*x*y)", v0)
        stepper = Stepper(mesh, params)
        for _ in range(steps):
            state = stepper.step(state)
        finals.append(state.u)
    err = np.abs(finals[0] - finals[1]).max()
    return err <= 1e-8, f"u-trajectory sensitivity to v0: {err:.2e}"


def check_expr():
    cases = [("1+2*3", 0.0, 0.0, 7.0), ("2^3^2", 0.0, 0.0, 512.0),
             ("cos(10*(x-y))*x*y", 0.5, 0.5, 0.25)]
    worst = 0.0
    for text, x, y, want in cases:
        worst = max(worst, abs(evaluate(parse(text), x, y) - want))
    return worst <= 1e-12, f"worst eval error {worst:.2e}"


def check_energy_decay(steps=200):
    mesh = build_structured(Domain(), 20, 20)
    params = Params(dt=5e-3, t_end=1.0, alpha=0.0, beta=0.0, sigma=0.0, scheme="od2")
    M = assembly.mass_matrix(mesh)
    K = assembly.stiffness_matrix(mesh)
    engine = DiagnosticsEngine(mesh, M, K, params)
    state = initialize(mesh, "sin(10*x*y)", "0")
    stepper = Stepper(mesh, params)
    energy = engine.field_energy(state.u, params.eps_u)
    worst = -np.inf
    for _ in range(steps):
        state = stepper.step(state)
        new_energy = engine.field_energy(state.u, params.eps_u)
        worst = max(worst, new_energy - energy)
        energy = new_energy
    return worst <= 1e-8, f"worst per-step energy increase {worst:.3e}"


QUICK_CHECKS = (
    ("local matrices match closed forms", check_local_matrices),
    ("mass-matrix entries sum to |Omega|", check_mass_sum),
    ("stiffness kernel contains constants", check_stiffness_kernel),
    ("assembled matrices exactly symmetric", check_symmetry),
    ("weighted mass linear in the weight", check_weighted_linearity),
    ("potential linearizations consistent", check_scheme_consistency),
    ("wvv branches continuous at +-1", check_wvv_continuity),
    ("u-mass conserved / v-mass recurrence", check_mass_recurrence),
    ("u decoupled from v0 when alpha=beta=0", check_decoupling),
    ("expression parser sanity", check_expr),
)

FULL_CHECKS = QUICK_CHECKS + (
    ("od2 energy decay over 200 steps", check_energy_decay),
    ("recurrence, 20x20, od2", lambda: check_mass_recurrence(n=20, steps=50, scheme="od2")),
    ("recurrence, 20x20, ls", lambda: check_mass_recurrence(n=20, steps=50, scheme="ls", dt=1e-4)),
    ("recurrence, 20x20, ey", lambda: check_mass_recurrence(n=20, steps=50, scheme="ey", dt=1e-4)),
    ("recurrence, 20x20, wvv", lambda: check_mass_recurrence(n=20, steps=50, scheme="wvv", dt=1e-5)),
)


def run_checks(level="quick", report=print):
    checks = QUICK_CHECKS if level == "quick" else FULL_CHECKS
    all_ok = True
    for name, fn in checks:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        all_ok &= ok
        report(f"{'PASS' if ok else 'FAIL'}  {name}  [{detail}]")
    return all_ok
