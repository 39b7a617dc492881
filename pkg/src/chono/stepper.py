"""Semi-implicit time stepping of the coupled 4-field system.

Each step solves one sparse linear system in X = (u', w_u', v', w_v'), all
blocks N x N on the P1 vertex basis:

    row 1:  (tau_u/dt) M u' - K w_u'                                  = (tau_u/dt) M u
    row 2:  (ci_u K - M_au) u' + M w_u' + (alpha M + beta M_v) v'     = M g_u - ce_u K u
    row 3:  ((tau_v/dt + sigma) M) v' - K w_v'                        = (tau_v/dt) M v + sigma vbar M 1
    row 4:  alpha M u' + (ci_v K - M_av + 2 beta M_u) v' + M w_v'     = M g_v - ce_v K v

where (a, g) come from the selected potential linearization, M_c denotes the
mass matrix weighted by the P1 interpolant of nodal data c (the quadratic
coupling terms are lagged: v^2 -> v_old * v_new, u v -> u_old * v_new), and
(ci, ce) are the implicit/explicit stiffness coefficients of the scheme's
gradient split (ce = 0 except for WVV).

Left-multiplying row 1 by the all-ones vector shows the discrete u-mass is
conserved exactly (K 1 = 0); row 3 gives the exact affine recurrence
m' = (tau_v m + dt sigma |Omega| vbar) / (tau_v + dt sigma) for the v-mass.
Both identities hold for every scheme up to the linear-solve residual and are
enforced in the test suite.

The system is nonsymmetric and indefinite. It is solved by sparse LU with a
frozen-factorization strategy: the factorization of a recent step's matrix is
reused as a preconditioner via iterative refinement and refreshed whenever
refinement stalls; the relative residual contract ||AX - b|| <= tol ||b|| is
verified on every step regardless, with a fresh direct solve as fallback.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from . import expr as expr_mod
from .assembly import Assembler
from .mesh import Mesh
from .schemes import SchemeKind, gradient_split, linearize


class LinearSolveFailure(RuntimeError):
    """The linear solver could not reach the requested residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
        self.step = None


class NonFiniteState(FloatingPointError):
    """A step produced non-finite values: the discrete solution blew up."""

    def __init__(self, message="non-finite state"):
        super().__init__(message)
        self.step = None


@dataclass(frozen=True)
class Params:
    """Physical and numerical constants of one simulation run."""

    dt: float
    t_end: float
    tau_u: float = 1.0
    tau_v: float = 1.0
    eps_u: float = 0.05
    eps_v: float = 0.05
    alpha: float = 0.0
    beta: float = 0.0
    sigma: float = 0.0
    v_bar: float = 0.0
    scheme: SchemeKind = SchemeKind.OD2
    stab: float = 0.0
    solver_tol: float = 1e-10
    solver_max_iter: int = 50

    def __post_init__(self):
        if isinstance(self.scheme, str):
            object.__setattr__(self, "scheme", SchemeKind.from_name(self.scheme))
        for name in ("tau_u", "tau_v", "eps_u", "eps_v", "dt", "t_end", "solver_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if self.stab < 0:
            raise ValueError(f"stab must be >= 0, got {self.stab}")
        if self.solver_max_iter < 1:
            raise ValueError(f"solver_max_iter must be >= 1, got {self.solver_max_iter}")
        if self.dt > self.t_end:
            raise ValueError(f"dt={self.dt} exceeds t_end={self.t_end}")
        self.n_steps  # reject time grids with a remainder

    @property
    def n_steps(self) -> int:
        """Number of steps; t_end must be an integer multiple of dt."""
        ratio = self.t_end / self.dt
        n = round(ratio)
        if n < 1 or abs(ratio - n) > 1e-9 * max(n, 1):
            raise ValueError(
                f"t_end={self.t_end} is not an integer multiple of dt={self.dt}"
            )
        return n


@dataclass
class State:
    """Nodal fields and clock after k steps (t = k*dt)."""

    u: np.ndarray
    w_u: np.ndarray
    v: np.ndarray
    w_v: np.ndarray
    k: int = 0
    t: float = 0.0


def initialize(mesh: Mesh, u0, v0) -> State:
    """Interpolate initial data at the vertices; chemical potentials start at 0.

    u0 and v0 may be expression text, a parsed expression AST, or a nodal array.
    """
    u = _nodal_field(mesh, u0)
    v = _nodal_field(mesh, v0)
    zeros = np.zeros(mesh.n_vertices)
    return State(u=u, w_u=zeros.copy(), v=v, w_v=zeros.copy(), k=0, t=0.0)


def _nodal_field(mesh, source):
    if isinstance(source, np.ndarray):
        values = np.asarray(source, dtype=float).copy()
        if values.shape != (mesh.n_vertices,):
            raise ValueError(f"field shape {values.shape} != ({mesh.n_vertices},)")
        if not np.isfinite(values).all():
            raise ValueError("initial field contains non-finite values")
        return values
    node = expr_mod.parse(source) if isinstance(source, str) else source
    values = np.empty(mesh.n_vertices)
    for i, (x, y) in enumerate(mesh.vertices):
        values[i] = expr_mod.evaluate(node, x, y)
    return values


def solve_linear(A, b, tol: float = 1e-10, max_iter: int = 50) -> np.ndarray:
    """Direct sparse solve with iterative refinement to a relative residual <= tol."""
    A = sp.csc_matrix(A)
    b = np.asarray(b, dtype=float)
    try:
        lu = splu(A)
    except RuntimeError as exc:  # singular factorization
        raise LinearSolveFailure(f"factorization failed: {exc}") from exc
    x = lu.solve(b)
    norm_b = np.linalg.norm(b)
    for _ in range(max_iter):
        residual = b - A @ x
        rel = np.linalg.norm(residual) / norm_b if norm_b > 0 else np.linalg.norm(residual)
        if rel <= tol or not np.isfinite(rel):
            break
        x = x + lu.solve(residual)
    residual = b - A @ x
    rel = np.linalg.norm(residual) / norm_b if norm_b > 0 else np.linalg.norm(residual)
    if not rel <= tol:
        raise LinearSolveFailure(f"residual {rel:.3e} > tol {tol:.3e}", residual=rel)
    return x


# block layout of the 4N x 4N system; every block shares the mesh adjacency
# pattern: (block_row, block_col, constant-across-steps?)
_BLOCKS = (
    (0, 0, True),   # (tau_u/dt) M
    (0, 1, True),   # -K
    (1, 0, False),  # ci_u K - M_au
    (1, 1, True),   # M
    (1, 2, False),  # alpha M + beta M_v
    (2, 2, True),   # (tau_v/dt + sigma) M
    (2, 3, True),   # -K
    (3, 0, True),   # alpha M
    (3, 2, False),  # ci_v K - M_av + 2 beta M_u
    (3, 3, True),   # M
)


class Stepper:
    """Per-run state: assembled operators, block template, frozen LU."""

    # refinement sweeps with a stale factorization before refactoring
    _STALE_TRIES = 4

    def __init__(self, mesh: Mesh, params: Params, M=None, K=None, assembler=None):
        self.mesh = mesh
        self.params = params
        self.asm = assembler if assembler is not None else Assembler(mesh)
        n = mesh.n_vertices
        if M is not None and M.shape != (n, n):
            raise ValueError(f"M has shape {M.shape}, expected {(n, n)}")
        if K is not None and K.shape != (n, n):
            raise ValueError(f"K has shape {K.shape}, expected {(n, n)}")
        self.n = n
        self.M = self.asm.mass_matrix()
        self.K = self.asm.stiffness_matrix()
        self.m_ones = self.M @ np.ones(n)

        self.split_u = gradient_split(params.scheme, params.eps_u, params.stab)
        self.split_v = gradient_split(params.scheme, params.eps_v, params.stab)

        nnz = self.asm.nnz
        self._seg = {}  # (row, col) -> slice into the stacked block data
        grid = [[None] * 4 for _ in range(4)]
        for b, (r, c, _) in enumerate(_BLOCKS):
            self._seg[(r, c)] = slice(b * nnz, (b + 1) * nnz)
            codes = np.arange(b * nnz, (b + 1) * nnz, dtype=float)
            grid[r][c] = sp.csr_matrix((codes, self.asm.indices, self.asm.indptr), shape=(n, n))
        template = sp.bmat(grid, format="csc")
        self._perm = template.data.astype(np.int64)
        self._indices = template.indices
        self._indptr = template.indptr
        self._data = np.empty(len(_BLOCKS) * nnz)
        self._fill_constant_blocks()
        self._lu = None

    def _fill_constant_blocks(self):
        p = self.params
        d_M = self.asm.mass_data
        d_K = self.asm.stiffness_data
        seg = self._seg
        data = self._data
        data[seg[(0, 0)]] = (p.tau_u / p.dt) * d_M
        data[seg[(0, 1)]] = -d_K
        data[seg[(1, 1)]] = d_M
        data[seg[(2, 2)]] = (p.tau_v / p.dt + p.sigma) * d_M
        data[seg[(2, 3)]] = -d_K
        data[seg[(3, 0)]] = p.alpha * d_M
        data[seg[(3, 3)]] = d_M

    def _assemble(self, state):
        """Fill state-dependent blocks and the right-hand side; returns (A, b)."""
        p = self.params
        asm = self.asm
        d_M = asm.mass_data
        d_K = asm.stiffness_data
        seg = self._seg
        data = self._data

        lp_u = linearize(p.scheme, state.u)
        lp_v = linearize(p.scheme, state.v)
        data[seg[(1, 0)]] = self.split_u.c_implicit * d_K - asm.weighted_mass_data(lp_u.a)
        data[seg[(3, 2)]] = self.split_v.c_implicit * d_K - asm.weighted_mass_data(lp_v.a)
        if p.beta != 0.0:
            data[seg[(1, 2)]] = p.alpha * d_M + p.beta * asm.weighted_mass_data(state.v)
            data[seg[(3, 2)]] += 2.0 * p.beta * asm.weighted_mass_data(state.u)
        else:
            data[seg[(1, 2)]] = p.alpha * d_M

        b = np.empty(4 * self.n)
        n = self.n
        b[0:n] = (p.tau_u / p.dt) * (self.M @ state.u)
        b[n:2 * n] = self.M @ lp_u.g
        if self.split_u.c_explicit != 0.0:
            b[n:2 * n] -= self.split_u.c_explicit * (self.K @ state.u)
        b[2 * n:3 * n] = (p.tau_v / p.dt) * (self.M @ state.v) + p.sigma * p.v_bar * self.m_ones
        b[3 * n:4 * n] = self.M @ lp_v.g
        if self.split_v.c_explicit != 0.0:
            b[3 * n:4 * n] -= self.split_v.c_explicit * (self.K @ state.v)

        A = sp.csc_matrix(
            (self._data[self._perm], self._indices, self._indptr),
            shape=(4 * n, 4 * n),
        )
        return A, b

    def _solve(self, A, b):
        p = self.params
        norm_b = np.linalg.norm(b)

        def rel_residual(x):
            r = b - A @ x
            nr = np.linalg.norm(r)
            return (nr / norm_b if norm_b > 0 else nr), r

        iters_left = p.solver_max_iter
        if self._lu is not None:
            x = self._lu.solve(b)
            rel, r = rel_residual(x)
            prev = np.inf
            tries = 0
            while rel > p.solver_tol and np.isfinite(rel) and rel < prev \
                    and tries < self._STALE_TRIES and iters_left > 0:
                prev = rel
                x = x + self._lu.solve(r)
                rel, r = rel_residual(x)
                tries += 1
                iters_left -= 1
            if rel <= p.solver_tol:
                return x
        # stale factorization missing or insufficient: refactor
        try:
            self._lu = splu(A)
        except RuntimeError as exc:
            raise LinearSolveFailure(f"factorization failed: {exc}") from exc
        x = self._lu.solve(b)
        rel, r = rel_residual(x)
        if not (np.isfinite(x).all() and np.isfinite(rel)):
            # A and b are finite, so a fresh direct solve overflowing double
            # range means the discrete solution is blowing up, not the solver
            raise NonFiniteState("linear solve overflowed")
        while rel > p.solver_tol and iters_left > 0:
            trial = x + self._lu.solve(r)
            new_rel, new_r = rel_residual(trial)
            if not np.isfinite(new_rel) or new_rel >= rel:
                break  # discard the non-improving trial
            x, rel, r = trial, new_rel, new_r
            iters_left -= 1
        if not rel <= p.solver_tol:
            raise LinearSolveFailure(f"residual {rel:.3e} > tol {p.solver_tol:.3e}", residual=rel)
        return x

    def step(self, state: State) -> State:
        with np.errstate(over="ignore", invalid="ignore"):
            A, b = self._assemble(state)
            if not (np.isfinite(b).all() and np.isfinite(self._data).all()):
                raise NonFiniteState("assembled system contains non-finite values")
            x = self._solve(A, b)
        if not np.isfinite(x).all():
            raise NonFiniteState("step produced non-finite values")
        n = self.n
        return State(
            u=x[0:n].copy(),
            w_u=x[n:2 * n].copy(),
            v=x[2 * n:3 * n].copy(),
            w_v=x[3 * n:4 * n].copy(),
            k=state.k + 1,
            t=(state.k + 1) * self.params.dt,
        )


def step(state: State, params: Params, mesh: Mesh, M=None, K=None) -> State:
    """One semi-implicit step; convenience wrapper building a fresh Stepper."""
    return Stepper(mesh, params, M=M, K=K).step(state)


def run(mesh: Mesh, params: Params, u0, v0, *, series_every: int = 1,
        snapshot_times=(), on_record=None, on_snapshot=None):
    """March n_steps steps, collecting diagnostics records along the way.

    Returns (final_state, records). Diagnostics are recorded at step 0, every
    series_every-th step and the final step; on_snapshot fires at the steps
    nearest the requested snapshot times. Step failures are re-raised with
    .step set to the failing step index and .series set to the records
    collected so far.
    """
    from .diagnostics import DiagnosticsEngine

    if series_every < 1:
        raise ValueError(f"series_every must be >= 1, got {series_every}")
    n = params.n_steps
    snap_steps = {}
    for t_req in snapshot_times:
        if not 0.0 <= t_req <= params.t_end:
            raise ValueError(f"snapshot time {t_req} outside [0, {params.t_end}]")
        snap_steps.setdefault(round(t_req / params.dt), t_req)

    asm = Assembler(mesh)
    stepper = Stepper(mesh, params, assembler=asm)
    engine = DiagnosticsEngine(mesh, stepper.M, stepper.K, params, assembler=asm)
    state = initialize(mesh, u0, v0)

    records = [engine.record(state)]
    if on_record is not None:
        on_record(records[-1])
    if 0 in snap_steps and on_snapshot is not None:
        on_snapshot(state)

    for k in range(1, n + 1):
        try:
            state = stepper.step(state)
            if k % series_every == 0 or k == n:
                records.append(engine.record(state))
                if on_record is not None:
                    on_record(records[-1])
        except (LinearSolveFailure, NonFiniteState) as exc:
            exc.step = k
            exc.series = records
            raise
        if k in snap_steps and on_snapshot is not None:
            on_snapshot(state)
    return state, records
