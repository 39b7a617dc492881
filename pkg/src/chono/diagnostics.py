"""Monitored quantities: field masses, extrema, and the free energy.

The energy of a state (u, v) is

    E = eps_u^2/2 int |grad u|^2 + eps_v^2/2 int |grad v|^2 + int W(u, v)
        + sigma/2 int |grad psi|^2,

    W(u, v) = (u^2-1)^2/4 + (v^2-1)^2/4 + alpha u v + beta u v^2,

where psi solves the Neumann Poisson problem K psi = M (v - vbar) with zero
mean. The last term is the nonlocal penalty: int |grad psi|^2 equals the
squared H^-1-type norm of v - vbar. During transients the discrete mean of v
need not equal vbar, so the Poisson right-hand side is projected to zero sum
before solving (the projection magnitude is returned alongside the value);
the mean-zero constraint is imposed exactly with one Lagrange multiplier.

W is quartic in the P1 fields, so int W uses a 6-point triangle rule exact
for polynomials of degree 4 (two symmetric orbits; weights sum to 1 and
multiply the element area).
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .assembly import Assembler
from .mesh import Mesh, all_element_geometry

# degree-4 rule on the triangle: barycentric orbit points and area-normalized weights
_QA = 0.445948490915965
_QB = 0.091576213509771
_QUAD_POINTS = np.array([
    [1.0 - 2.0 * _QA, _QA, _QA],
    [_QA, 1.0 - 2.0 * _QA, _QA],
    [_QA, _QA, 1.0 - 2.0 * _QA],
    [1.0 - 2.0 * _QB, _QB, _QB],
    [_QB, 1.0 - 2.0 * _QB, _QB],
    [_QB, _QB, 1.0 - 2.0 * _QB],
])
_QUAD_WEIGHTS = np.array([0.223381589678011] * 3 + [0.109951743655322] * 3)


@dataclass(frozen=True)
class TimeSeriesRecord:
    """One diagnostics row; serialized as one CSV line."""

    t: float
    mass_u: float
    mass_v: float
    energy: float
    energy_nonlocal: float
    u_min: float
    u_max: float
    v_min: float
    v_max: float


def mass(M, f) -> float:
    """Discrete integral of the P1 interpolant: 1^T M f."""
    return float((M @ np.asarray(f, dtype=float)).sum())


def _quad_values(mesh, f):
    """P1 field values at the quadrature points of every triangle: (m, 6)."""
    return np.asarray(f, dtype=float)[mesh.triangles] @ _QUAD_POINTS.T


def local_potential(mesh: Mesh, u, v, alpha: float, beta: float) -> float:
    """int_Omega W(u_h, v_h) with the degree-4 rule (exact for the quartic W)."""
    areas, _ = all_element_geometry(mesh)
    uq = _quad_values(mesh, u)
    vq = _quad_values(mesh, v)
    w = (0.25 * (uq * uq - 1.0) ** 2 + 0.25 * (vq * vq - 1.0) ** 2
         + alpha * uq * vq + beta * uq * vq * vq)
    return float(np.einsum("eq,q,e->", w, _QUAD_WEIGHTS, areas))


def double_well(mesh: Mesh, f) -> float:
    """int_Omega (f_h^2 - 1)^2 / 4 for a single field."""
    areas, _ = all_element_geometry(mesh)
    fq = _quad_values(mesh, f)
    return float(np.einsum("eq,q,e->", 0.25 * (fq * fq - 1.0) ** 2, _QUAD_WEIGHTS, areas))


class DiagnosticsEngine:
    """Reusable evaluator bound to one mesh and parameter set.

    Caches the factorization of the mean-constrained Poisson operator so a
    long run pays for it once.
    """

    def __init__(self, mesh: Mesh, M, K, params, assembler=None):
        self.mesh = mesh
        self.M = M
        self.K = K
        self.params = params
        asm = assembler if assembler is not None else Assembler(mesh)
        self.areas = asm.areas
        self.m_ones = M @ np.ones(mesh.n_vertices)
        self.omega = float(self.m_ones.sum())
        self._poisson_lu = None

    def _poisson(self):
        if self._poisson_lu is None:
            c = sp.csc_matrix(self.m_ones.reshape(-1, 1))
            aug = sp.bmat([[self.K, c], [c.T, None]], format="csc")
            self._poisson_lu = splu(aug)
        return self._poisson_lu

    def nonlocal_energy(self, v):
        """(sigma/2) psi^T K psi and the zero-sum projection magnitude of the RHS."""
        p = self.params
        if p.sigma == 0.0:
            return 0.0, 0.0
        r = self.M @ v - p.v_bar * self.m_ones
        projection = float(abs(r.sum()))
        rhs = np.append(r - r.mean(), 0.0)
        psi = self._poisson().solve(rhs)[:-1]
        return 0.5 * p.sigma * float(psi @ (self.K @ psi)), projection

    def energy(self, u, v):
        p = self.params
        grad_u = 0.5 * p.eps_u**2 * float(u @ (self.K @ u))
        grad_v = 0.5 * p.eps_v**2 * float(v @ (self.K @ v))
        uq = _quad_values(self.mesh, u)
        vq = _quad_values(self.mesh, v)
        w = (0.25 * (uq * uq - 1.0) ** 2 + 0.25 * (vq * vq - 1.0) ** 2
             + p.alpha * uq * vq + p.beta * uq * vq * vq)
        potential = float(np.einsum("eq,q,e->", w, _QUAD_WEIGHTS, self.areas))
        nonloc, _ = self.nonlocal_energy(v)
        return grad_u + grad_v + potential + nonloc, nonloc

    def field_energy(self, f, eps: float) -> float:
        """Single-field energy eps^2/2 int |grad f|^2 + int (f^2-1)^2/4."""
        fq = _quad_values(self.mesh, f)
        well = float(np.einsum("eq,q,e->", 0.25 * (fq * fq - 1.0) ** 2,
                               _QUAD_WEIGHTS, self.areas))
        return 0.5 * eps * eps * float(f @ (self.K @ f)) + well

    def record(self, state) -> TimeSeriesRecord:
        from .stepper import NonFiniteState

        with np.errstate(over="ignore", invalid="ignore"):
            total, nonloc = self.energy(state.u, state.v)
        rec = TimeSeriesRecord(
            t=state.t,
            mass_u=float(self.m_ones @ state.u),
            mass_v=float(self.m_ones @ state.v),
            energy=total,
            energy_nonlocal=nonloc,
            u_min=float(state.u.min()),
            u_max=float(state.u.max()),
            v_min=float(state.v.min()),
            v_max=float(state.v.max()),
        )
        values = (rec.t, rec.mass_u, rec.mass_v, rec.energy, rec.energy_nonlocal,
                  rec.u_min, rec.u_max, rec.v_min, rec.v_max)
        if not all(np.isfinite(x) for x in values):
            raise NonFiniteState("diagnostics overflowed: fields blew up")
        return rec


def energy(state, params, mesh: Mesh, M, K):
    """(total, nonlocal) energy of a state; one-shot wrapper around the engine."""
    engine = DiagnosticsEngine(mesh, M, K, params)
    return engine.energy(state.u, state.v)
