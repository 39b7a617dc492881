"""P1 Galerkin assembly: mass, stiffness, state-weighted mass, load vectors.

All element integrals are exact: products of P1 functions are polynomials of
degree <= 3 per triangle and the closed-form barycentric monomial integral

    int_K lambda_1^a lambda_2^b lambda_3^c = 2*A * a! b! c! / (a+b+c+2)!

covers every term, so no quadrature error enters the assembled operators.
No mass lumping anywhere.

Every matrix produced here shares one sparsity pattern (vertex adjacency);
the Assembler precomputes that pattern plus a scatter map from element-local
(a, b) pairs to pattern slots, which makes per-step reassembly of the
state-weighted matrices cheap and keeps summation order fixed, so assembled
matrices are bitwise symmetric and runs are deterministic.
"""

import numpy as np
import scipy.sparse as sp

from .mesh import Mesh, all_element_geometry

# int_K lambda_a lambda_b / A for a P1 pair: 1/6 diagonal, 1/12 off-diagonal
_LOCAL_MASS = np.array([[2.0, 1.0, 1.0],
                        [1.0, 2.0, 1.0],
                        [1.0, 1.0, 2.0]]) / 12.0

# int_K lambda_a lambda_b lambda_d / A: 1/10 (all equal), 1/30 (two equal), 1/60
_LOCAL_CUBIC = np.empty((3, 3, 3))
for _a in range(3):
    for _b in range(3):
        for _d in range(3):
            n_equal = (_a == _b) + (_b == _d) + (_a == _d)
            _LOCAL_CUBIC[_a, _b, _d] = (1.0 / 10.0 if n_equal == 3
                                        else 1.0 / 30.0 if n_equal == 1
                                        else 1.0 / 60.0)
del _a, _b, _d


class Assembler:
    """Precomputed geometry + sparsity pattern for one mesh."""

    def __init__(self, mesh: Mesh):
        self.mesh = mesh
        self.n = mesh.n_vertices
        self.areas, self.grads = all_element_geometry(mesh)

        tris = mesh.triangles
        rows = np.repeat(tris, 3, axis=1).ravel()
        cols = np.tile(tris, (1, 3)).ravel()
        pattern = sp.coo_matrix(
            (np.ones(rows.size), (rows, cols)), shape=(self.n, self.n)
        ).tocsr()
        pattern.sort_indices()
        self.indices = pattern.indices.copy()
        self.indptr = pattern.indptr.copy()
        self.nnz = pattern.nnz

        # slot[e*9 + 3*a + b] = position of (tris[e,a], tris[e,b]) in the pattern
        row_of_slot = np.repeat(np.arange(self.n), np.diff(self.indptr))
        pattern_keys = row_of_slot * self.n + self.indices
        elem_keys = (tris[:, :, None] * self.n + tris[:, None, :]).ravel()
        self.slot = np.searchsorted(pattern_keys, elem_keys)

        self.mass_data = self._scatter(self.areas[:, None, None] * _LOCAL_MASS)
        k_local = np.einsum("eak,ebk->eab", self.grads, self.grads)
        self.stiffness_data = self._scatter(self.areas[:, None, None] * k_local)

    def _scatter(self, local):
        """Accumulate (n_triangles, 3, 3) local blocks into pattern-slot data."""
        data = np.zeros(self.nnz)
        np.add.at(data, self.slot, local.ravel())
        return data

    def _csr(self, data):
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def mass_matrix(self):
        return self._csr(self.mass_data.copy())

    def stiffness_matrix(self):
        return self._csr(self.stiffness_data.copy())

    def weighted_mass_data(self, c):
        """Pattern-slot data of the matrix (i,j) -> int c_h phi_i phi_j."""
        c = np.asarray(c, dtype=float)
        if c.shape != (self.n,):
            raise ValueError(f"weight must have one value per vertex, got shape {c.shape}")
        cvals = c[self.mesh.triangles]  # (m, 3)
        local = np.einsum("abd,ed->eab", _LOCAL_CUBIC, cvals)
        local *= self.areas[:, None, None]
        return self._scatter(local)

    def weighted_mass_matrix(self, c):
        return self._csr(self.weighted_mass_data(c))


def mass_matrix(mesh: Mesh) -> sp.csr_matrix:
    """M_ij = int phi_i phi_j; symmetric positive definite, entries sum to |Omega|."""
    return Assembler(mesh).mass_matrix()


def stiffness_matrix(mesh: Mesh) -> sp.csr_matrix:
    """K_ij = int grad phi_i . grad phi_j; symmetric PSD with constants in the kernel."""
    return Assembler(mesh).stiffness_matrix()


def weighted_mass_matrix(mesh: Mesh, c) -> sp.csr_matrix:
    """(M_c)_ij = int c_h phi_i phi_j with c_h the P1 interpolant of nodal c."""
    return Assembler(mesh).weighted_mass_matrix(c)


def load_vector(mesh: Mesh, f, M=None) -> np.ndarray:
    """Galerkin load b = M f for nodal data f (b_i = int f_h phi_i)."""
    f = np.asarray(f, dtype=float)
    if M is None:
        M = mass_matrix(mesh)
    return M @ f
