import numpy as np

from chono.assembly import mass_matrix, stiffness_matrix, weighted_mass_matrix
from chono.schemes import gradient_split, linearize


def dense_step_oracle(mesh, params, u, v):
    """Independent oracle for one time step: explicit dense assembly + dense LU.

    Mirrors the weak form directly from dense block matrices; shares nothing
    with the sparse fast path in chono.stepper.
    """
    n = mesh.n_vertices
    M = mass_matrix(mesh).toarray()
    K = stiffness_matrix(mesh).toarray()
    su = gradient_split(params.scheme, params.eps_u, params.stab)
    sv = gradient_split(params.scheme, params.eps_v, params.stab)
    lu = linearize(params.scheme, u)
    lv = linearize(params.scheme, v)
    M_au = weighted_mass_matrix(mesh, lu.a).toarray()
    M_av = weighted_mass_matrix(mesh, lv.a).toarray()
    M_v = weighted_mass_matrix(mesh, v).toarray()
    M_u = weighted_mass_matrix(mesh, u).toarray()
    Z = np.zeros((n, n))
    A = np.block([
        [(params.tau_u / params.dt) * M, -K, Z, Z],
        [su.c_implicit * K - M_au, M, params.alpha * M + params.beta * M_v, Z],
        [Z, Z, (params.tau_v / params.dt + params.sigma) * M, -K],
        [params.alpha * M, Z, sv.c_implicit * K - M_av + 2 * params.beta * M_u, M],
    ])
    b = np.concatenate([
        (params.tau_u / params.dt) * (M @ u),
        M @ lu.g - su.c_explicit * (K @ u),
        (params.tau_v / params.dt) * (M @ v) + params.sigma * params.v_bar * (M @ np.ones(n)),
        M @ lv.g - sv.c_explicit * (K @ v),
    ])
    return np.linalg.solve(A, b)
