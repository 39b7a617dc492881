import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chono.assembly import (
    Assembler,
    load_vector,
    mass_matrix,
    stiffness_matrix,
    weighted_mass_matrix,
)
from chono.mesh import Domain, Mesh, build_structured

RNG = np.random.default_rng(20240814)


def reference_triangle():
    return Mesh(vertices=np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
                triangles=np.array([[0, 1, 2]]))


def skew_triangle():
    return Mesh(vertices=np.array([[0.2, -0.1], [1.4, 0.3], [0.5, 1.9]]),
                triangles=np.array([[0, 1, 2]]))


def tri_area(mesh):
    (p0, p1, p2) = mesh.vertices[mesh.triangles[0]]
    return 0.5 * abs((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0]))


def test_local_mass_closed_form():
    for mesh in (reference_triangle(), skew_triangle()):
        area = tri_area(mesh)
        want = area / 12.0 * np.array([[2.0, 1, 1], [1, 2, 1], [1, 1, 2]])
        assert np.abs(mass_matrix(mesh).toarray() - want).max() <= 1e-14


def test_local_stiffness_closed_form():
    # right triangle with unit legs: gradients (-1,-1), (1,0), (0,1)
    want = 0.5 * np.array([[2.0, -1, -1], [-1, 1, 0], [-1, 0, 1]])
    assert np.abs(stiffness_matrix(reference_triangle()).toarray() - want).max() <= 1e-14


def test_local_weighted_mass_closed_form():
    # weight = first barycentric coordinate on the reference triangle
    mesh = reference_triangle()
    got = weighted_mass_matrix(mesh, np.array([1.0, 0.0, 0.0])).toarray()
    want = 0.5 / 60.0 * np.array([[6.0, 2, 2], [2, 2, 1], [2, 1, 2]])
    assert np.abs(got - want).max() <= 1e-14


def test_mass_sum_is_domain_area():
    for domain, nx, ny in [(Domain(), 1, 1), (Domain(), 20, 20),
                           (Domain(0.0, 2.0, -1.0, 1.5), 6, 4)]:
        mesh = build_structured(domain, nx, ny)
        assert abs(mass_matrix(mesh).sum() - domain.area) <= 1e-12 * domain.area


def test_stiffness_kernel_and_psd():
    mesh = build_structured(Domain(), 8, 8)
    K = stiffness_matrix(mesh)
    assert np.abs(K @ np.ones(mesh.n_vertices)).max() <= 1e-12
    for _ in range(100):
        x = RNG.standard_normal(mesh.n_vertices)
        assert x @ (K @ x) >= 0.0


def test_mass_positive_definite():
    mesh = build_structured(Domain(), 5, 5)
    M = mass_matrix(mesh).toarray()
    assert np.linalg.eigvalsh(M).min() > 0


def test_exact_symmetry_bitwise():
    mesh = build_structured(Domain(0.0, 1.3, 0.0, 0.9), 7, 5)
    c = RNG.standard_normal(mesh.n_vertices)
    for A in (mass_matrix(mesh), stiffness_matrix(mesh), weighted_mass_matrix(mesh, c)):
        assert np.abs(A - A.T).max() == 0.0


def test_weighted_constant_weights():
    mesh = build_structured(Domain(), 6, 6)
    M = mass_matrix(mesh)
    ones = np.ones(mesh.n_vertices)
    assert np.abs(weighted_mass_matrix(mesh, ones) - M).max() <= 1e-14
    assert np.abs(weighted_mass_matrix(mesh, 2.0 * ones) - 2.0 * M).max() <= 1e-14


@settings(max_examples=30, deadline=None)
@given(a=st.floats(-3.0, 3.0), b=st.floats(-3.0, 3.0), seed=st.integers(0, 2**31))
def test_weighted_linearity(a, b, seed):
    mesh = build_structured(Domain(), 4, 4)
    rng = np.random.default_rng(seed)
    c1 = rng.standard_normal(mesh.n_vertices)
    c2 = rng.standard_normal(mesh.n_vertices)
    left = weighted_mass_matrix(mesh, a * c1 + b * c2)
    right = a * weighted_mass_matrix(mesh, c1) + b * weighted_mass_matrix(mesh, c2)
    assert np.abs(left - right).max() <= 1e-12


def test_weighted_rejects_bad_shape():
    mesh = build_structured(Domain(), 3, 3)
    with pytest.raises(ValueError):
        weighted_mass_matrix(mesh, np.ones(5))


def test_load_vector_identities():
    domain = Domain()
    mesh = build_structured(domain, 5, 5)
    n = mesh.n_vertices
    assert load_vector(mesh, np.ones(n)).sum() == pytest.approx(domain.area, rel=1e-12)
    assert np.all(load_vector(mesh, np.zeros(n)) == 0.0)
    f = RNG.standard_normal(n)
    dense_oracle = mass_matrix(mesh).toarray() @ f
    assert np.abs(load_vector(mesh, f) - dense_oracle).max() <= 1e-14


def test_assembler_matches_functions():
    mesh = build_structured(Domain(), 4, 3)
    asm = Assembler(mesh)
    c = RNG.standard_normal(mesh.n_vertices)
    assert np.abs(asm.mass_matrix() - mass_matrix(mesh)).max() == 0.0
    assert np.abs(asm.stiffness_matrix() - stiffness_matrix(mesh)).max() == 0.0
    assert np.abs(asm.weighted_mass_matrix(c) - weighted_mass_matrix(mesh, c)).max() == 0.0
