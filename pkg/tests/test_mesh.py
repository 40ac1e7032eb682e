import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smspike.mesh import (DomainError, KuhnQuadrature, ScalarField, build_domain,
                          connected_components, cube_partition, erode, has_loop, in_omega_minus,
                          in_omega_plus, inner_eps, mask_signed_distance, norm_eps,
                          norm_eps_sq, psum)


def test_cube_counts_and_spacing():
    g = build_domain("cube", 16)
    assert g.dims == (15, 15, 15)
    assert g.h == pytest.approx(1 / 16)
    assert g.n_interior == 15**3
    np.testing.assert_allclose(g.box_lo, 0.0)
    np.testing.assert_allclose(g.points.min(axis=0), 1 / 16)


def test_scatter_gather_roundtrip(small_ball, rng):
    v = rng.normal(size=small_ball.n_interior)
    full = small_ball.scatter(v)
    assert np.all(full[~small_ball.mask] == 0)
    np.testing.assert_array_equal(small_ball.gather(full), v)


def test_x_fastest_order(small_cube):
    p = small_cube.points
    assert p[1, 0] > p[0, 0] and p[1, 1] == p[0, 1]


def test_laplacian_is_graph_form(small_ball, rng):
    v = rng.normal(size=small_ball.n_interior)
    D = small_ball.diff
    assert v @ (small_ball.laplacian @ v) == pytest.approx(np.sum((D @ v) ** 2), rel=1e-12)


def test_laplacian_stencil_on_cube():
    g = build_domain("cube", 9)
    A = g.laplacian.toarray()
    assert np.allclose(np.diag(A), 6 / g.h**2)
    assert np.allclose(A, A.T)
    # each interior row sums to the number of exterior neighbours / h^2
    corner = g.node_of(g.points[0])
    assert A[corner].sum() == pytest.approx(3 / g.h**2)


def test_ball_geometry():
    g = build_domain("ball", 32, radius=0.4)
    d = np.linalg.norm(g.points - 0.5, axis=1)
    assert d.max() < 0.4
    np.testing.assert_allclose(g.interior_dist, 0.4 - d, atol=1e-12)
    assert g.inradius == pytest.approx(0.4, abs=g.h)


def test_torus_is_a_loop():
    g = build_domain("torus", 32, major=0.3, minor=0.15)
    core = erode(g, 0.1)
    assert connected_components(g, core) == 1
    assert has_loop(g, core)
    ball = build_domain("ball", 32, radius=0.4)
    assert not has_loop(ball, erode(ball, 0.1))


def test_bad_shapes():
    with pytest.raises(DomainError):
        build_domain("sphere", 16)
    with pytest.raises(DomainError):
        build_domain("ball", 16, radius=0.7)
    with pytest.raises(DomainError):
        build_domain("torus", 16, major=0.1, minor=0.2)
    with pytest.raises(DomainError):
        build_domain("cube", 4)


def test_omega_plus_minus(small_ball):
    c = np.array([0.5, 0.5, 0.5])
    assert in_omega_minus(small_ball, c, 0.2)
    assert in_omega_plus(small_ball, c + [0.6, 0, 0], 0.2)
    assert not in_omega_plus(small_ball, c + [0.7, 0, 0], 0.2)
    with pytest.raises(DomainError):
        erode(small_ball, 0.6)


def test_mask_sdf_matches_analytic():
    g = build_domain("ball", 48, radius=0.4)
    sd = mask_signed_distance(g.mask, g.h)
    err = np.abs(sd[g.mask] - g.sdist[g.mask])
    assert err.max() < 1.01 * g.h


def test_norm_homogeneity_and_inner(small_ball, rng):
    u = ScalarField(small_ball, rng.normal(size=small_ball.n_interior))
    eps = 0.2
    assert norm_eps_sq(u * 3.0, eps) == pytest.approx(9 * norm_eps_sq(u, eps), rel=1e-12)
    assert inner_eps(u, u, eps) == pytest.approx(norm_eps(u, eps) ** 2, rel=1e-12)


def test_partition_covers_and_bounds_overlap(small_ball):
    part = cube_partition(small_ball, 0.1)
    assert part.assignments.shape == (small_ball.n_interior,)
    assert set(np.unique(part.assignments)) == set(range(part.n_pieces))
    assert part.overlap_bound <= 27
    with pytest.raises(DomainError):
        cube_partition(small_ball, small_ball.h)


def test_psum_is_order_stable():
    a = np.arange(1000, dtype=float) * 0.1
    assert psum(a) == psum(a.copy())


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_kuhn_adjoint_identity(seed):
    g = build_domain("ball", 12, radius=0.45)
    rng = np.random.default_rng(seed)
    Q = KuhnQuadrature(g, 2)
    v = rng.normal(size=g.n_interior)
    s = rng.normal(size=Q.samples(v).shape)
    assert np.sum(Q.samples(v) * s) == pytest.approx(np.dot(v, Q.adjoint(s)), rel=1e-11)


def test_kuhn_reproduces_linear_integrals():
    # a field that is linear on every tetrahedron integrates exactly for quadratics
    g = build_domain("cube", 10)
    Q = KuhnQuadrature(g, 3)
    one = np.ones(g.n_interior)
    # the hat-sum of the constant field (zero at the faces): integral of the interpolant
    assert Q.integral(Q.samples(one)) == pytest.approx(((10 - 1) / 10) ** 3, rel=0.1)
    x = g.points[:, 0]
    s = Q.samples(x * (1 - x))
    assert np.all(s >= -1e-15)


def test_kuhn_stiffness_is_seven_point():
    """Piecewise-linear gradients on the Kuhn tetrahedra reproduce sum |D u|^2."""
    g = build_domain("cube", 9)
    rng = np.random.default_rng(3)
    v = rng.normal(size=g.n_interior)
    full = np.pad(g.scatter(v), 1)
    n = g.dims[0] + 1
    total = 0.0
    import itertools
    for perm in itertools.permutations(range(3)):
        vert = np.zeros(3, dtype=int)
        prev = full[:n, :n, :n]
        for ax in perm:
            vert[ax] = 1
            cur = full[vert[0]:vert[0] + n, vert[1]:vert[1] + n, vert[2]:vert[2] + n]
            total += np.sum((cur - prev) ** 2) / g.h**2
            prev = cur
    stiff = total * g.h**3 / 6
    assert stiff == pytest.approx(g.h**3 * np.sum((g.diff @ v) ** 2), rel=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 0.45), st.integers(12, 20))
def test_ball_interior_property(radius, res):
    g = build_domain("ball", res, radius=radius)
    assert np.all(g.interior_dist > 0)
    assert math.isclose(g.cell_volume, g.h**3)
