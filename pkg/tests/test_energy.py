import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import naive_energy
from smspike.energy import (CSV_COLUMNS, DomainFunctional, g_eps, grad_i_eps, i_eps, pairing,
                            relative_spread, t_derivative, t_functional, weak_derivative)
from smspike.mesh import ScalarField, build_domain
from smspike.poisson import solve_psi_eps

EPS, OMEGA, Q, P = 0.3, 1.0, 1.0, 5.0


@pytest.fixture(scope="module")
def grid():
    return build_domain("ball", 14, radius=0.45)


def _bump(grid, rng):
    r = np.linalg.norm(grid.points - 0.5, axis=1)
    return ScalarField(grid, np.exp(-(r / 0.2) ** 2) + 0.1 * rng.normal(size=grid.n_interior))


def test_zero_field(grid):
    z = ScalarField.zeros(grid)
    assert g_eps(z, EPS, Q) == 0.0
    e = i_eps(z, EPS, OMEGA, Q, P)
    assert (e.quad, e.coul, e.pot, e.total, e.nehari_residual) == (0, 0, 0, 0, 0)


def test_negative_field_has_no_potential_term(grid, rng):
    u = ScalarField(grid, -np.abs(rng.normal(size=grid.n_interior)) - 0.1)
    e = i_eps(u, EPS, OMEGA, Q, P)
    assert e.pot == 0.0 and e.total == pytest.approx(e.quad + e.coul) and e.total > 0


def test_breakdown_invariant(grid, rng):
    e = i_eps(_bump(grid, rng), EPS, OMEGA, Q, P)
    assert e.total == pytest.approx(e.quad + e.coul - e.pot, rel=1e-13)
    assert len(e.csv_row()) == len(CSV_COLUMNS)


def test_against_naive_loops(grid, rng):
    u = _bump(grid, rng)
    psi, _ = solve_psi_eps(u, EPS, Q)
    e = i_eps(u, EPS, OMEGA, Q, P, psi=psi)
    ref = naive_energy(grid, u.values, EPS, OMEGA, psi.values, P)
    assert e.total == pytest.approx(ref, rel=1e-12)


def test_g_homogeneity(grid, rng):
    u = _bump(grid, rng)
    g1 = g_eps(u, EPS, Q)
    assert g1 > 0
    for lam in (0.5, 3.0):
        assert g_eps(u * lam, EPS, Q) == pytest.approx(lam**4 * g1, rel=1e-9)


@pytest.mark.parametrize("quadrature", ["node", "kuhn2"])
def test_gradient_matches_finite_differences(grid, rng, quadrature):
    u = _bump(grid, rng)
    F = DomainFunctional(grid, EPS, OMEGA, Q, P, tol=1e-13, quadrature=quadrature)
    psi, _ = F.potential(u.values)
    g = F.l2_gradient(u.values, psi)
    for _ in range(3):
        phi = rng.normal(size=grid.n_interior)
        s = 1e-4
        ep = F.breakdown(u.values + s * phi, F.potential(u.values + s * phi)[0]).total
        em = F.breakdown(u.values - s * phi, F.potential(u.values - s * phi)[0]).total
        fd = (ep - em) / (2 * s)
        an = grid.cell_volume * np.dot(g, phi)
        assert an == pytest.approx(fd, rel=1e-6)


def test_weak_form_agrees(grid, rng):
    u = _bump(grid, rng)
    phi = ScalarField(grid, rng.normal(size=grid.n_interior))
    g = grad_i_eps(u, EPS, OMEGA, Q, P)
    assert pairing(g, phi) == pytest.approx(weak_derivative(u, phi, EPS, OMEGA, Q, P), rel=1e-10)


def test_t_derivative_factor_four(grid, rng):
    u = _bump(grid, rng)
    phi = ScalarField(grid, rng.normal(size=grid.n_interior))
    s = 1e-4
    fd = (t_functional(u + phi * s, EPS, Q) - t_functional(u - phi * s, EPS, Q)) / (2 * s)
    assert t_derivative(u, phi, EPS, Q) == pytest.approx(fd, rel=1e-6)


def test_riesz_representation(grid, rng):
    F = DomainFunctional(grid, EPS, OMEGA, Q, P)
    g = rng.normal(size=grid.n_interior)
    phi = rng.normal(size=grid.n_interior)
    d = F.riesz(g)
    assert F.inner(d, phi) == pytest.approx(grid.cell_volume * np.dot(g, phi), rel=1e-8)


def test_invalid_p(grid):
    with pytest.raises(ValueError):
        i_eps(ScalarField.zeros(grid), EPS, OMEGA, Q, 6.5)
    with pytest.raises(ValueError):
        DomainFunctional(grid, EPS, quadrature="gauss")


def test_kuhn_below_nodal_for_spike():
    """Nodal quadrature overestimates |u+|^p for convex integrands (Jensen)."""
    g = build_domain("cube", 16)
    c = g.node_of([0.5, 0.5, 0.5])
    v = np.zeros(g.n_interior)
    v[c] = 3.0
    a = DomainFunctional(g, 0.2, quadrature="node").lp_pow(v)
    b = DomainFunctional(g, 0.2, quadrature="kuhn3").lp_pow(v)
    assert b < a


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=3, max_size=3))
def test_relative_spread_properties(vals):
    s = relative_spread(vals)
    assert s >= 0
    assert relative_spread([1.0, 1.0, 1.0]) == 0
