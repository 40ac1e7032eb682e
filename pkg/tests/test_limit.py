import math

import numpy as np
import pytest

from smspike.energy import DomainFunctional, g_eps
from smspike.fieldio import read_field
from smspike.limit import (BoundaryContaminationError, LimitFunctional, cutoff, extrapolate,
                           ground_state, gs_hash, limit_grid, load_ground_state, make_bump,
                           peak_cell_mass, phi_eps, project_field, sample_profile,
                           save_ground_state, smooth_profile)
from smspike.mesh import DomainError, build_domain, norm_eps


def test_spectral_norm_of_a_sine_mode():
    g = limit_grid(4.0, 16)
    F = LimitFunctional(g, 0.0, 1.0, 5.0)
    x, y, z = (g.points - g.box_lo).T
    L = 4.0
    v = np.sin(math.pi * x / L) * np.sin(2 * math.pi * y / L) * np.sin(math.pi * z / L)
    lam = (math.pi / L) ** 2 * (1 + 4 + 1)
    exact = (1 + lam) * (L / 2) ** 3
    assert F.norm_sq(v) == pytest.approx(exact, rel=1e-12)


@pytest.mark.parametrize("omega", [0.0, 1.0])
def test_limit_gradient_finite_differences(omega):
    g = limit_grid(8.0, 16)
    F = LimitFunctional(g, omega, 1.0, 5.0)
    rng = np.random.default_rng(5)
    v = 2 * np.exp(-np.sum(g.points**2, axis=1) / 2) + 0.05 * rng.normal(size=g.n_interior)
    grad = F.l2_gradient(v, F.potential(v)[0])
    for _ in range(3):
        phi = rng.normal(size=g.n_interior)
        s = 1e-5
        e = [F.breakdown(v + k * s * phi, F.potential(v + k * s * phi)[0]).total for k in (1, -1)]
        assert g.cell_volume * grad @ phi == pytest.approx((e[0] - e[1]) / (2 * s), rel=1e-6)


def test_small_ground_state_invariants(small_gs):
    gs = small_gs
    assert gs.nehari_rel <= 1e-7
    u = gs.U.values
    c = int(np.argmax(u))
    np.testing.assert_allclose(gs.grid.points[c], 0.0, atol=1e-12)
    near = np.linalg.norm(gs.grid.points, axis=1) < 2.0
    assert np.all(u[near] > 0)
    assert gs.m_inf == pytest.approx(9.9, rel=0.05)


def test_translation_invariance(small_gs):
    moved = ground_state(12.0, 48, 1.0, refine=False, decay_tol=1.0, shift=(0.37, -0.21, 0.13))
    assert abs(moved.m_inf - small_gs.m_inf) <= 1e-5 * small_gs.m_inf


def test_box_too_small_is_refused():
    with pytest.raises(BoundaryContaminationError):
        ground_state(5.0, 24, 1.0, refine=False)


def test_cache_roundtrip(small_gs, tmp_path):
    save_ground_state(small_gs, tmp_path, "t")
    back = load_ground_state(tmp_path, "t")
    np.testing.assert_array_equal(back.U.values, small_gs.U.values)
    assert back.m_inf == small_gs.m_inf
    assert read_field(tmp_path / "gs_t.smsf").values.size == small_gs.U.values.size
    assert load_ground_state(tmp_path, "missing") is None
    assert gs_hash(18.0, 128, 1.0, 1.0, 5.0, 1e-7, True) != gs_hash(18.0, 96, 1.0, 1.0, 5.0, 1e-7, True)


def test_extrapolate():
    # exact for m(n) = m* + A rho^n with levels equally spaced in n
    m = [3.0 + 2.0 * 0.5**k for k in (4, 3, 2)]
    val, kind = extrapolate(m, 128, 96)
    assert kind == "aitken" and val == pytest.approx(3.0, rel=1e-14)
    val, kind = extrapolate([1.0, 1.1], 128, 96)
    assert kind == "h2" and val < 1.0


def test_cutoff_shape():
    r = 0.4
    t = np.linspace(0, 0.6, 601)
    chi = cutoff(t, r)
    assert np.all(chi[t < r / 2] == 1) and np.all(chi[t >= r] == 0)
    slope = np.abs(np.diff(chi) / np.diff(t))
    assert slope.max() <= 2 / r + 1e-9


def test_make_bump_contract(small_gs):
    g = build_domain("ball", 48, radius=0.45)
    r = 0.2
    xi = g.points[g.node_of([0.5, 0.5, 0.5])]
    W = make_bump(small_gs, xi, 0.05, g, r)
    assert W.values.max() == pytest.approx(small_gs.peak_value, rel=1e-12)
    far = np.linalg.norm(g.points - xi, axis=1) >= r
    assert np.all(W.values[far] == 0)
    with pytest.raises(DomainError):
        make_bump(small_gs, xi + [0.3, 0, 0], 0.05, g, r)
    with pytest.raises(DomainError):
        make_bump(small_gs, xi, 0.06, g, r)
    make_bump(small_gs, xi, 0.06, g, r, check_scale=False)


def test_sample_profile_off_box_is_zero(small_gs):
    z = np.array([[0.0, 0.0, 0.0], [100.0, 0.0, 0.0]])
    v = sample_profile(small_gs, z)
    assert v[0] == pytest.approx(small_gs.peak_value) and v[1] == 0


def test_phi_eps_is_on_nehari_set(small_gs):
    g = build_domain("ball", 48, radius=0.45)
    nb = phi_eps(small_gs, [0.5, 0.5, 0.5], 0.05, g, 0.2)
    e = nb.energy
    assert abs(e.nehari_residual) <= 1e-10 * e.norm_sq


def test_phi_continuity_in_centre(small_gs):
    g = build_domain("ball", 48, radius=0.45)
    eps, r = 0.05, 0.2
    F = DomainFunctional(g, eps)
    xi = np.array([0.5, 0.5, 0.5])
    base = project_field(F, make_bump(small_gs, xi, eps, g, r)).u
    gaps = []
    for d in (0.25, 0.5, 1.0):
        moved = project_field(F, make_bump(small_gs, xi + [d * g.h, 0, 0], eps, g, r)).u
        gaps.append(norm_eps(moved - base, eps))
    assert 0 < gaps[0] < gaps[1] < gaps[2]


def test_peak_cell_mass(small_gs):
    m = peak_cell_mass(small_gs)
    assert 0 < m < small_gs.norm_lp ** 5


def test_smooth_profile():
    g = build_domain("cube", 16)
    v = smooth_profile(g, [0.5, 0.5, 0.5], 0.25).values
    assert v.max() <= 1 and v.min() == 0


# -- bump convergence on a 128^3 cube, r = 0.45 -----------------------------


@pytest.fixture(scope="module")
def bump_ladder(gs_omega1):
    g = build_domain("cube", 128)
    r = 0.45
    xi = g.points[g.node_of([0.5, 0.5, 0.5])]
    rows = []
    for f in (0.4, 0.2, 0.1):
        eps = f * r
        W = make_bump(gs_omega1, xi, eps, g, r, check=False)
        nb = project_field(DomainFunctional(g, eps), W)
        rows.append((abs(norm_eps(W, eps) - gs_omega1.norm_h1), abs(nb.t - 1),
                     abs(g_eps(W, eps, 1.0) - gs_omega1.g_U)))
    return np.array(rows)


def test_bump_norm_approaches_limit_norm(bump_ladder):
    gap = bump_ladder[:, 0]
    assert gap[0] > gap[1] > gap[2]


def test_coulomb_term_approaches_limit(bump_ladder):
    gap = bump_ladder[:, 2]
    assert gap[0] > gap[1] > gap[2]


@pytest.mark.xfail(strict=True, reason="at eps/h = 5.8 the 7-point lattice error in t "
                   "(about 0.075) exceeds the cutoff effect; see the decisions ledger")
def test_projection_factor_approaches_one(bump_ladder):
    gap = bump_ladder[:, 1]
    assert gap[0] > gap[1] > gap[2]
