import numpy as np
import pytest

from smspike.concentration import (ConcentrationReport, ball_concentration, barycenter,
                                   boundary_ratio, cell_masses, concentration_report,
                                   gamma_density, peak, write_piece_masses)
from smspike.energy import i_eps
from smspike.mesh import DomainError, ScalarField, build_domain, cube_partition

EPS, P = 0.08, 5.0


@pytest.fixture(scope="module")
def grid():
    return build_domain("ball", 32, radius=0.45)


def _spike(grid, c, w=0.08):
    r = np.linalg.norm(grid.points - np.asarray(c), axis=1)
    return ScalarField(grid, 3 * np.exp(-(r / w) ** 2))


def test_gamma_integrates_to_energy_combination(grid):
    u = _spike(grid, [0.5, 0.5, 0.5])
    e = i_eps(u, EPS, 0.0, 1.0, P)
    total = grid.cell_volume * np.sum(gamma_density(u, EPS, P).values)
    assert total == pytest.approx(0.25 * e.norm_sq + (0.25 - 1 / P) * e.lp_pow, rel=1e-12)


def test_barycenter_of_symmetric_spike(grid):
    c = grid.points[grid.node_of([0.5, 0.5, 0.5])]
    u = _spike(grid, c)
    np.testing.assert_allclose(barycenter(u, EPS, P), c, atol=1e-9)
    np.testing.assert_allclose(peak(u), c)
    with pytest.raises(DomainError):
        barycenter(ScalarField.zeros(grid), EPS, P)


def test_translation_equivariance(grid):
    c = grid.points[grid.node_of([0.45, 0.5, 0.55])]
    u = _spike(grid, c)
    shift = np.array([2, -1, 1]) * grid.h
    v = _spike(grid, c + shift)
    np.testing.assert_allclose(barycenter(v, EPS, P) - barycenter(u, EPS, P), shift, atol=1e-8)


def test_ball_concentration_and_report(grid):
    u = _spike(grid, [0.5, 0.5, 0.5])
    f = ball_concentration(u, None, 0.3, EPS, P)
    assert 0.9 < f <= 1.0
    part = cube_partition(grid, EPS)
    rep = concentration_report(u, part, EPS, P, 0.1)
    assert isinstance(rep, ConcentrationReport)
    assert rep.in_omega_plus
    assert len(rep.csv_row()) == len(ConcentrationReport.CSV_COLUMNS)
    assert rep.piece_boundary_dist_over_eps > 3


def test_boundary_ratio_grows_inward(grid):
    part = cube_partition(grid, EPS)
    near = _spike(grid, [0.5, 0.5, 0.12])
    mid = _spike(grid, [0.5, 0.5, 0.3])
    assert boundary_ratio(near, part, grid, EPS, P) < boundary_ratio(mid, part, grid, EPS, P)


def test_cell_masses_guard(grid):
    u = _spike(grid, [0.5, 0.5, 0.5])
    with pytest.raises(DomainError):
        cell_masses(u, cube_partition(grid, 2 * EPS), EPS, P)


def test_piece_mass_dump(grid, tmp_path):
    u = _spike(grid, [0.5, 0.5, 0.5])
    part = cube_partition(grid, EPS)
    write_piece_masses(tmp_path / "m.csv", u, part, EPS, P)
    rows = (tmp_path / "m.csv").read_text().splitlines()
    assert len(rows) == part.n_pieces + 1
