"""
Where does a low-energy function live?

The density

    Gamma(u) = 1/4 [ eps^-1 |grad u|^2 + eps^-3 u^2 ] + (1/4 - 1/p) eps^-3 (u+)^p

is nonnegative for 4 < p < 6 and integrates to the energy on the Nehari
set, so it doubles as a probability density for locating a spike.
"""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, field

import numpy as np

from .energy import pos_pow
from .mesh import DomainError, DomainGrid, Partition, ScalarField, in_omega_plus, psum


@dataclass
class ConcentrationReport:
    barycenter: np.ndarray
    in_omega_plus: bool
    borderline: bool
    gamma_mass_max: float
    argmax_piece: int
    piece_boundary_dist_over_eps: float
    ball_fraction: float
    q_star: np.ndarray
    lp_total: float = field(default=0.0)

    CSV_COLUMNS = ("beta_x", "beta_y", "beta_z", "in_omega_plus", "borderline",
                   "gamma_mass_max", "argmax_piece", "dist_over_eps", "ball_fraction",
                   "qstar_x", "qstar_y", "qstar_z")

    def csv_row(self) -> list[str]:
        b, qs = self.barycenter, self.q_star
        return [repr(float(b[0])), repr(float(b[1])), repr(float(b[2])),
                str(int(self.in_omega_plus)), str(int(self.borderline)),
                repr(float(self.gamma_mass_max)), str(int(self.argmax_piece)),
                repr(float(self.piece_boundary_dist_over_eps)), repr(float(self.ball_fraction)),
                repr(float(qs[0])), repr(float(qs[1])), repr(float(qs[2]))]

    def as_dict(self) -> dict:
        d = asdict(self)
        d["barycenter"] = self.barycenter.tolist()
        d["q_star"] = self.q_star.tolist()
        return d


def gamma_density(u: ScalarField, eps: float, p: float) -> ScalarField:
    """Nodal values of Gamma(u).

    Squared link differences are shared between the two endpoints of an
    interior link and charged fully to the interior endpoint of a link
    that leaves the domain, so ``sum Gamma h^3`` reproduces
    ``1/4 ||u||^2 + (1/4 - 1/p) |u+|^p`` exactly.
    """
    g = u.grid
    du = g.diff @ u.values
    grad2 = g.link_share @ (du * du)
    v = u.values
    dens = 0.25 * (grad2 / eps + v * v / eps**3) + (0.25 - 1 / p) * pos_pow(v, p) / eps**3
    return ScalarField(g, dens)


def barycenter(u: ScalarField, eps: float, p: float) -> np.ndarray:
    """Gamma-weighted mean of the node coordinates."""
    dens = gamma_density(u, eps, p).values
    total = psum(dens)
    if not total > 0:
        raise DomainError("barycenter of a zero field is undefined")
    pts = u.grid.points
    return np.array([psum(pts[:, a] * dens) for a in range(3)]) / total


def peak(u: ScalarField) -> np.ndarray:
    return u.grid.points[int(np.argmax(u.values))].copy()


def cell_masses(u: ScalarField, partition: Partition, eps: float, p: float):
    """Per-piece ``eps^-3 int_P |u+|^p`` and the index of the heaviest piece."""
    if not np.isclose(partition.cell_size, eps, rtol=1e-12):
        raise DomainError("partition was built for a different eps")
    if partition.grid is not u.grid:
        raise DomainError("partition and field live on different grids")
    dens = u.grid.cell_volume / eps**3 * pos_pow(u.values, p)
    masses = np.bincount(partition.assignments, weights=dens, minlength=partition.n_pieces)
    return masses, int(np.argmax(masses))


def boundary_ratio(u: ScalarField, partition: Partition, grid: DomainGrid, eps: float,
                   p: float = 5.0) -> float:
    """Distance from the heaviest piece to the boundary, in units of eps."""
    _, j = cell_masses(u, partition, eps, p)
    return float(grid.interior_dist[partition.assignments == j].min() / eps)


def ball_concentration(u: ScalarField, q_star, r: float, eps: float, p: float) -> float:
    """Share of ``int Gamma`` inside ``B(q_star, r/2)``.

    ``q_star=None`` picks the node where Gamma is largest.
    """
    dens = gamma_density(u, eps, p).values
    pts = u.grid.points
    if q_star is None:
        q_star = pts[int(np.argmax(dens))]
    total = psum(dens)
    if total == 0:
        return 0.0
    inside = np.sum((pts - np.asarray(q_star)) ** 2, axis=1) < (r / 2) ** 2
    return float(psum(np.where(inside, dens, 0.0)) / total)


def concentration_report(u: ScalarField, partition: Partition, eps: float, p: float,
                         r: float) -> ConcentrationReport:
    g = u.grid
    dens = gamma_density(u, eps, p).values
    beta = barycenter(u, eps, p)
    masses, j = cell_masses(u, partition, eps, p)
    q_star = g.points[int(np.argmax(dens))].copy()
    sd = float(g.signed_distance(beta)[0])
    return ConcentrationReport(
        barycenter=beta,
        in_omega_plus=in_omega_plus(g, beta, r),
        borderline=abs(sd + r) <= g.h,
        gamma_mass_max=float(masses[j]),
        argmax_piece=j,
        piece_boundary_dist_over_eps=float(g.interior_dist[partition.assignments == j].min() / eps),
        ball_fraction=ball_concentration(u, q_star, r, eps, p),
        q_star=q_star,
        lp_total=float(psum(masses)),
    )


def write_piece_masses(path, u: ScalarField, partition: Partition, eps: float, p: float):
    """CSV dump: piece index, anchor, mass, distance to the boundary over eps."""
    masses, _ = cell_masses(u, partition, eps, p)
    dist = u.grid.interior_dist
    dmin = np.full(partition.n_pieces, np.inf)
    np.minimum.at(dmin, partition.assignments, dist)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["piece", "anchor_x", "anchor_y", "anchor_z", "mass", "dist_over_eps"])
        for j in range(partition.n_pieces):
            a = partition.anchors[j]
            w.writerow([j, repr(float(a[0])), repr(float(a[1])), repr(float(a[2])),
                        repr(float(masses[j])), repr(float(dmin[j] / eps))])
