"""
Reduced energy of the Schrödinger-Maxwell system on a bounded domain.

With ``psi = psi_eps(u)`` the Dirichlet potential of ``q u^2`` the energy is

    I(u) = 1/2 ||u||_eps^2 + omega/4 G(u) - 1/p |u+|_{eps,p}^p,
    G(u) = eps^-3 sum u^2 psi h^3.

Everything here differentiates the *discrete* functional, so the
gradient and finite differences of :func:`i_eps` agree to solver
precision.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
import scipy.sparse as sp

from .mesh import KuhnQuadrature, ScalarField, grad_sq_sum, psum
from .poisson import DEFAULT_TOL, LinSolveStats, box_shifted_inverse, pcg, solve_psi_eps

CSV_COLUMNS = ("eps", "omega", "q", "p", "quad", "coul", "pot", "total",
               "nehari_residual", "g_eps")


@dataclass
class EnergyBreakdown:
    eps: float
    omega: float
    q: float
    p: float
    quad: float
    coul: float
    pot: float
    total: float
    nehari_residual: float
    g_eps: float

    @property
    def norm_sq(self) -> float:
        return 2 * self.quad

    @property
    def lp_pow(self) -> float:
        return self.p * self.pot

    def nehari_forms(self) -> tuple[float, float, float]:
        """The three closed forms of the energy valid on the Nehari set."""
        p, w = self.p, self.omega
        n2, c, G = self.norm_sq, self.lp_pow, self.g_eps
        return (
            (0.5 - 1 / p) * n2 + w * (0.25 - 1 / p) * G,
            (0.5 - 1 / p) * c - w / 4 * G,
            0.25 * n2 + (0.25 - 1 / p) * c,
        )

    def csv_row(self) -> list[str]:
        d = asdict(self)
        return [repr(float(d[k])) for k in CSV_COLUMNS]


def _check_p(p):
    if not 4 < p < 6:
        raise ValueError(f"p must lie in (4, 6), got {p}")


def pos_pow(v: np.ndarray, k: float) -> np.ndarray:
    """``(v+)^k``, zero (with zero slope) wherever ``v <= 0``."""
    out = np.zeros_like(v)
    pos = v > 0
    out[pos] = np.exp(k * np.log(v[pos]))
    return out


def breakdown(eps, omega, q, p, norm_sq, G, lp_pow) -> EnergyBreakdown:
    quad = 0.5 * norm_sq
    coul = omega / 4 * G
    pot = lp_pow / p
    return EnergyBreakdown(eps, omega, q, p, quad, coul, pot, quad + coul - pot,
                           norm_sq + omega * G - lp_pow, G)


class DomainFunctional:
    """The discrete energy on a masked grid with Dirichlet potential.

    Bundles the operations the Nehari descent needs; the limit problem
    provides the same interface with a free-space potential.
    """

    def __init__(self, grid, eps, omega=1.0, q=1.0, p=5.0, tol=DEFAULT_TOL, quadrature="node"):
        _check_p(p)
        if not eps > 0:
            raise ValueError("eps must be positive")
        self.grid = grid
        self.eps, self.omega, self.q, self.p = float(eps), float(omega), float(q), float(p)
        self.tol = tol
        self.w = grid.cell_volume / self.eps**3
        self._shifted = None
        self.quadrature = quadrature
        self._kuhn = _kuhn_rule(grid, quadrature)

    def lp_pow(self, v) -> float:
        """``|v+|_{eps,p}^p`` under the configured quadrature."""
        if self._kuhn is None:
            return self.w * psum(pos_pow(v, self.p))
        Q = self._kuhn
        return Q.integral(pos_pow(Q.samples(v), self.p)) / self.eps**3

    def lp_gradient(self, v) -> np.ndarray:
        """L2 representative of ``v -> |v+|^p / p`` (times ``eps^3``)."""
        if self._kuhn is None:
            return pos_pow(v, self.p - 1)
        Q = self._kuhn
        return Q.adjoint(pos_pow(Q.samples(v), self.p - 1)) * (Q.weight / self.grid.cell_volume)

    def potential(self, v, x0=None, reduce=None) -> tuple[np.ndarray, LinSolveStats]:
        psi, stats = solve_psi_eps(ScalarField(self.grid, v), self.eps, self.q,
                                   tol=self.tol, x0=x0, reduce=reduce)
        return psi.values, stats

    def norm_sq(self, v) -> float:
        return self.w * (self.eps**2 * grad_sq_sum(ScalarField(self.grid, v)) + psum(v * v))

    def inner(self, a, b) -> float:
        D = self.grid.diff
        return self.w * (self.eps**2 * psum((D @ a) * (D @ b)) + psum(a * b))

    def parts(self, v, psi) -> tuple[float, float, float]:
        """``(||v||^2, G(v), |v+|^p)``."""
        return (self.norm_sq(v), self.w * psum(v * v * psi), self.lp_pow(v))

    def breakdown(self, v, psi) -> EnergyBreakdown:
        a, G, c = self.parts(v, psi)
        return breakdown(self.eps, self.omega, self.q, self.p, a, G, c)

    def l2_gradient(self, v, psi) -> np.ndarray:
        e2 = self.eps**2
        A = self.grid.laplacian
        return (e2 * (A @ v) + v + self.omega * v * psi - self.lp_gradient(v)) / self.eps**3

    def riesz(self, g, x0=None) -> np.ndarray:
        """``d`` with ``<d, phi>_eps = sum g phi h^3`` for every ``phi``."""
        e2 = self.eps**2
        rhs = self.eps**3 * g
        if self.grid.mask.all():
            return box_shifted_inverse(self.grid, rhs, e2, 1.0)
        if self._shifted is None:
            A = self.grid.laplacian
            self._shifted = (e2 * A + sp.identity(A.shape[0], format="csr")).tocsr()
        M = self._shifted
        d, _ = pcg(M, rhs, x0=x0, diag=M.diagonal(), tol=1e-11, maxiter=2000)
        return d


def _kuhn_rule(grid, quadrature):
    if quadrature == "node":
        return None
    if quadrature.startswith("kuhn"):
        m = int(quadrature[4:] or 2)
        return KuhnQuadrature(grid, m)
    raise ValueError(f"unknown quadrature {quadrature!r}; use 'node' or 'kuhn<m>'")


# -- public operations -------------------------------------------------------


def g_eps(u: ScalarField, eps: float, q: float, *, tol: float = DEFAULT_TOL) -> float:
    """``G_eps(u) = eps^-3 sum u^2 psi_eps(u) h^3`` (nonnegative)."""
    if not np.any(u.values):
        return 0.0
    psi, _ = solve_psi_eps(u, eps, q, tol=tol)
    return u.grid.cell_volume / eps**3 * psum(u.values**2 * psi.values)


def i_eps(u: ScalarField, eps: float, omega: float, q: float, p: float, *,
          psi: ScalarField | None = None, tol: float = DEFAULT_TOL) -> EnergyBreakdown:
    _check_p(p)
    F = DomainFunctional(u.grid, eps, omega, q, p, tol=tol)
    if psi is None:
        if np.any(u.values):
            psi_v, _ = F.potential(u.values)
        else:
            psi_v = np.zeros_like(u.values)
    else:
        psi_v = psi.values
    return F.breakdown(u.values, psi_v)


def grad_i_eps(u: ScalarField, eps: float, omega: float, q: float, p: float, *,
               psi: ScalarField | None = None, tol: float = DEFAULT_TOL) -> ScalarField:
    """L2 representative of the derivative of :func:`i_eps`.

    ``sum grad * phi * h^3`` equals the directional derivative along ``phi``.
    """
    _check_p(p)
    F = DomainFunctional(u.grid, eps, omega, q, p, tol=tol)
    if psi is None:
        psi_v, _ = F.potential(u.values) if np.any(u.values) else (np.zeros_like(u.values), None)
    else:
        psi_v = psi.values
    return ScalarField(u.grid, F.l2_gradient(u.values, psi_v))


def pairing(g: ScalarField, phi: ScalarField) -> float:
    """``sum g phi h^3``."""
    return g.grid.cell_volume * psum(g.values * phi.values)


def weak_derivative(u: ScalarField, phi: ScalarField, eps, omega, q, p, *, psi=None) -> float:
    """Directional derivative assembled in weak form (links, not the Laplacian)."""
    g = u.grid
    if psi is None:
        psi, _ = solve_psi_eps(u, eps, q)
    D = g.diff
    uv, fv = u.values, phi.values
    return g.cell_volume / eps**3 * (
        eps**2 * psum((D @ uv) * (D @ fv)) + psum(uv * fv)
        + omega * psum(uv * psi.values * fv) - psum(pos_pow(uv, p - 1) * fv)
    )


def t_functional(u: ScalarField, eps: float, q: float) -> float:
    """``T(u) = sum u^2 psi_eps(u) h^3``."""
    psi, _ = solve_psi_eps(u, eps, q)
    return u.grid.cell_volume * psum(u.values**2 * psi.values)


def t_derivative(u: ScalarField, phi: ScalarField, eps: float, q: float) -> float:
    """``4 sum phi u psi_eps(u) h^3``."""
    psi, _ = solve_psi_eps(u, eps, q)
    return 4 * u.grid.cell_volume * psum(phi.values * u.values * psi.values)


def energy_csv_header() -> list[str]:
    return list(CSV_COLUMNS)


def relative_spread(values) -> float:
    v = np.asarray(values, dtype=float)
    return float((v.max() - v.min()) / max(abs(v).max(), math.ulp(1.0)))
