"""
Electrostatic potentials: the Dirichlet problem ``-eps^2 Lap psi = q u^2``
on the masked domain, and the free-space Newtonian potential used by the
limit problem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft as sfft

from .mesh import DomainGrid, ScalarField, psum

DEFAULT_TOL = 1e-10


@dataclass
class LinSolveStats:
    iterations: int
    residual: float
    converged: bool


class LinearSolveError(RuntimeError):
    """Raised when CG hits its iteration cap; carries the stats."""

    def __init__(self, stats: LinSolveStats, what: str = "linear solve"):
        super().__init__(
            f"{what} did not converge: {stats.iterations} iterations, "
            f"relative residual {stats.residual:.3e}"
        )
        self.stats = stats


def pcg(A, b, *, x0=None, diag=None, tol=DEFAULT_TOL, maxiter=1000, reduce=None):
    """Jacobi-preconditioned conjugate gradient.

    Stops when ``||b - A x|| <= tol ||b||``.  With ``reduce`` set (used
    with warm starts) the residual must additionally drop by that factor
    relative to the initial one, unless the cap is reached first.
    Reductions are pairwise sums so the iterates are reproducible.

    Returns ``(x, LinSolveStats)``; never raises.
    """
    nb = math.sqrt(psum(b * b))
    if nb == 0.0:
        return np.zeros_like(b), LinSolveStats(0, 0.0, True)
    if x0 is None:
        x = np.zeros_like(b)
        r = b.copy()
    else:
        x = np.array(x0, dtype=float)
        r = b - A @ x
    dinv = 1.0 / diag if diag is not None else np.ones_like(b)
    rn = math.sqrt(psum(r * r))
    target = tol * nb
    if reduce is not None:
        target = min(target, max(reduce * rn, 1e-15 * nb))
    if rn <= target:
        return x, LinSolveStats(0, rn / nb, True)
    z = dinv * r
    p = z.copy()
    rz = psum(r * z)
    k = 0
    for k in range(1, maxiter + 1):
        Ap = A @ p
        alpha = rz / psum(p * Ap)
        x += alpha * p
        r -= alpha * Ap
        rn = math.sqrt(psum(r * r))
        if rn <= target:
            break
        z = dinv * r
        rz_new = psum(r * z)
        p *= rz_new / rz
        p += z
        rz = rz_new
    rel = rn / nb
    return x, LinSolveStats(k, rel, rel <= tol)


def default_maxiter(grid: DomainGrid) -> int:
    return 10 * max(grid.dims)


def solve_psi_eps(
    u: ScalarField,
    eps: float,
    q: float,
    *,
    tol: float = DEFAULT_TOL,
    maxiter: int | None = None,
    x0: np.ndarray | None = None,
    reduce: float | None = None,
    raise_on_failure: bool = True,
) -> tuple[ScalarField, LinSolveStats]:
    """Solve ``-eps^2 Lap_h psi = q u^2`` with psi = 0 off the domain.

    Raises :class:`LinearSolveError` when the iteration cap (default
    ``10 * max(dims)``) is reached.
    """
    if not (eps > 0 and q > 0):
        raise ValueError("eps and q must be positive")
    return solve_poisson(u.grid, q * u.values**2, eps, tol=tol, maxiter=maxiter, x0=x0,
                         reduce=reduce, raise_on_failure=raise_on_failure)


def solve_poisson(grid: DomainGrid, rhs, eps=1.0, *, tol=DEFAULT_TOL, maxiter=None,
                  x0=None, reduce=None, raise_on_failure=True):
    """Solve ``-eps^2 Lap_h psi = rhs`` for an arbitrary interior source."""
    A = grid.laplacian
    b = np.asarray(rhs, dtype=float) / eps**2
    x, stats = pcg(A, b, x0=x0, diag=A.diagonal(), tol=tol,
                   maxiter=maxiter or default_maxiter(grid), reduce=reduce)
    if not stats.converged and raise_on_failure:
        raise LinearSolveError(stats, "Poisson solve")
    return ScalarField(grid, x), stats


# -- free-space Coulomb potential --------------------------------------------

# int over [0,1]^3 of 1/|x|
_UNIT_OCTANT = 1.5 * math.log((math.sqrt(3) + 1) / (math.sqrt(3) - 1)) - math.pi / 4


def cell_average_kernel(h: float) -> float:
    """Mean of ``1/(4 pi |x|)`` over the cube ``[-h/2, h/2]^3`` (closed form)."""
    # eight octants [0, h/2]^3, each (h/2)^2 * _UNIT_OCTANT, divided by h^3
    return 2 * _UNIT_OCTANT / (4 * math.pi * h)


@lru_cache(maxsize=4)
def _kernel_hat(dims: tuple, h: float):
    shape = tuple(sfft.next_fast_len(2 * n - 1, real=True) for n in dims)
    axes = []
    for n, m in zip(dims, shape):
        off = np.arange(m)
        off = np.where(off < n, off, off - m)  # cyclic offsets, |off| <= n - 1
        off = np.where(np.abs(off) < n, off, 0).astype(float)
        axes.append(off * h)
    X, Y, Z = np.meshgrid(*axes, indexing="ij")
    r = np.sqrt(X**2 + Y**2 + Z**2)
    with np.errstate(divide="ignore"):
        K = np.where(r > 0, 1.0 / (4 * math.pi * r), 0.0) * h**3
    K[0, 0, 0] = cell_average_kernel(h) * h**3
    # entries whose offset exceeds the box never meet the source; zero them
    for ax, (n, m) in enumerate(zip(dims, shape)):
        bad = np.arange(m)
        bad = (bad >= n) & (bad <= m - n)
        idx = [slice(None)] * 3
        idx[ax] = bad
        K[tuple(idx)] = 0.0
    return shape, sfft.rfftn(K)


def newton_potential(src_full: np.ndarray, h: float) -> np.ndarray:
    """``(1/4pi) int src(y)/|x-y| dy`` on the box lattice, zero-padded FFT convolution."""
    dims = src_full.shape
    shape, khat = _kernel_hat(tuple(dims), float(h))
    out = sfft.irfftn(sfft.rfftn(src_full, s=shape) * khat, s=shape)
    return out[: dims[0], : dims[1], : dims[2]]


def coulomb_free(src: ScalarField, q: float) -> ScalarField:
    """Free-space potential ``q/(4 pi) int src(y)/|x-y| dy`` evaluated on the grid.

    ``src`` is typically ``u^2``; its exterior values are zero.
    """
    g = src.grid
    phi = newton_potential(g.scatter(src.values), g.h)
    return ScalarField(g, q * g.gather(phi))


def psi_consistency(u: ScalarField, eps: float, q: float) -> float:
    """Gap between the Dirichlet and free-space Coulomb pairings of ``u``.

    Returns ``|G_eps^Dirichlet(u) - G_eps^free(u)|`` with both pairings
    ``eps^-3 sum u^2 psi h^3``.  Zero field gives zero.
    """
    if not np.any(u.values):
        return 0.0
    g = u.grid
    psi_d, _ = solve_psi_eps(u, eps, q)
    psi_f = coulomb_free(ScalarField(g, u.values**2), q).values / eps**2
    w = g.cell_volume / eps**3
    return abs(w * psum(u.values**2 * psi_d.values) - w * psum(u.values**2 * psi_f))


# -- fast box inverse (full-box domains only) ---------------------------------


@lru_cache(maxsize=4)
def _box_eigs(dims: tuple, h: float, spectral: bool = False):
    """Eigenvalues of ``-Lap`` on the sine modes of a box.

    ``spectral`` gives the exact continuum values ``(pi j / L)^2`` instead
    of those of the 7-point stencil.
    """
    lam = []
    for n in dims:
        j = np.arange(1, n + 1)
        if spectral:
            lam.append((np.pi * j / (h * (n + 1))) ** 2)
        else:
            lam.append((4 / h**2) * np.sin(np.pi * j / (2 * (n + 1))) ** 2)
    return lam[0][:, None, None] + lam[1][None, :, None] + lam[2][None, None, :]


def box_shifted_inverse(grid: DomainGrid, rhs: np.ndarray, a: float, c: float, *,
                        spectral: bool = False) -> np.ndarray:
    """Solve ``(a * (-Lap_h) + c) x = rhs`` exactly on a grid whose mask fills the box."""
    if not grid.mask.all():
        raise ValueError("box inverse needs a full-box mask")
    lam = _box_eigs(grid.dims, grid.h, spectral)
    f = grid.scatter(rhs)
    x = sfft.dstn(sfft.dstn(f, type=1, norm="ortho") / (a * lam + c), type=1, norm="ortho")
    return grid.gather(x)
