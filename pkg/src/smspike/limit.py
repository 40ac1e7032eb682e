"""
The whole-space limit problem and the single-spike trial functions built from it.

The ground state ``U`` minimizes

    I_inf(u) = 1/2 ||u||_H1^2 + omega/4 int u^2 psi_inf(u) - 1/p |u+|_p^p

over its Nehari set, with ``psi_inf`` the Newtonian potential of ``q u^2``.
It is computed on a large box (``u = 0`` on the faces) with the potential
taken from the free-space kernel, then rescaled and cut off to give the
bumps ``W(x) = U((x - xi)/eps) chi(|x - xi|)`` on a bounded domain.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.fft as sfft
import scipy.ndimage as ndi

from .energy import DomainFunctional, EnergyBreakdown, pos_pow
from .fieldio import read_field, write_field
from .mesh import DomainError, DomainGrid, ScalarField, build_domain, psum
from .nehari import CriticalPoint, descend_functional, solve_t
from .poisson import _box_eigs, newton_potential

log = logging.getLogger(__name__)


class BoundaryContaminationError(RuntimeError):
    """The ground state has not decayed at the box faces; use a larger box."""


class LimitFunctional(DomainFunctional):
    """Energy on a full box with ``eps = 1`` and the free-space potential.

    With ``spectral`` (the default) the Laplacian is the exact one on the
    sine modes of the box and ``|u+|^p`` is integrated on a twice finer
    lattice after sine interpolation.  Without the finer quadrature the
    nodal sum of ``u^p`` aliases and the discrete minimizer collapses onto
    a few lattice sites.  ``spectral=False`` gives the 7-point stencil and
    nodal quadrature of the domain solver.
    """

    def __init__(self, grid: DomainGrid, omega=1.0, q=1.0, p=5.0, *, spectral=True,
                 oversample=2):
        if not grid.mask.all():
            raise DomainError("the limit problem lives on a full box")
        super().__init__(grid, 1.0, omega, q, p)
        self.spectral = spectral
        self.oversample = int(oversample)
        self._lam = _box_eigs(tuple(grid.dims), float(grid.h), spectral)

    def _modes(self, v):
        return sfft.dstn(self.grid.scatter(v), type=1, norm="ortho")

    def _apply(self, v, symbol):
        f = sfft.dstn(self._modes(v) * symbol, type=1, norm="ortho")
        return self.grid.gather(f)

    def _fine(self, v):
        """Sine interpolation of ``v`` onto the lattice of spacing ``h/m``."""
        m = self.oversample
        nx, ny, nz = self.grid.dims
        pad = np.zeros((m * (nx + 1) - 1, m * (ny + 1) - 1, m * (nz + 1) - 1))
        pad[:nx, :ny, :nz] = self._modes(v) * m**1.5
        return sfft.dstn(pad, type=1, norm="ortho")

    def _coarse_adjoint(self, f):
        m = self.oversample
        nx, ny, nz = self.grid.dims
        c = sfft.dstn(f, type=1, norm="ortho")[:nx, :ny, :nz] * m**1.5
        return self.grid.gather(sfft.dstn(c, type=1, norm="ortho"))

    def potential(self, v, x0=None, reduce=None):
        g = self.grid
        phi = newton_potential(g.scatter(self.q * v * v), g.h)
        return g.gather(phi), None

    def norm_sq(self, v) -> float:
        if not self.spectral:
            return super().norm_sq(v)
        m = self._modes(v)
        return self.w * psum((1 + self._lam) * m * m)

    def inner(self, a, b) -> float:
        if not self.spectral:
            return super().inner(a, b)
        return self.w * psum((1 + self._lam) * self._modes(a) * self._modes(b))

    def parts(self, v, psi):
        if not self.spectral:
            return super().parts(v, psi)
        c = self.w / self.oversample**3 * psum(pos_pow(self._fine(v), self.p))
        return self.norm_sq(v), self.w * psum(v * v * psi), c

    def l2_gradient(self, v, psi) -> np.ndarray:
        if not self.spectral:
            return super().l2_gradient(v, psi)
        nonlin = self._coarse_adjoint(pos_pow(self._fine(v), self.p - 1)) / self.oversample**3
        return self._apply(v, 1 + self._lam) + self.omega * v * psi - nonlin

    def riesz(self, g, x0=None):
        return self._apply(g, 1 / (1 + self._lam))


def limit_grid(box_size: float, resolution: int) -> DomainGrid:
    return build_domain("cube", resolution, box_lo=-box_size / 2, box_size=box_size)


@dataclass
class GroundState:
    U: ScalarField
    m_inf: float
    g_U: float
    norm_h1: float
    norm_lp: float
    box_size: float
    resolution: int
    omega: float
    q: float
    p: float
    nehari_rel: float
    boundary_decay: float
    m_coarse: float = math.nan
    coarse_resolution: int = 0
    m_coarse2: float = math.nan
    coarse2_resolution: int = 0
    m_extrapolated: float = math.nan
    m_error: float = math.nan
    extrapolation: str = ""
    iterations: int = 0
    spectral: bool = True
    energy: EnergyBreakdown | None = field(default=None, repr=False)

    @property
    def grid(self) -> DomainGrid:
        return self.U.grid

    @property
    def peak_value(self) -> float:
        return float(self.U.values.max())

    def scalars(self) -> dict:
        keys = ("m_inf", "g_U", "norm_h1", "norm_lp", "box_size", "resolution", "omega",
                "q", "p", "nehari_rel", "boundary_decay", "m_coarse", "coarse_resolution",
                "m_coarse2", "coarse2_resolution", "m_extrapolated", "m_error", "extrapolation",
                "iterations", "spectral")
        return {k: getattr(self, k) for k in keys}


def gs_hash(box_size, resolution, omega, q, p, tol_rel, refine, spectral=True) -> str:
    key = f"{box_size!r}|{resolution}|{omega!r}|{q!r}|{p!r}|{tol_rel!r}|{refine}|{spectral}|v3"
    return hashlib.sha256(key.encode()).hexdigest()[:16]


def _solve_on_box(box_size, resolution, omega, q, p, tol_rel, max_iter, shift, spectral=True):
    g = limit_grid(box_size, resolution)
    F = LimitFunctional(g, omega, q, p, spectral=spectral)
    c = np.asarray(shift, dtype=float)
    r2 = np.sum((g.points - c) ** 2, axis=1)
    u0 = 2.0 * np.exp(-r2 / 4.0)  # fixed deterministic initializer
    cp = descend_functional(F, u0, tol_rel=tol_rel, max_iter=max_iter, ancestry="gaussian")
    if not cp.converged:
        log.warning("ground state descent: %s", cp.message)
    return F, cp


def _decay(cp: CriticalPoint) -> float:
    g = cp.u.grid
    edge = g.neighbors_exterior()
    return float(np.abs(cp.u.values[edge]).max() / cp.u.values.max())


def ground_state(box_size: float = 18.0, resolution: int = 128, omega: float = 1.0,
                 q: float = 1.0, p: float = 5.0, *, refine: bool = True,
                 coarse_resolution: int | None = None, tol_rel: float = 1e-7,
                 max_iter: int = 2000, shift=(0.0, 0.0, 0.0), decay_tol: float = 1e-6,
                 spectral: bool = True, cache_dir=None) -> GroundState:
    """Compute (or load from ``cache_dir``) the ground state of the limit problem.

    The box is ``[-box_size/2, box_size/2]^3`` with ``resolution`` intervals
    per side; an even ``resolution`` puts a node at the origin.  With
    ``refine`` the energy is also computed at ``coarse_resolution``
    (default ``3/4`` of ``resolution``) and one step coarser again, and
    extrapolated with :func:`extrapolate`.

    Raises
    ------
    BoundaryContaminationError
        when ``U`` exceeds ``decay_tol * max U`` on the node layer next to
        the box faces.
    """
    tag = gs_hash(box_size, resolution, omega, q, p, tol_rel, refine, spectral)
    if cache_dir is not None and tuple(shift) == (0.0, 0.0, 0.0):
        cached = load_ground_state(cache_dir, tag)
        if cached is not None:
            return cached

    F, cp = _solve_on_box(box_size, resolution, omega, q, p, tol_rel, max_iter, shift, spectral)
    decay = _decay(cp)
    if decay > decay_tol:
        raise BoundaryContaminationError(
            f"U/max U = {decay:.2e} next to the box faces (> {decay_tol:g}); enlarge box_size")
    e = cp.energy
    gs = GroundState(
        U=cp.u, m_inf=e.total, g_U=e.g_eps, norm_h1=math.sqrt(e.norm_sq),
        norm_lp=e.lp_pow ** (1 / p), box_size=box_size, resolution=resolution,
        omega=omega, q=q, p=p, nehari_rel=abs(e.nehari_residual) / e.norm_sq,
        boundary_decay=decay, iterations=cp.iterations, spectral=spectral, energy=e,
    )
    if refine:
        nc = coarse_resolution or (3 * resolution) // 4
        nc2 = 2 * nc - resolution  # same step in 1/h
        levels = [gs.m_inf]
        for n in (nc, nc2):
            if n < 16:
                break
            _, cpc = _solve_on_box(box_size, n, omega, q, p, tol_rel, max_iter, shift, spectral)
            levels.append(cpc.energy.total)
        gs.m_coarse, gs.coarse_resolution = levels[1], nc
        if len(levels) == 3:
            gs.m_coarse2, gs.coarse2_resolution = levels[2], nc2
        gs.m_extrapolated, gs.extrapolation = extrapolate(levels, resolution, nc)
        gs.m_error = abs(gs.m_extrapolated - gs.m_inf)
    if cache_dir is not None and tuple(shift) == (0.0, 0.0, 0.0):
        save_ground_state(gs, cache_dir, tag)
    return gs


def extrapolate(levels, n_fine: int, n_coarse: int) -> tuple[float, str]:
    """Limit of ``[m(n_fine), m(n_coarse), m(2 n_coarse - n_fine)]``.

    The spectral discretization converges like ``exp(-c/h)``, so with
    three levels equally spaced in ``1/h`` Aitken's delta-squared is
    exact for that model.  It is used when the differences shrink with
    a common sign; otherwise (or with two levels) the ``h^2`` Richardson
    formula is returned.
    """
    m3, m2 = levels[0], levels[1]
    if len(levels) >= 3:
        m1 = levels[2]
        d1, d2 = m2 - m1, m3 - m2
        if d1 != 0 and 0 < d2 / d1 < 1:
            return m3 - d2 * d2 / (d2 - d1), "aitken"
    hf, hc = 1.0 / n_fine, 1.0 / n_coarse
    return (hc**2 * m3 - hf**2 * m2) / (hc**2 - hf**2), "h2"


def save_ground_state(gs: GroundState, cache_dir, tag: str) -> Path:
    d = Path(cache_dir)
    d.mkdir(parents=True, exist_ok=True)
    write_field(d / f"gs_{tag}.smsf", gs.U)
    side = dict(gs.scalars(), config_hash=tag)
    (d / f"gs_{tag}.json").write_text(json.dumps(side, indent=1, sort_keys=True))
    return d / f"gs_{tag}.smsf"


def load_ground_state(cache_dir, tag: str) -> GroundState | None:
    d = Path(cache_dir)
    f, j = d / f"gs_{tag}.smsf", d / f"gs_{tag}.json"
    if not (f.exists() and j.exists()):
        return None
    side = json.loads(j.read_text())
    grid = limit_grid(side["box_size"], side["resolution"])
    U = read_field(f, grid=grid)
    side.pop("config_hash", None)
    return GroundState(U=U, **side)


# -- bumps -------------------------------------------------------------------


def cutoff(t: np.ndarray, r: float) -> np.ndarray:
    """Radial cutoff: 1 below r/2, 0 above r, linear in between (slope exactly 2/r)."""
    return np.clip(2.0 - 2.0 * np.asarray(t) / r, 0.0, 1.0)


def sample_profile(gs: GroundState, z: np.ndarray) -> np.ndarray:
    """Trilinear interpolation of ``U`` at blown-up coordinates ``z`` (0 off its box)."""
    g = gs.grid
    coords = ((z - g.origin) / g.h).T
    full = g.scatter(gs.U.values)
    return ndi.map_coordinates(full, coords, order=1, mode="constant", cval=0.0)


def make_bump(gs: GroundState, xi, eps: float, grid: DomainGrid, r: float, *,
              check: bool = True, check_scale: bool = True) -> ScalarField:
    """``U((x - xi)/eps) chi(|x - xi|)`` sampled on ``grid``.

    Refuses centres closer than ``r`` to the boundary and, unless
    ``check_scale`` is off, ``eps > r/4``.  ``check=False`` skips both.
    """
    xi = np.asarray(xi, dtype=float)
    if check:
        if check_scale and eps > r / 4 * (1 + 1e-12):
            raise DomainError(f"eps={eps} exceeds r/4={r / 4}")
        if grid.signed_distance(xi)[0] < r:
            raise DomainError(f"centre {xi} is closer than r={r} to the boundary")
    d = np.linalg.norm(grid.points - xi, axis=1)
    vals = np.zeros(grid.n_interior)
    near = d < r
    vals[near] = sample_profile(gs, (grid.points[near] - xi) / eps) * cutoff(d[near], r)
    return ScalarField(grid, vals)


def smooth_profile(grid: DomainGrid, center, radius: float) -> ScalarField:
    """Radial cubic bump ``(1 - (|x-c|/R)^2)^3`` (compactly supported, nonnegative)."""
    d2 = np.sum((grid.points - np.asarray(center, dtype=float)) ** 2, axis=1) / radius**2
    return ScalarField(grid, np.where(d2 < 1, (1 - d2) ** 3, 0.0))


@dataclass
class NehariBump:
    u: ScalarField
    w: ScalarField
    t: float
    energy: EnergyBreakdown
    psi: ScalarField


def phi_eps(gs: GroundState, xi, eps: float, grid: DomainGrid, r: float, *,
            omega: float | None = None, q: float | None = None, p: float | None = None,
            functional: DomainFunctional | None = None) -> NehariBump:
    """Nehari-projected bump ``t(W) W`` with its energy."""
    omega = gs.omega if omega is None else omega
    q = gs.q if q is None else q
    p = gs.p if p is None else p
    F = functional or DomainFunctional(grid, eps, omega, q, p)
    W = make_bump(gs, xi, eps, grid, r)
    return project_field(F, W)


def project_field(F: DomainFunctional, W: ScalarField) -> NehariBump:
    psi, _ = F.potential(W.values)
    a, G, c = F.parts(W.values, psi)
    t = solve_t(a, F.omega * G, c, F.p)
    u = W * t
    psi_u = psi * t * t
    return NehariBump(u=u, w=W, t=t, energy=F.breakdown(u.values, psi_u),
                      psi=ScalarField(W.grid, psi_u))


def peak_cell_mass(gs: GroundState) -> float:
    """``int |U|^p`` over the unit cube centred at the peak of ``U``.

    In blown-up variables this is the mass one ``eps``-cube of the
    partition receives from a bump centred in it.
    """
    g = gs.grid
    u = gs.U.values
    c = g.points[int(np.argmax(u))]
    inside = np.all(np.abs(g.points - c) <= 0.5 + 1e-12, axis=1)
    up = pos_pow(u, gs.p)
    # nodal share of the cube, scaled to the (oversampled) total
    return float(psum(np.where(inside, up, 0.0)) / psum(up) * gs.norm_lp ** gs.p)


def limit_norms(gs: GroundState) -> dict:
    """H1 norm, L^p norm and G(U) of the stored ground state."""
    return {"h1": gs.norm_h1, "lp": gs.norm_lp, "G": gs.g_U, "mass": psum(gs.U.values**2) * gs.grid.cell_volume}
