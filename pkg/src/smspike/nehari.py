"""
Nehari projection and projected descent.

For ``w`` with a nontrivial positive part the ray ``t -> I(t w)`` has a
single interior maximum at the root of

    ||w||^2 + t^2 omega G(w) - t^(p-2) |w+|^p = 0,

and ``t(w) w`` lies on the Nehari set.  :func:`descend` minimizes the
energy restricted to that set by stepping along the H_eps-gradient and
re-projecting.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .concentration import barycenter, peak
from .config import SolverConfig
from .energy import DomainFunctional, EnergyBreakdown
from .mesh import ScalarField

log = logging.getLogger(__name__)

ROUNDOFF_BAND = 1e-13  # relative energy resolution of the line search
MAX_FLAT_STEPS = 50


class NehariError(ValueError):
    """The field has no positive part, so it cannot be projected."""


class DescentError(RuntimeError):
    """Descent aborted; ``partial`` holds the last accepted iterate."""

    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


def solve_t(a: float, b: float, c: float, p: float) -> float:
    """Unique positive root of ``a + b t^2 - c t^(p-2)`` (``a, c > 0``, ``b >= 0``).

    Works with ``s = log t``: ``g(s) = log(a + b e^(2s)) - log c - (p-2) s``
    has slope below ``2 - (p-2) < 0``, so it is strictly decreasing.
    Bracket from ``s = 0``, bisect, then polish with Newton.
    """
    if not c > 0:
        raise NehariError("positive part vanishes; no Nehari projection")
    if not a > 0:
        raise NehariError("zero norm")
    k = p - 2
    la, lc = math.log(a), math.log(c)
    lb = math.log(b) if b > 0 else -math.inf

    def g(s):
        return np.logaddexp(la, lb + 2 * s) - lc - k * s

    def dg(s):
        return 2.0 / (1.0 + math.exp(min(la - lb - 2 * s, 700.0))) - k if b > 0 else -k

    g0 = g(0.0)
    if g0 == 0:
        return 1.0
    lo, hi, step = 0.0, 0.0, 1.0
    if g0 > 0:
        while g(hi) > 0:
            lo, hi, step = hi, hi + step, 2 * step
    else:
        while g(lo) <= 0:
            hi, lo, step = lo, lo - step, 2 * step
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-6:
            break
    s = 0.5 * (lo + hi)
    for _ in range(50):
        step = g(s) / dg(s)
        s_new = min(max(s - step, lo), hi)
        if s_new == s:
            break
        s = s_new
        if abs(step) <= 1e-16 * max(1.0, abs(s)):
            break
    if s > 700:
        raise NehariError(f"projection factor exp({s:.1f}) is not representable")
    return math.exp(s)


def project_t(w: ScalarField, eps: float, omega: float, q: float, p: float, *,
              functional=None) -> float:
    """Scale factor placing ``w`` on the Nehari set."""
    F = functional or DomainFunctional(w.grid, eps, omega, q, p)
    if not np.any(w.values > 0):
        raise NehariError("positive part vanishes; no Nehari projection")
    psi, _ = F.potential(w.values)
    a, G, c = F.parts(w.values, psi)
    return solve_t(a, F.omega * G, c, F.p)


def nehari_point(w: ScalarField, eps: float, omega: float, q: float, p: float, *,
                 functional=None) -> ScalarField:
    return w * project_t(w, eps, omega, q, p, functional=functional)


def ray_energy(t, a, G, c, omega, p) -> float:
    return 0.5 * t * t * a + 0.25 * omega * t**4 * G - t**p * c / p


@dataclass
class CriticalPoint:
    u: ScalarField
    psi: ScalarField
    energy: EnergyBreakdown
    grad_norm: float
    iterations: int
    barycenter: np.ndarray
    peak: np.ndarray
    ancestry: str = ""
    converged: bool = True
    message: str = ""
    history: list = field(default_factory=list, repr=False)
    small_norm_flag: bool = False

    @property
    def total(self) -> float:
        return self.energy.total

    def norm(self) -> float:
        return math.sqrt(self.energy.norm_sq)


def _finish(F, v, psi, gnorm, it, ancestry, converged, msg, history) -> CriticalPoint:
    u = ScalarField(F.grid, v)
    e = F.breakdown(v, psi)
    return CriticalPoint(
        u=u,
        psi=ScalarField(F.grid, psi),
        energy=e,
        grad_norm=gnorm,
        iterations=it,
        barycenter=barycenter(u, F.eps, F.p),
        peak=peak(u),
        ancestry=ancestry,
        converged=converged,
        message=msg,
        history=history,
        small_norm_flag=math.sqrt(max(e.norm_sq, 0.0)) < 1e-3,
    )


def descend_functional(F, v0: np.ndarray, *, tol_rel=1e-6, max_iter=1500, c1=1e-4,
                       shrink=0.5, s0=0.5, ancestry="", callback=None) -> CriticalPoint:
    """Projected H_eps-gradient descent with Armijo backtracking and BB steps.

    ``F`` is any functional object exposing ``potential``, ``parts``,
    ``l2_gradient``, ``riesz``, ``inner``, ``breakdown``, ``omega``, ``p``.
    Stops when the H_eps norm of the gradient at the projected point is
    at most ``tol_rel * sqrt(energy)``.
    """
    v0 = np.asarray(v0, dtype=float)
    if not np.any(v0 > 0):
        raise NehariError("initializer has no positive part")
    psi, _ = F.potential(v0)
    a, G, c = F.parts(v0, psi)
    t = solve_t(a, F.omega * G, c, F.p)
    v = t * v0
    psi = t * t * psi
    E = ray_energy(t, a, G, c, F.omega, F.p)
    history = [E]
    s = s0
    prev = None  # (v, d) of the previous iterate for Barzilai-Borwein
    d = None
    gnorm = math.inf
    stalled = 0
    for it in range(max_iter + 1):
        g = F.l2_gradient(v, psi)
        d = F.riesz(g, x0=d)
        gnorm = math.sqrt(max(F.inner(d, d), 0.0))
        if not (math.isfinite(gnorm) and math.isfinite(E)):
            raise DescentError(f"non-finite state at iteration {it}",
                               partial=_finish(F, v, psi, gnorm, it, ancestry, False, "nan", history))
        if callback is not None:
            callback(it, v, E, gnorm)
        if gnorm <= tol_rel * math.sqrt(abs(E)):
            return _finish(F, v, psi, gnorm, it, ancestry, True, "converged", history)
        if it == max_iter:
            break
        if prev is not None:
            du = v - prev[0]
            dd = d - prev[1]
            num = F.inner(du, du)
            den = F.inner(du, dd)
            if den > 0 and num > 0:
                s = min(max(num / den, 1e-4), 1e4)
            else:
                s = min(2 * s, 1e4)
        slope = gnorm * gnorm
        # energy differences below this are rounding noise: the Armijo test
        # cannot discriminate there, so a step that keeps E inside the band
        # is taken and the gradient norm decides convergence
        band = ROUNDOFF_BAND * abs(E)
        accepted = False
        while s > 1e-14:
            w = v - s * d
            if np.any(w > 0):
                psi_w, _ = F.potential(w, x0=psi, reduce=1e-4)
                a, G, c = F.parts(w, psi_w)
                if c > 0 and a > 0:
                    t = solve_t(a, F.omega * G, c, F.p)
                    E_new = ray_energy(t, a, G, c, F.omega, F.p)
                    if E_new <= E - c1 * s * slope:
                        accepted = True
                        stalled = 0
                        break
                    if c1 * s * slope <= band and E_new <= E + band:
                        accepted = True
                        stalled += 1
                        break
            s *= shrink
        if accepted and stalled > MAX_FLAT_STEPS:
            accepted = False
        if not accepted:
            msg = f"step underflow at iteration {it} (grad norm {gnorm:.3e})"
            log.info(msg)
            return _finish(F, v, psi, gnorm, it, ancestry, False, msg, history)
        prev = (v, d)
        v = t * w
        psi = t * t * psi_w
        E = E_new
        history.append(E)
    return _finish(F, v, psi, gnorm, max_iter, ancestry, False,
                   f"iteration cap {max_iter} reached", history)


def descend(u0: ScalarField, cfg: SolverConfig, *, ancestry: str = "", functional=None,
            callback=None) -> CriticalPoint:
    """Minimize the energy over the Nehari set starting from ``u0``."""
    F = functional or DomainFunctional(u0.grid, cfg.eps, cfg.omega, cfg.q, cfg.p,
                                       tol=cfg.linear_tol, quadrature=cfg.quadrature)
    return descend_functional(F, u0.values, tol_rel=cfg.stationarity_tol,
                              max_iter=cfg.max_iter, ancestry=ancestry, callback=callback)
