"""Independent reference computations used by the tests."""

import math

import numpy as np
from scipy.integrate import simpson, solve_ivp


def radial_ground_state(p: float = 5.0, r_max: float = 30.0):
    """Positive radial solution of ``-u'' - 2u'/r + u = u^(p-1)`` by shooting.

    Returns ``(u0, energy)`` with ``energy = (1/2 - 1/p) ||u||_H1^2``.
    Bisection on the initial value: too small and ``u'`` turns positive,
    too large and ``u`` crosses zero.
    """

    def rhs(r, y):
        u, v = y
        return [v, -2 / r * v + u - abs(u) ** (p - 2) * u]

    def crosses(r, y):
        return y[0]

    def turns(r, y):
        return y[1]

    crosses.terminal = True
    turns.terminal = True
    turns.direction = 1

    def overshoots(a):
        s = solve_ivp(rhs, (1e-6, r_max), [a, 0.0], events=[crosses, turns],
                      rtol=1e-12, atol=1e-14)
        return s.t_events[0].size > 0

    lo, hi = 1.0, 50.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if overshoots(mid):
            hi = mid
        else:
            lo = mid
    s = solve_ivp(rhs, (1e-6, r_max), [lo, 0.0], events=[crosses, turns], rtol=1e-12,
                  atol=1e-14, dense_output=True)
    r = np.linspace(1e-6, s.t[-1], 200001)
    u, v = s.sol(r)
    n2 = simpson((v * v + u * u) * 4 * math.pi * r * r, x=r)
    return lo, (0.5 - 1 / p) * n2


def unit_cube_torsion_center(terms: int = 199) -> float:
    """``psi(1/2,1/2,1/2)`` for ``-Lap psi = 1`` on the unit cube (sine series)."""
    k = np.arange(1, terms + 1, 2, dtype=float)
    I, J, K = np.meshgrid(k, k, k, indexing="ij")
    sgn = (-1.0) ** ((I - 1) / 2 + (J - 1) / 2 + (K - 1) / 2)
    coef = 64.0 / (math.pi**3 * I * J * K)
    return float(np.sum(sgn * coef / (math.pi**2 * (I * I + J * J + K * K))))


def naive_energy(grid, u, eps, omega, psi, p):
    """Energy by explicit loops over nodes and axis links (no sparse algebra)."""
    nx, ny, nz = grid.dims
    full = grid.scatter(u)
    pfull = grid.scatter(psi)
    mask = grid.mask
    grad = 0.0
    mass = 0.0
    coul = 0.0
    lp = 0.0
    for i in range(-1, nx):
        for j in range(-1, ny):
            for k in range(-1, nz):
                inside = 0 <= i and 0 <= j and 0 <= k and mask[i, j, k]
                a = full[i, j, k] if inside else 0.0
                if inside:
                    mass += a * a
                    coul += a * a * pfull[i, j, k]
                    lp += max(a, 0.0) ** p
                for di, dj, dk in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
                    i2, j2, k2 = i + di, j + dj, k + dk
                    inside2 = (i2 < nx and j2 < ny and k2 < nz and min(i2, j2, k2) >= 0
                               and mask[i2, j2, k2])
                    if not (inside or inside2):
                        continue
                    b = full[i2, j2, k2] if inside2 else 0.0
                    grad += ((b - a) / grid.h) ** 2
    w = grid.h**3 / eps**3
    n2 = w * (eps * eps * grad + mass)
    G = w * coul
    c = w * lp
    return 0.5 * n2 + omega / 4 * G - c / p
