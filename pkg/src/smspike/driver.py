"""
Experiments: the multiplicity census, epsilon sweeps, the T_eps bound,
the higher-energy search and the slab repulsion probe.

Everything written to ``report.csv`` is a deterministic function of the
configuration: floats are printed with ``repr``, runs are folded in
initializer order and classes are sorted by ``(energy, barycenter)``.
Wall times go to a separate ``timings.json``.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate

from .concentration import (ConcentrationReport, ball_concentration, barycenter,
                            boundary_ratio, concentration_report)
from .config import ConfigError, SolverConfig
from .energy import DomainFunctional, relative_spread
from .fieldio import write_field
from .limit import (GroundState, ground_state, make_bump, peak_cell_mass, project_field,
                    sample_profile)
from .mesh import (CATEGORY, DomainError, DomainGrid, ScalarField, cube_partition, erode,
                   psum)
from .nehari import CriticalPoint, DescentError, NehariError, descend_functional, solve_t

log = logging.getLogger(__name__)

RUN_COLUMNS = (
    "eps", "index", "ancestry", "xi_x", "xi_y", "xi_z", "converged", "iterations",
    "energy", "grad_norm", "norm_eps", "nehari_spread", "beta_x", "beta_y", "beta_z",
    "peak_x", "peak_y", "peak_z", "ball_fraction", "gamma_mass_max", "dist_over_eps",
    "in_omega_plus", "class_id", "low_energy",
)


class NonConvergenceError(RuntimeError):
    """A mandatory descent failed; ``report`` holds what was finished."""

    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report


def _f(x) -> str:
    return repr(float(x))


# -- records -----------------------------------------------------------------


@dataclass
class RunSummary:
    eps: float
    index: int
    ancestry: str
    xi: np.ndarray
    point: CriticalPoint
    conc: ConcentrationReport
    nehari_spread: float
    class_id: int = -1
    low_energy: bool = False

    @property
    def energy(self) -> float:
        return self.point.energy.total

    @property
    def beta(self) -> np.ndarray:
        return self.point.barycenter

    def csv_row(self) -> list[str]:
        cp, c = self.point, self.conc
        return [
            _f(self.eps), str(self.index), self.ancestry, *map(_f, self.xi),
            str(int(cp.converged)), str(cp.iterations), _f(cp.energy.total), _f(cp.grad_norm),
            _f(cp.norm()), _f(self.nehari_spread), *map(_f, cp.barycenter), *map(_f, cp.peak),
            _f(c.ball_fraction), _f(c.gamma_mass_max), _f(c.piece_boundary_dist_over_eps),
            str(int(c.in_omega_plus)), str(self.class_id), str(int(self.low_energy)),
        ]


@dataclass
class CensusClass:
    energy: float
    beta: np.ndarray
    members: list[int]
    low_energy: bool


@dataclass
class ExperimentReport:
    kind: str
    config_hash: str
    config: SolverConfig
    runs: list[RunSummary] = field(default_factory=list)
    classes: list[CensusClass] = field(default_factory=list)
    m_eps: float = math.nan
    m_inf: float = math.nan
    c_eps: float | None = None
    table: list[dict] = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    wall_times: dict = field(default_factory=dict)

    @property
    def n_low(self) -> int:
        return sum(c.low_energy for c in self.classes)

    def write(self, out, *, fields: bool = True) -> Path:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "report.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(RUN_COLUMNS)
            for r in self.runs:
                w.writerow(r.csv_row())
        if self.table:
            keys = list(self.table[0])
            with open(out / "table.csv", "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(keys)
                for row in self.table:
                    w.writerow([_f(v) if isinstance(v, (float, np.floating)) else str(v)
                                for v in (row[k] for k in keys)])
        (out / "config.txt").write_text(self.config.to_text() + f"# hash={self.config_hash}\n")
        summary = {"kind": self.kind, "config_hash": self.config_hash,
                   "m_eps": self.m_eps, "m_inf": self.m_inf, "c_eps": self.c_eps,
                   "n_classes": len(self.classes), "n_low_energy_classes": self.n_low,
                   "classes": [{"energy": c.energy, "beta": c.beta.tolist(),
                                "members": c.members, "low_energy": c.low_energy}
                               for c in self.classes],
                   "meta": self.meta}
        (out / "summary.json").write_text(json.dumps(summary, indent=1, sort_keys=True))
        (out / "timings.json").write_text(json.dumps(self.wall_times, indent=1, sort_keys=True))
        if fields and self.kind in ("census", "solve"):
            by_index = {r.index: r for r in self.runs}
            for k, c in enumerate(self.classes):
                write_field(out / f"class_{k}.smsf", by_index[c.members[0]].point.u)
        return out / "report.csv"


# -- setup -------------------------------------------------------------------


def load_ground_state(cfg: SolverConfig) -> GroundState:
    cache = cfg.cache_dir or None
    return ground_state(cfg.gs_box, cfg.gs_resolution, cfg.omega, cfg.q, cfg.p,
                        cache_dir=cache)


def prepare(cfg: SolverConfig, grid: DomainGrid | None = None, *, scale: bool = False):
    """Build and validate the grid; raises :class:`ConfigError` on bad input.

    ``scale=False`` lets ``eps`` exceed ``r/4`` (sweeps start at ``0.3 r``);
    callers record the ``scale_separated`` flag instead.
    """
    try:
        grid = grid or cfg.build_grid()
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    cfg.validate(grid, scale=scale)
    r = cfg.radius(grid)
    try:
        erode(grid, r)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    return grid, r


def sample_centers(grid: DomainGrid, r: float, n: int, seed: int) -> np.ndarray:
    """``n`` well-separated nodes of the eroded set ``{dist >= r}``.

    Dart throwing over a seeded permutation of the candidate nodes; the
    exclusion radius starts at the mean spacing for ``n`` points and
    shrinks by 10% until ``n`` darts land.
    """
    if n <= 0:
        return np.zeros((0, 3))
    cand = grid.points[erode(grid, r)]
    if len(cand) == 0:
        raise ConfigError(f"no node lies at distance >= r={r:.4g} from the boundary")
    if len(cand) <= n:
        return cand.copy()
    order = np.random.default_rng(seed).permutation(len(cand))
    d = (len(cand) * grid.cell_volume / n) ** (1 / 3)
    while True:
        chosen = []
        for i in order:
            x = cand[i]
            if all(np.sum((x - cand[j]) ** 2) >= d * d for j in chosen):
                chosen.append(i)
                if len(chosen) == n:
                    return cand[chosen].copy()
        d *= 0.9


def _summarize(F, cp, xi, r, index, eps, p, ancestry) -> RunSummary:
    part = cube_partition(F.grid, eps)
    conc = concentration_report(cp.u, part, eps, p, r)
    return RunSummary(eps=eps, index=index, ancestry=ancestry, xi=np.asarray(xi, float),
                      point=cp, conc=conc, nehari_spread=relative_spread(cp.energy.nehari_forms()))


def _descend_from(F, W: ScalarField, cfg: SolverConfig, ancestry: str) -> CriticalPoint:
    return descend_functional(F, W.values, tol_rel=cfg.stationarity_tol,
                              max_iter=cfg.max_iter, ancestry=ancestry)


# -- dedup -------------------------------------------------------------------


def same_class(a: RunSummary, b: RunSummary, F: DomainFunctional, m_inf: float,
               cfg: SolverConfig) -> bool:
    if abs(a.energy - b.energy) >= cfg.dedup_energy * m_inf:
        return False
    if np.linalg.norm(a.beta - b.beta) >= cfg.dedup_beta * F.eps:
        return False
    du = a.point.u.values - b.point.u.values
    scale = max(a.point.norm(), b.point.norm())
    return math.sqrt(max(F.norm_sq(du), 0.0)) < cfg.dedup_dist * scale


def dedup(runs: list[RunSummary], F: DomainFunctional, m_inf: float,
          cfg: SolverConfig) -> list[CensusClass]:
    """Group runs into classes; all three closeness tests must hold.

    Runs are visited in ``(energy, beta)`` order and joined to the first
    class whose representative they match, so the result is deterministic.
    Sets ``class_id`` and ``low_energy`` on the runs.
    """
    order = sorted(runs, key=lambda s: (s.energy, *s.beta.tolist(), s.index))
    reps: list[RunSummary] = []
    classes: list[CensusClass] = []
    band = m_inf * (1 + cfg.delta_frac)
    for s in order:
        for k, rep in enumerate(reps):
            if same_class(s, rep, F, m_inf, cfg):
                classes[k].members.append(s.index)
                s.class_id = k
                break
        else:
            reps.append(s)
            s.class_id = len(classes)
            classes.append(CensusClass(s.energy, s.beta.copy(), [s.index], s.energy <= band))
        s.low_energy = s.energy <= band
    return classes


# -- census ------------------------------------------------------------------

def functional(cfg: SolverConfig, grid: DomainGrid, eps: float | None = None) -> DomainFunctional:
    return DomainFunctional(grid, cfg.eps if eps is None else eps, cfg.omega, cfg.q, cfg.p,
                            tol=cfg.linear_tol, quadrature=cfg.quadrature)


_WORKER = {}


def _worker_init(cfg_text, gs):
    cfg = SolverConfig.from_text(cfg_text)
    grid, r = prepare(cfg)
    _WORKER.update(cfg=cfg, grid=grid, r=r, gs=gs,
                   F=functional(cfg, grid))


def _census_task(args):
    index, xi = args
    w = _WORKER
    return _census_one(w["F"], w["gs"], w["cfg"], w["r"], index, xi)


def _census_one(F, gs, cfg, r, index, xi):
    W = make_bump(gs, xi, cfg.eps, F.grid, r, check_scale=False)
    start = project_field(F, W).u
    cp = _descend_from(F, start, cfg, f"phi[{index}]")
    return index, cp


def multiplicity_census(cfg: SolverConfig, *, gs: GroundState | None = None,
                        grid: DomainGrid | None = None, centers=None) -> ExperimentReport:
    """Descend from ``Phi_eps(xi_i)`` for ``cfg.multistart`` centres and dedup.

    Raises
    ------
    NonConvergenceError
        if a descent does not converge; the partial report is attached.
    """
    t0 = time.perf_counter()
    grid, r = prepare(cfg, grid)
    gs = gs or load_ground_state(cfg)
    F = functional(cfg, grid)
    xs = sample_centers(grid, r, cfg.multistart, cfg.seed) if centers is None else np.asarray(centers)
    rep = ExperimentReport("census", cfg.config_hash(), cfg, m_inf=gs.m_inf)
    rep.meta.update(shape=cfg.shape, r=r, h=grid.h, category=CATEGORY.get(grid.shape_tag),
                    scale_separated=bool(cfg.eps <= r / 4), m_inf_extrapolated=gs.m_extrapolated)
    tasks = list(enumerate(xs))
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(cfg.workers, initializer=_worker_init,
                                 initargs=(cfg.to_text(), gs)) as ex:
            results = list(ex.map(_census_task, tasks))
    else:
        results = [_census_one(F, gs, cfg, r, i, x) for i, x in tasks]
    results.sort(key=lambda t: t[0])
    failed = []
    for index, cp in results:
        rep.runs.append(_summarize(F, cp, xs[index], r, index, cfg.eps, cfg.p, cp.ancestry))
        if not cp.converged:
            failed.append(index)
    rep.classes = dedup(rep.runs, F, gs.m_inf, cfg)
    if rep.runs:
        rep.m_eps = min(s.energy for s in rep.runs)
    rep.meta["gamma0"] = 0.5 * peak_cell_mass(gs)
    rep.wall_times["census"] = time.perf_counter() - t0
    if failed:
        raise NonConvergenceError(f"descent did not converge for starts {failed}", rep)
    return rep


def best_run(rep: ExperimentReport) -> RunSummary:
    return min(rep.runs, key=lambda s: (s.energy, s.index))


# -- epsilon sweep -----------------------------------------------------------


def reference_center(grid: DomainGrid, r: float) -> np.ndarray:
    """The node farthest from the boundary (ties: lowest index)."""
    return grid.points[int(np.argmax(grid.interior_dist))].copy()


def epsilon_sweep(cfg: SolverConfig, eps_list, *, gs: GroundState | None = None,
                  grid: DomainGrid | None = None) -> ExperimentReport:
    """Census at each ``eps`` (descending) plus bump diagnostics.

    Table columns: ``eps, m_eps, rel_gap, t_phi, g_gap, boundary_ratio,
    ball_fraction, n_classes``; ``rel_gap = |m_eps - m_inf| / m_inf`` and
    ``g_gap = |G_eps(W) - G(U)|`` at the reference centre.
    """
    eps_list = [float(e) for e in eps_list]
    if any(a <= b for a, b in zip(eps_list, eps_list[1:])):
        raise ConfigError("eps list must be strictly descending")
    t0 = time.perf_counter()
    grid, r = prepare(cfg.with_(eps=min(eps_list)), grid)
    gs = gs or load_ground_state(cfg)
    rep = ExperimentReport("sweep", cfg.config_hash(), cfg, m_inf=gs.m_inf)
    xi0 = reference_center(grid, r)
    for eps in eps_list:
        c = cfg.with_(eps=eps)
        sub = multiplicity_census(c, gs=gs, grid=grid)
        rep.runs.extend(sub.runs)
        b = best_run(sub)
        F = functional(cfg, grid, eps)
        nb = project_field(F, make_bump(gs, xi0, eps, grid, r, check_scale=False))
        part = cube_partition(grid, eps)
        rep.table.append({
            "eps": eps, "m_eps": sub.m_eps, "rel_gap": abs(sub.m_eps - gs.m_inf) / gs.m_inf,
            "t_phi": nb.t, "g_gap": abs(nb.energy.g_eps / nb.t**4 - gs.g_U),
            "boundary_ratio": boundary_ratio(b.point.u, part, grid, eps, cfg.p),
            "ball_fraction": b.conc.ball_fraction, "n_classes": len(sub.classes),
        })
        rep.wall_times[f"eps={eps!r}"] = sub.wall_times["census"]
    rep.m_eps = rep.table[-1]["m_eps"]
    rep.meta.update(r=r, h=grid.h, reference_center=xi0.tolist(),
                    m_inf_extrapolated=gs.m_extrapolated)
    rep.wall_times["sweep"] = time.perf_counter() - t0
    return rep


def ladder(cfg: SolverConfig, grid: DomainGrid, factors=(0.3, 0.2, 0.15, 0.1)) -> list[float]:
    r = cfg.radius(grid)
    return [f * r for f in factors]


# -- T_eps bound ---------------------------------------------------------------


def cubic_profile(y2: np.ndarray, radius: float = 2.0) -> np.ndarray:
    """``V(y) = (1 - |y|^2/R^2)^3`` inside ``|y| < R`` (blown-up variables)."""
    s = 1 - y2 / radius**2
    return np.where(s > 0, s**3, 0.0)


def _radial_norms(f, df, R, p):
    """H1, L2, L^p, L^(12/5) norms of a radial function supported in ``[0, R]``."""
    w = lambda g: integrate.quad(lambda s: 4 * math.pi * s * s * g(s), 0, R, limit=200)[0]
    l2 = w(lambda s: f(s) ** 2)
    return {"h1": math.sqrt(l2 + w(lambda s: df(s) ** 2)), "l2": math.sqrt(l2),
            "lp": w(lambda s: abs(f(s)) ** p) ** (1 / p),
            "l125": w(lambda s: abs(f(s)) ** 2.4) ** (1 / 2.4)}


def t_factor_bounds(gs: GroundState, p: float, q: float, omega: float,
                    v_radius: float = 2.0) -> tuple[float, float, dict]:
    """Bounds ``[c1, c2]`` for the Nehari factor on ``theta v + (1-theta) W``.

    Uses, for all ``theta`` and small ``eps``,

        min(|V|_2, |U|_2)/4 <= ||w|| <= 2 (||V||_H1 + ||U||_H1),
        min(|V|_p, |U|_p)/4 <= |w|_p <= 2 (|V|_p + |U|_p),
        G(w) <= q C_HLS / (4 pi) (|V|_{12/5} + |U|_{12/5})^4,

    with the sharp Hardy-Littlewood-Sobolev constant; the ``U`` norms are
    those of the computed ground state and the ``V`` norms are exact.
    """
    R = v_radius
    V = _radial_norms(lambda s: (1 - s * s / R**2) ** 3,
                      lambda s: -6 * s / R**2 * (1 - s * s / R**2) ** 2, R, p)
    g = gs.grid
    u = gs.U.values
    U = {"h1": gs.norm_h1, "l2": math.sqrt(g.cell_volume * psum(u * u)),
         "lp": gs.norm_lp, "l125": (g.cell_volume * psum(np.abs(u) ** 2.4)) ** (1 / 2.4)}
    hls = math.sqrt(math.pi) / math.gamma(2.5) * (math.gamma(1.5) / math.gamma(3)) ** (-2 / 3)
    a_lo = (min(V["l2"], U["l2"]) / 4) ** 2
    a_hi = (2 * (V["h1"] + U["h1"])) ** 2
    c_lo = (min(V["lp"], U["lp"]) / 4) ** p
    c_hi = (2 * (V["lp"] + U["lp"])) ** p
    b_hi = omega * q * hls / (4 * math.pi) * (V["l125"] + U["l125"]) ** 4
    c1 = solve_t(a_lo, 0.0, c_hi, p)
    c2 = solve_t(a_hi, b_hi, c_lo, p)
    info = {"V": V, "U": U, "hls": hls, "a": (a_lo, a_hi), "c": (c_lo, c_hi), "b_hi": b_hi}
    return c1, c2, info


def v_eps(grid: DomainGrid, q0, eps: float, radius: float = 2.0) -> ScalarField:
    y2 = np.sum((grid.points - np.asarray(q0, float)) ** 2, axis=1) / eps**2
    return ScalarField(grid, cubic_profile(y2, radius))


def teps_bound(cfg: SolverConfig, eps_list, *, thetas=None, n_q: int = 8,
               gs: GroundState | None = None, grid: DomainGrid | None = None,
               v_radius: float = 2.0) -> ExperimentReport:
    """``c_eps = max I_eps(t w w)`` over ``w = theta v_eps + (1-theta) W_{q,eps}``.

    ``v_eps(x) = V((x - q0)/eps)`` with ``V`` the radial cubic bump of
    radius ``v_radius`` and ``q0`` the point of ``Omega^-`` farthest from
    the boundary; ``q`` ranges over ``n_q`` centres of ``Omega^-``.
    """
    t0 = time.perf_counter()
    eps_list = [float(e) for e in eps_list]
    thetas = np.linspace(0, 1, 11) if thetas is None else np.asarray(thetas, float)
    grid, r = prepare(cfg.with_(eps=min(eps_list)), grid)
    gs = gs or load_ground_state(cfg)
    c1, c2, info = t_factor_bounds(gs, cfg.p, cfg.q, cfg.omega, v_radius)
    q0 = reference_center(grid, r)
    qs = sample_centers(grid, r, n_q, cfg.seed)
    rep = ExperimentReport("teps", cfg.config_hash(), cfg, m_inf=gs.m_inf)
    rep.meta.update(c1=c1, c2=c2, q0=q0.tolist(), q_grid=qs.tolist(), thetas=thetas.tolist(),
                    v_radius=v_radius, bounds=info)
    for eps in eps_list:
        F = functional(cfg, grid, eps)
        v = v_eps(grid, q0, eps, v_radius)
        if np.any(v.values[grid.neighbors_exterior()] != 0):
            raise DomainError("v_eps does not vanish at the boundary")
        best = (-math.inf, None, None)
        t_lo, t_hi = math.inf, -math.inf
        for j, qj in enumerate(qs):
            W = make_bump(gs, qj, eps, grid, r, check_scale=False)
            for th in thetas:
                w = ScalarField(grid, th * v.values + (1 - th) * W.values)
                if not np.any(w.values > 0):
                    raise NehariError("vanishing positive part on the T_eps grid")
                nb = project_field(F, w)
                t_lo, t_hi = min(t_lo, nb.t), max(t_hi, nb.t)
                if nb.energy.total > best[0]:
                    best = (nb.energy.total, float(th), j)
        rep.table.append({"eps": eps, "c_eps": best[0], "theta_star": best[1],
                          "q_star_index": best[2], "t_min": t_lo, "t_max": t_hi,
                          "within_bounds": int(c1 <= t_lo and t_hi <= c2)})
    rep.c_eps = max(row["c_eps"] for row in rep.table)
    rep.wall_times["teps"] = time.perf_counter() - t0
    return rep


# -- higher-energy solutions ---------------------------------------------------


def core_pairs(grid: DomainGrid, n_pairs: int = 4) -> list[tuple[np.ndarray, np.ndarray]]:
    """Antipodal pairs on the core circle of a torus (axis along z)."""
    c = np.asarray(grid.params["center"], float)
    R = float(grid.params["major"])
    out = []
    for k in range(n_pairs):
        a = math.pi * k / n_pairs
        e = np.array([math.cos(a), math.sin(a), 0.0])
        out.append((c + R * e, c - R * e))
    return out


def higher_energy_search(cfg: SolverConfig, *, census: ExperimentReport | None = None,
                         gs: GroundState | None = None, grid: DomainGrid | None = None,
                         n_pairs: int = 4, teps: ExperimentReport | None = None) -> ExperimentReport:
    """Look for a solution above the census classes.

    Starts: ``t(w) w`` for ``w = (W_{xi1} + W_{xi2})/2`` with antipodal
    ``xi1, xi2`` on the torus core, plus the maximizer of the ``T_eps``
    grid when ``teps`` is given.  The report's ``meta['candidate']``
    is the index of the first candidate or ``None``; the search grid is
    always recorded.

    A candidate must be converged, match no census class and lie above
    the census maximum by ``dedup_energy * m_inf`` (and below ``c_eps``
    when known).  Whether it also clears ``m_inf (1 + delta_frac)`` is
    recorded as ``in_band``; on coarse lattices the census energies sit
    well below ``m_inf`` and that band says little.
    """
    t0 = time.perf_counter()
    grid, r = prepare(cfg, grid)
    if grid.shape_tag != "torus":
        raise ConfigError("higher_energy_search needs a torus")
    gs = gs or load_ground_state(cfg)
    census = census or multiplicity_census(cfg, gs=gs, grid=grid)
    F = functional(cfg, grid)
    starts = []
    for k, (x1, x2) in enumerate(core_pairs(grid, n_pairs)):
        W = make_bump(gs, x1, cfg.eps, grid, r, check_scale=False).values
        W = W + make_bump(gs, x2, cfg.eps, grid, r, check_scale=False).values
        starts.append((f"pair[{k}]", (x1 + x2) / 2, ScalarField(grid, 0.5 * W)))
    if teps is not None:
        row = teps.table[-1]
        q0 = np.asarray(teps.meta["q0"])
        qj = np.asarray(teps.meta["q_grid"][row["q_star_index"]])
        th = row["theta_star"]
        w = th * v_eps(grid, q0, cfg.eps, teps.meta["v_radius"]).values
        w = w + (1 - th) * make_bump(gs, qj, cfg.eps, grid, r, check_scale=False).values
        starts.append(("teps_max", qj, ScalarField(grid, w)))
    rep = ExperimentReport("higher", cfg.config_hash(), cfg, m_inf=gs.m_inf,
                           c_eps=None if teps is None else teps.c_eps)
    low = gs.m_inf * (1 + cfg.delta_frac)
    census_max = max((s.energy for s in census.runs), default=-math.inf)
    candidate = None
    for i, (tag, xi, w) in enumerate(starts):
        start = project_field(F, w).u
        cp = _descend_from(F, start, cfg, tag)
        s = _summarize(F, cp, xi, r, i, cfg.eps, cfg.p, tag)
        s.low_energy = s.energy <= low
        dup = any(same_class(s, c, F, gs.m_inf, cfg) for c in census.runs)
        in_band = s.energy > low and (rep.c_eps is None or s.energy <= rep.c_eps)
        s.class_id = -1 if dup else 0
        rep.runs.append(s)
        above = s.energy > census_max + cfg.dedup_energy * gs.m_inf
        rep.table.append({"start": tag, "converged": int(cp.converged), "energy": s.energy,
                          "in_band": int(in_band), "above_census": int(above),
                          "duplicate": int(dup)})
        below_c = rep.c_eps is None or s.energy <= rep.c_eps
        if candidate is None and cp.converged and not dup and above and below_c:
            candidate = i
    rep.meta.update(candidate=candidate, census_max=census_max, band_low=low,
                    search_grid=[t for t, _, _ in starts], n_pairs=n_pairs)
    rep.m_eps = census.m_eps
    rep.wall_times["higher"] = time.perf_counter() - t0
    return rep


# -- slab probe ----------------------------------------------------------------


def slab_repulsion_probe(cfg: SolverConfig, *, gs: GroundState | None = None,
                         grid: DomainGrid | None = None, face_dist: float = 2.0,
                         record_every: int = 1) -> ExperimentReport:
    """Descend from a bump at ``face_dist * eps`` above the ``z = z_min`` face.

    Records the barycenter height over the iterations.  No pass/fail; the
    report flags ``no_scale_separation`` when the slab is thinner than
    ``8 eps``.
    """
    t0 = time.perf_counter()
    grid, r = prepare(cfg, grid)
    gs = gs or load_ground_state(cfg)
    eps = cfg.eps
    lo = grid.box_lo
    thick = float(grid.box_size[2])
    xi = np.array([lo[0] + grid.box_size[0] / 2, lo[1] + grid.box_size[1] / 2,
                   lo[2] + face_dist * eps])
    F = functional(cfg, grid, eps)
    W = make_bump(gs, xi, eps, grid, face_dist * eps, check=False)
    heights = []

    def cb(it, v, E, gn):
        if it % record_every == 0:
            b = barycenter(ScalarField(grid, v), eps, cfg.p)
            heights.append((it, float(b[2] - lo[2]) / eps, E))

    start = project_field(F, W).u
    cp = descend_functional(F, start.values, tol_rel=cfg.stationarity_tol,
                            max_iter=cfg.max_iter, ancestry="slab", callback=cb)
    s = _summarize(F, cp, xi, r, 0, eps, cfg.p, "slab")
    rep = ExperimentReport("slab", cfg.config_hash(), cfg, runs=[s], m_inf=gs.m_inf)
    peak_d = float(grid.signed_distance(cp.peak)[0]) / eps
    rep.table = [{"iteration": it, "beta_height_over_eps": z, "energy": E} for it, z, E in heights]
    rep.meta.update(initial_over_eps=face_dist, final_beta_over_eps=heights[-1][1],
                    final_peak_dist_over_eps=peak_d, no_scale_separation=bool(thick < 8 * eps),
                    drift=heights[-1][1] - heights[0][1])
    rep.m_eps = cp.energy.total
    rep.wall_times["slab"] = time.perf_counter() - t0
    return rep


# -- single solve ----------------------------------------------------------------


def solve(cfg: SolverConfig, xi=None, *, gs: GroundState | None = None,
          grid: DomainGrid | None = None) -> ExperimentReport:
    """One descent from ``Phi_eps(xi)`` (default: the deepest interior node)."""
    grid, r = prepare(cfg, grid)
    gs = gs or load_ground_state(cfg)
    xi = reference_center(grid, r) if xi is None else np.asarray(xi, float)
    rep = multiplicity_census(cfg.with_(multistart=1), gs=gs, grid=grid, centers=[xi])
    rep.kind = "solve"
    return rep


def beta_of_phi(cfg: SolverConfig, gs: GroundState, grid: DomainGrid, centers,
                eps: float | None = None) -> np.ndarray:
    """``|beta(Phi_eps(xi)) - xi|`` for each centre."""
    eps = cfg.eps if eps is None else eps
    r = cfg.radius(grid)
    F = functional(cfg, grid, eps)
    out = []
    for xi in centers:
        nb = project_field(F, make_bump(gs, xi, eps, grid, r, check_scale=False))
        out.append(float(np.linalg.norm(barycenter(nb.u, eps, cfg.p) - np.asarray(xi))))
    return np.array(out)


__all__ = [
    "RUN_COLUMNS", "NonConvergenceError", "RunSummary", "CensusClass", "ExperimentReport",
    "load_ground_state", "prepare", "sample_centers", "dedup", "same_class",
    "multiplicity_census", "best_run", "epsilon_sweep", "ladder", "teps_bound",
    "t_factor_bounds", "v_eps", "cubic_profile", "higher_energy_search", "core_pairs",
    "slab_repulsion_probe", "solve", "beta_of_phi", "reference_center", "ball_concentration",
    "sample_profile", "DescentError",
]
