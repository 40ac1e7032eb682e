"""Solver configuration: one flat record, a ``key=value`` text format and a hash."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .mesh import DomainGrid, build_domain


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    eps: float = 0.05
    omega: float = 1.0
    q: float = 1.0
    p: float = 5.0
    r: float = 0.0  # 0 means inradius / 3
    shape: str = "ball:radius=0.4"
    resolution: int = 64
    linear_tol: float = 1e-10
    stationarity_tol: float = 1e-6  # relative to sqrt(energy)
    energy_tol: float = 1e-8
    max_iter: int = 1500
    seed: int = 0
    multistart: int = 12
    workers: int = 1
    dedup_dist: float = 0.1
    dedup_energy: float = 1e-3
    dedup_beta: float = 2.0  # in units of eps
    delta_frac: float = 0.1
    eta: float = 0.2
    gs_box: float = 18.0
    gs_resolution: int = 128
    cache_dir: str = ""
    quadrature: str = "node"  # or "kuhn<m>": linear elements, m^3 points per cell

    # -- validation --------------------------------------------------------
    def validate(self, grid: DomainGrid | None = None, *, scale: bool = True) -> "SolverConfig":
        """Check ranges; with a grid also ``eps >= 2h`` and (``scale``) ``r >= 4 eps``."""
        if not 4 < self.p < 6:
            raise ConfigError("p must lie in (4, 6)")
        if not (self.eps > 0 and self.q > 0 and self.omega >= 0):
            raise ConfigError("eps, q must be positive and omega nonnegative")
        if not (self.quadrature == "node" or self.quadrature.startswith("kuhn")):
            raise ConfigError(f"unknown quadrature {self.quadrature!r}")
        if self.resolution < 9:
            raise ConfigError("resolution must be at least 9")
        if grid is not None:
            if self.eps < 2 * grid.h:
                raise ConfigError(f"eps={self.eps} is below 2h={2 * grid.h:.4g}")
            if scale and self.radius(grid) < 4 * self.eps - 1e-12:
                raise ConfigError(f"r={self.radius(grid):.4g} is below 4 eps")
        return self

    def radius(self, grid: DomainGrid) -> float:
        return self.r if self.r > 0 else grid.inradius / 3

    def with_(self, **kw) -> "SolverConfig":
        return replace(self, **kw)

    # -- text form -----------------------------------------------------------
    def to_text(self) -> str:
        return "".join(f"{f.name}={getattr(self, f.name)!r}\n" if isinstance(getattr(self, f.name), str)
                       else f"{f.name}={getattr(self, f.name)}\n" for f in fields(self))

    @classmethod
    def from_text(cls, text: str) -> "SolverConfig":
        kinds = {f.name: f.type for f in fields(cls)}
        kw = {}
        for ln, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {ln}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in kinds:
                raise ConfigError(f"line {ln}: unknown key {key!r}")
            kw[key] = _coerce(kinds[key], val, key)
        return cls(**kw)

    @classmethod
    def load(cls, path) -> "SolverConfig":
        return cls.from_text(Path(path).read_text())

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]

    # -- geometry ------------------------------------------------------------
    def build_grid(self) -> DomainGrid:
        tag, kw = parse_shape(self.shape)
        return build_domain(tag, self.resolution, **kw)


def _coerce(kind, val: str, key: str):
    try:
        if kind in ("int", int):
            return int(val)
        if kind in ("float", float):
            return float(val)
        return val.strip("'\"")
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {val!r}") from exc


SHAPE_KEYS = ("box_lo", "box_size", "center", "radius", "major", "minor")


def parse_shape(spec: str) -> tuple[str, dict]:
    """``'torus:major=0.3,minor=0.15'`` -> ``('torus', {...})``.

    Vector parameters (``center``, ``box_lo``, ``box_size``) take ``/``-separated
    components, e.g. ``box_size=1/1/0.25``.
    """
    tag, _, rest = spec.partition(":")
    kw = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        if "=" not in item:
            raise ConfigError(f"bad shape parameter {item!r}")
        k, v = (s.strip() for s in item.split("=", 1))
        if k not in SHAPE_KEYS:
            raise ConfigError(f"unknown shape parameter {k!r}; expected one of {SHAPE_KEYS}")
        try:
            kw[k] = [float(c) for c in v.split("/")] if "/" in v else float(v)
        except ValueError as exc:
            raise ConfigError(f"bad shape parameter {item!r}") from exc
    return tag.strip(), kw
