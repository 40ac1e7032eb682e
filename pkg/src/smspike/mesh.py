"""
Domain geometry and discrete fields on a uniform Cartesian lattice.

A domain lives in an axis-aligned box ``[lo, lo + L]`` split into
``resolution`` intervals per axis.  The unknowns sit on the
``resolution - 1`` interior lattice nodes of each axis; the implicit
ring of nodes on the box faces carries the homogeneous Dirichlet value.
Inside the box a boolean mask selects the nodes belonging to the domain,
every other node is treated as exterior (value 0).

Fields are stored compressed: one value per interior node, ordered
x-fastest (``i + nx*(j + ny*k)``), which is also the on-disk order of
the SMSF format (see :mod:`smspike.fieldio`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
import scipy.ndimage as ndi
import scipy.sparse as sp

SHAPES = ("ball", "cube", "torus", "slab", "custom-mask")

# Lusternik-Schnirelmann category of the built-in shapes (known constants).
CATEGORY = {"ball": 1, "cube": 1, "torus": 2, "slab": 1}


class DomainError(ValueError):
    """Invalid domain construction or geometric query."""


def _as3(v, name) -> np.ndarray:
    a = np.broadcast_to(np.asarray(v, dtype=float), (3,)).copy()
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} must be finite")
    return a


def psum(a) -> float:
    """Deterministic pairwise sum (numpy's contiguous reduction order)."""
    return float(np.sum(np.ascontiguousarray(a, dtype=float)))


@dataclass(eq=False)
class DomainGrid:
    """Uniform lattice with an interior mask.

    Attributes
    ----------
    dims : tuple of int
        Number of lattice nodes per axis (box faces excluded).
    h : float
        Node spacing, identical on all axes.
    origin : ndarray
        Coordinates of node ``(0, 0, 0)``; the box corner is ``origin - h``.
    mask : ndarray of bool, shape ``dims``
        Domain membership of each node.
    sdist : ndarray, shape ``dims``
        Signed distance to the domain boundary, positive inside.
    shape_tag : str
        One of :data:`SHAPES`.
    params : dict
        Shape parameters used to build the grid.
    """

    dims: tuple
    h: float
    origin: np.ndarray
    mask: np.ndarray
    sdist: np.ndarray
    shape_tag: str = "custom-mask"
    params: dict = field(default_factory=dict)
    sdf: Callable | None = field(default=None, repr=False)

    def __post_init__(self):
        self.dims = tuple(int(n) for n in self.dims)
        self.origin = _as3(self.origin, "origin")
        self.h = float(self.h)
        if self.h <= 0:
            raise DomainError("spacing must be positive")
        if min(self.dims) < 8:
            raise DomainError("need at least 8 nodes per axis")
        if self.mask.shape != self.dims or self.sdist.shape != self.dims:
            raise DomainError("mask/sdist shape does not match dims")
        if not self.mask.any():
            raise DomainError("empty interior")
        self.mask = np.asarray(self.mask, dtype=bool)
        if np.any(self.sdist[self.mask] <= 0):
            # interior nodes must sit strictly inside
            self.sdist = np.where(self.mask, np.maximum(self.sdist, 0.5 * self.h), self.sdist)

    # -- indexing ---------------------------------------------------------
    @property
    def box_lo(self) -> np.ndarray:
        return self.origin - self.h

    @property
    def box_size(self) -> np.ndarray:
        return (np.asarray(self.dims) + 1) * self.h

    @cached_property
    def flat_mask(self) -> np.ndarray:
        return self.mask.ravel(order="F")

    @cached_property
    def index(self) -> np.ndarray:
        """Flat (x-fastest) box index of every interior node."""
        return np.flatnonzero(self.flat_mask)

    @property
    def n_interior(self) -> int:
        return int(self.index.size)

    @cached_property
    def ijk(self) -> np.ndarray:
        nx, ny, _ = self.dims
        idx = self.index
        return np.stack([idx % nx, (idx // nx) % ny, idx // (nx * ny)], axis=1)

    @cached_property
    def points(self) -> np.ndarray:
        """Coordinates of the interior nodes, shape ``(n, 3)``."""
        return self.origin + self.ijk * self.h

    @cached_property
    def dist(self) -> np.ndarray:
        """Distance to the boundary per box node; 0 on exterior nodes."""
        return np.where(self.mask, self.sdist, 0.0)

    @cached_property
    def interior_dist(self) -> np.ndarray:
        return self.sdist.ravel(order="F")[self.index]

    @property
    def cell_volume(self) -> float:
        return self.h ** 3

    def scatter(self, values: np.ndarray) -> np.ndarray:
        """Interior values to a full ``dims`` array (exterior = 0)."""
        full = np.zeros(int(np.prod(self.dims)))
        full[self.index] = values
        return full.reshape(self.dims, order="F")

    def gather(self, full: np.ndarray) -> np.ndarray:
        return np.asarray(full).ravel(order="F")[self.index]

    def node_of(self, x) -> int:
        """Interior index of the interior node nearest to ``x``."""
        d = np.sum((self.points - np.asarray(x, dtype=float)) ** 2, axis=1)
        return int(np.argmin(d))

    def signed_distance(self, x) -> np.ndarray:
        """Signed distance to the boundary at arbitrary points (positive inside)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.sdf is not None:
            return self.sdf(x)
        coords = ((x - self.origin) / self.h).T
        return ndi.map_coordinates(self.sdist, coords, order=1, mode="nearest")

    @cached_property
    def inradius(self) -> float:
        return float(self.sdist[self.mask].max())

    # -- difference operators --------------------------------------------
    @cached_property
    def _links(self):
        """Forward-difference links touching at least one interior node.

        Returns ``(tail, head)`` interior indices with ``-1`` for an
        exterior endpoint.
        """
        nx, ny, nz = self.dims
        lookup = -np.ones(nx * ny * nz, dtype=np.int64)
        lookup[self.index] = np.arange(self.n_interior)
        lookup = lookup.reshape(self.dims, order="F")
        padded = np.pad(lookup, 1, constant_values=-1)
        tails, heads = [], []
        for ax in range(3):
            a = np.moveaxis(padded, ax, 0)
            lo = np.moveaxis(a[:-1], 0, ax)
            hi = np.moveaxis(a[1:], 0, ax)
            # restrict the transverse axes to the real lattice
            sl = [slice(1, -1)] * 3
            sl[ax] = slice(None)
            lo, hi = lo[tuple(sl)], hi[tuple(sl)]
            lo = lo.ravel(order="F")
            hi = hi.ravel(order="F")
            keep = (lo >= 0) | (hi >= 0)
            tails.append(lo[keep])
            heads.append(hi[keep])
        return np.concatenate(tails), np.concatenate(heads)

    @cached_property
    def diff(self) -> sp.csr_matrix:
        """Forward-difference matrix ``D`` (links x interior), scaled by 1/h."""
        tail, head = self._links
        m = tail.size
        rows = np.arange(m)
        r, c, v = [], [], []
        for ends, sign in ((head, 1.0), (tail, -1.0)):
            ok = ends >= 0
            r.append(rows[ok])
            c.append(ends[ok])
            v.append(np.full(ok.sum(), sign / self.h))
        return sp.csr_matrix(
            (np.concatenate(v), (np.concatenate(r), np.concatenate(c))),
            shape=(m, self.n_interior),
        )

    @cached_property
    def link_share(self) -> sp.csr_matrix:
        """Distributes per-link quantities to interior nodes, preserving sums.

        Interior-interior links split evenly; links to the exterior go
        entirely to their interior endpoint.
        """
        tail, head = self._links
        both = (tail >= 0) & (head >= 0)
        w = np.where(both, 0.5, 1.0)
        rows = np.arange(tail.size)
        r, c, v = [], [], []
        for ends in (tail, head):
            ok = ends >= 0
            r.append(ends[ok])
            c.append(rows[ok])
            v.append(w[ok])
        return sp.csr_matrix(
            (np.concatenate(v), (np.concatenate(r), np.concatenate(c))),
            shape=(self.n_interior, tail.size),
        )

    @cached_property
    def laplacian(self) -> sp.csr_matrix:
        """Masked 7-point ``-Delta_h`` with zero exterior extension (SPD)."""
        D = self.diff
        return (D.T @ D).tocsr()

    def neighbors_exterior(self) -> np.ndarray:
        """Interior nodes with at least one exterior lattice neighbour."""
        tail, head = self._links
        out = np.zeros(self.n_interior, dtype=bool)
        out[tail[(head < 0) & (tail >= 0)]] = True
        out[head[(tail < 0) & (head >= 0)]] = True
        return out


@dataclass(eq=False)
class ScalarField:
    """Real samples on the interior nodes of a grid (zero outside)."""

    grid: DomainGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_interior,):
            raise DomainError(
                f"expected {self.grid.n_interior} interior values, got {self.values.shape}"
            )

    @classmethod
    def zeros(cls, grid: DomainGrid) -> "ScalarField":
        return cls(grid, np.zeros(grid.n_interior))

    @classmethod
    def from_function(cls, grid: DomainGrid, f) -> "ScalarField":
        p = grid.points
        return cls(grid, f(p[:, 0], p[:, 1], p[:, 2]))

    def full(self) -> np.ndarray:
        return self.grid.scatter(self.values)

    def with_values(self, values) -> "ScalarField":
        return ScalarField(self.grid, values)

    def __mul__(self, a):
        return ScalarField(self.grid, self.values * a)

    __rmul__ = __mul__

    def __add__(self, other):
        _check_same(self, other)
        return ScalarField(self.grid, self.values + other.values)

    def __sub__(self, other):
        _check_same(self, other)
        return ScalarField(self.grid, self.values - other.values)


@dataclass(eq=False)
class Partition:
    """Disjoint cover of the interior nodes by axis-aligned cubes.

    ``assignments[i]`` is the piece of interior node ``i``; ``anchors[j]``
    is a node of piece ``j`` close to its cube centre.
    """

    cell_size: float
    assignments: np.ndarray
    anchors: np.ndarray
    centers: np.ndarray
    overlap_bound: int
    grid: DomainGrid = field(repr=False)

    @property
    def n_pieces(self) -> int:
        return int(self.anchors.shape[0])

    def members(self, j: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == j)


def _check_same(u: ScalarField, v: ScalarField):
    if u.grid is not v.grid:
        raise DomainError("fields live on different grids")


# -- construction ------------------------------------------------------------


def _lattice(box_lo, box_size, resolution):
    box_lo = _as3(box_lo, "box_lo")
    box_size = _as3(box_size, "box_size")
    if np.any(box_size <= 0):
        raise DomainError("box size must be positive")
    if np.ndim(resolution) == 0:
        h = float(box_size.max()) / int(resolution)
        counts = np.rint(box_size / h).astype(int)
    else:
        counts = np.asarray(resolution, dtype=int)
        h = float(box_size[0]) / counts[0]
    if np.any(counts - 1 < 8):
        raise DomainError("resolution must give at least 8 nodes per axis")
    dims = tuple(int(c) - 1 for c in counts)
    origin = box_lo + h
    axes = [origin[a] + h * np.arange(dims[a]) for a in range(3)]
    X, Y, Z = np.meshgrid(*axes, indexing="ij")
    return dims, h, origin, np.stack([X, Y, Z], axis=-1), box_lo, box_lo + counts * h


def _box_sdf(lo, hi):
    def f(x):
        return np.min(np.concatenate([x - lo, hi - x], axis=1), axis=1)

    return f


def _ball_sdf(c, R):
    def f(x):
        return R - np.linalg.norm(x - c, axis=1)

    return f


def _torus_sdf(c, major, minor):
    def f(x):
        d = x - c
        rho = np.hypot(d[:, 0], d[:, 1])
        return minor - np.hypot(rho - major, d[:, 2])

    return f


def build_domain(
    shape_tag: str,
    resolution=64,
    *,
    box_lo=0.0,
    box_size=1.0,
    center=None,
    radius: float | None = None,
    major: float | None = None,
    minor: float | None = None,
    mask: np.ndarray | None = None,
    h: float | None = None,
) -> DomainGrid:
    """Build a :class:`DomainGrid`.

    Parameters
    ----------
    shape_tag : {'ball', 'cube', 'torus', 'slab', 'custom-mask'}
        ``cube`` and ``slab`` fill the whole box (a slab is simply a box
        that is thin along z); ``ball`` needs ``radius``; ``torus`` needs
        ``major`` and ``minor`` radii and has its axis along z.
    resolution : int or sequence of int
        Number of intervals along the longest box side (or per axis).
        The lattice has ``resolution - 1`` nodes per axis.
    box_lo, box_size : float or 3-sequence
        Lower corner and side lengths of the box.
    center : 3-sequence, optional
        Shape centre, defaults to the box centre.
    mask, h : for ``custom-mask`` only
        Boolean node mask and spacing; ``box_lo`` is the box corner.
    """
    if shape_tag not in SHAPES:
        raise DomainError(f"unknown shape {shape_tag!r}; expected one of {SHAPES}")

    if shape_tag == "custom-mask":
        if mask is None or h is None:
            raise DomainError("custom-mask needs mask and h")
        mask = np.asarray(mask, dtype=bool)
        origin = _as3(box_lo, "box_lo") + h
        return DomainGrid(mask.shape, h, origin, mask, mask_signed_distance(mask, h),
                          "custom-mask", {})

    dims, h, origin, X, lo, hi = _lattice(box_lo, box_size, resolution)
    pts = X.reshape(-1, 3)
    c = (lo + hi) / 2 if center is None else _as3(center, "center")
    box = _box_sdf(lo, hi)

    if shape_tag in ("cube", "slab"):
        sdf = box
        params = {"lo": lo.tolist(), "hi": hi.tolist()}
    elif shape_tag == "ball":
        if radius is None or radius <= 0:
            raise DomainError("ball needs a positive radius")
        if np.any(c - radius < lo) or np.any(c + radius > hi):
            raise DomainError("ball exceeds the box")
        sdf = _ball_sdf(c, float(radius))
        params = {"center": c.tolist(), "radius": float(radius)}
    else:  # torus
        if major is None or minor is None:
            raise DomainError("torus needs major and minor radii")
        if not (major > minor > 2 * h):
            raise DomainError("torus needs major > minor > 2h")
        ext = np.array([major + minor, major + minor, minor])
        if np.any(c - ext < lo) or np.any(c + ext > hi):
            raise DomainError("torus exceeds the box")
        sdf = _torus_sdf(c, float(major), float(minor))
        params = {"center": c.tolist(), "major": float(major), "minor": float(minor)}

    sd = sdf(pts).reshape(dims)
    m = sd > 0
    if not m.any():
        raise DomainError("empty interior")
    grid = DomainGrid(dims, h, origin, m, sd, shape_tag, params, sdf)
    return grid


def mask_signed_distance(mask: np.ndarray, h: float) -> np.ndarray:
    """Signed distance of a node mask via the exact Euclidean distance transform.

    The boundary is taken halfway between an interior node and its
    nearest exterior node; the box faces count as exterior.
    """
    padded = np.pad(np.asarray(mask, dtype=bool), 1, constant_values=False)
    inside = ndi.distance_transform_edt(padded)[1:-1, 1:-1, 1:-1]
    outside = ndi.distance_transform_edt(~padded)[1:-1, 1:-1, 1:-1]
    return h * np.where(mask, inside - 0.5, 0.5 - outside)


def erode(grid: DomainGrid, r: float) -> np.ndarray:
    """Interior nodes at distance ``>= r`` from the boundary (admissible centres).

    Returns a boolean array over interior nodes.
    """
    if r <= 0:
        raise DomainError("erosion radius must be positive")
    out = grid.interior_dist >= r
    if not out.any():
        raise DomainError(f"erosion by r={r} leaves nothing")
    return out


def dilate(grid: DomainGrid, r: float) -> np.ndarray:
    """Box nodes within distance ``r`` of the domain, as a ``dims`` boolean array."""
    if r <= 0:
        raise DomainError("dilation radius must be positive")
    if grid.sdf is not None:
        sd = grid.sdist
    else:
        sd = mask_signed_distance(grid.mask, grid.h)
    return sd > -r


def in_omega_plus(grid: DomainGrid, x, r: float) -> bool:
    return bool(grid.signed_distance(x)[0] > -r)


def in_omega_minus(grid: DomainGrid, x, r: float) -> bool:
    return bool(grid.signed_distance(x)[0] >= r)


# -- norms -------------------------------------------------------------------


def _check_eps(eps):
    if not eps > 0:
        raise DomainError("eps must be positive")


def grad_sq_sum(u: ScalarField) -> float:
    """Sum over links of squared forward differences (already divided by h^2)."""
    g = u.grid.diff @ u.values
    return psum(g * g)


def norm_eps_sq(u: ScalarField, eps: float) -> float:
    _check_eps(eps)
    g = u.grid
    return g.cell_volume / eps**3 * (eps**2 * grad_sq_sum(u) + psum(u.values**2))


def norm_eps(u: ScalarField, eps: float) -> float:
    """``||u||_eps = (eps^-3 sum (eps^2 |grad u|^2 + u^2) h^3)^(1/2)``."""
    return math.sqrt(norm_eps_sq(u, eps))


def inner_eps(u: ScalarField, v: ScalarField, eps: float) -> float:
    _check_same(u, v)
    _check_eps(eps)
    g = u.grid
    du = g.diff @ u.values
    dv = g.diff @ v.values
    return g.cell_volume / eps**3 * (eps**2 * psum(du * dv) + psum(u.values * v.values))


def lp_norm_eps_pow(u: ScalarField, p: float, eps: float) -> float:
    _check_eps(eps)
    if not 2 <= p <= 6:
        raise DomainError("p must lie in [2, 6]")
    return u.grid.cell_volume / eps**3 * psum(np.abs(u.values) ** p)


def lp_norm_eps(u: ScalarField, p: float, eps: float) -> float:
    return lp_norm_eps_pow(u, p, eps) ** (1.0 / p)


def positive_part(u: ScalarField) -> ScalarField:
    return ScalarField(u.grid, np.maximum(u.values, 0.0))


# -- good partition ----------------------------------------------------------


def cube_partition(grid: DomainGrid, eps: float, K: int = 3) -> Partition:
    """Split space into cubes of side ``eps`` (aligned to the box corner).

    Pieces are the non-empty intersections with the interior, numbered in
    x-fastest order of their cube index.  ``overlap_bound`` is the largest
    number of ``K``-inflated piece cubes covering a single node.
    """
    if eps < 2 * grid.h:
        raise DomainError("partition size eps must be at least 2h")
    cidx = np.floor((grid.points - grid.box_lo) / eps + 1e-12).astype(np.int64)
    ncube = cidx.max(axis=0) + 1
    key = cidx[:, 0] + ncube[0] * (cidx[:, 1] + ncube[1] * cidx[:, 2])
    uniq, assign = np.unique(key, return_inverse=True)
    assign = assign.ravel()
    cube_ijk = np.stack(
        [uniq % ncube[0], (uniq // ncube[0]) % ncube[1], uniq // (ncube[0] * ncube[1])], axis=1
    )
    centers = grid.box_lo + (cube_ijk + 0.5) * eps

    anchors = np.empty_like(centers)
    d2 = np.sum((grid.points - centers[assign]) ** 2, axis=1)
    order = np.lexsort((d2, assign))
    first = np.ones(order.size, dtype=bool)
    first[1:] = assign[order[1:]] != assign[order[:-1]]
    anchors[assign[order[first]]] = grid.points[order[first]]

    occupied = np.zeros(tuple(ncube + 2 * K), dtype=np.int64)
    occupied[tuple((cube_ijk + K).T)] = 1
    half = K // 2
    counts = ndi.convolve(occupied, np.ones((2 * half + 1,) * 3, dtype=np.int64),
                          mode="constant")
    nu = int(counts[tuple((cidx + K).T)].max())
    return Partition(float(eps), assign, anchors, centers, nu, grid)


def piece_diameters(partition: Partition) -> np.ndarray:
    """Exact diameter of each piece's node set (brute force over pairs)."""
    g = partition.grid
    out = np.zeros(partition.n_pieces)
    order = np.argsort(partition.assignments, kind="stable")
    bounds = np.searchsorted(partition.assignments[order], np.arange(partition.n_pieces + 1))
    for j in range(partition.n_pieces):
        pts = g.points[order[bounds[j]:bounds[j + 1]]]
        if len(pts) > 1:
            d = pts[:, None, :] - pts[None, :, :]
            out[j] = math.sqrt(float(np.max(np.sum(d * d, axis=-1))))
    return out


def connected_components(grid: DomainGrid, nodes: np.ndarray) -> int:
    """Number of 6-connected components of a set of interior nodes."""
    full = grid.scatter(np.asarray(nodes, dtype=float)) > 0
    _, n = ndi.label(full)
    return int(n)


def has_loop(grid: DomainGrid, nodes: np.ndarray, axis: int = 2) -> bool:
    """True when the node set winds around the line through the domain centre.

    A connected set that contains no point on the axis line but surrounds
    it is non-contractible in the complement of that line.
    """
    full = grid.scatter(np.asarray(nodes, dtype=float)) > 0
    labels, n = ndi.label(full)
    if n == 0:
        return False
    c = np.asarray(grid.params.get("center", grid.box_lo + grid.box_size / 2))
    # winding test: angles of the component's points around the axis cover the circle
    pts = grid.points[np.asarray(nodes, dtype=bool)]
    other = [a for a in range(3) if a != axis]
    ang = np.arctan2(pts[:, other[1]] - c[other[1]], pts[:, other[0]] - c[other[0]])
    hist, _ = np.histogram(ang, bins=36, range=(-np.pi, np.pi))
    rho = np.hypot(pts[:, other[0]] - c[other[0]], pts[:, other[1]] - c[other[1]])
    return bool(n == 1 and np.all(hist > 0) and rho.min() > grid.h)


class KuhnQuadrature:
    """Midpoint quadrature of the piecewise-linear interpolant on Kuhn tetrahedra.

    Every lattice cell (including the cells between the outer node layer
    and the box faces, where the field is zero) is split into the six
    tetrahedra ``x_s1 >= x_s2 >= x_s3``.  On this mesh the linear-element
    stiffness matrix is exactly the 7-point Laplacian, so
    ``integral(f(u))`` makes the nonlinear term consistent with the
    quadratic part.  Each cell carries ``m^3`` sub-cell midpoints.
    """

    def __init__(self, grid: DomainGrid, m: int = 2):
        if m < 1:
            raise DomainError("quadrature order must be positive")
        self.grid, self.m = grid, int(m)
        self.weight = grid.cell_volume / m**3
        self.terms = []  # per sample: tuple of (vertex offset, weight)
        mid = (np.arange(m) + 0.5) / m
        for a in mid:
            for b in mid:
                for c in mid:
                    x = np.array([a, b, c])
                    order = np.argsort(-x, kind="stable")
                    xs = x[order]
                    lam = (1 - xs[0], xs[0] - xs[1], xs[1] - xs[2], xs[2])
                    v = np.zeros(3, dtype=int)
                    verts = [tuple(v)]
                    for ax in order:
                        v[ax] = 1
                        verts.append(tuple(v))
                    self.terms.append(tuple((o, w) for o, w in zip(verts, lam) if w > 0))

    def _padded(self, v):
        return np.pad(self.grid.scatter(v), 1)

    def samples(self, v) -> np.ndarray:
        """Interpolant values at all sample points, shape ``(m^3, nx+1, ny+1, nz+1)``."""
        full = self._padded(v)
        nx, ny, nz = (n + 1 for n in self.grid.dims)
        out = np.zeros((len(self.terms), nx, ny, nz))
        for k, term in enumerate(self.terms):
            for (i, j, l), w in term:
                out[k] += w * full[i:i + nx, j:j + ny, l:l + nz]
        return out

    def adjoint(self, s: np.ndarray) -> np.ndarray:
        """Transpose of :meth:`samples`, returned over interior nodes."""
        nx, ny, nz = s.shape[1:]
        full = np.zeros((nx + 1, ny + 1, nz + 1))
        for k, term in enumerate(self.terms):
            for (i, j, l), w in term:
                full[i:i + nx, j:j + ny, l:l + nz] += w * s[k]
        return self.grid.gather(full[1:-1, 1:-1, 1:-1])

    def integral(self, f: np.ndarray) -> float:
        """``sum f * weight`` for ``f`` evaluated on :meth:`samples`."""
        return self.weight * psum(f)


__all__: Sequence[str] = [
    "KuhnQuadrature",
    "CATEGORY",
    "DomainError",
    "DomainGrid",
    "Partition",
    "SHAPES",
    "ScalarField",
    "build_domain",
    "connected_components",
    "cube_partition",
    "dilate",
    "erode",
    "has_loop",
    "in_omega_minus",
    "in_omega_plus",
    "inner_eps",
    "lp_norm_eps",
    "lp_norm_eps_pow",
    "mask_signed_distance",
    "norm_eps",
    "norm_eps_sq",
    "piece_diameters",
    "positive_part",
    "psum",
]
