"""Compactly supported functions on the lattice hZ^8.

A :class:`GridFunction` keeps only its nonzero support: a lexicographically
sorted list of lattice points and one value row per point.  Everything off
that list is exactly zero.  Rows are either octonion coefficients (width 8)
or graded split-module vectors (widths 1, 17, 273, 4369, see
:mod:`octo_lattice.weyl`).  A dense window view is available for I/O.

Points are packed into one ``uint64`` per point (8 bits per axis), so
coordinates must stay within [-128, 127].
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import weyl
from .octonion import DIM, Octonion

_BIAS = 128
_WEIGHTS = (np.uint64(256) ** np.arange(DIM - 1, -1, -1, dtype=np.uint64)).astype(np.uint64)

#: per-axis limit for :func:`random_gridfn` windows
MAX_RANDOM_EXTENT = 4
#: limit for :func:`random_scattered` point counts
MAX_RANDOM_POINTS = 64


def unit_vector(axis: int, scale: int = 1) -> np.ndarray:
    v = np.zeros(DIM, dtype=np.int64)
    v[axis] = scale
    return v


def pack(points: np.ndarray) -> np.ndarray:
    p = np.asarray(points, dtype=np.int64) + _BIAS
    if p.size and (p.min() < 0 or p.max() > 255):
        raise ValueError("lattice coordinates must lie in [-128, 127]")
    return (p.astype(np.uint64) * _WEIGHTS).sum(axis=-1, dtype=np.uint64)


def unpack(keys: np.ndarray) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.uint64)
    out = np.empty(keys.shape + (DIM,), dtype=np.int64)
    rest = keys.copy()
    for d in range(DIM - 1, -1, -1):
        out[..., d] = (rest % np.uint64(256)).astype(np.int64) - _BIAS
        rest //= np.uint64(256)
    return out


@dataclass(frozen=True)
class LatticeWindow:
    """Axis-aligned box of lattice points, ``origin <= m < origin + extent``."""

    origin: tuple[int, ...]
    extent: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "origin", tuple(int(v) for v in self.origin))
        object.__setattr__(self, "extent", tuple(int(v) for v in self.extent))
        if len(self.origin) != DIM or len(self.extent) != DIM:
            raise ValueError("windows are 8-dimensional")
        if any(e <= 0 for e in self.extent):
            raise ValueError("window extent must be positive")

    @classmethod
    def cube(cls, extent: int, origin: int | Sequence[int] = 0) -> LatticeWindow:
        if isinstance(origin, int):
            origin = (origin,) * DIM
        return cls(tuple(origin), (extent,) * DIM)

    @property
    def size(self) -> int:
        return int(np.prod(self.extent))

    def points(self) -> np.ndarray:
        grids = np.indices(self.extent).reshape(DIM, -1).T
        return grids + np.asarray(self.origin)

    def contains(self, points: np.ndarray) -> np.ndarray:
        p = np.asarray(points) - np.asarray(self.origin)
        return ((p >= 0) & (p < np.asarray(self.extent))).all(axis=-1)

    def translated(self, offset: Sequence[int]) -> LatticeWindow:
        return LatticeWindow(tuple(o + int(d) for o, d in zip(self.origin, offset)), self.extent)


@dataclass(frozen=True)
class Region:
    """Subset of Z^8 selected through the last coordinate m_7.

    ``upper(b)`` is m_7 >= b, ``lower(b)`` is m_7 <= -b and ``layer(k)`` is
    m_7 == k.  With the default b = 1, upper, lower and layer(0) partition
    the lattice.
    """

    kind: str
    level: int = 0

    KINDS = ("whole", "upper", "lower", "layer")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown region kind {self.kind!r}")

    @classmethod
    def whole(cls) -> Region:
        return cls("whole")

    @classmethod
    def upper(cls, base: int = 1) -> Region:
        return cls("upper", base)

    @classmethod
    def lower(cls, base: int = 1) -> Region:
        return cls("lower", base)

    @classmethod
    def layer(cls, k: int) -> Region:
        return cls("layer", k)

    def contains(self, points: np.ndarray) -> np.ndarray:
        m7 = np.asarray(points)[..., DIM - 1]
        if self.kind == "whole":
            return np.ones(m7.shape, dtype=bool)
        if self.kind == "upper":
            return m7 >= self.level
        if self.kind == "lower":
            return m7 <= -self.level
        return m7 == self.level

    def __str__(self) -> str:
        if self.kind == "whole":
            return "whole"
        if self.kind == "layer":
            return f"layer({self.level})"
        return f"{self.kind}(base={self.level})"


class GridFunction:
    """Octonion- or module-valued function with finite support on hZ^8."""

    __slots__ = ("keys", "values", "h")

    def __init__(self, keys: np.ndarray, values: np.ndarray, h: float = 1.0):
        if not h > 0:
            raise ValueError("mesh width h must be positive")
        self.keys = keys
        self.values = values
        self.h = float(h)

    # -- construction ------------------------------------------------------

    @classmethod
    def from_points(cls, points, values, h: float = 1.0, width: int | None = None) -> GridFunction:
        """Build from unsorted points; repeated points have their values summed."""
        points = np.asarray(points, dtype=np.int64).reshape(-1, DIM)
        values = np.asarray(values, dtype=float)
        if width is None:
            width = values.shape[-1] if values.size else DIM
        values = values.reshape(len(points), width)
        keys = pack(points)
        uniq, inverse = np.unique(keys, return_inverse=True)
        acc = np.zeros((len(uniq), width))
        np.add.at(acc, inverse.ravel(), values)
        return cls(uniq, acc, h).pruned()

    @classmethod
    def zeros(cls, width: int = DIM, h: float = 1.0) -> GridFunction:
        return cls(np.zeros(0, dtype=np.uint64), np.zeros((0, width)), h)

    @classmethod
    def delta(cls, point, value, h: float = 1.0) -> GridFunction:
        if isinstance(value, Octonion):
            value = value.coeff
        elif isinstance(value, weyl.ModuleElement):
            value = value.vector
        return cls.from_points([point], [value], h)

    @classmethod
    def from_dense(cls, window: LatticeWindow, values, h: float = 1.0) -> GridFunction:
        values = np.asarray(values, dtype=float)
        width = values.shape[-1]
        return cls.from_points(window.points(), values.reshape(window.size, width), h, width)

    @classmethod
    def from_callable(cls, window: LatticeWindow, fn, h: float = 1.0) -> GridFunction:
        pts = window.points()
        vals = []
        for p in pts:
            v = fn(tuple(int(c) for c in p))
            vals.append(v.coeff if isinstance(v, Octonion) else np.asarray(v, dtype=float))
        return cls.from_points(pts, np.array(vals), h)

    # -- basic views -------------------------------------------------------

    @property
    def points(self) -> np.ndarray:
        return unpack(self.keys)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def is_octonion(self) -> bool:
        return self.width == DIM

    def __len__(self) -> int:
        return len(self.keys)

    @property
    def window(self) -> LatticeWindow | None:
        """Bounding box of the support, or None for the zero function."""
        if not len(self):
            return None
        p = self.points
        lo, hi = p.min(axis=0), p.max(axis=0)
        return LatticeWindow(tuple(lo), tuple(hi - lo + 1))

    def dense(self, window: LatticeWindow | None = None) -> np.ndarray:
        window = window or self.window
        if window is None:
            return np.zeros((0, self.width))
        out = np.zeros((window.size, self.width))
        idx, found = lookup(self.keys, pack(window.points()))
        out[found] = self.values[idx[found]]
        if len(self) and not window.contains(self.points).all():
            raise ValueError("support extends beyond the requested window")
        return out

    def value_at(self, point):
        key = pack(np.asarray(point, dtype=np.int64).reshape(1, DIM))
        idx, found = lookup(self.keys, key)
        row = self.values[idx[0]] if found[0] else np.zeros(self.width)
        if self.is_octonion:
            return Octonion(row)
        return weyl.ModuleElement(row)

    def pruned(self) -> GridFunction:
        keep = self.values.any(axis=1)
        if keep.all():
            return self
        return GridFunction(self.keys[keep], self.values[keep], self.h)

    def with_values(self, values: np.ndarray) -> GridFunction:
        return GridFunction(self.keys, values, self.h).pruned()

    # -- arithmetic --------------------------------------------------------

    def _combine(self, other: GridFunction, sign: float) -> GridFunction:
        _check_h(self, other)
        if self.is_octonion != other.is_octonion:
            raise TypeError("cannot add octonion- and module-valued grid functions")
        keys, (a, b) = align([self, other], max(self.width, other.width))
        return GridFunction(keys, a + sign * b, self.h).pruned()

    def __add__(self, other: GridFunction) -> GridFunction:
        return self._combine(other, 1.0)

    def __sub__(self, other: GridFunction) -> GridFunction:
        return self._combine(other, -1.0)

    def __neg__(self) -> GridFunction:
        return GridFunction(self.keys, -self.values, self.h)

    def __mul__(self, scalar: float) -> GridFunction:
        return GridFunction(self.keys, self.values * float(scalar), self.h).pruned()

    __rmul__ = __mul__

    def is_zero(self, tol: float = 0.0) -> bool:
        return max_abs(self) <= tol

    def equals(self, other: GridFunction, tol: float = 0.0) -> bool:
        return (self - other).is_zero(tol)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GridFunction):
            return NotImplemented
        return self.h == other.h and self.equals(other)

    __hash__ = None

    def __repr__(self) -> str:
        kind = "octonion" if self.is_octonion else f"module[w={self.width}]"
        return f"GridFunction({kind}, {len(self)} points, h={self.h:g})"


def _check_h(*grids: GridFunction) -> None:
    hs = {g.h for g in grids}
    if len(hs) > 1:
        raise ValueError(f"mesh widths differ: {sorted(hs)}")


def max_abs(f: GridFunction) -> float:
    return float(np.abs(f.values).max()) if f.values.size else 0.0


def lookup(keys: np.ndarray, query: np.ndarray):
    """Row indices of ``query`` in sorted ``keys`` plus a found mask."""
    if len(keys) == 0:
        return np.zeros(query.shape, dtype=np.intp), np.zeros(query.shape, dtype=bool)
    idx = np.searchsorted(keys, query)
    idx_c = np.minimum(idx, len(keys) - 1)
    found = keys[idx_c] == query
    return idx_c, found


def gather(f: GridFunction, query: np.ndarray, width: int | None = None) -> np.ndarray:
    """Values of ``f`` at packed keys ``query`` (zero off the support)."""
    width = width or f.width
    out = np.zeros(query.shape + (width,))
    idx, found = lookup(f.keys, query)
    out[found, : f.width] = f.values[idx[found]]
    return out


def shifted_keys(keys: np.ndarray, offset) -> np.ndarray:
    return pack(unpack(keys) + np.asarray(offset, dtype=np.int64))


def align(grids: Sequence[GridFunction], width: int | None = None):
    """Union support (sorted keys) and each grid's values on it."""
    keys = np.unique(np.concatenate([g.keys for g in grids])) if grids else np.zeros(0, np.uint64)
    return keys, [gather(g, keys, width or g.width) for g in grids]


# -- shifts and differences -------------------------------------------------

def shift(f: GridFunction, axis: int, direction: int) -> GridFunction:
    """g(m) = f(m + direction * e_axis)."""
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    return GridFunction(shifted_keys(f.keys, unit_vector(axis, -direction)), f.values, f.h)


def fdiff(f: GridFunction, j: int) -> GridFunction:
    """Forward difference (f(m + e_j) - f(m)) / h."""
    d = shift(f, j, 1) - f
    return GridFunction(d.keys, d.values / f.h, f.h)


def bdiff(f: GridFunction, j: int) -> GridFunction:
    """Backward difference (f(m) - f(m - e_j)) / h."""
    d = f - shift(f, j, -1)
    return GridFunction(d.keys, d.values / f.h, f.h)


def stencil_support(keys: np.ndarray, offsets: Sequence[Sequence[int]]) -> np.ndarray:
    pts = unpack(keys)
    return np.unique(np.concatenate([pack(pts + np.asarray(o, dtype=np.int64)) for o in offsets]))


def difference_block(f: GridFunction, steps: Sequence[tuple[int, int]], keys: np.ndarray) -> np.ndarray:
    """(n, len(steps), width) one-sided differences of ``f`` at packed ``keys``.

    Each step is (axis, +1 forward | -1 backward).
    """
    pts = unpack(keys)
    here = gather(f, keys)
    shifts = np.array([unit_vector(axis, d) for axis, d in steps], dtype=np.int64).reshape(-1, DIM)
    there = gather(f, pack(pts[:, None, :] + shifts[None, :, :]))
    there -= here[:, None, :]
    signs = np.array([d for _, d in steps], dtype=float)
    if (signs < 0).any():
        there[:, signs < 0] *= -1.0
    if f.h != 1.0:
        there /= f.h
    return there


def difference_support(f: GridFunction, steps: Sequence[tuple[int, int]]) -> np.ndarray:
    offsets = [np.zeros(DIM, dtype=np.int64)] + [unit_vector(a, -d) for a, d in steps]
    return stencil_support(f.keys, offsets)


def directional_differences(f: GridFunction, steps: Sequence[tuple[int, int]]):
    """Packed union support and the :func:`difference_block` on it."""
    keys = difference_support(f, steps)
    return keys, difference_block(f, steps, keys)


def lattice_sum(F: GridFunction, region: Region | None = None):
    """h^8 times the sum of F over ``region``, accumulated in lexicographic order."""
    region = region or Region.whole()
    mask = region.contains(F.points) if len(F) else np.zeros(0, dtype=bool)
    rows = F.values[mask]
    total = np.zeros(F.width)
    for row in rows:
        total += row
    total = total * F.h**8
    if F.is_octonion:
        return Octonion(total)
    return weyl.ModuleElement(total)


# -- random inputs ----------------------------------------------------------

def random_gridfn(seed: int, support: LatticeWindow, amplitude: int, h: float = 1.0,
                  real_only: bool = False) -> GridFunction:
    """Integer coefficients uniform in [-amplitude, amplitude] on a dense window."""
    if max(support.extent) > MAX_RANDOM_EXTENT:
        raise ValueError(f"random windows are limited to extent {MAX_RANDOM_EXTENT} per axis")
    rng = np.random.default_rng(seed)
    vals = rng.integers(-amplitude, amplitude, size=(support.size, DIM), endpoint=True).astype(float)
    if real_only:
        vals[:, 1:] = 0.0
    return GridFunction.from_points(support.points(), vals, h)


def random_scattered(seed: int, window: LatticeWindow, count: int, amplitude: int,
                     h: float = 1.0, real_only: bool = False,
                     components: Sequence[int] | None = None) -> GridFunction:
    """``count`` distinct random points of ``window`` with random integer octonions.

    ``components`` restricts which basis coefficients may be nonzero.
    """
    if count > MAX_RANDOM_POINTS:
        raise ValueError(f"scattered supports are limited to {MAX_RANDOM_POINTS} points")
    count = min(count, window.size)
    rng = np.random.default_rng(seed)
    flat = rng.choice(window.size, size=count, replace=False)
    pts = np.array(np.unravel_index(flat, window.extent)).T + np.asarray(window.origin)
    vals = rng.integers(-amplitude, amplitude, size=(count, DIM), endpoint=True).astype(float)
    if real_only:
        components = (0,)
    if components is not None:
        mask = np.zeros(DIM, dtype=bool)
        mask[list(components)] = True
        vals[:, ~mask] = 0.0
    return GridFunction.from_points(pts, vals, h)


def cluster_points(rng, window: LatticeWindow, count: int) -> np.ndarray:
    """``count`` distinct points of ``window`` forming a nearest-neighbour connected set.

    Grown from a random seed point by random unit steps, so difference
    stencils centred on the set overlap each other.
    """
    if count > MAX_RANDOM_POINTS:
        raise ValueError(f"scattered supports are limited to {MAX_RANDOM_POINTS} points")
    count = min(count, window.size)
    lo, hi = np.asarray(window.origin), np.asarray(window.origin) + np.asarray(window.extent)
    pts = [lo + rng.integers(0, window.extent)]
    seen = {tuple(pts[0])}
    while len(pts) < count:
        p = pts[rng.integers(len(pts))] + unit_vector(int(rng.integers(DIM)), int(rng.choice((-1, 1))))
        if (p >= lo).all() and (p < hi).all() and tuple(p) not in seen:
            seen.add(tuple(p))
            pts.append(p)
    return np.array(pts, dtype=np.int64)


def random_cluster(seed: int, window: LatticeWindow, count: int, amplitude: int, h: float = 1.0,
                   real_only: bool = False) -> GridFunction:
    """Random integer octonions on a connected cluster (see :func:`cluster_points`)."""
    rng = np.random.default_rng(seed)
    pts = cluster_points(rng, window, count)
    vals = rng.integers(-amplitude, amplitude, size=(len(pts), DIM), endpoint=True).astype(float)
    if real_only:
        vals[:, 1:] = 0.0
    return GridFunction.from_points(pts, vals, h)


# -- serialization -----------------------------------------------------------

def _num(x: float):
    return int(x) if float(x).is_integer() else float(x)


def to_json(f: GridFunction, window: LatticeWindow | None = None) -> dict:
    """Dense document {h, origin, extent, values} for an octonion grid."""
    if not f.is_octonion:
        raise TypeError("only octonion-valued grid functions are serialized")
    window = window or f.window or LatticeWindow.cube(1)
    if window.size > 10**6:
        raise ValueError("window too large to serialize densely")
    dense = f.dense(window)
    return {
        "h": _num(f.h),
        "origin": list(window.origin),
        "extent": list(window.extent),
        "values": [[_num(v) for v in row] for row in dense],
    }


def from_json(doc: dict) -> GridFunction:
    window = LatticeWindow(tuple(doc["origin"]), tuple(doc["extent"]))
    values = np.asarray(doc["values"], dtype=float)
    if values.shape != (window.size, DIM):
        raise ValueError(f"expected {window.size} rows of 8 values, got {values.shape}")
    return GridFunction.from_dense(window, values, float(doc.get("h", 1.0)))


def dump(f: GridFunction, path, window: LatticeWindow | None = None) -> None:
    with open(path, "w") as fh:
        json.dump(to_json(f, window), fh)
        fh.write("\n")


def load(path) -> GridFunction:
    with open(path) as fh:
        return from_json(json.load(fh))


def coordinate_ramp(window: LatticeWindow, axis: int, h: float = 1.0) -> GridFunction:
    """f(m) = m_axis * h * e_0 on the window, zero outside."""
    pts = window.points()
    vals = np.zeros((len(pts), DIM))
    vals[:, 0] = pts[:, axis] * h
    return GridFunction.from_points(pts, vals, h)

