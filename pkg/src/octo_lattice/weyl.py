"""Split (Weyl) units e_k^+ / e_k^- and the module of right-nested monomials.

Monomials of degree 0..3 are stored as tuples of :class:`SplitGenerator`:
``()`` is the unit, ``(g,)`` a single generator, ``(b, c)`` the product
b*c as written and ``(a, b, c)`` the right-nested product a*(b*c).
Left-nested products never enter storage; they are rewritten on entry with
the anti-associativity rule ``(ab)c = -a(bc)``.

Coefficients live in one flat graded vector::

    [ unit | 16 gens | 16x16 pairs | 16x16x16 triples ]

so a degree-<=d element has width 1, 17, 273 or 4369.  Generator ``e_k^s``
has index ``2k`` for s = + and ``2k + 1`` for s = -, which is also the
canonical order (axis first, then plus before minus).  The array kernels
below take any number of leading batch axes; lattice sweeps feed them whole
grids at once.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .octonion import DIM, Octonion

NGEN = 2 * DIM
OFFSETS = (0, 1, 1 + NGEN, 1 + NGEN + NGEN**2)
WIDTHS = (1, 1 + NGEN, 1 + NGEN + NGEN**2, 1 + NGEN + NGEN**2 + NGEN**3)
MAX_DEGREE = 3

NESTED = "nested"
FLAT = "flat"
CONVENTIONS = (NESTED, FLAT)

_IU0, _IU1 = np.triu_indices(NGEN, 1)
# flat positions of (p, q) and (q, p) for p < q inside a 16x16 block
_UP_FLAT = _IU0 * NGEN + _IU1
_LO_FLAT = _IU1 * NGEN + _IU0
_PLUS = np.arange(0, NGEN, 2)
_MINUS = _PLUS + 1


class DegreeOverflowError(ValueError):
    """A product would exceed degree 3."""


@functools.total_ordering
@dataclass(frozen=True)
class SplitGenerator:
    axis: int
    sign: str

    def __post_init__(self):
        if not 0 <= self.axis < DIM:
            raise ValueError(f"axis out of range: {self.axis}")
        if self.sign not in ("+", "-"):
            raise ValueError(f"sign must be '+' or '-', got {self.sign!r}")

    @property
    def index(self) -> int:
        return 2 * self.axis + (self.sign == "-")

    @classmethod
    def from_index(cls, index: int) -> SplitGenerator:
        return GENERATORS[index]

    def __lt__(self, other: SplitGenerator) -> bool:
        return self.index < other.index

    def __str__(self) -> str:
        return f"e{self.axis}{self.sign}"

    def __repr__(self) -> str:
        return f"SplitGenerator({self.axis}, {self.sign!r})"


GENERATORS = tuple(SplitGenerator(k, s) for k in range(DIM) for s in "+-")


def ep(k: int) -> SplitGenerator:
    return GENERATORS[2 * k]


def em(k: int) -> SplitGenerator:
    return GENERATORS[2 * k + 1]


def gen_order(g1: SplitGenerator, g2: SplitGenerator) -> int:
    """-1, 0 or 1 as g1 sorts before, equal to, or after g2."""
    return (g1.index > g2.index) - (g1.index < g2.index)


# -- monomials ---------------------------------------------------------------

Monomial = tuple

UNIT: Monomial = ()


def Gen(g: SplitGenerator) -> Monomial:
    return (g,)


def Pair(b: SplitGenerator, c: SplitGenerator) -> Monomial:
    return (b, c)


def Triple(a: SplitGenerator, b: SplitGenerator, c: SplitGenerator) -> Monomial:
    return (a, b, c)


def monomial_index(mono: Monomial) -> int:
    idx = 0
    for g in mono:
        idx = idx * NGEN + g.index
    return OFFSETS[len(mono)] + idx


def monomial_from_index(index: int) -> Monomial:
    for deg in range(MAX_DEGREE, -1, -1):
        if index >= OFFSETS[deg]:
            rest = index - OFFSETS[deg]
            gens = []
            for _ in range(deg):
                rest, g = divmod(rest, NGEN)
                gens.append(GENERATORS[g])
            return tuple(reversed(gens))
    raise ValueError(f"bad monomial index {index}")


def render_monomial(mono: Monomial) -> str:
    s = [str(g) for g in mono]
    if len(s) == 0:
        return "1"
    if len(s) == 1:
        return s[0]
    if len(s) == 2:
        return f"({s[0]} {s[1]})"
    return f"{s[0]}({s[1]} {s[2]})"


_GEN_RE = r"e([0-7])([+-])"
_MONO_PATTERNS = (
    (re.compile(r"^1$"), 0),
    (re.compile(rf"^{_GEN_RE}$"), 1),
    (re.compile(rf"^\({_GEN_RE} {_GEN_RE}\)$"), 2),
    (re.compile(rf"^{_GEN_RE}\({_GEN_RE} {_GEN_RE}\)$"), 3),
)


def parse_monomial(text: str) -> Monomial:
    text = text.strip()
    for pattern, _ in _MONO_PATTERNS:
        m = pattern.match(text)
        if m:
            parts = m.groups()
            return tuple(SplitGenerator(int(parts[i]), parts[i + 1]) for i in range(0, len(parts), 2))
    raise ValueError(f"not a monomial: {text!r}")


# -- array kernels -----------------------------------------------------------

def degree_of_width(width: int) -> int:
    try:
        return WIDTHS.index(width)
    except ValueError:
        raise ValueError(f"{width} is not a graded module width") from None


def pad(arr: np.ndarray, width: int) -> np.ndarray:
    w = arr.shape[-1]
    if w == width:
        return arr
    if w > width:
        raise ValueError(f"cannot shrink width {w} to {width}")
    out = np.zeros(arr.shape[:-1] + (width,), dtype=arr.dtype)
    out[..., :w] = arr
    return out


def trim_width(arr: np.ndarray) -> np.ndarray:
    """Drop trailing degree blocks that are zero in every row."""
    for deg in range(degree_of_width(arr.shape[-1]), 0, -1):
        if arr[..., OFFSETS[deg]:WIDTHS[deg]].any():
            return arr[..., :WIDTHS[deg]]
    return arr[..., :1]


def blocks(arr: np.ndarray):
    """Views (unit, gens, pairs, triples) of a graded array; missing degrees are None."""
    w = arr.shape[-1]
    lead = arr.shape[:-1]
    unit = arr[..., 0]
    gen = arr[..., 1:17] if w >= WIDTHS[1] else None
    pair = arr[..., 17:273].reshape(lead + (NGEN, NGEN)) if w >= WIDTHS[2] else None
    triple = arr[..., 273:].reshape(lead + (NGEN,) * 3) if w >= WIDTHS[3] else None
    return unit, gen, pair, triple


def _assemble(lead, unit=None, gen=None, pair=None, triple=None) -> np.ndarray:
    deg = 3 if triple is not None else 2 if pair is not None else 1 if gen is not None else 0
    out = np.zeros(tuple(lead) + (WIDTHS[deg],))
    if unit is not None:
        out[..., 0] = unit
    if gen is not None:
        out[..., 1:17] = gen
    if pair is not None:
        out[..., 17:273] = pair.reshape(tuple(lead) + (NGEN**2,))
    if triple is not None:
        out[..., 273:] = triple.reshape(tuple(lead) + (NGEN**3,))
    return out


def canon_pair_block(p: np.ndarray):
    """Rewrite pair coefficients ``p[..., b, c]`` into ordered pairs plus a scalar.

    Returns ``(unit, pairs)``; ``pairs`` is strictly upper triangular.
    """
    pairs = np.zeros_like(p)
    pairs[..., _IU0, _IU1] = p[..., _IU0, _IU1] - p[..., _IU1, _IU0]
    unit = -p[..., _MINUS, _PLUS].sum(axis=-1)
    return unit, pairs


def embed_array(x: np.ndarray) -> np.ndarray:
    """Generator coefficients (..., 16) of e_k -> e_k^+ + e_k^-."""
    return np.repeat(x, 2, axis=-1)


def embed_graded(x: np.ndarray) -> np.ndarray:
    out = np.zeros(x.shape[:-1] + (WIDTHS[1],))
    out[..., 1:] = embed_array(x)
    return out


@functools.lru_cache(maxsize=None)
def _left_action_tables(width: int):
    """Flat gather indices into x.reshape(n, 16 * width) for :func:`left_action`."""
    a = np.arange(NGEN)
    t = {"unit_to_gen": a * width}
    if width >= WIDTHS[1]:
        b = np.arange(NGEN)
        t["gen_nested"] = (a[:, None] * width + 1 + b[None, :]).ravel()
        t["gen_up"] = _IU0 * width + 1 + _IU1
        t["gen_lo"] = _IU1 * width + 1 + _IU0
        t["gen_scalar"] = _MINUS * width + 1 + _PLUS
    if width >= WIDTHS[2]:
        c = np.arange(NGEN)
        bc = np.arange(NGEN * NGEN)
        t["pair_nested"] = (a[:, None] * width + 17 + bc[None, :]).ravel()
        t["pair_up"] = ((_IU0 * width + 17 + NGEN * _IU1)[:, None] + c[None, :]).ravel()
        t["pair_lo"] = ((_IU1 * width + 17 + NGEN * _IU0)[:, None] + c[None, :]).ravel()
        t["pair_scalar"] = (_MINUS * width + 17 + NGEN * _PLUS)[:, None] + c[None, :]
        t["triple_dest"] = (_UP_FLAT[:, None] * NGEN + c[None, :]).ravel()
    return t


def left_action(x: np.ndarray, convention: str = NESTED) -> np.ndarray:
    """``sum_a a * x[..., a, :]`` for graded inputs ``x`` of shape (..., 16, width).

    nested: a*Gen(b) = Pair(a, b) and a*Pair(b, c) = Triple(a, b, c).
    flat: the leading pair a*b is reduced first; its scalar part leaves
    Gen(c) and its pair part (p q) gives (p q) c = -Triple(p, q, c).
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    if x.shape[-2] != NGEN:
        raise ValueError("left_action expects one slot per generator")
    width = x.shape[-1]
    deg = degree_of_width(width)
    if deg >= MAX_DEGREE:
        raise DegreeOverflowError("left multiplication would exceed degree 3")
    lead = x.shape[:-2]
    xf = np.ascontiguousarray(x).reshape(-1, NGEN * width)
    t = _left_action_tables(width)
    out = np.zeros((xf.shape[0], WIDTHS[deg + 1]))
    out[:, 1:17] = np.take(xf, t["unit_to_gen"], axis=1)
    if deg >= 1:
        if convention == NESTED:
            out[:, 17:273] = np.take(xf, t["gen_nested"], axis=1)
        else:
            pair = out[:, 17:273]
            d = np.take(xf, t["gen_up"], axis=1)
            d -= np.take(xf, t["gen_lo"], axis=1)
            pair[:, _UP_FLAT] = d
            out[:, 0] = -np.take(xf, t["gen_scalar"], axis=1).sum(axis=1)
    if deg >= 2:
        if convention == NESTED:
            out[:, 273:] = np.take(xf, t["pair_nested"], axis=1)
        else:
            d = np.take(xf, t["pair_lo"], axis=1)
            d -= np.take(xf, t["pair_up"], axis=1)
            out[:, 273 + t["triple_dest"]] = d
            out[:, 1:17] -= np.take(xf, t["pair_scalar"], axis=1).sum(axis=1)
    return out.reshape(lead + (out.shape[-1],))


def right_mul_oct_array(e: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Graded ``e`` times the split image of octonion ``x``; pairs reassociate."""
    deg = degree_of_width(e.shape[-1])
    if deg >= MAX_DEGREE:
        raise DegreeOverflowError("right multiplication would exceed degree 3")
    lead = np.broadcast_shapes(e.shape[:-1], x.shape[:-1])
    f = embed_array(x)
    unit_in, gen_in, pair_in, _ = blocks(e)
    gen = unit_in[..., None] * f
    pair = triple = None
    if gen_in is not None:
        pair = gen_in[..., :, None] * f[..., None, :]
    if pair_in is not None:
        triple = -pair_in[..., :, :, None] * f[..., None, None, :]
    return _assemble(lead, None, gen, pair, triple)


def left_mul_oct_array(x: np.ndarray, e: np.ndarray) -> np.ndarray:
    """Split image of ``x`` times graded ``e``, nested convention."""
    f = embed_array(x)
    return left_action(f[..., :, None] * e[..., None, :], NESTED)


def canonicalize_array(v: np.ndarray) -> np.ndarray:
    """Order every pair and every inner pair of a triple; leading slots stay put."""
    out = np.array(v, dtype=float, copy=True)
    _, gen, pair, triple = blocks(out)
    _, _, pair_in, triple_in = blocks(v)
    if pair_in is not None:
        u, p = canon_pair_block(pair_in)
        out[..., 0] += u
        pair[...] = p
    if triple_in is not None:
        s, t = canon_pair_block(triple_in)
        gen += s
        triple[...] = t
    return out


# -- module elements ---------------------------------------------------------

def _trim(vec: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(vec)
    if nz.size == 0:
        return np.zeros(1)
    last = int(nz[-1])
    width = next(w for w in WIDTHS if w > last)
    return vec[:width]


class ModuleElement:
    """Finite real combination of raw monomials; immutable.

    Storage is the graded vector trimmed to the smallest width holding every
    nonzero coefficient, so zero coefficients never show up in :meth:`terms`.
    """

    __slots__ = ("_v",)

    def __init__(self, vec: np.ndarray | None = None):
        if vec is None:
            v = np.zeros(1)
        else:
            v = np.asarray(vec, dtype=float)
            if v.ndim != 1:
                raise ValueError("ModuleElement expects a 1-D coefficient vector")
            degree_of_width(v.shape[0])
            v = _trim(v).copy()
        v.setflags(write=False)
        self._v = v

    @classmethod
    def zero(cls) -> ModuleElement:
        return cls()

    @classmethod
    def from_terms(cls, terms: Mapping[Monomial, float] | Iterable[tuple[Monomial, float]]) -> ModuleElement:
        items = terms.items() if isinstance(terms, Mapping) else terms
        v = np.zeros(WIDTHS[-1])
        for mono, c in items:
            if len(mono) > MAX_DEGREE:
                raise DegreeOverflowError(f"monomial of degree {len(mono)}")
            v[monomial_index(tuple(mono))] += c
        return cls(v)

    @classmethod
    def monomial(cls, mono: Monomial, coeff: float = 1.0) -> ModuleElement:
        return cls.from_terms({mono: coeff})

    @property
    def vector(self) -> np.ndarray:
        return self._v

    @property
    def degree(self) -> int:
        """Highest degree present; the zero element has degree 0."""
        return degree_of_width(self._v.shape[0])

    def padded(self, width: int = WIDTHS[-1]) -> np.ndarray:
        return pad(self._v, width)

    def terms(self) -> dict[Monomial, float]:
        return {monomial_from_index(int(i)): float(self._v[i]) for i in np.flatnonzero(self._v)}

    def component(self, degree: int) -> ModuleElement:
        v = np.zeros(WIDTHS[-1])
        lo, hi = OFFSETS[degree], WIDTHS[degree]
        w = self._v.shape[0]
        if lo < w:
            v[lo:min(hi, w)] = self._v[lo:min(hi, w)]
        return ModuleElement(v)

    def coefficient(self, mono: Monomial) -> float:
        i = monomial_index(tuple(mono))
        return float(self._v[i]) if i < self._v.shape[0] else 0.0

    def is_zero(self) -> bool:
        return not self._v.any()

    def norm(self) -> float:
        return float(np.sqrt(np.dot(self._v, self._v)))

    def max_abs(self) -> float:
        return float(np.abs(self._v).max())

    def _binary(self, other: ModuleElement, op) -> ModuleElement:
        w = max(self._v.shape[0], other._v.shape[0])
        return ModuleElement(op(pad(self._v, w), pad(other._v, w)))

    def __add__(self, other: ModuleElement) -> ModuleElement:
        return self._binary(other, np.add)

    def __sub__(self, other: ModuleElement) -> ModuleElement:
        return self._binary(other, np.subtract)

    def __neg__(self) -> ModuleElement:
        return ModuleElement(-self._v)

    def __mul__(self, scalar: float) -> ModuleElement:
        return ModuleElement(self._v * float(scalar))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModuleElement):
            return NotImplemented
        return bool(np.array_equal(self._v, other._v))

    __hash__ = None

    def __len__(self) -> int:
        return int(np.count_nonzero(self._v))

    def to_dict(self) -> dict[str, float]:
        """Rendered monomial -> coefficient, in canonical index order."""
        return {render_monomial(m): c for m, c in self.terms().items()}

    @classmethod
    def from_dict(cls, data: Mapping[str, float]) -> ModuleElement:
        return cls.from_terms({parse_monomial(k): v for k, v in data.items()})

    def __str__(self) -> str:
        parts = []
        for mono, c in self.terms().items():
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            body = render_monomial(mono)
            parts.append(f"{sign} {body}" if mag == 1 else f"{sign} {mag:g}*{body}")
        if not parts:
            return "0"
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    def __repr__(self) -> str:
        return f"ModuleElement({self})"


def canon_pair(b: SplitGenerator, c: SplitGenerator) -> ModuleElement:
    p = np.zeros((NGEN, NGEN))
    p[b.index, c.index] = 1.0
    unit, pairs = canon_pair_block(p)
    return ModuleElement(_assemble((), unit, None, pairs))


def reassociate(a: SplitGenerator, b: SplitGenerator, c: SplitGenerator) -> ModuleElement:
    """The left-nested product (ab)c, i.e. -a(bc)."""
    return ModuleElement.monomial(Triple(a, b, c), -1.0)


def embed_oct(x: Octonion) -> ModuleElement:
    return ModuleElement(embed_graded(x.coeff))


def lmul_gen(a: SplitGenerator, e: ModuleElement, convention: str = NESTED) -> ModuleElement:
    if e.degree >= MAX_DEGREE:
        raise DegreeOverflowError("left multiplication would exceed degree 3")
    x = np.zeros((NGEN, e.vector.shape[0]))
    x[a.index] = e.vector
    return ModuleElement(left_action(x, convention))


def rmul_oct(e: ModuleElement, x: Octonion) -> ModuleElement:
    return ModuleElement(right_mul_oct_array(e.vector, x.coeff))


def lmul_oct(x: Octonion, e: ModuleElement) -> ModuleElement:
    return ModuleElement(left_mul_oct_array(x.coeff, e.vector))


def canonicalize(e: ModuleElement) -> ModuleElement:
    return ModuleElement(canonicalize_array(e.vector))


def is_canonical(e: ModuleElement) -> bool:
    for mono in e.terms():
        inner = mono[-2:] if len(mono) >= 2 else ()
        if inner and gen_order(inner[0], inner[1]) != -1:
            return False
    return True
