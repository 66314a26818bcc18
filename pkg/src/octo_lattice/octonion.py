"""Real octonions: multiplication table, conjugation, norm and associator.

Multiplication is driven by a single stored table of signed basis indices.
The generator relations (e4 = e1 e2, ...) are consequences that the test
suite checks against the table, never the other way around.
"""

from __future__ import annotations

import itertools
from typing import Iterable, NamedTuple

import numpy as np

DIM = 8

# Row i, column j holds e_i * e_j.  "1" / "-1" denote +e0 / -e0.
_TABLE_TEXT = """
 1   e1  e2  e3  e4  e5  e6  e7
 e1 -1   e4  e5 -e2 -e3 -e7  e6
 e2 -e4 -1   e6  e1  e7 -e3 -e5
 e3 -e5 -e6 -1  -e7  e1  e2  e4
 e4  e2 -e1  e7 -1  -e6  e5 -e3
 e5  e3 -e7 -e1  e6 -1  -e4  e2
 e6  e7  e3 -e2 -e5  e4 -1  -e1
 e7 -e6  e5 -e4  e3 -e2  e1 -1
"""


def _parse_entry(token: str) -> tuple[int, int]:
    sign = -1 if token.startswith("-") else 1
    body = token.lstrip("+-")
    return sign, 0 if body == "1" else int(body[1:])


def _parse_table(text: str) -> tuple[tuple[tuple[int, int], ...], ...]:
    rows = [line.split() for line in text.strip().splitlines()]
    if len(rows) != DIM or any(len(r) != DIM for r in rows):
        raise ValueError("octonion table must be 8x8")
    return tuple(tuple(_parse_entry(tok) for tok in row) for row in rows)


MULTIPLICATION_TABLE = _parse_table(_TABLE_TEXT)


def _structure_constants() -> np.ndarray:
    c = np.zeros((DIM, DIM, DIM))
    for i, j in itertools.product(range(DIM), repeat=2):
        sign, k = MULTIPLICATION_TABLE[i][j]
        c[i, j, k] = sign
    c.setflags(write=False)
    return c


#: ``STRUCTURE[i, j, k]`` is the e_k coefficient of e_i * e_j.
STRUCTURE = _structure_constants()

#: ``LEFT_MATRICES[i]`` is the 8x8 matrix of x -> e_i * x.
LEFT_MATRICES = np.ascontiguousarray(STRUCTURE.transpose(0, 2, 1))
LEFT_MATRICES.setflags(write=False)

_CONJ_SIGNS = np.array([1.0] + [-1.0] * (DIM - 1))


class BasisProduct(NamedTuple):
    sign: int
    index: int


def basis_product(i: int, j: int) -> BasisProduct:
    """Signed basis element e_i * e_j; a scalar result is reported as index 0."""
    for n in (i, j):
        if not 0 <= n < DIM:
            raise ValueError(f"basis index out of range: {n}")
    return BasisProduct(*MULTIPLICATION_TABLE[i][j])


def mul_arrays(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Batched octonion product of coefficient arrays of shape (..., 8)."""
    return np.einsum("...i,...j,ijk->...k", a, b, STRUCTURE)


def conj_array(a: np.ndarray) -> np.ndarray:
    return a * _CONJ_SIGNS


class Octonion:
    """Immutable octonion with 8 real coefficients, ``coeff[k]`` on e_k."""

    __slots__ = ("_c",)

    def __init__(self, coeff: Iterable[float] = ()):
        c = np.array(list(coeff) if not isinstance(coeff, np.ndarray) else coeff, dtype=float)
        if c.size == 0:
            c = np.zeros(DIM)
        if c.shape != (DIM,):
            raise ValueError(f"an octonion needs 8 coefficients, got shape {c.shape}")
        c.setflags(write=False)
        self._c = c

    @classmethod
    def basis(cls, k: int, scale: float = 1.0) -> Octonion:
        if not 0 <= k < DIM:
            raise ValueError(f"basis index out of range: {k}")
        c = np.zeros(DIM)
        c[k] = scale
        return cls(c)

    @classmethod
    def real(cls, x: float) -> Octonion:
        return cls.basis(0, x)

    @property
    def coeff(self) -> np.ndarray:
        return self._c

    @property
    def re(self) -> float:
        return float(self._c[0])

    def __getitem__(self, k: int) -> float:
        return float(self._c[k])

    def __iter__(self):
        return iter(self._c.tolist())

    def __add__(self, other: Octonion) -> Octonion:
        return Octonion(self._c + other._c)

    def __sub__(self, other: Octonion) -> Octonion:
        return Octonion(self._c - other._c)

    def __neg__(self) -> Octonion:
        return Octonion(-self._c)

    def __mul__(self, other):
        if isinstance(other, Octonion):
            return Octonion(mul_arrays(self._c, other._c))
        return Octonion(self._c * float(other))

    def __rmul__(self, other):
        # only real scalars reach here; Octonion * Octonion uses __mul__
        return Octonion(self._c * float(other))

    def __truediv__(self, scalar: float) -> Octonion:
        return Octonion(self._c / scalar)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Octonion):
            return NotImplemented
        return bool(np.array_equal(self._c, other._c))

    def __hash__(self):
        return hash(self._c.tobytes())

    def conj(self) -> Octonion:
        return oct_conj(self)

    def norm(self) -> float:
        return oct_norm(self)

    def is_zero(self) -> bool:
        return not self._c.any()

    def __repr__(self) -> str:
        return f"Octonion({self._c.tolist()})"

    def __str__(self) -> str:
        terms = []
        for k, v in enumerate(self._c):
            if v:
                terms.append(f"{v:+g}" + (f"*e{k}" if k else ""))
        return " ".join(terms) if terms else "0"


def oct_mul(a: Octonion, b: Octonion) -> Octonion:
    return a * b


def oct_conj(a: Octonion) -> Octonion:
    return Octonion(conj_array(a.coeff))


def oct_norm(a: Octonion) -> float:
    return float(np.sqrt(np.dot(a.coeff, a.coeff)))


def associator(a: Octonion, b: Octonion, c: Octonion) -> Octonion:
    """[a, b, c] = (ab)c - a(bc)."""
    return (a * b) * c - a * (b * c)


def associator_arrays(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    return mul_arrays(mul_arrays(a, b), c) - mul_arrays(a, mul_arrays(b, c))


def associative_basis_triples() -> list[tuple[int, int, int]]:
    """Mutually distinct imaginary triples (i, j, k) with (e_i e_j) e_k = e_i (e_j e_k).

    These are exactly the orderings of triples spanning a quaternion
    subalgebra; every other distinct triple anti-associates.
    """
    out = []
    for i, j, k in itertools.permutations(range(1, DIM), 3):
        ei, ej, ek = (Octonion.basis(n) for n in (i, j, k))
        if (ei * ej) * ek == ei * (ej * ek):
            out.append((i, j, k))
    return out
