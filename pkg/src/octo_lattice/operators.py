"""Discrete Cauchy-Riemann operators, the star-Laplacian and their factorizations."""

from __future__ import annotations

import enum

import numpy as np

from . import weyl
from .lattice import (
    GridFunction,
    difference_block,
    difference_support,
    directional_differences,
    gather,
    pack,
    stencil_support,
    unit_vector,
    unpack,
)
from .octonion import DIM, LEFT_MATRICES, conj_array

FORWARD = "forward"
BACKWARD = "backward"

# rows processed per batch in the Weyl sweeps; bounds peak memory
CHUNK = 64


class WeylVariant(enum.Enum):
    """PM pairs e_j^+ with forward and e_j^- with backward differences; MP swaps them."""

    PM = "+-"
    MP = "-+"

    def direction(self, sign: str) -> int:
        forward_sign = "+" if self is WeylVariant.PM else "-"
        return 1 if sign == forward_sign else -1

    def steps(self) -> list[tuple[int, int]]:
        """(axis, direction) for each split generator in index order."""
        return [(g.axis, self.direction(g.sign)) for g in weyl.GENERATORS]


def _as_variant(v) -> WeylVariant:
    if isinstance(v, WeylVariant):
        return v
    return WeylVariant[v.upper()] if v.upper() in WeylVariant.__members__ else WeylVariant(v)


def _unit_matrices(conjugated: bool) -> np.ndarray:
    if not conjugated:
        return LEFT_MATRICES
    # conj(e_j) = -e_j for j >= 1
    return LEFT_MATRICES * conj_array(np.ones(DIM))[:, None, None]


def apply_cr(f: GridFunction, direction: str = FORWARD, conjugated: bool = False) -> GridFunction:
    """sum_j u_j * (difference_j f), u_j = e_j or conj(e_j), left-multiplied pointwise."""
    if direction not in (FORWARD, BACKWARD):
        raise ValueError(f"direction must be {FORWARD!r} or {BACKWARD!r}")
    if not f.is_octonion:
        raise TypeError("apply_cr acts on octonion-valued functions")
    d = 1 if direction == FORWARD else -1
    keys, diffs = directional_differences(f, [(j, d) for j in range(DIM)])
    out = np.einsum("jkl,njl->nk", _unit_matrices(conjugated), diffs)
    return GridFunction(keys, out, f.h).pruned()


def apply_laplacian(f: GridFunction) -> GridFunction:
    """Star stencil sum_j (f(m + e_j) - 2 f(m) + f(m - e_j)) / h^2."""
    offsets = [np.zeros(DIM, dtype=np.int64)]
    for j in range(DIM):
        offsets += [unit_vector(j), unit_vector(j, -1)]
    keys = stencil_support(f.keys, offsets)
    pts = unpack(keys)
    here = gather(f, keys)
    acc = -2.0 * DIM * here
    for j in range(DIM):
        acc += gather(f, pack(pts + unit_vector(j))) + gather(f, pack(pts - unit_vector(j)))
    return GridFunction(keys, acc / f.h**2, f.h).pruned()


def classic_factorization_residual(f: GridFunction) -> GridFunction:
    """1/2 (D+ conj(D-) f + D- conj(D+) f) - Laplacian f, by sequential application."""
    a = apply_cr(apply_cr(f, BACKWARD, conjugated=True), FORWARD)
    b = apply_cr(apply_cr(f, FORWARD, conjugated=True), BACKWARD)
    return (a + b) * 0.5 - apply_laplacian(f)


def embed_grid(f: GridFunction) -> GridFunction:
    """Split image of an octonion grid: e_k -> e_k^+ + e_k^- at every point."""
    if not f.is_octonion:
        raise TypeError("expected an octonion-valued grid function")
    return GridFunction(f.keys, weyl.embed_graded(f.values), f.h)


def apply_weyl(f: GridFunction, variant=WeylVariant.PM, convention: str = weyl.NESTED) -> GridFunction:
    """Left action sum_j e_j^+ d_j f + e_j^- d'_j f of a Weyl operator.

    Octonion inputs are embedded first.  Module-valued inputs of degree <= 2
    are multiplied with ``convention`` (see :func:`weyl.left_action`).
    """
    variant = _as_variant(variant)
    F = embed_grid(f) if f.is_octonion else f
    if weyl.degree_of_width(F.width) >= weyl.MAX_DEGREE:
        raise weyl.DegreeOverflowError("cannot apply a Weyl operator to degree-3 values")
    steps = variant.steps()
    keys = difference_support(F, steps)
    width = weyl.WIDTHS[weyl.degree_of_width(F.width) + 1]
    kept_keys, kept_vals = [], []
    for lo in range(0, len(keys), CHUNK):
        vals = weyl.left_action(difference_block(F, steps, keys[lo:lo + CHUNK]), convention)
        nz = vals.any(axis=1)
        kept_keys.append(keys[lo:lo + CHUNK][nz])
        kept_vals.append(weyl.trim_width(vals[nz]))
    if not kept_keys:
        return GridFunction.zeros(width, f.h)
    width = max(v.shape[1] for v in kept_vals)
    return GridFunction(np.concatenate(kept_keys), np.concatenate([weyl.pad(v, width) for v in kept_vals]), f.h)


def apply_weyl_right(g: GridFunction, variant=WeylVariant.MP) -> GridFunction:
    """Right action [g D]: Pair(g's unit, operator unit) with the difference of g.

    For MP, e_j^+ takes the backward and e_j^- the forward difference of g.
    """
    variant = _as_variant(variant)
    if not g.is_octonion:
        raise TypeError("apply_weyl_right acts on octonion-valued functions")
    keys, diffs = directional_differences(g, variant.steps())  # (n, 16 op gens, 8 comps)
    pair = np.repeat(np.swapaxes(diffs, 1, 2), 2, axis=1)  # (n, 16 g gens, 16 op gens)
    values = np.zeros((len(keys), weyl.WIDTHS[2]))
    values[:, weyl.OFFSETS[2]:] = pair.reshape(len(keys), weyl.NGEN**2)
    return GridFunction(keys, values, g.h).pruned()


def weyl_square(f: GridFunction, variant=WeylVariant.PM, convention: str = weyl.FLAT) -> GridFunction:
    """The Weyl operator applied twice; the second application uses ``convention``."""
    return apply_weyl(apply_weyl(f, variant, weyl.NESTED), variant, convention)


def weyl_square_residual(f: GridFunction, variant=WeylVariant.PM,
                         convention: str = weyl.FLAT) -> GridFunction:
    """D^2 f + Laplacian f in the split module; identically zero for ``flat``."""
    return weyl_square(f, variant, convention) + embed_grid(apply_laplacian(f))


def degree_component(F: GridFunction, degree: int) -> GridFunction:
    lo, hi = weyl.OFFSETS[degree], weyl.WIDTHS[degree]
    vals = np.zeros((len(F), weyl.WIDTHS[-1]))
    w = F.width
    if lo < w:
        vals[:, lo:min(hi, w)] = F.values[:, lo:min(hi, w)]
    return GridFunction(F.keys, vals, F.h).pruned()
