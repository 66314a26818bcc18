"""Discrete Stokes identities for the Weyl operators on hZ^8 and its half-lattices.

The density at a lattice point is::

    [g D^{-+}] f - g [D^{+-} f]

evaluated in the split module.  Its lattice sum vanishes on the whole
lattice.  On the half-lattices m_7 >= 1 / m_7 <= -1 only the axis-7
boundary layers survive.  :func:`telescope_residue` recomputes that
residue directly by summation by parts, without going through the density.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import weyl
from .lattice import GridFunction, Region, gather, lattice_sum, pack, unit_vector
from .octonion import DIM, Octonion, associator_arrays, mul_arrays
from .operators import FORWARD, WeylVariant, apply_cr, apply_weyl, apply_weyl_right

E7 = DIM - 1


class BoundaryInterpretation(enum.Enum):
    """How to read e_7^{+/-}(g f) in the half-lattice right-hand sides.

    OCTONION_FIRST multiplies g f as octonions and then attaches e_7^{+/-}
    on the left (degree 2).  SLOT_PRESERVING keeps e_7^{+/-} in the middle:
    sum g_i f_k e_i^t (e_7^{+/-} e_k^u) (degree 3).
    """

    OCTONION_FIRST = "i1"
    SLOT_PRESERVING = "i2"


def _check_inputs(f: GridFunction, g: GridFunction) -> float:
    if not (f.is_octonion and g.is_octonion):
        raise TypeError("Stokes identities take octonion-valued f and g")
    if f.h != g.h:
        raise ValueError("f and g must share the mesh width")
    return f.h


def _pointwise(a: GridFunction, b: GridFunction):
    keys = np.intersect1d(a.keys, b.keys, assume_unique=True)
    return keys, gather(a, keys), gather(b, keys)


def stokes_density_field(f: GridFunction, g: GridFunction) -> GridFunction:
    """Raw density [g D^{-+}](m) f(m) - g(m) [D^{+-} f](m) at every point."""
    h = _check_inputs(f, g)
    right = apply_weyl_right(g, WeylVariant.MP)
    left = apply_weyl(f, WeylVariant.PM, weyl.NESTED)
    k1, r, fv = _pointwise(right, f)
    k2, gv, lv = _pointwise(g, left)
    first = GridFunction(k1, weyl.pad(weyl.right_mul_oct_array(r, fv), weyl.WIDTHS[3]), h)
    second = GridFunction(k2, weyl.pad(weyl.left_mul_oct_array(gv, lv), weyl.WIDTHS[3]), h)
    return first - second


def stokes_density(f: GridFunction, g: GridFunction, m) -> weyl.ModuleElement:
    return stokes_density_field(f, g).value_at(m)


def stokes_sum(f: GridFunction, g: GridFunction, region: Region | None = None,
               canonical: bool = False) -> weyl.ModuleElement:
    """h^8-weighted lattice sum of the density over ``region``.

    With ``canonical`` the density is canonicalized pointwise before summing.
    """
    density = stokes_density_field(f, g)
    if canonical:
        density = GridFunction(density.keys, weyl.canonicalize_array(density.values), density.h)
    return lattice_sum(density, region or Region.whole())


def _split_outer(c: np.ndarray) -> np.ndarray:
    """(8, 8) coefficients g_i f_k -> (16, 16) over (e_i^t, e_k^u)."""
    return np.repeat(np.repeat(c, 2, axis=0), 2, axis=1)


def telescope_residue(f: GridFunction, g: GridFunction, region: Region) -> weyl.ModuleElement:
    """Summation-by-parts residue of the Stokes density over ``region``.

    For every axis j the difference quotients telescope to sums weighted by
    w_j(m) = [m in R] - [m + e_j in R], which vanishes except where R has a
    face normal to e_j.  The e_j^+ part collects g(m) f(m + e_j), the e_j^-
    part g(m + e_j) f(m), both with prefactor -h^7.
    """
    h = _check_inputs(f, g)
    scale = -(h**8) / h
    triple = np.zeros((weyl.NGEN,) * 3)
    gp, fp = g.points, f.points
    for j in range(DIM):
        step = unit_vector(j)
        # e_j^+ : sum over m in supp g of w_j(m) g(m) (x) f(m + e_j)
        w = region.contains(gp).astype(float) - region.contains(gp + step)
        if w.any():
            fv = gather(f, pack(gp + step))
            c = np.einsum("n,ni,nk->ik", w, g.values, fv)
            triple[:, 2 * j, :] += scale * _split_outer(c)
        # e_j^- : sum over m in supp f of w_j(m) g(m + e_j) (x) f(m)
        w = region.contains(fp).astype(float) - region.contains(fp + step)
        if w.any():
            gv = gather(g, pack(fp + step))
            c = np.einsum("n,ni,nk->ik", w, gv, f.values)
            triple[:, 2 * j + 1, :] += scale * _split_outer(c)
    vec = np.zeros(weyl.WIDTHS[3])
    vec[weyl.OFFSETS[3]:] = triple.ravel()
    return weyl.ModuleElement(vec)


_BOUNDARY_TERMS = {
    # side: (overall sign, [(generator, g layer, f layer), ...])
    "upper": (1.0, [(weyl.ep(E7), 0, 1), (weyl.em(E7), 1, 0)]),
    "lower": (-1.0, [(weyl.ep(E7), -1, 0), (weyl.em(E7), 0, -1)]),
}


def _side_name(side) -> str:
    name = side.kind if isinstance(side, Region) else str(side).lower()
    if name not in _BOUNDARY_TERMS:
        raise ValueError(f"side must be 'upper' or 'lower', got {side!r}")
    return name


def boundary_rhs(f: GridFunction, g: GridFunction, side,
                 interp: BoundaryInterpretation | str) -> weyl.ModuleElement:
    """Printed right-hand side of the half-lattice formula under ``interp``.

    Layers are the printed ones, (0, 1) for upper and (-1, 0) for lower, and
    the sum over m carries the factor h^8.
    """
    h = _check_inputs(f, g)
    interp = BoundaryInterpretation(interp) if not isinstance(interp, BoundaryInterpretation) else interp
    sign, terms = _BOUNDARY_TERMS[_side_name(side)]
    vec = np.zeros(weyl.WIDTHS[3])
    _, _, pair, triple = weyl.blocks(vec)
    gp = g.points
    for gen, g_layer, f_layer in terms:
        on_layer = gp[:, E7] == g_layer
        pts = gp[on_layer]
        gv = g.values[on_layer]
        fv = gather(f, pack(pts + unit_vector(E7, f_layer - g_layer)))
        if interp is BoundaryInterpretation.SLOT_PRESERVING:
            c = np.einsum("ni,nk->ik", gv, fv)
            triple[:, gen.index, :] += sign * h**8 * _split_outer(c)
        else:
            prod = mul_arrays(gv, fv).sum(axis=0)
            pair[gen.index, :] += sign * h**8 * weyl.embed_array(prod)
    return weyl.ModuleElement(vec)


def associator_probe(f: GridFunction, g: GridFunction, direction: str = FORWARD):
    """Discrete associator term h^8 sum_m sum_j [e_j, (D g_j)(m), f(m)].

    ``g_j`` is the j-th real component of g; the Cauchy-Riemann operator in
    ``direction`` turns it into an octonion field.  Returns the probe and the
    norm of the whole-lattice Stokes sum for the same pair.
    """
    h = _check_inputs(f, g)
    total = np.zeros(DIM)
    for j in range(DIM):
        comp = np.zeros_like(g.values)
        comp[:, 0] = g.values[:, j]
        dg = apply_cr(GridFunction(g.keys, comp, h).pruned(), direction)
        _, dv, fv = _pointwise(dg, f)
        if len(dv):
            ej = np.zeros_like(dv)
            ej[:, j] = 1.0
            total += associator_arrays(ej, dv, fv).sum(axis=0)
    probe = Octonion(total * h**8)
    return probe, stokes_sum(f, g, Region.whole()).norm()


def _residual(a: weyl.ModuleElement, b: weyl.ModuleElement) -> float:
    d = a - b
    return d.max_abs() if not d.is_zero() else 0.0


@dataclass
class StokesReport:
    side: str
    region: Region
    lhs: weyl.ModuleElement
    telescope: weyl.ModuleElement
    rhs_i1: weyl.ModuleElement
    rhs_i2: weyl.ModuleElement
    residuals: dict = field(default_factory=dict)
    seed: int | None = None
    h: float = 1.0

    def _threshold(self, tol: float) -> float:
        return tol * max(self.lhs.max_abs() if not self.lhs.is_zero() else 0.0, 1.0)

    def matching_interpretations(self, tol: float = 0.0) -> list[str]:
        limit = self._threshold(tol)
        return [name for name in ("i1", "i2") if self.residuals[f"lhs-rhs_{name}"] <= limit]

    def oracle_agrees(self, tol: float = 0.0) -> bool:
        return self.residuals["lhs-telescope"] <= self._threshold(tol)


def half_space_report(f: GridFunction, g: GridFunction, side: str = "upper",
                      base_layer: int = 1, seed: int | None = None) -> StokesReport:
    side = _side_name(side)
    region = Region.upper(base_layer) if side == "upper" else Region.lower(base_layer)
    lhs = stokes_sum(f, g, region)
    tel = telescope_residue(f, g, region)
    r1 = boundary_rhs(f, g, side, BoundaryInterpretation.OCTONION_FIRST)
    r2 = boundary_rhs(f, g, side, BoundaryInterpretation.SLOT_PRESERVING)
    residuals = {
        "lhs-telescope": _residual(lhs, tel),
        "lhs-rhs_i1": _residual(lhs, r1),
        "lhs-rhs_i2": _residual(lhs, r2),
        "rhs_i1-rhs_i2": _residual(r1, r2),
    }
    return StokesReport(side, region, lhs, tel, r1, r2, residuals, seed, f.h)
