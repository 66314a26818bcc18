import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import delta, origin
from octo_lattice import operators, weyl
from octo_lattice.lattice import (
    DIM,
    GridFunction,
    LatticeWindow,
    bdiff,
    coordinate_ramp,
    fdiff,
    random_scattered,
    shift,
)
from octo_lattice.octonion import Octonion, oct_conj
from octo_lattice.operators import (
    BACKWARD,
    FORWARD,
    WeylVariant,
    apply_cr,
    apply_laplacian,
    apply_weyl,
    apply_weyl_right,
    classic_factorization_residual,
    degree_component,
    embed_grid,
    weyl_square,
    weyl_square_residual,
)
from octo_lattice.weyl import Pair, em, ep

seeds = st.integers(0, 10**6)
SMALL = LatticeWindow.cube(3, -1)
E = [Octonion.basis(k) for k in range(DIM)]


def scattered(seed, count=12, h=1.0):
    return random_scattered(seed, SMALL, count, 3, h)


def interior_value(F):
    return F.value_at(origin())


def dense_ones():
    w = LatticeWindow.cube(3, -1)
    return GridFunction.from_dense(w, np.tile(np.arange(1.0, 9.0), (w.size, 1)))


def test_variants():
    assert WeylVariant("+-") is WeylVariant.PM
    assert WeylVariant.PM.steps()[:2] == [(0, 1), (0, -1)]
    assert WeylVariant.MP.steps()[:2] == [(0, -1), (0, 1)]
    assert operators._as_variant("mp") is WeylVariant.MP


def test_constant_annihilated_in_interior():
    f = dense_ones()
    assert interior_value(apply_cr(f, FORWARD)).is_zero()
    assert interior_value(apply_laplacian(f)).is_zero()
    assert interior_value(apply_weyl(f, "PM")).is_zero()
    assert interior_value(apply_weyl_right(f, "MP")).is_zero()


def test_cr_delta_examples():
    h = 0.5
    f = delta(origin(), 0, h=h)
    fwd = apply_cr(f, FORWARD).value_at(origin())
    assert fwd == Octonion([-1 / h] * DIM)
    bwd = apply_cr(f, BACKWARD, conjugated=True).value_at(origin())
    assert bwd == oct_conj(Octonion([1 / h] * DIM))
    with pytest.raises(ValueError):
        apply_cr(f, "sideways")


@given(seeds, seeds)
def test_cr_matches_stencil_oracle(s1, s2):
    f = scattered(s1)
    for direction, diff in ((FORWARD, fdiff), (BACKWARD, bdiff)):
        oracle = GridFunction.zeros()
        for j in range(DIM):
            d = diff(f, j)
            oracle = oracle + d.with_values(np.array([(E[j] * Octonion(v)).coeff for v in d.values]).reshape(-1, DIM))
        assert apply_cr(f, direction) == oracle


def test_cr_shift_relation():
    # forward and backward differences differ by a one-step shift on each axis
    f = scattered(3)
    for j in range(DIM):
        assert shift(fdiff(f, j), j, -1) == bdiff(f, j)


def test_laplacian_examples():
    h = 0.5
    assert apply_laplacian(delta(origin(), 0, h=h)).value_at(origin()) == Octonion.real(-16 / h**2)
    ramp = coordinate_ramp(LatticeWindow.cube(3, -1), 2)
    assert apply_laplacian(ramp).value_at(origin()).is_zero()


@given(seeds)
def test_laplacian_is_sum_of_second_differences(seed):
    f = scattered(seed)
    oracle = GridFunction.zeros()
    for j in range(DIM):
        oracle = oracle + fdiff(bdiff(f, j), j)
    assert apply_laplacian(f) == oracle


@given(seeds, st.sampled_from([1.0, 0.5]))
def test_classic_factorization(seed, h):
    f = scattered(seed, h=h)
    assert classic_factorization_residual(f).is_zero(1e-12 * max(1, 16 / h**2 * 3))
    assert classic_factorization_residual(delta(origin(), 0)).is_zero()


def _flat_unit_composition(f, dir1, dir2):
    """sum_{j,k} (e_j conj(e_k)) d1_j d2_k f: units multiplied first."""
    out = GridFunction.zeros()
    d = {FORWARD: fdiff, BACKWARD: bdiff}
    for j in range(DIM):
        for k in range(DIM):
            u = E[j] * oct_conj(E[k])
            dd = d[dir1](d[dir2](f, k), j)
            if len(dd):
                out = out + dd.with_values(np.array([(u * Octonion(v)).coeff for v in dd.values]))
    return out


def test_nested_and_flat_classic_composition():
    f = scattered(11)
    nested = (apply_cr(apply_cr(f, BACKWARD, conjugated=True), FORWARD)
              + apply_cr(apply_cr(f, FORWARD, conjugated=True), BACKWARD))
    flat = _flat_unit_composition(f, FORWARD, BACKWARD) + _flat_unit_composition(f, BACKWARD, FORWARD)
    assert nested == flat
    # a single product is not enough: alternativity only cancels the symmetrized cross terms
    single = apply_cr(apply_cr(f, BACKWARD, conjugated=True), FORWARD)
    assert single != _flat_unit_composition(f, FORWARD, BACKWARD)


def test_apply_weyl_delta_example():
    f = delta(origin(), 0)
    got = apply_weyl(f, WeylVariant.PM).value_at(origin())
    terms = {}
    for j in range(DIM):
        for u in (ep(0), em(0)):
            terms[Pair(ep(j), u)] = -1.0
            terms[Pair(em(j), u)] = 1.0
    assert got == weyl.ModuleElement.from_terms(terms)


def test_apply_weyl_right_delta_example():
    g = delta(origin(), 1)
    got = apply_weyl_right(g, WeylVariant.MP).value_at(origin())
    terms = {}
    for j in range(DIM):
        for t in (ep(1), em(1)):
            terms[Pair(t, ep(j))] = 1.0
            terms[Pair(t, em(j))] = -1.0
    assert got == weyl.ModuleElement.from_terms(terms)


def test_right_action_real_unit_slot():
    g = delta(origin(), 0)
    got = apply_weyl_right(g, WeylVariant.MP).value_at(origin())
    assert {m[0] for m in got.terms()} == {ep(0), em(0)}


@given(seeds, seeds)
def test_weyl_linear(s1, s2):
    f, g = scattered(s1), scattered(s2)
    for v in WeylVariant:
        assert apply_weyl(f + g, v) == apply_weyl(f, v) + apply_weyl(g, v)
        assert apply_weyl(f * 3, v) == apply_weyl(f, v) * 3
        assert apply_weyl_right(f + g, v) == apply_weyl_right(f, v) + apply_weyl_right(g, v)


def test_weyl_square_delta():
    f = delta(origin(), 0)
    for v in WeylVariant:
        assert weyl_square_residual(f, v).is_zero()


@given(seeds)
def test_weyl_square_flat_is_minus_laplacian(seed):
    f = scattered(seed, count=6)
    for v in WeylVariant:
        sq = weyl_square(f, v, weyl.FLAT)
        assert degree_component(sq, 3).is_zero()
        assert degree_component(sq, 2).is_zero()
        assert sq + embed_grid(apply_laplacian(f)) == GridFunction.zeros(weyl.WIDTHS[-1])


def test_flat_square_produces_triples_before_cancelling():
    # the cross terms are nonzero one by one; the cancellation must come from pairing them
    f = delta(origin(), 1)
    first = apply_weyl(f, WeylVariant.PM)
    steps = WeylVariant.PM.steps()
    from octo_lattice.lattice import difference_block
    block = difference_block(first, steps, first.keys)
    x = np.zeros_like(block)
    x[:, 0] = block[:, 0]
    assert weyl.left_action(x, weyl.FLAT)[:, weyl.OFFSETS[3]:].any()


def test_nested_square_differs():
    f = scattered(0)
    for v in WeylVariant:
        res = weyl_square_residual(f, v, weyl.NESTED)
        assert not res.is_zero()
        sq = weyl_square(f, v, weyl.NESTED)
        # nested composition never leaves degree 3
        assert degree_component(sq, 1).is_zero() and degree_component(sq, 2).is_zero()


def test_weyl_rejects_degree_three():
    f = weyl_square(delta(origin(), 0), WeylVariant.PM, weyl.NESTED)
    with pytest.raises(weyl.DegreeOverflowError):
        apply_weyl(f, WeylVariant.PM)


def test_type_errors():
    F = embed_grid(delta(origin(), 2))
    with pytest.raises(TypeError):
        apply_cr(F)
    with pytest.raises(TypeError):
        apply_weyl_right(F)
    with pytest.raises(TypeError):
        embed_grid(F)
