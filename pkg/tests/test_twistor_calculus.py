import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistorfill import _scalars as sc
from twistorfill import twistor_calculus as tc
from twistorfill.rep_core import ProductRep


@st.composite
def rep_pair(draw, bound=6):
    K = draw(st.integers(0, bound))
    L = draw(st.integers(0, bound).filter(lambda x: (x + K) % 2 == 0))
    return K, L


seeds = st.integers(0, 2 ** 32 - 1)

GRADED_OPS = [
    (tc.complex_hessian, tc.FUNCTIONS, tc.CR_DEFORM),
    (tc.dbar_h, tc.CR_DEFORM, tc.TWO_FORM),
    (tc.levi_contract, tc.CR_DEFORM, tc.OMEGA02),
    (tc.sharp, tc.OMEGA01, tc.T10),
    (tc.dbar_function, tc.FUNCTIONS, tc.OMEGA01),
    (tc.dbar_vector, tc.T10, tc.CR_DEFORM),
]


def test_entry_validation():
    with pytest.raises(ValueError):
        tc.EquivariantTensor(tc.FUNCTIONS, {(2, 2, 2, 0, "1"): 1.0})  # off the k+l=0 line
    with pytest.raises(ValueError):
        tc.EquivariantTensor(tc.FUNCTIONS, {(1, 2, 1, -1, "1"): 1.0})  # odd K+L
    with pytest.raises(ValueError):
        tc.EquivariantTensor(tc.CR_DEFORM, {(4, 0, 4, 0, "bogus"): 1.0})
    t = tc.EquivariantTensor(tc.CR_DEFORM, {(4, 0, 4, 0, "e1bar_e1"): 2.0})
    assert t.get(4, 0, 4, 0, "e1bar_e1") == 2.0
    assert t.reps() == [(4, 0)]


def test_fiber_specs():
    assert tc.CR_DEFORM.u1_weight == 4
    with pytest.raises(ValueError):
        tc.OMEGA01_CONTACT_L.u1_weight
    with pytest.raises(ValueError):
        tc.P1_NORMAL.offset_of("p1")
    rep = ProductRep(4, 0)
    assert tc.CR_DEFORM.coordinates(rep) == [(lab, (4, 0)) for lab in tc.CR_DEFORM.basis_labels]
    assert set(tc.FIBERS) >= {"Functions", "CRDeform", "TwoForm"}


def test_hessian_of_single_coefficient():
    f = tc.EquivariantTensor(tc.FUNCTIONS, {(4, 4, -2, 2, "1"): sc.gaussian(1)})
    phi = tc.complex_hessian(f)
    expected = {(4, 4, 2, 2, "e1bar_e1"): sc.gaussian(0, -1),
                (4, 4, 0, 4, "e1bar_e2"): sc.gaussian(0, 1),
                (4, 4, 0, 4, "e2bar_e1"): sc.gaussian(0, -1)}
    assert dict(phi.entries) == expected  # (-2, 6) lies outside V^{4,4}


@settings(max_examples=40, deadline=None)
@given(rep_pair(), seeds)
def test_hessian_lands_in_constraints(pair, seed):
    rng = np.random.default_rng(seed)
    f = tc.random_function([pair], rng, real=False, odd_under_tau=False, exact=True)
    phi = tc.complex_hessian(f)
    assert tc.dbar_h(phi).is_zero()
    assert tc.levi_contract(phi).is_zero()


@settings(max_examples=40, deadline=None)
@given(rep_pair(), seeds)
def test_dbar_h_kills_dbar_of_vectors(pair, seed):
    rng = np.random.default_rng(seed)
    v = tc.random_tensor(tc.T10, [pair], rng, exact=True)
    assert tc.dbar_h(tc.dbar_vector(v)).is_zero()


@settings(max_examples=40, deadline=None)
@given(rep_pair(), seeds)
def test_sharp_roundtrip(pair, seed):
    rng = np.random.default_rng(seed)
    a = tc.random_tensor(tc.OMEGA01, [pair], rng, exact=True)
    assert tc.sharp_inverse(tc.sharp(a)).equals(a)


@pytest.mark.parametrize("op,fin,fout", GRADED_OPS, ids=lambda x: getattr(x, "__name__", ""))
def test_operators_preserve_s1_weight(op, fin, fout):
    rng = np.random.default_rng(5)
    t = tc.random_tensor(fin, [(4, 2), (3, 5), (6, 6)], rng)
    weights = {tc.s1_weight(key, fin) for key in t.entries}
    for s in weights:
        piece = op(tc.s1_component(t, lambda w, s=s: w == s))
        assert all(tc.s1_weight(key, fout) == s for key in piece.entries)


@settings(max_examples=30, deadline=None)
@given(rep_pair(), seeds)
def test_operator_matrix_matches_operator(pair, seed):
    rng = np.random.default_rng(seed)
    rep = ProductRep(*pair)
    t = tc.random_tensor(tc.CR_DEFORM, [pair], rng)
    M = tc.operator_matrix(tc.dbar_h, tc.CR_DEFORM, tc.TWO_FORM, rep)
    direct = tc.dbar_h(t).to_vector(rep)
    assert np.allclose(M @ t.to_vector(rep), direct)


@settings(max_examples=30, deadline=None)
@given(rep_pair(), seeds)
def test_involutions(pair, seed):
    rng = np.random.default_rng(seed)
    f = tc.random_function([pair], rng, real=False, odd_under_tau=False, exact=True)
    assert tc.tau_pullback(tc.tau_pullback(f)).equals(f)
    assert tc.conjugate_function(tc.conjugate_function(f)).equals(f)
    phi = tc.random_tensor(tc.CR_DEFORM, [pair], rng, exact=True)
    assert tc.tau_pullback(tc.tau_pullback(phi, "cr"), "cr").equals(phi)


@settings(max_examples=30, deadline=None)
@given(rep_pair(), seeds)
def test_hessian_intertwines_real_structure(pair, seed):
    rng = np.random.default_rng(seed)
    f = tc.random_function([pair], rng, real=False, odd_under_tau=False, exact=True)
    lhs = tc.tau_pullback(tc.complex_hessian(f), "cr")
    rhs = tc.complex_hessian(tc.conjugate_function(tc.tau_pullback(f)))
    assert lhs.equals(-rhs)


@settings(max_examples=30, deadline=None)
@given(rep_pair(), seeds)
def test_random_function_symmetries(pair, seed):
    rng = np.random.default_rng(seed)
    f = tc.random_function([pair], rng, exact=True)
    assert tc.conjugate_function(f).equals(f)
    assert tc.tau_pullback(f).equals(-f)
    # the hessian of a real odd function is a tau-invariant CR deformation
    phi = tc.complex_hessian(f)
    assert tc.tau_pullback(phi, "cr").equals(phi)


def test_tensor_arithmetic_and_vectors():
    rng = np.random.default_rng(0)
    rep = ProductRep(4, 2)
    a = tc.random_tensor(tc.CR_DEFORM, [(4, 2)], rng)
    b = tc.random_tensor(tc.CR_DEFORM, [(4, 2)], rng)
    assert (a + b - b).equals(a, 1e-12)
    assert a.scale(2.0).equals(a + a, 1e-12)
    back = tc.EquivariantTensor.from_vector(tc.CR_DEFORM, rep, a.to_vector(rep))
    assert back.equals(a, 0.0)
    assert (a - a).pruned(1e-15).is_zero()
    with pytest.raises(ValueError):
        a + tc.random_tensor(tc.TWO_FORM, [(4, 2)], rng)
    with pytest.raises(ValueError):
        tc.dbar_h(tc.random_function([(2, 2)], rng))


def test_negative_part_and_weights():
    rng = np.random.default_rng(2)
    f = tc.random_function([(6, 6)], rng, real=False, odd_under_tau=False)
    neg = tc.negative_part(f)
    assert neg.entries and all(tc.s1_weight(k) < 0 for k in neg.entries)
    assert len(neg) + len(tc.s1_component(f, lambda w: w >= 0)) == len(f)
    assert tc.s1_weight((4, 0, 4, 0, "e1bar_e1")) == 0
    with pytest.raises(ValueError):
        tc.s1_weight((4, 0, 4, 0, "nothing"))


def test_levi_and_contact_symbol():
    levi = tc.LeviData()
    assert levi.nondegenerate
    assert np.array_equal(levi.matrix, [[1, 0], [0, -1]])
    eta = tc.HolContactSymbol()
    assert eta.evaluate("e_1") + eta.evaluate("e_2") == 0
