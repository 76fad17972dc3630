import pytest
from hypothesis import given
from hypothesis import strategies as st

from bvinf import GradedError, Series, koszul_sign, parse_element
from bvinf.fixtures import build_a1_mutated
from bvinf.operators import (KoszulMismatch, PolyDiffOperator, ad_element, check_l_infinity,
                             check_order, koszul_bracket, koszul_bracket_ad,
                             koszul_bracket_unshuffle, l_n, mu_n, verify_bv)

from conftest import MIXED, SMALL, homogeneous_monomial, mixed_operator

RING = MIXED.ring(SMALL)
OP = mixed_operator()


@pytest.fixture(scope="module")
def A(a1):
    return a1.source


@pytest.fixture(scope="module")
def els(A):
    r = A.ring
    return {"1": r.one(), "t": r.monomial((1, 0)), "dt": r.monomial((0, 1)),
            "tdt": r.monomial((1, 1))}


def test_delta_action(A, els):
    assert A.delta(els["1"]).is_zero()
    assert A.delta(els["tdt"]) == parse_element("t^2 + h^1*1", A.ring)
    assert A.delta(els["dt"]) == els["t"]


def test_ad_examples(A, els):
    d0, d1 = A.delta.component(0), A.delta.component(1)
    assert ad_element(A.delta, els["1"])(els["tdt"]).is_zero()
    assert ad_element(d1, els["t"])(els["dt"]) == els["1"]
    assert ad_element(d0, els["tdt"])(els["1"]) == els["t"] * els["t"]


def test_bracket_examples(A, els):
    d0, d1 = A.delta.component(0), A.delta.component(1)
    x = els["tdt"]
    assert koszul_bracket(A.delta, [x]) == A.delta(x)
    assert koszul_bracket(d0, [els["t"], x]).is_zero()
    assert koszul_bracket(d1, [els["t"], x]) == els["t"]
    assert mu_n(A.delta, [els["t"], x]) == els["t"]
    assert l_n(A.delta, [els["t"], x]) == els["t"]


def test_check_order_examples(A):
    d0, d1 = A.delta.component(0), A.delta.component(1)
    assert check_order(d0, 0, A.algebra, 8).ok
    rep = check_order(d1, 0, A.algebra, 8)
    assert not rep.ok
    c = rep.checks[0]
    assert c.witness["value"] == "1"
    # the witness is a genuine nonzero bracket
    args = [A.ring.monomial(tuple(e)) for e in rep.data["witness_args"]]
    assert not koszul_bracket(d1, args).is_zero()
    assert check_order(d1, 1, A.algebra, 8).ok


def test_verify_bv_fixtures(a1, b):
    assert verify_bv(a1.source, 4, tuple_cutoff=8).ok
    assert verify_bv(b, 4).ok


def test_verify_bv_mutated_fails_at_n3():
    bad = build_a1_mutated()
    rep = verify_bv(bad, 4, tuple_cutoff=6)
    assert not rep.ok
    failed = [c.name for c in rep.failures()]
    assert "koszul_n3" in failed
    assert rep.check("koszul_n2").status == "pass"
    assert rep.check("koszul_n3").witness


def test_l_infinity_relations(a1, b):
    assert check_l_infinity(a1.source, 3, cutoff=5).ok
    assert check_l_infinity(b, 3).ok


@given(st.lists(homogeneous_monomial(RING, hbar_max=1), min_size=1, max_size=4))
def test_bracket_two_routes(args):
    assert koszul_bracket_unshuffle(OP, args) == koszul_bracket_ad(OP, args)


@given(st.lists(homogeneous_monomial(RING, hbar_max=1), min_size=2, max_size=4),
       st.data())
def test_bracket_graded_symmetric(args, data):
    perm = data.draw(st.permutations(range(len(args))))
    degs = [a.degree() for a in args]
    lhs = koszul_bracket(OP, [args[i] for i in perm], check=False)
    rhs = koszul_bracket(OP, args, check=False) * koszul_sign(perm, degs)
    assert lhs == rhs


@pytest.mark.parametrize("text,order", [
    ("x*d/d<y> + w*d/d<x>", 1),
    ("d/d<x> d/d<y> + z*d/d<w>", 2),
    ("d/d<x> d/d<x> d/d<y>", 3),
])
def test_order_consistency(text, order):
    """K_n(op) vanishes for n > order exactly when check_order says so."""
    op = PolyDiffOperator.parse(text, MIXED, 1)
    assert op.order() == order
    for k in range(0, 3):
        passed = check_order(op, k, MIXED, 4, SMALL).ok
        assert passed == (order <= k + 1)


@given(homogeneous_monomial(RING))
def test_apply_raises_degree_by_one(a):
    y = OP(a)
    if not y.is_zero():
        assert y.degree() == a.degree() + 1


def test_mismatch_is_detected():
    # an even derivation mislabelled as odd: the commutator route uses the
    # declared degree for its signs, the unshuffle route does not
    euler = PolyDiffOperator.parse("x*d/d<x> + y*d/d<y> + w*d/d<w>", MIXED)
    euler.degree = 1
    with pytest.raises(KoszulMismatch):
        koszul_bracket(euler, [RING.gen("y"), RING.gen("w")])


def test_operator_degree_validation():
    with pytest.raises(GradedError):
        PolyDiffOperator.parse("x*d/d<y> + d/d<z>", MIXED)


def test_wrong_algebra_rejected(A):
    with pytest.raises(GradedError):
        OP(A.ring.one())
    assert isinstance(OP(RING.one()), Series)
