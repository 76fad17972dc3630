import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bvinf import Generator, GradedError, Series, parse_element
from bvinf.hodge import Contraction, ObstructionError
from bvinf.mc import (MCMismatch, TwistedMorphism, TwistedOperator, mc_residual, pushforward_mc,
                      random_probes, residual_exp, residual_mu, solve_mc_universal,
                      twist_morphism, twist_operator, twisted_cumulant_rhs)
from bvinf.morphisms import cumulant_partition, identity_morphism
from bvinf.operators import verify_bv


def with_u(inst):
    return inst.ring.with_params([Generator("u", 0, 0, "param")])


@pytest.fixture(scope="module")
def A(a1):
    return a1.source


def test_residual_examples(A):
    r = with_u(A)
    u = r.gen("u")
    assert mc_residual(A, u * r.one()).is_zero()
    assert mc_residual(A, u * r.embed(A.ring.monomial((1, 0)))).is_zero()
    bad = u * r.embed(A.ring.monomial((1, 1)))
    with pytest.raises(GradedError):
        mc_residual(A, bad)
    res = mc_residual(A, bad, diagnostic=True, check=False)
    assert res.udeg_part(1) == u * parse_element("t^2 + h^1*1", r)


@settings(max_examples=25)
@given(st.lists(st.tuples(st.integers(1, 3), st.integers(0, 4), st.integers(0, 2),
                          st.integers(-3, 3)), min_size=1, max_size=3))
def test_residual_two_routes(A, terms):
    """mu-sum and exponential route agree on random even pole-free gamma."""
    r = with_u(A)
    t = {}
    for ud, a, k, c in terms:
        t[(k, (ud, a, 0))] = c or 1
    gamma = Series(r, t)
    r1 = residual_mu(A.delta, gamma, r.nu)
    r2 = residual_exp(A.delta, gamma)
    assert r1 == r2


def test_mismatch_raised_for_broken_operator(A):
    r = with_u(A)

    class Bent:
        # quadratic and highly hbar-divisible: only the exponential route notices
        degree = 1

        def __call__(self, x):
            return A.delta(x) + (x * x).shift(6)

    gamma = r.gen("u") * r.embed(A.ring.monomial((1, 0)))
    with pytest.raises(MCMismatch):
        mc_residual(A, gamma, op=Bent())


def test_solver_fixtures(A, a2, b):
    g1 = solve_mc_universal(A)
    assert str(g1.value) == "u1*1"
    assert set(g1.corrections.values()) == {"0"}
    assert len(g1.corrections) == A.trunc.n_param - 1
    g2 = solve_mc_universal(a2)
    assert str(g2.value) == "u1*1 + u2*t"
    assert set(g2.corrections.values()) == {"0"}
    assert str(solve_mc_universal(b).value) == "u1*1"
    for inst, g in ((A, g1), (a2, g2)):
        assert mc_residual(inst, g).is_zero()
        assert g.value.at_params_zero().is_zero()


def test_solver_basis_selection(a2):
    g = solve_mc_universal(a2, basis=["t"])
    assert str(g.value) == "u1*t"
    with pytest.raises(GradedError):
        solve_mc_universal(a2, basis=["t^2"])


def test_solver_obstruction_reported():
    from bvinf.config import algebra_from_dict
    # Delta_0 = 0 leaves every monomial as a class; the u-linear solve then has
    # residual h*d/dx d/dy(u_i x^i y) that nothing can cancel
    doc = {"name": "obs", "m": 1,
           "generators": [{"name": "x", "degree": 0}, {"name": "y", "degree": -1}],
           "delta": ["0", "d/d<x> d/d<y>"],
           "truncation": {"n_poly": 6, "n_hbar": 3, "n_param": 3}}
    inst = algebra_from_dict(doc)
    cd = Contraction(inst)
    assert "x*y" in cd.labels and "x^6" in cd.labels
    with pytest.raises(ObstructionError, match="u-order 2"):
        solve_mc_universal(inst, cd)


def test_twisting_examples(A, b):
    r = with_u(A)
    u = r.gen("u")
    dt = r.embed(A.ring.monomial((0, 1)))
    tw1 = TwistedOperator(A.delta, u * r.one())
    for x in random_probes(r, 10, seed=1):
        assert tw1(x) == A.delta(x)
    twt = TwistedOperator(A.delta, u * r.embed(A.ring.monomial((1, 0))))
    assert twt(dt) == r.embed(A.ring.monomial((1, 0))) + u
    rb = with_u(b)
    twb = TwistedOperator(b.delta, rb.gen("u") * rb.one())
    assert twb(rb.hbar(1)).is_zero()


def test_twisting_by_zero_is_identity(A, a1):
    r = with_u(A)
    tw = TwistedOperator(A.delta, r.zero())
    for x in random_probes(r, 10, seed=2):
        assert tw(x) == A.delta(x)
    fz = TwistedMorphism(a1.f, r.zero(), with_u(a1.target).zero())
    for e in A.monomials(6):
        x = r.embed(A.ring.monomial(e))
        assert fz(x) == a1.f(x)


@pytest.mark.parametrize("gamma_text", ["u*1", "u*t", "u*t + u^2*t^3"])
def test_twist_operator_reports(A, gamma_text):
    r = with_u(A)
    g = parse_element(gamma_text, r)
    tw, rep = twist_operator(A, g, n_max=2, cutoff=4, probes=20, seed=5)
    assert rep.ok, rep.failures()
    assert verify_bv(A, n_max=2, cutoff=4, op=tw).ok


def test_pushforward(a1):
    f = a1.f
    r = with_u(a1.source)
    gb, rep = pushforward_mc(f, r.gen("u") * r.one())
    assert rep.ok and str(gb) == "u*1"
    gbt, rep = pushforward_mc(f, r.gen("u") * r.embed(a1.source.ring.monomial((1, 0))))
    assert rep.ok and str(gbt) == "(-1/2)*u^2*1"
    idm = identity_morphism(a1.source)
    g = r.gen("u") * r.embed(a1.source.ring.monomial((1, 0)))
    same, rep = pushforward_mc(idm, g)
    assert rep.ok and same == g


def test_twist_morphism(a1):
    f = a1.f
    A = a1.source
    r = with_u(A)
    u = r.gen("u")
    fg, rep = twist_morphism(f, u * r.one(), n_max=2, cutoff=4)
    assert rep.ok
    for e in A.monomials(6):
        x = r.embed(A.ring.monomial(e))
        assert fg(x) == f(x)
    gt = u * r.embed(A.ring.monomial((1, 0)))
    fgt, rep = twist_morphism(f, gt, n_max=3, cutoff=4)
    assert rep.ok, rep.failures()
    t2 = r.embed(A.ring.monomial((2, 0)))
    lhs = cumulant_partition(fgt, [t2]).udeg_part(1)
    t1 = r.embed(A.ring.monomial((1, 0)))
    ub = with_u(f.target).gen("u")
    rhs = (ub * cumulant_partition(f, [t1, t2])).shift(-1)
    assert lhs == rhs
    assert twisted_cumulant_rhs(f, gt, [t2]) == cumulant_partition(fgt, [t2])


def test_identity_twist_is_identity(a1):
    A = a1.source
    idm = identity_morphism(A)
    r = with_u(A)
    g = r.gen("u") * r.embed(A.ring.monomial((1, 0)))
    fg = TwistedMorphism(idm, g, g)
    for e in A.monomials(5):
        x = r.embed(A.ring.monomial(e))
        assert fg(x) == x
