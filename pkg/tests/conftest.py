import os
import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from bvinf import Algebra, Generator, Series, Truncation
from bvinf.fixtures import build_a1, build_a2, build_b, default_truncation
from bvinf.operators import AlgOperator, PolyDiffOperator

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=15, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# x even, y and w odd, z even; two odd generators make the signs bite
MIXED = Algebra([Generator("x", 0), Generator("y", -1), Generator("z", 2), Generator("w", 1)],
                m=1, name="T")
SMALL = Truncation(n_poly=6, n_hbar=4, n_param=3)


@pytest.fixture(scope="session")
def trunc():
    return default_truncation()


@pytest.fixture(scope="session")
def a1(trunc):
    return build_a1(trunc)


@pytest.fixture(scope="session")
def a2(trunc):
    return build_a2(trunc).source


@pytest.fixture(scope="session")
def b(trunc):
    return build_b(trunc)


@pytest.fixture(scope="session")
def mixed_ring():
    return MIXED.ring(SMALL)


def mixed_operator():
    """A degree-1 operator of order 3 on MIXED (not square-zero; only signs matter)."""
    return PolyDiffOperator.parse(
        "x*d/d<y> + d/d<x> d/d<x> d/d<y> + w*d/d<x> + z*d/d<w> + x*z*d/d<x> d/d<w>", MIXED, 1)


class ScrambleMap(AlgOperator):
    """Unital degree-0 linear map with pseudo-random images; not multiplicative."""

    def __init__(self, algebra, seed, target=None):
        super().__init__(algebra, 0, target)
        self.seed = seed

    def image(self, exps):
        if not any(exps):
            return {(0, exps): Fraction(1)}
        rng = random.Random(hash((self.seed, exps)))
        out = {(0, exps): Fraction(rng.randint(-3, 3) or 1)}
        bumped = (exps[0] + 1,) + exps[1:]
        out[(1, bumped)] = Fraction(rng.randint(-3, 3))
        return {k: c for k, c in out.items() if c}


def monomial_exps(max_exp=2, odd_max=1):
    return st.tuples(st.integers(0, max_exp), st.integers(0, odd_max),
                     st.integers(0, max_exp), st.integers(0, odd_max))


@st.composite
def homogeneous_monomial(draw, ring, hbar_max=2):
    e = (0,) * ring.ns + draw(monomial_exps())
    c = draw(st.integers(-4, 4).filter(bool))
    k = draw(st.integers(0, hbar_max))
    return Series(ring, {(k, e): Fraction(c)})


@st.composite
def series_in(draw, ring, max_terms=3, hbar_max=2):
    t = {}
    for _ in range(draw(st.integers(0, max_terms))):
        e = (0,) * ring.ns + draw(monomial_exps())
        t[(draw(st.integers(0, hbar_max)), e)] = Fraction(draw(st.integers(-4, 4)))
    return Series(ring, t)
