"""The compiled kernels and the pure-Python fallback must agree exactly."""

import os
import subprocess
import sys
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bvinf import _kernels, _pykernels

ck = pytest.importorskip("bvinf._ckernels")

ODD = (0, 1, 0, 1)
CAPS = (0, 0, 3, 1)
exps = st.tuples(*[st.integers(0, 3)] * 4)


@given(exps, exps)
def test_mono_mul_parity(a, b):
    assert ck.mono_mul(a, b, ODD, CAPS) == _pykernels.mono_mul(a, b, ODD, CAPS)


@given(st.dictionaries(st.tuples(st.integers(0, 3), exps), st.integers(-5, 5).map(Fraction),
                       max_size=6),
       st.dictionaries(st.tuples(st.integers(0, 3), exps), st.integers(-5, 5).map(Fraction),
                       max_size=6),
       st.integers(0, 3), st.integers(0, 4))
def test_mul_terms_parity(ta, tb, max_udeg, hcap):
    args = (ODD, CAPS, 1, max_udeg, hcap)
    assert ck.mul_terms(ta, tb, *args) == _pykernels.mul_terms(ta, tb, *args)


@given(st.permutations(range(6)), st.lists(st.integers(0, 1), min_size=6, max_size=6))
def test_koszul_sign_parity(perm, pars):
    assert ck.koszul_sign(tuple(perm), tuple(pars)) == _pykernels.koszul_sign(perm, pars)


@pytest.mark.parametrize("n", range(0, 8))
def test_set_partitions_parity(n):
    a = ck.set_partitions(n)
    b = _pykernels.set_partitions(n)
    assert sorted(a) == sorted(b)
    bell = [1, 1, 2, 5, 15, 52, 203, 877]
    assert len(a) == bell[n]


def test_length_mismatch_is_an_error():
    for mod in (ck, _pykernels):
        with pytest.raises(ValueError):
            mod.mono_mul((0, 0), (0,), (0, 0), (0, 0))


def test_backend_selection():
    assert _kernels.BACKEND in ("cython", "python")
    code = "from bvinf import BACKEND; print(BACKEND)"
    env = dict(os.environ, BVINF_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                         text=True, check=True)
    assert out.stdout.strip() == "python"


def test_pure_python_backend_end_to_end():
    code = ("from bvinf.fixtures import build_a1\n"
            "from bvinf.morphisms import cumulant_n\n"
            "fx = build_a1(pairings=False)\n"
            "t = fx.source.ring.monomial((2, 0))\n"
            "print(cumulant_n(fx.f, [t, t]))\n")
    env = dict(os.environ, BVINF_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                         text=True, check=True)
    assert out.stdout.strip() == "2*h^2*1"
