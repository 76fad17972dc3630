"""Shipped fixtures (A1 -> B, A2, a mutated A1) and independent oracles."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .config import data_path, load_algebra, load_morphism, load_pairing
from .graded import Truncation
from .vhs import ElementPairing


@dataclass
class FixtureBundle:
    source: object
    target: object = None
    f: object = None
    pairing_source: object = None
    pairing_target: object = None


def _overrides(trunc):
    if trunc is None:
        return None
    return {"n_poly": trunc.n_poly, "n_hbar": trunc.n_hbar, "n_param": trunc.n_param,
            "margin": trunc.margin}


def build_algebra(name, trunc=None):
    return load_algebra(data_path(f"{name}.toml"), _overrides(trunc))


def build_b(trunc=None):
    return build_algebra("b", trunc)


def build_a1_mutated(trunc=None):
    return build_algebra("a1_mutated", trunc)


def build_a1(trunc=None, pairings=True):
    ov = _overrides(trunc)
    f = load_morphism(data_path("a1_to_b.toml"), ov)
    bundle = FixtureBundle(f.source, f.target, f)
    if pairings:
        _, ta = load_pairing(data_path("a1_pairing.toml"), inst=f.source)
        _, tb = load_pairing(data_path("b_pairing.toml"), inst=f.target)
        bundle.pairing_source = ElementPairing(f.source, ta)
        bundle.pairing_target = ElementPairing(f.target, tb)
    return bundle


def build_a2(trunc=None):
    return FixtureBundle(build_algebra("a2", trunc))


def double_factorial(n):
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def a1_pairing_formula(a, b):
    """(t^a, t^b) on A1 as {hbar power: coefficient}."""
    if a % 2 or b % 2:
        return {}
    k, l = a // 2, b // 2
    return {k + l: Fraction((-1) ** k * double_factorial(2 * k - 1) * double_factorial(2 * l - 1))}


# -- matching oracles ------------------------------------------------------------

def perfect_matchings(points):
    """All perfect matchings of a list of points, as lists of pairs."""
    points = list(points)
    if not points:
        yield []
        return
    if len(points) % 2:
        return
    first = points[0]
    for i in range(1, len(points)):
        rest = points[1:i] + points[i + 1:]
        for m in perfect_matchings(rest):
            yield [(first, points[i])] + m


def wick_moment(k):
    """{hbar power: coefficient} of the Gaussian moment of t^{2k}, edges weighted -h."""
    count = sum(1 for _ in perfect_matchings(range(2 * k)))
    return {k: Fraction(count * (-1) ** k)}


def _connected(n, edges):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x
    for a, b in edges:
        parent[find(a)] = find(b)
    return len({find(i) for i in range(n)}) <= 1


def connected_cumulant_oracle(exponents):
    """Connected matchings of the legs of t^{a_1}, ..., t^{a_n}; each edge -h."""
    n = len(exponents)
    legs = [v for v, a in enumerate(exponents) for _ in range(a)]
    if len(legs) % 2:
        return {}
    count = 0
    for m in perfect_matchings(range(len(legs))):
        if _connected(n, [(legs[a], legs[b]) for a, b in m]):
            count += 1
    if not count:
        return {}
    e = len(legs) // 2
    return {e: Fraction(count * (-1) ** e)}


def as_scalar(table, sring):
    out = sring.zero()
    for k, c in table.items():
        out = out + sring.scalar(c, k)
    return out


def non_trace_certificate(max_exp=4, n_hbar=None):
    """Show no linear Tr has Tr(t^a conj(t^b)) equal to the A1 table.

    Unknowns are the hbar-coefficients of Tr(t^j).  Returns a dict with the
    ranks of the coefficient and augmented matrices and one conflicting pair.
    """
    n_hbar = max_exp if n_hbar is None else n_hbar
    unknowns = [(j, k) for j in range(2 * max_exp + 1) for k in range(n_hbar + 1)]
    col = {u: i for i, u in enumerate(unknowns)}
    rows, rhs, eqs = [], [], []
    for a in range(max_exp + 1):
        for b in range(max_exp + 1):
            val = a1_pairing_formula(a, b)
            for k in range(n_hbar + 1):
                row = [Fraction(0)] * len(unknowns)
                row[col[(a + b, k)]] = Fraction(1)
                rows.append(row)
                rhs.append(val.get(k, Fraction(0)))
                eqs.append((a, b, k))
    ncol = len(unknowns)
    r = linalg.rank(rows, ncol)
    r_aug = linalg.rank([row + [v] for row, v in zip(rows, rhs)], ncol + 1)
    seen = {}
    conflict = None
    for (a, b, k), v in zip(eqs, rhs):
        key = (a + b, k)
        if key in seen and seen[key][1] != v:
            conflict = {"first": f"Tr(t^{a + b}) at h^{k} = {seen[key][1]} from (t^{seen[key][0][0]}, t^{seen[key][0][1]})",
                        "second": f"Tr(t^{a + b}) at h^{k} = {v} from (t^{a}, t^{b})"}
            break
        seen.setdefault(key, ((a, b), v))
    return {"rank": r, "augmented_rank": r_aug, "infeasible": r_aug > r, "conflict": conflict}


def default_truncation():
    return Truncation(n_poly=12, n_hbar=6, n_param=5)
