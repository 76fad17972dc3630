"""BV-infinity morphisms, cumulants and the induced L-infinity morphism."""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from . import _kernels
from .graded import Generator, GradedError, Series, homogeneous_parity, koszul_sign
from .operators import (AlgOperator, DivisibilityError, _fmt_tuple,
                        monomial_tuples)
from .report import Report


class TruncationError(GradedError):
    """A rule table was asked about a monomial beyond its stated cutoff."""


class CumulantMismatch(AssertionError):
    pass


class LinearRuleMap:
    """f = sum_k f_k h^k, each f_k tabulated as monomial -> target element.

    ``rules[k]`` maps source exponent tuples to parameter-free target series
    (hbar-free as well).  Monomials up to ``cutoff`` without a rule map to 0;
    beyond the cutoff the table is undefined.  With ``complete`` unset,
    touching an unlisted monomial is recorded in ``unlisted``.
    """

    def __init__(self, source, target, rules, cutoff, complete=False):
        self.source = source
        self.target = target
        self.rules = [{tuple(e): v for e, v in r.items()} for r in rules]
        self.cutoff = cutoff
        self.complete = complete
        self.unlisted = set()
        m = source.m
        for k, table in enumerate(self.rules):
            for e, v in table.items():
                if v.is_zero():
                    continue
                want = source.mono_degree(e) + k * (m - 1)
                if v.degree() != want:
                    raise GradedError(
                        f"f_{k} rule on {e} has degree {v.degree()}, expected {want}")

    def image(self, exps):
        if sum(exps) > self.cutoff:
            raise TruncationError(
                f"morphism rules are only known up to polynomial degree {self.cutoff}")
        out = {}
        listed = False
        for k, table in enumerate(self.rules):
            v = table.get(exps)
            if v is None:
                continue
            listed = True
            for (k2, e2), c in v.terms.items():
                key = (k + k2, e2)
                out[key] = out.get(key, 0) + c
        if not listed and not self.complete:
            self.unlisted.add(exps)
        return {key: c for key, c in out.items() if c}

    @property
    def strict(self):
        return all(v.is_zero() for table in self.rules[1:] for v in table.values())


class BVMorphism(AlgOperator):
    """A BV-infinity morphism between two :class:`BVAlgebra` instances."""

    def __init__(self, source, target, rules, name=""):
        super().__init__(source.algebra, 0, target.algebra)
        self.source = source
        self.target = target
        self.rules = rules
        self.name = name or f"{source.name}->{target.name}"

    def image(self, exps):
        return self.rules.image(exps)

    @property
    def strict(self):
        return self.rules.strict

    def component(self, k, x):
        """f_k(x) for an hbar-free x."""
        return self(x).hbar_part(k, k).shift(-k)

    def __repr__(self):
        return f"BVMorphism({self.name})"


def identity_morphism(inst, cutoff=None):
    cutoff = inst.trunc.n_poly if cutoff is None else cutoff
    base = inst.algebra.ring(inst.trunc)
    rules = {e: base.monomial(e) for e in inst.monomials(cutoff)}
    return BVMorphism(inst, inst, LinearRuleMap(inst.algebra, inst.algebra, [rules],
                                                cutoff, complete=True), "id")


def apply_morphism(f, s):
    return f(s)


# -- cumulants ----------------------------------------------------------------

def cumulant_partition(f, args):
    """Partition sum with weights (-1)^{k-1}(k-1)! and Koszul signs."""
    n = len(args)
    if n < 1:
        raise ValueError("cumulants need n >= 1")
    ring = args[0].ring
    par = [homogeneous_parity(a) for a in args]
    images = {}
    products = {(): ring.one()}

    def prod_of(block):
        # blocks are increasing index tuples, so the product needs no sign
        v = products.get(block)
        if v is None:
            v = products[block] = prod_of(block[:-1]) * args[block[-1]]
        return v

    def f_of(block):
        v = images.get(block)
        if v is None:
            v = images[block] = f(prod_of(block))
        return v
    total = None
    for blocks in _kernels.set_partitions(n):
        k = len(blocks)
        perm = tuple(i for b in blocks for i in b)
        sgn = koszul_sign(perm, par) * (-1) ** (k - 1) * factorial(k - 1)
        term = None
        for b in blocks:
            v = f_of(b)
            term = v if term is None else term * v
        term = term * sgn
        total = term if total is None else total + term
    return total


def _integer_partitions(n, top=None):
    top = n if top is None else top
    if n == 0:
        yield ()
        return
    for p in range(min(n, top), 0, -1):
        for rest in _integer_partitions(n - p, p):
            yield (p,) + rest


def _compositions(total_max, r):
    """Tuples of r non-negative integers with sum at most total_max."""
    if r == 0:
        yield ()
        return
    for c in range(total_max + 1):
        for rest in _compositions(total_max - c, r - 1):
            yield (c,) + rest


def cumulant_repeated(f, gamma, i, args):
    """kappa_{i+n}(gamma, ..., gamma, args)/i! for an even ``gamma``.

    Set partitions of the i copies of gamma are grouped by how many copies
    join each block of a partition of the args and by the sizes of the
    gamma-only blocks; each group is counted by a multinomial weight.
    """
    if homogeneous_parity(gamma):
        raise GradedError("repeated argument must be even")
    n = len(args)
    ring = gamma.ring
    par = [homogeneous_parity(a) for a in args]
    powers = [ring.one()]
    for _ in range(i):
        powers.append(powers[-1] * gamma)
    images = {}

    def f_of(c, block):
        key = (c, block)
        v = images.get(key)
        if v is None:
            x = powers[c]
            for j in block:
                x = x * args[j]
            v = images[key] = f(x)
        return v
    total = None
    for blocks in _kernels.set_partitions(n):
        r = len(blocks)
        perm = tuple(j for b in blocks for j in b)
        sgn = koszul_sign(perm, par) if n else 1
        for cs in _compositions(i, r):
            rest = i - sum(cs)
            base = None
            for c, b in zip(cs, blocks):
                v = f_of(c, b)
                base = v if base is None else base * v
            denom = 1
            for c in cs:
                denom *= factorial(c)
            for lam in _integer_partitions(rest):
                k = r + len(lam)
                if k == 0:
                    continue
                d = denom
                for p in lam:
                    d *= factorial(p)
                for p in set(lam):
                    d *= factorial(lam.count(p))
                term = base
                for p in lam:
                    v = f_of(p, ())
                    term = v if term is None else term * v
                w = Fraction(sgn * (-1) ** (k - 1) * factorial(k - 1), d)
                term = term * w
                total = term if total is None else total + term
    return total if total is not None else f(ring.zero())


def cumulant_generating(f, args):
    """Multilinear part of log f(exp(sum J_i a_i)) with odd/even probes J_i.

    The coefficient c is read off from the J_n ... J_1 c form of the term.
    """
    n = len(args)
    if n < 1:
        raise ValueError("cumulants need n >= 1")
    ring = args[0].ring
    par = [homogeneous_parity(a) for a in args]
    degs = [a.degree() for a in args]
    taken = {g.name for g in ring.gens}
    names = []
    i = 0
    while len(names) < n:
        nm = f"J{i}_"
        if nm not in taken:
            names.append(nm)
        i += 1
    probes = [Generator(nm, -d, 1, "probe") for nm, d in zip(names, degs)]
    pring = ring.with_probes(probes)
    x = pring.zero()
    for j, a in enumerate(args):
        x = x + pring.gen(names[j]) * pring.embed(a)
    y = f(x.exp())
    logy = y.log()

    np_ = pring.np
    p0 = pring.np + len(ring.probes)
    target_ring = ring.with_algebra(logy.ring.algebra)
    rev = koszul_sign(tuple(reversed(range(n))), par)
    jpar = sum(par) & 1
    terms = {}
    for (k, e), c in logy.terms.items():
        if any(x_ != 1 for x_ in e[p0:p0 + n]):
            continue
        upar = sum(x_ for x_, o in zip(e[:np_], pring.odd) if o) & 1
        sgn = rev * (-1 if jpar and upar else 1)
        key = (k, e[:p0] + e[p0 + n:])
        terms[key] = terms.get(key, 0) + sgn * c
    return Series(target_ring, terms, logy.prec)


def cumulant_n(f, args, check=True):
    """kappa_n(f)(args), by partition sum and (if ``check``) by the log route."""
    val = cumulant_partition(f, args)
    if check:
        other = cumulant_generating(f, args)
        if not (val - other).is_zero():
            raise CumulantMismatch(f"partition sum {val} != generating route {other}")
    return val


def linf_component_n(f, args, check=False):
    """F_n = h^{1-n} kappa_n(f); must be pole-free."""
    n = len(args)
    val = cumulant_n(f, args, check=check)
    low = val.hbar_part(hi=n - 2)
    if not low.is_zero():
        raise DivisibilityError(f"kappa_{n} not divisible by h^{n - 1}: {low}")
    return val.shift(1 - n)


# -- verification -------------------------------------------------------------

def _six_term(f, a, b, c):
    """The hbar^1 identity on a triple (difference of both sides)."""
    def f0(x):
        return f.component(0, x)

    def f1(x):
        return f.component(1, x)

    pa, pb, pc = (homogeneous_parity(x) for x in (a, b, c))

    def s(e):
        return -1 if e & 1 else 1
    lhs = f1(a * b * c)
    rhs = (f1(a * b) * f0(c) + f1(a * c) * f0(b) * s(pb * pc)
           + f1(b * c) * f0(a) * s(pa * (pb + pc))
           - f1(a) * f0(b) * f0(c) - f1(b) * f0(a) * f0(c) * s(pa * pb)
           - f1(c) * f0(a) * f0(b) * s(pc * (pa + pb)))
    return lhs - rhs


def verify_morphism(f, n_max=4, cutoff=None, tuple_cutoff=None, spot_cutoff=None):
    src, tgt = f.source, f.target
    trunc = src.trunc
    cutoff = trunc.n_poly if cutoff is None else cutoff
    tuple_cutoff = cutoff if tuple_cutoff is None else tuple_cutoff
    spot_cutoff = min(tuple_cutoff, 6) if spot_cutoff is None else spot_cutoff
    ring = src.ring
    rep = Report(f"verify_morphism[{f.name}]", trunc.as_dict())
    f.rules.unlisted.clear()

    one = f(ring.one())
    ok = (one - tgt.ring.one()).is_zero()
    rep.add("unital", ok, witness={} if ok else {"f(1)": str(one)})

    monos = src.monomials(cutoff)
    failure = None
    for e in monos:
        x = ring.monomial(e)
        lhs = f(src.delta(x))
        rhs = tgt.delta(f(x))
        if not (lhs - rhs).is_zero():
            failure = (x, lhs, rhs)
            break
    rep.add("chain_map", failure is None,
            certified={"monomials": len(monos), "poly_degree": cutoff,
                       "hbar_order": trunc.n_hbar},
            witness={} if failure is None else
            {"x": str(failure[0]), "f(Delta x)": str(failure[1]),
             "Delta'(f x)": str(failure[2])})
    if f.rules.unlisted:
        rep.checks[-1].note = (f"{len(f.rules.unlisted)} monomials had no explicit rule "
                               "and were mapped to 0")

    for n in range(2, n_max + 1):
        count = 0
        failure = None
        for tup in monomial_tuples(monos, n, tuple_cutoff):
            count += 1
            val = cumulant_n(f, [ring.monomial(e) for e in tup], check=False)
            low = val.hbar_part(hi=n - 2)
            if not low.is_zero():
                failure = (tup, low)
                break
        rep.add(f"cumulant_n{n}", failure is None,
                certified={"tuples": count, "poly_degree": tuple_cutoff},
                witness={} if failure is None else
                {"args": _fmt_tuple(ring, failure[0]), "low_orders": str(failure[1])})

    spot = src.monomials(spot_cutoff)
    bad = None
    for a, b in monomial_tuples(spot, 2, spot_cutoff):
        x, y = ring.monomial(a), ring.monomial(b)
        d = f.component(0, x * y) - f.component(0, x) * f.component(0, y)
        if not d.is_zero():
            bad = (a, b)
            break
    rep.add("f0_multiplicative", bad is None, certified={"poly_degree": spot_cutoff},
            witness={} if bad is None else {"args": _fmt_tuple(ring, bad)})

    bad = None
    for trip in monomial_tuples(spot, 3, spot_cutoff):
        d = _six_term(f, *(ring.monomial(e) for e in trip))
        if not d.is_zero():
            bad = (trip, d)
            break
    rep.add("f1_six_term", bad is None, certified={"poly_degree": spot_cutoff},
            witness={} if bad is None else
            {"args": _fmt_tuple(ring, bad[0]), "difference": str(bad[1])})
    return rep


def quasi_iso_check(f, window=None):
    """f_0 induces an isomorphism H(A, Delta_0) -> H(B, Delta'_0) on the window."""
    from .hodge import Contraction
    from .linalg import det

    rep = Report(f"quasi_iso[{f.name}]", f.source.trunc.as_dict())
    ca = Contraction(f.source, n_poly=window)
    cb = Contraction(f.target, n_poly=window)
    mat = []
    for rep_a in ca.representatives():
        img = f(rep_a).hbar_part(0, 0)
        coords = cb.project(img)
        mat.append([coords[j].coefficient(0, ()) if hasattr(coords[j], "coefficient")
                    else coords[j] for j in range(len(coords))])
    ra, rb = len(ca.labels), len(cb.labels)
    ok = ra == rb and det(mat) != 0
    rep.add("f0_cohomology_iso", ok, certified={"rank_source": ra, "rank_target": rb},
            witness={} if ok else {"matrix": str(mat)})
    rep.data["f0_matrix"] = [[str(x) for x in row] for row in mat]
    return rep
