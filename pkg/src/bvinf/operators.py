"""Differential operators, Koszul brackets and the induced L-infinity brackets."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from . import _kernels
from .graded import (GradedError, Truncation, homogeneous_parity,
                     koszul_sign, parse_operator_terms)
from .report import Report


class KoszulMismatch(AssertionError):
    """The two routes to a Koszul bracket disagree (a sign-convention bug)."""


class DivisibilityError(ArithmeticError):
    pass


class Operator:
    """A linear map on series of fixed degree, constant in the scalars."""

    degree = 0

    def __call__(self, x):
        raise NotImplementedError

    def parity(self):
        return self.degree & 1


class FunctionOperator(Operator):
    def __init__(self, fn, degree, name=""):
        self.fn = fn
        self.degree = degree
        self.name = name

    def __call__(self, x):
        return self.fn(x)

    def __repr__(self):
        return f"FunctionOperator({self.name or self.fn!r}, degree={self.degree})"


class AlgOperator(Operator):
    """Operator given by its action on algebra monomials (cached)."""

    def __init__(self, algebra, degree, target=None):
        self.algebra = algebra
        self.target_algebra = target or algebra
        self.degree = degree
        self._cache = {}

    def image(self, exps):
        raise NotImplementedError

    def cached_image(self, exps):
        img = self._cache.get(exps)
        if img is None:
            img = self._cache[exps] = self.image(exps)
        return img

    def __call__(self, x):
        if x.ring.algebra != self.algebra:
            raise GradedError(f"operator on {self.algebra!r} applied to {x.ring.algebra!r}")
        ring = x.ring if self.target_algebra == self.algebra else x.ring.with_algebra(
            self.target_algebra)
        return x.linear_map(self.cached_image, self.degree, ring)


def _derivative(algebra, j, terms):
    """Apply the graded left derivative in generator j to {(k, exps): c}."""
    gens = algebra.generators
    odd_j = gens[j].odd
    out = {}
    for (k, e), c in terms.items():
        if not e[j]:
            continue
        c = c * e[j]
        if odd_j and sum(e[i] for i in range(j) if gens[i].odd) & 1:
            c = -c
        e2 = e[:j] + (e[j] - 1,) + e[j + 1:]
        out[(k, e2)] = out.get((k, e2), 0) + c
    return {key: c for key, c in out.items() if c}


def _left_multiply(algebra, coeff_terms, terms):
    odd = tuple(int(g.odd) for g in algebra.generators)
    caps = tuple(g.cap for g in algebra.generators)
    out = {}
    for (k1, e1), c1 in coeff_terms.items():
        for (k2, e2), c2 in terms.items():
            s, e = _kernels.mono_mul(e1, e2, odd, caps)
            if not s:
                continue
            key = (k1 + k2, e)
            out[key] = out.get(key, 0) + s * c1 * c2
    return {key: c for key, c in out.items() if c}


class PolyDiffOperator(AlgOperator):
    """Sum of ``coeff * d/d<g1> ... d/d<gr>``; derivatives act right to left."""

    def __init__(self, algebra, terms, degree=None):
        self.terms = []
        degs = set()
        for coeff, derivs in terms:
            if coeff.ring.ns:
                raise GradedError("operator coefficients must not involve parameters")
            idx = tuple(coeff.ring.index[g] for g in derivs)
            cdeg = coeff.degree()
            if cdeg is None:
                raise GradedError(f"inhomogeneous coefficient {coeff}")
            if not coeff.is_zero():
                degs.add(cdeg - sum(algebra.generators[i].degree for i in idx))
            self.terms.append((coeff, idx))
        if len(degs) > 1:
            raise GradedError(f"operator terms of different degrees {sorted(degs)}")
        if degree is None:
            degree = degs.pop() if degs else 0
        elif degs and degs != {degree}:
            raise GradedError(f"declared degree {degree} but terms have {degs}")
        super().__init__(algebra, degree)

    @classmethod
    def parse(cls, text, algebra, degree=None):
        ring = algebra.ring(Truncation())
        return cls(algebra, parse_operator_terms(text, ring), degree)

    def image(self, exps):
        out = {}
        for coeff, idx in self.terms:
            cur = {(0, exps): Fraction(1)}
            for j in reversed(idx):
                cur = _derivative(self.algebra, j, cur)
                if not cur:
                    break
            if not cur:
                continue
            for key, c in _left_multiply(self.algebra, coeff.terms, cur).items():
                out[key] = out.get(key, 0) + c
        return {key: c for key, c in out.items() if c}

    def order(self):
        return max((len(idx) for c, idx in self.terms if not c.is_zero()), default=0)

    def __repr__(self):
        return f"PolyDiffOperator(degree={self.degree}, terms={len(self.terms)})"


class TableOperator(AlgOperator):
    """Operator tabulated as monomial -> element rules; unlisted monomials map to 0."""

    def __init__(self, algebra, rules, degree, target=None):
        super().__init__(algebra, degree, target)
        self.rules = {tuple(k): v for k, v in rules.items()}

    def image(self, exps):
        v = self.rules.get(exps)
        return dict(v.terms) if v is not None else {}

    def agrees_with(self, other, monomials):
        """Compare with another operator on a list of monomials."""
        return all(self.image(e) == other.cached_image(e) for e in monomials)


class HbarOperator(AlgOperator):
    """Delta = sum_k Delta_k h^k with Delta_k of degree 1 + k(m-1)."""

    def __init__(self, components, algebra=None):
        components = list(components)
        algebra = algebra or components[0].algebra
        m = algebra.m
        for k, c in enumerate(components):
            want = 1 + k * (m - 1)
            if c is not None and c.degree != want and not _is_zero_op(c):
                raise GradedError(f"Delta_{k} has degree {c.degree}, expected {want}")
        super().__init__(algebra, 1)
        self.components = components

    def image(self, exps):
        out = {}
        for k, comp in enumerate(self.components):
            if comp is None:
                continue
            for (k2, e), c in comp.cached_image(exps).items():
                key = (k + k2, e)
                out[key] = out.get(key, 0) + c
        return {key: c for key, c in out.items() if c}

    def component(self, k):
        if k < len(self.components) and self.components[k] is not None:
            return self.components[k]
        return ZeroOperator(self.algebra, 1 + k * (self.algebra.m - 1))

    def perturbation(self):
        """Delta - Delta_0."""
        return HbarOperator([None] + self.components[1:], self.algebra)


class ZeroOperator(AlgOperator):
    def image(self, exps):
        return {}


def _is_zero_op(op):
    return isinstance(op, ZeroOperator) or (
        isinstance(op, PolyDiffOperator) and all(c.is_zero() for c, _ in op.terms))


class BVAlgebra:
    """A commutative BV-infinity algebra (A, Delta) with its truncation context."""

    def __init__(self, algebra, delta, trunc=None, name=""):
        self.algebra = algebra
        self.delta = delta
        self.trunc = trunc or Truncation()
        self.name = name or algebra.name
        self.ring = algebra.ring(self.trunc)

    @property
    def m(self):
        return self.algebra.m

    def monomials(self, cutoff=None):
        return self.algebra.monomials(self.trunc.n_poly if cutoff is None else cutoff)

    def elem(self, exps, k=0, c=1):
        return self.ring.monomial(exps, k, c)

    def __repr__(self):
        return f"BVAlgebra({self.name})"


# -- commutators and brackets -------------------------------------------------

def mult_operator(alpha):
    p = homogeneous_parity(alpha)
    deg = alpha.degree()
    return FunctionOperator(lambda x: alpha * x, deg if deg is not None else p, "mult")


def ad_element(op, alpha):
    """[op, alpha] = op o m_alpha - (-1)^{|op||alpha|} m_alpha o op."""
    deg = alpha.degree()
    if deg is None:
        raise GradedError(f"ad of inhomogeneous element {alpha}")
    sign = -1 if (op.degree & 1) and (deg & 1) else 1

    def fn(x):
        return op(alpha * x) - alpha * op(x) * sign
    return FunctionOperator(fn, op.degree + deg, "ad")


def _product(items, ring):
    out = ring.one()
    for x in items:
        out = out * x
    return out


def koszul_bracket_unshuffle(op, args):
    """Sum over unshuffles of +-_K (-1)^{n-i} op(a_S) a_{S^c}, including i = 0."""
    n = len(args)
    if n < 1:
        raise ValueError("Koszul bracket needs n >= 1")
    ring = args[0].ring
    for a in args[1:]:
        if a.ring != ring:
            ring = _common_ring(ring, a.ring)
    args = [ring.embed(a) for a in args]
    par = [homogeneous_parity(a) for a in args]
    total = ring.zero()
    for i in range(n + 1):
        for S in combinations(range(n), i):
            rest = tuple(j for j in range(n) if j not in S)
            sgn = koszul_sign(S + rest, par) * (-1) ** (n - i)
            inner = op(_product([args[j] for j in S], ring))
            if inner.is_zero() and inner.is_exact():
                continue
            term = inner * _product([args[j] for j in rest], ring)
            total = total + term * sgn
    return total


def koszul_bracket_ad(op, args):
    """ad_{a_n} ... ad_{a_1}(op)(1)."""
    if not args:
        raise ValueError("Koszul bracket needs n >= 1")
    ring = args[0].ring
    for a in args[1:]:
        ring = _common_ring(ring, a.ring)
    cur = op
    for a in args:
        cur = ad_element(cur, ring.embed(a))
    return cur(ring.one())


def _common_ring(r1, r2):
    if r1 == r2:
        return r1
    if set(g.name for g in r2.scalars) <= set(g.name for g in r1.scalars):
        return r1
    return r2


def koszul_bracket(op, args, check=True):
    """K_n(op)(args), computed by unshuffles and (if ``check``) by iterated ad."""
    val = koszul_bracket_unshuffle(op, args)
    if check:
        other = koszul_bracket_ad(op, args)
        if not (val - other).is_zero():
            raise KoszulMismatch(f"unshuffle {val} != ad {other}")
    return val


def monomial_tuples(monos, n, max_total, weight=sum):
    """Non-decreasing n-tuples from ``monos`` with total weight <= max_total,
    ordered by total weight."""
    w = [weight(e) for e in monos]
    out = []

    def rec(start, acc, tot):
        if len(acc) == n:
            out.append((tot, tuple(acc)))
            return
        for i in range(start, len(monos)):
            if tot + w[i] > max_total:
                continue
            acc.append(monos[i])
            rec(i, acc, tot + w[i])
            acc.pop()

    rec(0, [], 0)
    out.sort(key=lambda p: p[0])
    return [t for _, t in out]


def _fmt_tuple(ring, exps_tuple):
    return "(" + ", ".join(str(ring.monomial(e)) for e in exps_tuple) + ")"


def check_order(op, k, algebra, cutoff, trunc=None):
    """Check ad_{a_{k+2}}...ad_{a_1}(op)(1) = 0 on monomial tuples within cutoff."""
    ring = algebra.ring(trunc or Truncation())
    rep = Report("check_order")
    n = k + 2
    count = 0
    for tup in monomial_tuples(algebra.monomials(cutoff), n, cutoff):
        count += 1
        val = koszul_bracket(op, [ring.monomial(e) for e in tup], check=False)
        if not val.is_zero():
            rep.add(f"order<={k + 1}", False,
                    witness={"args": _fmt_tuple(ring, tup), "value": str(val)})
            rep.data["witness_args"] = [list(e) for e in tup]
            return rep
    rep.add(f"order<={k + 1}", True, certified={"tuples": count, "poly_degree": cutoff})
    return rep


def verify_bv(inst, n_max=4, cutoff=None, tuple_cutoff=None, op=None):
    """Check Delta(1) = 0, Delta^2 = 0 and K_n(Delta) = 0 mod h^{n-1}."""
    op = op or inst.delta
    trunc = inst.trunc
    cutoff = trunc.n_poly if cutoff is None else cutoff
    tuple_cutoff = cutoff if tuple_cutoff is None else tuple_cutoff
    ring = inst.ring
    rep = Report(f"verify_bv[{inst.name}]", trunc.as_dict())

    d1 = op(ring.one())
    rep.add("unit", d1.is_zero(), witness={} if d1.is_zero() else {"Delta(1)": str(d1)})

    monos = inst.monomials(cutoff)
    bad = None
    min_prec = float("inf")
    for e in monos:
        x = ring.monomial(e)
        y = op(op(x))
        min_prec = min(min_prec, y.certified_hbar())
        if not y.is_zero():
            bad = (x, y)
            break
    rep.add("square_zero", bad is None,
            certified={"monomials": len(monos), "poly_degree": cutoff,
                       "hbar_order": _fmt_prec(min(min_prec, trunc.n_hbar))},
            witness={} if bad is None else {"x": str(bad[0]), "Delta^2(x)": str(bad[1])})

    for n in range(2, n_max + 1):
        count = 0
        failure = None
        for tup in monomial_tuples(monos, n, tuple_cutoff):
            count += 1
            val = koszul_bracket(op, [ring.monomial(e) for e in tup], check=False)
            low = val.hbar_part(hi=n - 2)
            if not low.is_zero():
                failure = (tup, low)
                break
        rep.add(f"koszul_n{n}", failure is None,
                certified={"tuples": count, "poly_degree": tuple_cutoff},
                witness={} if failure is None else
                {"args": _fmt_tuple(ring, failure[0]), "low_orders": str(failure[1])})
    return rep


def _fmt_prec(p):
    return "exact" if p == float("inf") else p


def mu_n(op, args, check=False):
    """mu_n = h^{1-n} K_n(op); raises DivisibilityError if a pole would appear."""
    n = len(args)
    val = koszul_bracket(op, args, check=check)
    low = val.hbar_part(hi=n - 2)
    if not low.is_zero():
        raise DivisibilityError(f"K_{n} not divisible by h^{n - 1}: {low}")
    return val.shift(1 - n)


def l_n(op, args):
    return mu_n(op, args).at_hbar_zero()


def linf_relation(bracket, args):
    """sum_{i+j=n+1} sum_sigma eps(sigma) b_i(b_j(a_S), a_rest)."""
    n = len(args)
    ring = args[0].ring
    par = [homogeneous_parity(a) for a in args]
    total = ring.zero()
    for j in range(1, n + 1):
        for S in combinations(range(n), j):
            rest = tuple(i for i in range(n) if i not in S)
            sgn = koszul_sign(S + rest, par)
            inner = bracket([args[i] for i in S])
            total = total + bracket([inner] + [args[i] for i in rest]) * sgn
    return total


def check_l_infinity(inst, arity_max=3, cutoff=None, op=None):
    """Generalized Jacobi identities for {mu_n} and {l_n} on monomial tuples."""
    op = op or inst.delta
    cutoff = min(inst.trunc.n_poly, 6) if cutoff is None else cutoff
    ring = inst.ring
    rep = Report(f"check_l_infinity[{inst.name}]", inst.trunc.as_dict())
    monos = inst.monomials(cutoff)

    def mu(xs):
        return mu_n(op, xs)

    def ell(xs):
        return mu_n(op, xs).at_hbar_zero()

    for label, br, classical in (("mu", mu, False), ("l", ell, True)):
        for n in range(1, arity_max + 1):
            count = 0
            failure = None
            for tup in monomial_tuples(monos, n, cutoff):
                count += 1
                args = [ring.monomial(e) for e in tup]
                val = linf_relation(br, args)
                if classical:
                    val = val.at_hbar_zero()
                if not val.is_zero():
                    failure = (tup, val)
                    break
            rep.add(f"{label}_jacobi_n{n}", failure is None,
                    certified={"tuples": count, "poly_degree": cutoff},
                    witness={} if failure is None else
                    {"args": _fmt_tuple(ring, failure[0]), "value": str(failure[1])})
    return rep
