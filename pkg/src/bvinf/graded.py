"""Graded-commutative algebras over Q and truncated series in hbar and u.

A single :class:`Series` type carries elements of ``A``, ``A[[h]]``,
``A((h))`` and their parameter-valued versions ``A((h))[[u]]``.  Each series
lives in a :class:`Ring`: the generators of the algebra, preceded by scalar
generators (deformation parameters ``u`` and formal probes ``J``) that every
linear map treats as constants.

Precision is tracked per total parameter degree ``d``: ``prec[d]`` is the
largest hbar power up to which the degree-``d`` component is known exactly.
``inf`` means exact, ``-inf`` means unknown.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import _kernels

INF = math.inf
NEG_INF = -math.inf


class GradedError(ValueError):
    pass


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    cap: int = 0
    kind: str = "alg"

    @property
    def odd(self):
        return self.degree % 2 != 0


@dataclass(frozen=True)
class Truncation:
    """Truncation triple: polynomial degree, hbar order, parameter order.

    ``margin`` extra hbar orders are carried internally so that poles coming
    from ``exp(gamma/h)`` do not eat into the certified orders.
    """

    n_poly: int = 12
    n_hbar: int = 6
    n_param: int = 5
    margin: int | None = None

    @property
    def hbar_cap(self):
        extra = self.margin if self.margin is not None else 2 * self.n_param + 2
        return self.n_hbar + extra

    def as_dict(self):
        return {"n_poly": self.n_poly, "n_hbar": self.n_hbar, "n_param": self.n_param}


class Algebra:
    """Free graded-commutative algebra on named generators, with ``m`` odd."""

    def __init__(self, generators, m=1, name=""):
        gens = []
        for g in generators:
            if not isinstance(g, Generator):
                g = Generator(*g) if isinstance(g, (tuple, list)) else Generator(**g)
            gens.append(g)
        names = [g.name for g in gens]
        if len(set(names)) != len(names):
            raise GradedError(f"duplicate generator names in {names}")
        if "h" in names:
            raise GradedError("'h' is reserved for the formal parameter hbar")
        if m % 2 == 0:
            raise GradedError("m must be odd")
        self.generators = tuple(gens)
        self.m = m
        self.name = name

    @property
    def hbar_degree(self):
        return 1 - self.m

    def _key(self):
        return (self.name, self.generators, self.m)

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, Algebra) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        gens = ", ".join(f"{g.name}:{g.degree}" for g in self.generators)
        return f"Algebra({self.name!r}; {gens}; m={self.m})"

    def mono_degree(self, exps):
        return sum(e * g.degree for e, g in zip(exps, self.generators))

    def poly_degree(self, exps):
        return sum(exps)

    def monomials(self, max_poly):
        """Exponent vectors of total polynomial degree <= max_poly, graded-lex."""
        ranges = []
        for g in self.generators:
            top = 1 if g.odd else max_poly
            if g.cap:
                top = min(top, g.cap)
            ranges.append(range(top + 1))
        out = [e for e in product(*ranges) if sum(e) <= max_poly]
        out.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
        return out

    def ring(self, trunc=None, params=(), probes=()):
        trunc = trunc or Truncation()
        return Ring(self, params=params, probes=probes, n_param=trunc.n_param,
                    hbar_cap=trunc.hbar_cap)


class Ring:
    """Exponent layout ``[params | probes | algebra generators]``."""

    def __init__(self, algebra, params=(), probes=(), n_param=5, hbar_cap=20):
        self.algebra = algebra
        self.params = tuple(Generator(g.name, g.degree, 0, "param") for g in params)
        self.probes = tuple(Generator(g.name, g.degree, 1, "probe") for g in probes)
        self.scalars = self.params + self.probes
        self.gens = self.scalars + algebra.generators
        names = [g.name for g in self.gens]
        if len(set(names)) != len(names) or "h" in names:
            raise GradedError(f"clashing generator names {names}")
        self.index = {g.name: i for i, g in enumerate(self.gens)}
        self.odd = tuple(int(g.odd) for g in self.gens)
        self.caps = tuple(g.cap for g in self.gens)
        self.np = len(self.params)
        self.ns = len(self.scalars)
        self.nu = n_param if self.np else 0
        self.n_param = n_param
        self.hbar_cap = hbar_cap
        self.m = algebra.m
        self._key = (algebra, self.params, self.probes, n_param, hbar_cap)
        self._hash = hash(self._key)
        self._derived = {}

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, Ring) and self._hash == other._hash
                and self._key == other._key)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        sc = ",".join(g.name for g in self.scalars)
        return f"Ring({self.algebra.name or 'A'}[{sc}], nu={self.nu}, cap={self.hbar_cap})"

    def with_params(self, params):
        return Ring(self.algebra, self.params + tuple(params), self.probes,
                    self.n_param, self.hbar_cap)

    def with_probes(self, probes):
        return Ring(self.algebra, self.params, self.probes + tuple(probes),
                    self.n_param, self.hbar_cap)

    def with_algebra(self, algebra):
        key = ("alg", algebra)
        r = self._derived.get(key)
        if r is None:
            r = self._derived[key] = Ring(algebra, self.params, self.probes,
                                          self.n_param, self.hbar_cap)
        return r

    def base(self):
        r = self._derived.get("base")
        if r is None:
            r = self._derived["base"] = Ring(self.algebra, (), (), self.n_param, self.hbar_cap)
        return r

    def scalar_ring(self):
        """Same scalars over the ground field (the algebra with no generators)."""
        return self.with_algebra(Algebra((), m=self.m, name="K"))

    def udeg(self, exps):
        return sum(exps[: self.np])

    def term_degree(self, k, exps):
        return sum(e * g.degree for e, g in zip(exps, self.gens)) + k * (1 - self.m)

    def scalar_parity(self, exps):
        return sum(e for e, o in zip(exps[: self.ns], self.odd) if o) & 1

    # constructors -------------------------------------------------------
    def zero(self):
        return Series(self, {})

    def one(self):
        return Series(self, {(0, (0,) * len(self.gens)): Fraction(1)})

    def scalar(self, c, k=0):
        return Series(self, {(k, (0,) * len(self.gens)): Fraction(c)})

    def hbar(self, k=1):
        return self.scalar(1, k)

    def gen(self, name):
        e = [0] * len(self.gens)
        e[self.index[name]] = 1
        return Series(self, {(0, tuple(e)): Fraction(1)})

    def monomial(self, alg_exps, k=0, c=1, scalar_exps=None):
        sc = tuple(scalar_exps) if scalar_exps is not None else (0,) * self.ns
        return Series(self, {(k, sc + tuple(alg_exps)): Fraction(c)})

    def embed(self, s):
        """Promote ``s`` from a ring whose scalars are a sub-list of ours."""
        src = s.ring
        if src == self:
            return s
        if src.algebra != self.algebra or src.n_param != self.n_param \
                or src.hbar_cap != self.hbar_cap:
            raise GradedError(f"cannot embed {src} into {self}")
        pos = []
        for g in src.scalars:
            if g.name not in self.index or self.gens[self.index[g.name]] != g:
                raise GradedError(f"scalar {g.name} missing from {self}")
            pos.append(self.index[g.name])
        n = len(self.gens)
        terms = {}
        for (k, e), c in s.terms.items():
            out = [0] * n
            for j, p in enumerate(pos):
                out[p] = e[j]
            out[self.ns:] = e[src.ns:]
            terms[(k, tuple(out))] = c
        if not src.np and self.np:
            # a parameter-free series is constant in u
            prec = [s.prec[0]] + [INF] * self.nu
        else:
            prec = list(s.prec)
        return Series(self, terms, prec)


def _add(x, y):
    if x == NEG_INF or y == NEG_INF:
        return NEG_INF
    return x + y


class Series:
    __slots__ = ("ring", "terms", "prec")

    def __init__(self, ring, terms, prec=None):
        self.ring = ring
        nu = ring.nu
        prec = [INF] * (nu + 1) if prec is None else list(prec)
        cap = ring.hbar_cap
        np_ = ring.np
        kept = {}
        for key, c in terms.items():
            if not c:
                continue
            k, e = key
            d = sum(e[:np_])
            if d > nu:
                continue
            if k > cap:
                if prec[d] > cap:
                    prec[d] = cap
                continue
            kept[key] = c if isinstance(c, Fraction) else Fraction(c)
        if any(p != INF for p in prec):
            kept = {key: c for key, c in kept.items()
                    if key[0] <= prec[sum(key[1][:np_])]}
        self.terms = kept
        self.prec = tuple(prec)

    # -- basic queries -------------------------------------------------------
    def is_zero(self):
        """Zero up to the tracked precision."""
        return not self.terms

    def is_exact(self):
        return all(p == INF for p in self.prec)

    def certified_hbar(self, d=None):
        """Largest hbar order known exactly (at u-degree d, or at all degrees)."""
        if d is not None:
            return self.prec[d]
        return min(self.prec)

    def known_udeg(self):
        """Largest u-degree whose component is known at all."""
        top = -1
        for d, p in enumerate(self.prec):
            if p == NEG_INF:
                break
            top = d
        return top

    def valuation(self):
        return min((k for k, _ in self.terms), default=INF)

    def pole_order(self):
        v = self.valuation()
        return 0 if v == INF or v >= 0 else -v

    def is_pole_free(self):
        return self.pole_order() == 0

    def degree(self):
        """Common degree of all terms, or None if the series is mixed."""
        degs = {self.ring.term_degree(k, e) for k, e in self.terms}
        if len(degs) > 1:
            return None
        return degs.pop() if degs else 0

    def parity(self):
        pars = {self.ring.term_degree(k, e) & 1 for k, e in self.terms}
        if len(pars) > 1:
            return None
        return pars.pop() if pars else 0

    def _low(self):
        nu = self.ring.nu
        low = [INF] * (nu + 1)
        np_ = self.ring.np
        for k, e in self.terms:
            d = sum(e[:np_])
            if k < low[d]:
                low[d] = k
        zero = [False] * (nu + 1)
        for d in range(nu + 1):
            if low[d] == INF:
                p = self.prec[d]
                if p == INF:
                    zero[d] = True
                else:
                    low[d] = p + 1 if p != NEG_INF else NEG_INF
        return low, zero

    # -- arithmetic ----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Series):
            if other.ring == self.ring:
                return other
            try:
                return self.ring.embed(other)
            except GradedError:
                pass
            raise GradedError(f"ring mismatch: {self.ring} vs {other.ring}")
        if isinstance(other, (int, Fraction)):
            return self.ring.scalar(other)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, Series) and other.ring != self.ring:
            try:
                other = self.ring.embed(other)
            except GradedError:
                return other.ring.embed(self) + other
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms.get(key, 0) + c
        prec = [min(a, b) for a, b in zip(self.prec, other.prec)]
        return Series(self.ring, terms, prec)

    __radd__ = __add__

    def __neg__(self):
        return Series(self.ring, {k: -c for k, c in self.terms.items()}, self.prec)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            return self + (-Fraction(other))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if c == 0:
                return self.ring.zero()
            return Series(self.ring, {k: v * c for k, v in self.terms.items()}, self.prec)
        if not isinstance(other, Series):
            return NotImplemented
        a, b = self, other
        if b.ring != a.ring:
            try:
                b = a.ring.embed(b)
            except GradedError:
                a = b.ring.embed(a)
        ring = a.ring
        terms, dropped = _kernels.mul_terms(
            a.terms, b.terms, ring.odd, ring.caps, ring.np, ring.nu, ring.hbar_cap)
        if a.is_exact() and b.is_exact():
            prec = [ring.hbar_cap if d in dropped else INF for d in range(ring.nu + 1)]
            return Series(ring, terms, prec)
        la, za = a._low()
        lb, zb = b._low()
        prec = []
        for d in range(ring.nu + 1):
            p = INF
            for d1 in range(d + 1):
                d2 = d - d1
                if za[d1] or zb[d2]:
                    continue
                p = min(p, _add(a.prec[d1], lb[d2]), _add(b.prec[d2], la[d1]))
            if d in dropped:
                p = min(p, ring.hbar_cap)
            prec.append(p)
        return Series(ring, terms, prec)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, n):
        out = self.ring.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (Series, int, Fraction)):
            return (self - other).is_zero()
        return NotImplemented

    __hash__ = None

    # -- structural operations ---------------------------------------------
    def shift(self, s):
        """Multiply by h^s."""
        prec = [p + s if abs(p) != INF else p for p in self.prec]
        return Series(self.ring, {(k + s, e): c for (k, e), c in self.terms.items()}, prec)

    def conj(self):
        """h -> -h."""
        return Series(self.ring, {(k, e): (-c if k & 1 else c)
                                  for (k, e), c in self.terms.items()}, self.prec)

    def udeg_part(self, d):
        np_ = self.ring.np
        prec = [INF] * (self.ring.nu + 1)
        prec[d] = self.prec[d]
        return Series(self.ring, {key: c for key, c in self.terms.items()
                                  if sum(key[1][:np_]) == d}, prec)

    def truncate_udeg(self, top):
        """Keep parameter degrees <= top; higher components become unknown."""
        np_ = self.ring.np
        prec = [p if d <= top else NEG_INF for d, p in enumerate(self.prec)]
        return Series(self.ring, {key: c for key, c in self.terms.items()
                                  if sum(key[1][:np_]) <= top}, prec)

    def hbar_part(self, lo=None, hi=None):
        prec = self.prec
        if hi is not None:
            prec = [min(p, hi) for p in prec]
        return Series(self.ring, {(k, e): c for (k, e), c in self.terms.items()
                                  if (lo is None or k >= lo) and (hi is None or k <= hi)}, prec)

    def at_hbar_zero(self):
        """Classical limit; the series must be pole-free."""
        if not self.is_pole_free():
            raise GradedError("classical limit of a series with poles")
        return Series(self.ring, {(k, e): c for (k, e), c in self.terms.items() if k == 0},
                      [INF if p >= 0 else NEG_INF for p in self.prec])

    def at_params_zero(self):
        np_ = self.ring.np
        prec = [self.prec[0]] + [INF] * self.ring.nu
        return Series(self.ring, {key: c for key, c in self.terms.items()
                                  if not any(key[1][:np_])}, prec)

    def linear_map(self, image, degree=0, ring=None):
        """Apply a map acting on algebra monomials, constant in scalars.

        ``image(alg_exps)`` returns ``{(hbar_shift, alg_exps'): coeff}``; the map
        has the given degree and picks up the Koszul sign when it passes odd
        scalars.
        """
        ring = ring or self.ring
        ns = self.ring.ns
        odd_map = degree & 1
        sodd = self.ring.odd[:ns]
        terms = {}
        for (k, e), c in self.terms.items():
            se = e[:ns]
            img = image(e[ns:])
            if not img:
                continue
            if odd_map and sum(x for x, o in zip(se, sodd) if o) & 1:
                c = -c
            for (k2, e2), c2 in img.items():
                key = (k + k2, se + e2)
                terms[key] = terms.get(key, 0) + c * c2
        return Series(ring, terms, self.prec)

    def param_derivative(self, i):
        """Left derivative in the i-th parameter."""
        ring = self.ring
        if not 0 <= i < ring.np:
            raise GradedError("parameter index out of range")
        odd_i = ring.odd[i]
        terms = {}
        for (k, e), c in self.terms.items():
            if not e[i]:
                continue
            c = c * e[i]
            if odd_i and sum(e[j] for j in range(i) if ring.odd[j]) & 1:
                c = -c
            e2 = list(e)
            e2[i] -= 1
            terms[(k, tuple(e2))] = terms.get((k, tuple(e2)), 0) + c
        prec = list(self.prec[1:]) + [NEG_INF]
        return Series(ring, terms, prec)

    def scalar_exps(self):
        """Distinct scalar-exponent blocks present."""
        ns = self.ring.ns
        return sorted({e[:ns] for _, e in self.terms})

    def coefficient(self, k, alg_exps, scalar_exps=None):
        sc = tuple(scalar_exps) if scalar_exps is not None else (0,) * self.ring.ns
        return self.terms.get((k, sc + tuple(alg_exps)), Fraction(0))

    def scalar_coeffs(self):
        """For series in a ring with no algebra generators: {(k, scalar_exps): c}."""
        return {(k, e[: self.ring.ns]): c for (k, e), c in self.terms.items()}

    # -- exp / log ----------------------------------------------------------
    def _check_even(self, what):
        if self.parity() not in (0,):
            raise GradedError(f"{what} needs an even element")

    def _constant_part(self):
        ns = self.ring.ns
        return {(k, e): c for (k, e), c in self.terms.items() if not any(e[:ns])}

    def exp(self):
        self._check_even("exp")
        const = self._constant_part()
        if any(k < 1 for k, _ in const):
            raise GradedError("exp: constant term is not h-adically small; its "
                              "exponential is not a rational series")
        result = self.ring.one()
        term = self.ring.one()
        n = 0
        while True:
            n += 1
            term = term * self / n
            result = result + term
            if term.is_zero():
                break
            if n > 10_000:
                raise GradedError("exp did not terminate")
        return result

    def log(self):
        self._check_even("log")
        z = self - 1
        const = z._constant_part()
        if any(k < 1 for k, _ in const):
            raise GradedError("log: constant term is not 1 + O(h); not invertible "
                              "to a rational logarithm")
        result = self.ring.zero()
        power = self.ring.one()
        n = 0
        while True:
            n += 1
            power = power * z
            result = result + power * Fraction((-1) ** (n + 1), n)
            if power.is_zero():
                break
            if n > 10_000:
                raise GradedError("log did not terminate")
        return result

    # -- rendering ----------------------------------------------------------
    def _sort_key(self, key):
        k, e = key
        ring = self.ring
        return (ring.udeg(e), tuple(-x for x in e[: ring.ns]), k, sum(e[ring.ns:]), tuple(-x for x in e[ring.ns:]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        ring = self.ring
        for key in sorted(self.terms, key=self._sort_key):
            k, e = key
            c = self.terms[key]
            factors = [] if c == 1 else [str(c) if c > 0 else f"({c})"]
            if k:
                factors.append(f"h^{k}")
            for g, x in zip(ring.scalars, e[: ring.ns]):
                if x:
                    factors.append(g.name if x == 1 else f"{g.name}^{x}")
            alg = [g.name if x == 1 else f"{g.name}^{x}"
                   for g, x in zip(ring.algebra.generators, e[ring.ns:]) if x]
            factors.append("*".join(alg) if alg else "1")
            parts.append("*".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"Series({self})"


# -- module-level operations ------------------------------------------------

def koszul_sign(perm, degrees):
    """Sign of the permutation ``perm`` of graded items with given degrees."""
    perm = tuple(perm)
    if len(perm) != len(degrees):
        raise GradedError("permutation and degree list differ in length")
    if sorted(perm) != list(range(len(perm))):
        raise GradedError(f"{perm} is not a permutation")
    return _kernels.koszul_sign(perm, tuple(d & 1 for d in degrees))


def multiply(a, b):
    if a.ring.algebra != b.ring.algebra:
        raise GradedError("generator-set mismatch")
    return a * b


def series_exp(x):
    return x.exp()


def series_log(y):
    return y.log()


def hbar_conjugate(s):
    return s.conj()


def homogeneous_parity(x):
    p = x.parity()
    if p is None:
        raise GradedError(f"inhomogeneous element {x}")
    return p


# -- text grammar -----------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(d/d<[^>]+>|d/d[A-Za-z_]\w*)|(\d+)|([A-Za-z_]\w*)|(\S))")


def tokenize(text):
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            break
        pos = m.end()
        deriv, num, name, op = m.groups()
        if deriv:
            gen = deriv[3:]
            out.append(("D", gen.strip("<>").strip()))
        elif num:
            out.append(("N", int(num)))
        elif name:
            out.append(("V", name))
        elif op:
            out.append(("O", op))
    out.append(("E", None))
    return out


class _Parser:
    def __init__(self, text, ring):
        self.toks = tokenize(text)
        self.i = 0
        self.ring = ring
        self.text = text

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg):
        raise GradedError(f"cannot parse {self.text!r}: {msg}")

    def expect(self, op):
        t = self.take()
        if t != ("O", op):
            self.error(f"expected {op!r}, got {t[1]!r}")

    def expr(self):
        """Sum of terms; each term is (coefficient series, derivative names)."""
        terms = []
        sign = 1
        if self.peek() in (("O", "+"), ("O", "-")):
            sign = -1 if self.take()[1] == "-" else 1
        coeff, derivs = self.term()
        terms.append((coeff * sign, derivs))
        while self.peek() in (("O", "+"), ("O", "-")):
            sign = -1 if self.take()[1] == "-" else 1
            coeff, derivs = self.term()
            terms.append((coeff * sign, derivs))
        return terms

    def term(self):
        coeff = self.ring.one()
        derivs = []

        def item():
            nonlocal coeff
            t = self.peek()
            if t[0] == "D":
                self.take()
                derivs.append(t[1])
            else:
                if derivs:
                    self.error("derivatives must come last in a term")
                coeff = coeff * self.factor()

        item()
        while True:
            t = self.peek()
            if t == ("O", "*"):
                self.take()
                item()
            elif t == ("O", "/"):
                self.take()
                n = self.take()
                if n[0] != "N" or n[1] == 0:
                    self.error("division only by a nonzero integer")
                coeff = coeff / n[1]
            elif t[0] == "D":
                item()
            else:
                break
        return coeff, tuple(derivs)

    def factor(self):
        base = self.atom()
        if self.peek() == ("O", "^"):
            self.take()
            neg = False
            if self.peek() == ("O", "-"):
                self.take()
                neg = True
            n = self.take()
            if n[0] != "N":
                self.error("exponent must be an integer")
            e = -n[1] if neg else n[1]
            if isinstance(base, str) and base == "h":
                return self.ring.hbar(e)
            if e < 0:
                self.error("negative exponent on a non-hbar factor")
            return base ** e
        return base

    def atom(self):
        t = self.take()
        if t[0] == "N":
            return self.ring.scalar(t[1])
        if t[0] == "V":
            if t[1] == "h":
                if self.peek() == ("O", "^"):
                    return "h"
                return self.ring.hbar(1)
            if t[1] not in self.ring.index:
                self.error(f"unknown generator {t[1]!r}")
            return self.ring.gen(t[1])
        if t == ("O", "("):
            terms = self.expr()
            self.expect(")")
            if any(d for _, d in terms):
                self.error("derivatives inside parentheses")
            out = self.ring.zero()
            for c, _ in terms:
                out = out + c
            return out
        self.error(f"unexpected token {t[1]!r}")

    def done(self):
        if self.peek()[0] != "E":
            self.error(f"trailing input at {self.peek()[1]!r}")


def parse_element(text, ring):
    """Parse the element grammar, e.g. ``3/2*t^2*dt + (-1)*h^1*1``."""
    p = _Parser(text, ring)
    terms = p.expr()
    p.done()
    out = ring.zero()
    for c, d in terms:
        if d:
            p.error("unexpected derivative in an element")
        out = out + c
    return out


def parse_operator_terms(text, ring):
    """Parse ``coeff * d/d<gen> ... d/d<gen>`` sums into (coeff, derivs) pairs."""
    p = _Parser(text, ring)
    terms = p.expr()
    p.done()
    for _, d in terms:
        for g in d:
            if g not in ring.index:
                p.error(f"unknown generator {g!r} in derivative")
    return terms
