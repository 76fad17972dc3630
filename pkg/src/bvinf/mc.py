"""Maurer-Cartan elements: residuals, the universal solver, twisting and pushforward."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import factorial

from .graded import Generator, GradedError, Series, homogeneous_parity
from .hodge import Contraction, ObstructionError, full_perturbation
from .morphisms import cumulant_partition, cumulant_repeated
from .operators import Operator, ad_element, mu_n, verify_bv
from .report import Report


class MCMismatch(AssertionError):
    pass


@dataclass
class MCElement:
    value: Series
    labels: list = field(default_factory=list)
    corrections: dict = field(default_factory=dict)
    contraction: dict = field(default_factory=dict)

    @property
    def ring(self):
        return self.value.ring

    def to_dict(self):
        """Per parameter monomial, per hbar power: element text."""
        ring = self.value.ring
        ns = ring.ns
        table = {}
        for (k, e), c in self.value.terms.items():
            umono = "*".join(g.name if x == 1 else f"{g.name}^{x}"
                             for g, x in zip(ring.params, e[:ns]) if x) or "1"
            table.setdefault(umono, {}).setdefault(k, {})[e[ns:]] = c
        out = {}
        for umono, byk in sorted(table.items()):
            out[umono] = {}
            for k, terms in sorted(byk.items()):
                s = Series(ring.base(), {(0, e): c for e, c in terms.items()})
                out[umono][f"h^{k}"] = str(s)
        return {"gamma": str(self.value), "components": out, "labels": self.labels,
                "corrections": self.corrections, "contraction": self.contraction}


def _val(g):
    return g.value if isinstance(g, MCElement) else g


def param_generators(reps, m, names=None):
    names = names or [f"u{i + 1}" for i in range(len(reps))]
    return [Generator(n, (1 - m) - r.degree(), 0, "param") for n, r in zip(names, reps)]


def _check_mc_shape(gamma, m):
    if any(not any(e[:gamma.ring.np]) for _, e in gamma.terms):
        raise GradedError("MC element must vanish at u = 0")
    d = gamma.degree()
    if d is not None and not gamma.is_zero() and d != 1 - m:
        raise GradedError(f"MC element must have degree {1 - m}, got {d}")
    if d is None:
        raise GradedError("MC element must be homogeneous")


def residual_mu(op, gamma, nu):
    total = op(gamma)
    for i in range(2, nu + 1):
        total = total + mu_n(op, [gamma] * i) / factorial(i)
    return total


def residual_exp(op, gamma):
    e_plus = gamma.shift(-1).exp()
    e_minus = (-gamma).shift(-1).exp()
    return (e_minus * op(e_plus)).shift(1)


def mc_residual(inst, gamma, diagnostic=False, check=True, op=None):
    """sum_i mu_i(gamma, ..., gamma)/i!, cross-checked against h e^{-g/h} Delta e^{g/h}."""
    gamma = _val(gamma)
    op = op or inst.delta
    if not diagnostic:
        _check_mc_shape(gamma, inst.m)
    r1 = residual_mu(op, gamma, gamma.ring.nu)
    if check and homogeneous_parity(gamma) == 0:
        r2 = residual_exp(op, gamma)
        if not (r1 - r2).is_zero():
            raise MCMismatch(f"mu-sum {r1} != exponential route {r2}")
    return r1


def solve_mc_universal(inst, cd=None, n_order=None, names=None, basis=None):
    """Normalized MC element with linear term sum u_i S(rep_i).

    ``basis`` selects representative labels (default: all of them, which
    gives the universal element).
    """
    cd = cd or Contraction(inst)
    pcd = full_perturbation(inst, cd)
    if basis is None:
        chosen = list(range(cd.rank))
    else:
        unknown = [b for b in basis if b not in cd.labels]
        if unknown:
            raise GradedError(f"{unknown} are not representative labels {cd.labels}")
        chosen = [cd.labels.index(b) for b in basis]
    reps = [cd.representatives()[i] for i in chosen]
    params = param_generators(reps, inst.m, names)
    ring = inst.ring.with_params(params)
    nu = ring.nu if n_order is None else min(n_order, ring.nu)
    gamma = ring.zero()
    for p, i in zip(params, chosen):
        lift = pcd.iota(pcd.unit_coords(i, ring), ring)
        gamma = gamma + ring.gen(p.name) * lift
    corrections = {}
    for n in range(2, nu + 1):
        r = residual_mu(inst.delta, gamma, nu).truncate_udeg(n)
        low = r.truncate_udeg(n - 1)
        if not low.is_zero():
            raise ObstructionError(f"residual nonzero below u-order {n}: {low}")
        rn = r.udeg_part(n)
        obstruction = pcd.pi(rn)
        bad = [(cd.labels[i], str(x)) for i, x in enumerate(obstruction) if not x.is_zero()]
        if bad:
            raise ObstructionError(f"obstruction at u-order {n}: {bad}")
        corr = -pcd.h(rn)
        corrections[str(n)] = str(corr) if not corr.is_zero() else "0"
        gamma = gamma + corr
    final = mc_residual(inst, gamma)
    if not final.is_zero():
        raise ObstructionError(f"final residual nonzero: {final}")
    return MCElement(gamma, [cd.labels[i] for i in chosen], corrections, cd.data())


# -- twisting ----------------------------------------------------------------

class TwistedOperator(Operator):
    """Delta_gamma = sum_i ad_gamma^i(Delta)/(i! h^i); also available by conjugation."""

    degree = 1

    def __init__(self, delta, gamma):
        self.delta = delta
        self.gamma = _val(gamma)
        if homogeneous_parity(self.gamma):
            raise GradedError("twisting needs an even MC element")
        self.nu = self.gamma.ring.nu
        ops = [delta]
        for _ in range(self.nu):
            ops.append(ad_element(ops[-1], self.gamma))
        self._ads = ops
        self._e_plus = self.gamma.shift(-1).exp()
        self._e_minus = (-self.gamma).shift(-1).exp()
        self._cache = {}

    def bch(self, x):
        total = self.delta(x)
        for i in range(1, self.nu + 1):
            total = total + self._ads[i](x).shift(-i) / factorial(i)
        return total

    def conjugate(self, x):
        return self._e_minus * self.delta(self._e_plus * x)

    def __call__(self, x):
        # linear over even scalars: expand along algebra monomials and cache
        ring = self.gamma.ring
        if x.ring != ring:
            try:
                x = ring.embed(x)
            except GradedError:
                return self.bch(x)
        if not x.is_exact() or any(ring.odd[: ring.ns]):
            return self.bch(x)
        ns = ring.ns
        groups = {}
        for (k, e), c in x.terms.items():
            groups.setdefault(e[ns:], {})[(k, e[:ns] + (0,) * (len(e) - ns))] = c
        total = ring.zero()
        for alg, coeffs in groups.items():
            img = self._cache.get(alg)
            if img is None:
                img = self._cache[alg] = self.bch(ring.monomial(alg))
            total = total + Series(ring, coeffs) * img
        return total


def random_probes(ring, count, seed=0, max_poly=5, max_hbar=2, terms=3):
    """Random elements of A[h] with small integer coefficients."""
    rng = random.Random(seed)
    monos = ring.algebra.monomials(max_poly)
    out = []
    for _ in range(count):
        t = {}
        for _ in range(rng.randint(1, terms)):
            e = rng.choice(monos)
            k = rng.randint(0, max_hbar)
            c = rng.randint(-5, 5) or 1
            t[(k, (0,) * ring.ns + e)] = c
        out.append(Series(ring, t))
    return out


def twist_operator(inst, gamma, n_max=3, cutoff=5, probes=50, seed=0):
    """Twisted operator with its checks; returns (operator, report)."""
    tw = TwistedOperator(inst.delta, gamma)
    g = tw.gamma
    rep = Report(f"twist_operator[{inst.name}]", inst.trunc.as_dict())
    samples = random_probes(inst.ring, probes, seed)
    bad = []
    poles = []
    for x in samples:
        a, b = tw.bch(x), tw.conjugate(x)
        if not (a - b).is_zero():
            bad.append(str(x))
        if not a.is_pole_free():
            poles.append(str(x))
    rep.add("bch_equals_conjugation", not bad,
            certified={"probes": len(samples), "u_order": g.ring.nu},
            witness={"probes": "; ".join(bad[:3])} if bad else {})
    rep.add("pole_free", not poles, witness={"probes": "; ".join(poles[:3])} if poles else {})
    sub = verify_bv(inst, n_max=n_max, cutoff=cutoff, op=tw)
    rep.extend(sub, "twisted_")
    return tw, rep


# -- morphisms ---------------------------------------------------------------

def pushforward_mc(f, gamma_a):
    """gamma_B = h log f(e^{gamma_A/h}), with the MC checks on the target."""
    ga = _val(gamma_a)
    ea = ga.shift(-1).exp()
    fe = f(ea)
    gb = fe.log().shift(1)
    rep = Report(f"pushforward[{f.name}]", f.source.trunc.as_dict())
    rep.add("pole_free", gb.is_pole_free(), witness={} if gb.is_pole_free() else {"gamma_B": str(gb)})
    res = mc_residual(f.target, gb, diagnostic=True)
    rep.add("target_mc", res.is_zero(), witness={} if res.is_zero() else {"residual": str(res)})
    eb = gb.shift(-1).exp()
    rep.add("exp_matches", (eb - fe).is_zero())
    de = f.target.delta(eb)
    rep.add("target_closed", de.is_zero())
    rep.data["gamma_B"] = str(gb)
    return gb, rep


class TwistedMorphism(Operator):
    """f_gamma(x) = e^{-gamma_B/h} f(e^{gamma_A/h} x)."""

    degree = 0

    def __init__(self, f, gamma_a, gamma_b):
        self.f = f
        self.gamma_a = _val(gamma_a)
        self.gamma_b = _val(gamma_b)
        self._ea = self.gamma_a.shift(-1).exp()
        self._eb_inv = (-self.gamma_b).shift(-1).exp()
        self.name = f"{f.name}[twisted]"
        self.source, self.target = f.source, f.target

    def __call__(self, x):
        return self._eb_inv * self.f(self._ea * x)


def twisted_cumulant_rhs(f, gamma, args):
    """sum_i kappa_{i+n}(f)(gamma, ..., gamma, args)/(i! h^i)."""
    total = None
    for i in range(gamma.ring.nu + 1):
        term = cumulant_repeated(f, gamma, i, args).shift(-i)
        total = term if total is None else total + term
    return total


def twist_morphism(f, gamma_a, gamma_b=None, n_max=3, cutoff=4):
    ga = _val(gamma_a)
    if gamma_b is None:
        gamma_b, _ = pushforward_mc(f, ga)
    gb = _val(gamma_b)
    fg = TwistedMorphism(f, ga, gb)
    src, tgt = f.source, f.target
    rep = Report(f"twist_morphism[{f.name}]", src.trunc.as_dict())
    ring = ga.ring
    monos = src.monomials(cutoff)
    xs = [ring.embed(src.ring.monomial(e)) for e in monos]

    poles = [str(x) for x in xs if not fg(x).is_pole_free()]
    rep.add("pole_free", not poles, witness={"inputs": ", ".join(poles)} if poles else {})
    one = fg(ring.one())
    rep.add("unital", (one - 1).is_zero(), witness={} if (one - 1).is_zero() else {"f(1)": str(one)})

    da = TwistedOperator(src.delta, ga)
    db = TwistedOperator(tgt.delta, gb)
    bad = [str(x) for x in xs if not (fg(da(x)) - db(fg(x))).is_zero()]
    rep.add("intertwines", not bad, certified={"monomials": len(xs)},
            witness={"inputs": ", ".join(bad[:3])} if bad else {})

    from .operators import monomial_tuples
    bad = []
    count = 0
    for n in range(1, n_max + 1):
        for tup in monomial_tuples(monos, n, cutoff):
            args = [ring.embed(src.ring.monomial(e)) for e in tup]
            lhs = cumulant_partition(fg, args)
            rhs = twisted_cumulant_rhs(f, ga, args)
            count += 1
            if not (lhs - rhs).is_zero():
                bad.append(f"n={n} {tup}")
    rep.add("cumulant_identity", not bad,
            certified={"tuples": count, "n_max": n_max, "u_order": ring.nu},
            witness={"cases": "; ".join(bad[:3])} if bad else {})
    return fg, rep


def twisted_contraction(inst, gamma, cd=None):
    """Contraction data for Delta_gamma, perturbing Delta_0 by Delta_gamma - Delta_0."""
    from .operators import FunctionOperator
    tw = gamma if isinstance(gamma, TwistedOperator) else TwistedOperator(inst.delta, gamma)
    d0 = inst.delta.component(0)
    cd = cd or Contraction(inst)
    return cd.perturb(FunctionOperator(lambda x: tw(x) - d0(x), 1, "twisted perturbation"))
