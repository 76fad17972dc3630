"""Pairings, the flat connection, good bases, polarizations and miniversality."""

from __future__ import annotations

from fractions import Fraction

from . import linalg
from .graded import GradedError, Series
from .hodge import Contraction, full_perturbation
from .report import Report

SAMPLE_SCALARS = ("h", "1 + 2*h^2", "3*h^3 - h")


class PairingTable:
    """Values (e_i, e_j) on a basis, extended by g(h) on the left and g(-h) on the right."""

    def __init__(self, labels, degrees, entries, sring, sesquilinear=True):
        self.labels = list(labels)
        self.degrees = list(degrees)
        self.sring = sring
        self.entries = {k: v for k, v in entries.items()}
        self.sesquilinear = sesquilinear
        for (i, j) in self.entries:
            if not (0 <= i < len(self.labels) and 0 <= j < len(self.labels)):
                raise GradedError(f"pairing entry ({i + 1},{j + 1}) out of range")

    @property
    def size(self):
        return len(self.labels)

    def entry(self, i, j):
        v = self.entries.get((i, j))
        return v if v is not None else self.sring.zero()

    def pair(self, x, y):
        """x, y: coordinate lists (scalar series) in the table's basis."""
        total = None
        for i, xi in enumerate(x):
            if xi.is_zero() and xi.is_exact():
                continue
            for j, yj in enumerate(y):
                t = self.entry(i, j)
                if t.is_zero():
                    continue
                yc = yj.conj() if self.sesquilinear else yj
                term = xi * yc * t
                total = term if total is None else total + term
        if total is None:
            ring = x[0].ring if x else self.sring
            return ring.zero()
        return total

    def matrix_mod_hbar(self):
        n = self.size
        return [[self.entry(i, j).at_params_zero().coefficient(0, ())
                 for j in range(n)] for i in range(n)]

    def unit(self, i, ring=None):
        ring = ring or self.sring
        return [ring.one() if j == i else ring.zero() for j in range(self.size)]

    def to_dict(self):
        return {"basis": self.labels,
                "entries": {f"{i + 1},{j + 1}": str(v)
                            for (i, j), v in sorted(self.entries.items())},
                "sesquilinear": self.sesquilinear}


def _sign(e):
    return -1 if e & 1 else 1


def verify_pairing_axioms(p, nondegenerate=True):
    from .graded import parse_element
    rep = Report("pairing_axioms")
    n = p.size
    bad = []
    for i in range(n):
        for j in range(n):
            lhs = p.entry(i, j)
            rhs = p.entry(j, i).conj() * _sign(p.degrees[i] * p.degrees[j])
            if not (lhs - rhs).is_zero():
                bad.append(f"({p.labels[i]},{p.labels[j]})")
    rep.add("hbar_parity", not bad, certified={"entries": n * n},
            witness={"entries": ", ".join(bad)} if bad else {})

    bad = []
    for text in SAMPLE_SCALARS:
        g = parse_element(text, p.sring)
        for i in range(n):
            for j in range(n):
                ei, ej = p.unit(i), p.unit(j)
                left = p.pair([g * c for c in ei], ej)
                right = p.pair(ei, [g * c for c in ej])
                gr = g.conj() if p.sesquilinear else g
                if not (left - g * p.entry(i, j)).is_zero() or \
                        not (right - gr * p.entry(i, j)).is_zero():
                    bad.append(f"g={text} on ({p.labels[i]},{p.labels[j]})")
    rep.add("sesquilinear", not bad, certified={"samples": len(SAMPLE_SCALARS)},
            witness={"cases": "; ".join(bad)} if bad else {})

    if nondegenerate:
        mat = p.matrix_mod_hbar()
        d = linalg.det(mat)
        rep.add("nondegenerate_mod_hbar", d != 0, certified={"det": str(d)},
                witness={} if d != 0 else {"matrix": str([[str(x) for x in r] for r in mat])})
    return rep


class ElementPairing:
    """Pairing of Delta-cocycles through their classes in the representative basis."""

    def __init__(self, inst, table, pcd=None):
        self.inst = inst
        self.table = table
        self.pcd = pcd or full_perturbation(inst, Contraction(inst))
        if self.pcd.rank != table.size:
            raise GradedError(f"pairing basis has {table.size} labels, "
                              f"cohomology has rank {self.pcd.rank}")

    def coords(self, x):
        if not self.inst.delta(x).is_zero():
            raise GradedError(f"{x} is not a Delta-cocycle")
        return self.pcd.pi(x)

    def __call__(self, x, y):
        return self.table.pair(self.coords(x), self.coords(y))

    def transported(self, gamma):
        """(x, y)_u = (e^{gamma/h} x, e^{gamma/h} y)_0 on Delta_gamma-cocycles."""
        eg = gamma.shift(-1).exp()

        def pair_u(x, y):
            return self(eg * x, eg * y)
        return pair_u


def trace_pairing(inst, tr, gamma, basis):
    """Table (b_i, b_j) = Tr(exp((gamma(h) - gamma(-h))/h) b_i conj(b_j)).

    ``tr`` maps algebra exponent tuples to rationals.
    """
    ring = gamma.ring
    sring = ring.scalar_ring()
    w = ((gamma - gamma.conj()).shift(-1)).exp()

    def Tr(x):
        return x.linear_map(lambda e: {(0, ()): Fraction(tr[e])} if tr.get(e) else {},
                            0, sring)
    entries = {}
    for i, bi in enumerate(basis):
        for j, bj in enumerate(basis):
            v = Tr(w * ring.embed(bi) * ring.embed(bj).conj())
            if not v.is_pole_free():
                raise GradedError(f"trace pairing has a pole at ({i + 1},{j + 1}): {v}")
            if not v.is_zero():
                entries[(i, j)] = v
    labels = [str(b) for b in basis]
    table = PairingTable(labels, [b.degree() for b in basis], entries, sring)

    def pair(a, b):
        v = Tr(w * ring.embed(a) * ring.embed(b).conj())
        if not v.is_pole_free():
            raise GradedError(f"trace pairing has a pole: {v}")
        return v
    table.pair_elements = pair
    return table


# -- flat connection ------------------------------------------------------------

class FlatConnection:
    """nabla_i = d/du_i + h^{-1} (d gamma / d u_i) on sections of A((h))[[u]]."""

    def __init__(self, inst, gamma, pcd_twisted=None):
        self.inst = inst
        self.gamma = gamma
        self.ring = gamma.ring
        self.np = self.ring.np
        self.dgamma = [gamma.param_derivative(i).shift(-1) for i in range(self.np)]
        self.pcd = pcd_twisted

    def __call__(self, i, s):
        s = self.ring.embed(s)
        return s.param_derivative(i) + self.dgamma[i] * s

    def curvature(self, i, j, s):
        return self(i, self(j, s)) - self(j, self(i, s))

    def basis_sections(self):
        ring = self.ring
        return [self.pcd.iota(self.pcd.unit_coords(a, ring), ring)
                for a in range(self.pcd.rank)]

    def matrix(self, i):
        """Rows: coordinates of nabla_i applied to the a-th basis section."""
        return [self.pcd.pi(self(i, s)) for s in self.basis_sections()]

    def covariant_coords(self, i, sigma):
        """nabla_i on a section given by coordinates in the basis sections."""
        mat = self.matrix(i)
        out = [c.param_derivative(i) for c in sigma]
        for a, sa in enumerate(sigma):
            for b in range(len(out)):
                out[b] = out[b] + sa * mat[a][b]
        return out


def verify_flatness(pair_coords, conn, sections):
    """d_i (s, t) = (nabla_i s, t) + (s, nabla_i t) on coordinate sections."""
    rep = Report("flatness")
    bad = []
    top = None
    for i in range(conn.np):
        for a, s in enumerate(sections):
            for b, t in enumerate(sections):
                lhs = pair_coords(s, t).param_derivative(i)
                rhs = pair_coords(conn.covariant_coords(i, s), t) + \
                    pair_coords(s, conn.covariant_coords(i, t))
                diff = lhs - rhs
                k = diff.known_udeg()
                top = k if top is None else min(top, k)
                if not diff.is_zero():
                    bad.append(f"u{i + 1} on sections ({a},{b}): {diff}")
    rep.add("pairing_flat", not bad,
            certified={"sections": len(sections), "u_order": top},
            witness={"cases": "; ".join(bad[:3])} if bad else {})
    return rep


def curvature_check(conn, probes):
    rep = Report("curvature")
    bad = []
    for i in range(conn.np):
        for j in range(i + 1, conn.np):
            for s in probes:
                c = conn.curvature(i, j, s)
                if not c.is_zero():
                    bad.append(f"[{i + 1},{j + 1}] on {s}")
    rep.add("curvature_zero", not bad, certified={"probes": len(probes)},
            witness={"cases": "; ".join(bad[:3])} if bad else {})
    return rep


# -- good basis, residue pairing, polarization ---------------------------------

def good_basis_check(p):
    rep = Report("good_basis")
    bad = [f"({p.labels[i]},{p.labels[j]})" for (i, j), v in sorted(p.entries.items())
           if any(k != 0 for k, _ in v.terms) or any(any(e[:v.ring.ns]) for _, e in v.terms)]
    rep.add("hbar_constant", not bad, witness={"entries": ", ".join(bad)} if bad else {})
    return rep


def residue_symplectic(p, x, y):
    """Coefficient of h^{-1} in (x, y) for coordinate vectors x, y."""
    return p.pair(x, y).coefficient(-1, ())


def polarization_check(p, pole_window=3):
    """E_0 = span{h^b e_i}, L = span{h^{-a} e_i, a >= 1} on |powers| <= pole_window."""
    rep = Report("polarization")
    sring = p.sring
    n = p.size

    def vec(power, i):
        return [sring.hbar(power) if j == i else sring.zero() for j in range(n)]

    E0 = [(b, i) for b in range(pole_window) for i in range(n)]
    L = [(-a, i) for a in range(1, pole_window + 1) for i in range(n)]

    def omega(u, v):
        return residue_symplectic(p, vec(*u), vec(*v))

    iso_e = all(omega(u, v) == 0 for u in E0 for v in E0)
    iso_l = all(omega(u, v) == 0 for u in L for v in L)
    rep.add("E0_isotropic", iso_e, certified={"pole_window": pole_window})
    rep.add("L_isotropic", iso_l, certified={"pole_window": pole_window})
    rows = []
    cols = [(k, j) for k in range(-pole_window, pole_window) for j in range(n)]
    for power, i in E0 + L:
        rows.append([Fraction(int((power, i) == c)) for c in cols])
    rk = linalg.rank(rows, len(cols))
    rep.add("intersection_zero", rk == len(E0) + len(L), certified={"rank": rk})
    mat = [[omega(u, v) for v in E0] for u in L]
    d = linalg.det(mat)
    rep.add("complementary", d != 0, certified={"det": str(d)})
    return rep


def miniversality_check(gamma, cd):
    """Matrix of pi(d gamma / d u_i) at u = 0, h = 0 in the representative basis."""
    rep = Report("miniversality")
    ring = gamma.ring
    base = ring.base()
    mat = []
    for i in range(ring.np):
        d = gamma.param_derivative(i).at_params_zero()
        d0 = d.hbar_part(0, 0)
        terms = {(k, e[ring.ns:]): c for (k, e), c in d0.terms.items()}
        coords = cd.pi(Series(base, terms))
        mat.append([c.coefficient(0, ()) for c in coords])
    n = len(cd.labels)
    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    ok = mat == ident
    rep.add("identity_matrix", ok, certified={"rank": n},
            witness={} if ok else {"matrix": str([[str(x) for x in r] for r in mat])})
    rep.data["miniversality_matrix"] = [[str(x) for x in r] for r in mat]
    return rep


# -- compatibility along a morphism ----------------------------------------------

def check_pairing_compatibility(f, pair_a, pair_b, elements):
    """(f x, f y)_B = (x, y)_A for all pairs of the given Delta-cocycles of A."""
    rep = Report(f"pairing_compatibility[{f.name}]", f.source.trunc.as_dict())
    bad = []
    values = {}
    for x in elements:
        for y in elements:
            lhs = pair_b(f(x), f(y))
            rhs = pair_a(x, y)
            values[f"({x},{y})"] = str(rhs)
            if not (lhs - rhs).is_zero():
                bad.append(f"({x},{y}): {lhs} vs {rhs}")
    rep.add("compatible", not bad, certified={"pairs": len(elements) ** 2},
            witness={"cases": "; ".join(bad[:3])} if bad else {})
    rep.data["pairings"] = values
    return rep


def check_twisted_compatibility(f, pair_a, pair_b, gamma_a, gamma_b, elements):
    """Twisted variant: (e^{gB/h} f_g x, e^{gB/h} f_g y)_B = (e^{gA/h} x, e^{gA/h} y)_A."""
    rep = Report(f"twisted_pairing_compatibility[{f.name}]", f.source.trunc.as_dict())
    ea = gamma_a.shift(-1).exp()
    eb = gamma_b.shift(-1).exp()
    eb_inv = (-gamma_b).shift(-1).exp()
    bad = []
    top = None
    for x in elements:
        for y in elements:
            fx = eb_inv * f(ea * x)
            fy = eb_inv * f(ea * y)
            lhs = pair_b(eb * fx, eb * fy)
            rhs = pair_a(ea * x, ea * y)
            diff = lhs - rhs
            k = diff.known_udeg()
            top = k if top is None else min(top, k)
            if not diff.is_zero():
                bad.append(f"({x},{y})")
    rep.add("twisted_compatible", not bad, certified={"pairs": len(elements) ** 2,
                                                      "u_order": top},
            witness={"cases": ", ".join(bad[:3])} if bad else {})
    return rep
