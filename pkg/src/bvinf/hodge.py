"""Cohomology on truncated windows, contraction data and its perturbation.

A window is the set of algebra monomials of polynomial degree <= n_poly.
The working complex is the largest subspace S of the window that the
differential keeps inside the window.  In each degree S splits as
B + H + C (boundaries, harmonic representatives, a complement of the
cocycles) and the homotopy h inverts D: C -> B, so that

    D h + h D = id - iota pi,   h h = 0,  h iota = 0,  pi h = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .graded import GradedError, Series
from .morphisms import TruncationError
from .report import Report

_ZERO = Fraction(0)


class ObstructionError(ArithmeticError):
    """An order-by-order construction met a nonzero cohomology class."""


class _Complex:
    """Finite cochain complex on a list of cells per degree.

    ``op(cell)`` returns {cell: coeff}; images outside the listed cells of
    the next degree mark the source cell as leaving the window.
    """

    def __init__(self, cells_by_degree, op, order_key):
        self.degrees = sorted(cells_by_degree)
        self.cells = {d: sorted(cells_by_degree[d], key=order_key) for d in self.degrees}
        self.index = {d: {c: i for i, c in enumerate(cs)} for d, cs in self.cells.items()}
        self.deg_of = {c: d for d, cs in self.cells.items() for c in cs}
        self.op = op
        self.S, self.Z, self.C, self.B, self.H = {}, {}, {}, {}, {}
        self.excluded = {}
        self._coords = {}
        for d in self.degrees:
            self._build_degree(d)
        for d in self.degrees:
            self._build_coords(d)

    # vectors are lists aligned with self.cells[d]
    def _img_vector(self, d, vec):
        """D applied to a vector of degree d, as (in-window vector, escaped dict)."""
        tgt = self.index.get(d + 1, {})
        out = [_ZERO] * len(tgt)
        esc = {}
        for c, x in zip(self.cells[d], vec):
            if not x:
                continue
            for c2, y in self.op(c).items():
                j = tgt.get(c2)
                if j is None:
                    esc[c2] = esc.get(c2, 0) + x * y
                else:
                    out[j] += x * y
        return out, {k: v for k, v in esc.items() if v}

    def _high_first(self, vecs, n):
        """Row-reduce with the highest cells as leading columns."""
        if not vecs:
            return []
        rev = [list(reversed(v)) for v in vecs]
        red, _ = linalg.rref(rev, n)
        return [list(reversed(r)) for r in red]

    @staticmethod
    def _leading(v):
        for i in range(len(v) - 1, -1, -1):
            if v[i]:
                return i
        return -1

    def _build_degree(self, d):
        cells = self.cells[d]
        n = len(cells)
        units = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        # S: kernel of the escaping part
        esc_rows = {}
        for j, c in enumerate(cells):
            for c2, y in self.op(c).items():
                if c2 not in self.index.get(d + 1, {}):
                    esc_rows.setdefault(c2, [_ZERO] * n)[j] += y
        if esc_rows:
            S = linalg.nullspace(list(esc_rows.values()), n)
            S = self._high_first(S, n)
        else:
            S = units
        self.excluded[d] = n - len(S)
        self.S[d] = S
        # Z: cocycles in S
        m = len(self.cells.get(d + 1, []))
        if S and m:
            img_cols = [self._img_vector(d, s)[0] for s in S]
            rows = linalg.transpose(img_cols, m)
            lam = linalg.nullspace(rows, len(S))
            Z = [[sum(l * s[i] for l, s in zip(ls, S)) for i in range(n)] for ls in lam]
        else:
            Z = [list(s) for s in S]
        Z = self._high_first(Z, n)
        self.Z[d] = Z
        # C: greedy complement of Z in S, preferring low leading cells
        cand = sorted(S, key=self._leading)
        C = [cand[i] for i in linalg.greedy_extend(Z, cand, n)]
        self.C[d] = C
        self.B[d + 1] = [self._img_vector(d, c)[0] for c in C]

    def _build_coords(self, d):
        n = len(self.cells[d])
        B = self.B.get(d, [])
        Z = self.Z[d]
        Bred = self._high_first(B, n)
        bpiv = [self._leading(r) for r in Bred]
        H = []
        cand = sorted(Z, key=self._leading)
        for i in linalg.greedy_extend(B, cand, n):
            v = list(cand[i])
            for row, p in zip(Bred, bpiv):
                if v[p]:
                    f = v[p] / row[p]
                    v = [a - f * b for a, b in zip(v, row)]
            H.append(v)
        self.H[d] = H
        cols = B + H + self.C[d]
        units = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        cols += [units[i] for i in linalg.greedy_extend(cols, units, n)]
        if len(cols) != n:
            raise GradedError(f"degree {d}: basis completion failed")
        qinv = linalg.inverse(linalg.transpose(cols, n)) if n else []
        nb, nh, nc = len(B), len(H), len(self.C[d])
        for j, cell in enumerate(self.cells[d]):
            col = [qinv[i][j] for i in range(n)]
            self._coords[cell] = (col[:nb], col[nb:nb + nh], col[nb + nh:nb + nh + nc],
                                  col[nb + nh + nc:])

    def coords(self, cell):
        return self._coords.get(cell)

    def vector_to_dict(self, d, v):
        return {c: x for c, x in zip(self.cells[d], v) if x}

    def betti(self):
        return {d: len(self.H[d]) for d in self.degrees}


@dataclass
class CohomologySlice:
    which: str
    window: dict
    betti: dict
    reps: dict
    cocycles: dict
    coboundaries: dict
    excluded: dict
    extra: dict = field(default_factory=dict)

    def rank(self):
        return sum(self.betti.values())

    def to_dict(self):
        return {"which": self.which, "window": self.window,
                "betti": {str(d): b for d, b in sorted(self.betti.items())},
                "representatives": {str(d): [str(r) for r in rs]
                                    for d, rs in sorted(self.reps.items()) if rs},
                "cocycles": {str(d): v for d, v in sorted(self.cocycles.items())},
                "coboundaries": {str(d): v for d, v in sorted(self.coboundaries.items())},
                "excluded": {str(d): v for d, v in sorted(self.excluded.items()) if v},
                **self.extra}


def _mono_key(e):
    return (sum(e), tuple(-x for x in e))


class Contraction:
    """Contraction data (pi, iota, h) for Delta_0 on a monomial window."""

    def __init__(self, inst, n_poly=None):
        self.inst = inst
        self.algebra = inst.algebra
        self.n_poly = inst.trunc.n_poly if n_poly is None else n_poly
        d0 = inst.delta.component(0)
        cells = {}
        for e in self.algebra.monomials(self.n_poly):
            cells.setdefault(self.algebra.mono_degree(e), []).append(e)

        def op(e):
            out = {}
            for (k, e2), c in d0.cached_image(e).items():
                if k:
                    raise GradedError("Delta_0 must not shift the hbar order")
                out[e2] = c
            return out

        self.cx = _Complex(cells, op, _mono_key)
        base = inst.ring
        self.labels = []
        self.label_degrees = []
        self._reps = []
        for d in self.cx.degrees:
            for v in self.cx.H[d]:
                rep = Series(base, {(0, (0,) * base.ns + c): x
                                    for c, x in self.cx.vector_to_dict(d, v).items()})
                self._reps.append(rep)
                self.labels.append(str(rep))
                self.label_degrees.append(d)
        self._label_offset = {}
        off = 0
        for d in self.cx.degrees:
            self._label_offset[d] = off
            off += len(self.cx.H[d])

    @property
    def rank(self):
        return len(self.labels)

    def representatives(self, ring=None):
        if ring is None:
            return list(self._reps)
        return [ring.embed(r) for r in self._reps]

    def slice(self):
        cx = self.cx
        reps = {}
        i = 0
        for d in cx.degrees:
            reps[d] = self._reps[i:i + len(cx.H[d])]
            i += len(cx.H[d])
        return CohomologySlice(
            "Delta_0", {"n_poly": self.n_poly}, cx.betti(), reps,
            {d: len(cx.Z[d]) for d in cx.degrees},
            {d: len(cx.B.get(d, [])) for d in cx.degrees},
            dict(cx.excluded))

    def _cell_coords(self, e):
        co = self.cx.coords(e)
        if co is None:
            raise TruncationError(f"monomial {e} lies outside the window "
                                  f"(polynomial degree <= {self.n_poly})")
        return co

    def _check_in_window(self, x):
        ns = x.ring.ns
        groups = {}
        for (k, e), c in x.terms.items():
            bc, hc, cc, ec = self._cell_coords(e[ns:])
            if any(ec):
                key = (k, e[:ns])
                acc = groups.setdefault(key, [_ZERO] * len(ec))
                for j, v in enumerate(ec):
                    acc[j] += c * v
        for key, acc in groups.items():
            if any(acc):
                raise TruncationError("element leaves the working subcomplex of the window")

    def h(self, x):
        self._check_in_window(x)
        cx = self.cx

        def image(e):
            bc = self._cell_coords(e)[0]
            d = self.algebra.mono_degree(e)
            out = {}
            for coeff, cvec in zip(bc, cx.C.get(d - 1, [])):
                if not coeff:
                    continue
                for c2, y in cx.vector_to_dict(d - 1, cvec).items():
                    out[(0, c2)] = out.get((0, c2), 0) + coeff * y
            return {k: v for k, v in out.items() if v}
        return x.linear_map(image, -1)

    def pi(self, x):
        """Coordinates of the harmonic part, one scalar series per label."""
        self._check_in_window(x)
        sring = x.ring.scalar_ring()
        out = []
        for i in range(self.rank):
            d = self.label_degrees[i]
            j = i - self._label_offset[d]

            def image(e, d=d, j=j):
                if self.algebra.mono_degree(e) != d:
                    return {}
                c = self._cell_coords(e)[1][j]
                return {(0, ()): c} if c else {}
            out.append(x.linear_map(image, 0, sring))
        return out

    def iota(self, coords, ring):
        total = ring.zero()
        for c, rep in zip(coords, self._reps):
            img = {(k, e[rep.ring.ns:]): v for (k, e), v in rep.terms.items()}
            total = total + c.linear_map(lambda e, img=img: img, 0, ring)
        return total

    def project(self, x):
        return self.pi(x)

    def perturb(self, delta_op):
        return PerturbedContraction(self, delta_op)

    def data(self):
        return {"n_poly": self.n_poly, "labels": list(self.labels),
                "pivoting": "graded-lex, highest monomial leads"}


class PerturbedContraction:
    """Homological perturbation of a contraction by delta (Delta = Delta_0 + delta)."""

    def __init__(self, base, delta_op, max_iter=200):
        self.base = base
        self.delta = delta_op
        self.max_iter = max_iter
        self.labels = base.labels
        self.label_degrees = base.label_degrees

    @property
    def rank(self):
        return self.base.rank

    def A(self, x):
        y = self.delta(x)
        total = y
        for _ in range(self.max_iter):
            if y.is_zero():
                return total
            y = -self.delta(self.base.h(y))
            total = total + y
        raise GradedError("perturbation series did not terminate")

    def h(self, x):
        hx = self.base.h(x)
        return hx - self.base.h(self.A(hx))

    def pi(self, x):
        p0 = self.base.pi(x)
        p1 = self.base.pi(self.A(self.base.h(x)))
        return [a - b for a, b in zip(p0, p1)]

    def iota(self, coords, ring):
        ix = self.base.iota(coords, ring)
        return ix - self.base.h(self.A(ix))

    def unit_coords(self, i, ring):
        sring = ring.scalar_ring()
        return [sring.one() if j == i else sring.zero() for j in range(self.rank)]

    def d_H(self, i, ring):
        """pi A iota on the i-th label; vanishes iff the lift of label i exists."""
        x = self.base.iota(self.unit_coords(i, ring), ring)
        return self.base.pi(self.A(x))


def contraction(inst, n_poly=None):
    return Contraction(inst, n_poly)


def full_perturbation(inst, cd):
    return cd.perturb(inst.delta.perturbation())


def cohomology(inst, which="delta0", n_poly=None, n_hbar=None):
    """Cohomology of Delta_0 on the window, or of Delta on window x h^0..h^N."""
    if which in ("delta0", "Delta_0"):
        return Contraction(inst, n_poly).slice()
    if which not in ("delta", "Delta"):
        raise ValueError(f"unknown operator selector {which!r}")
    algebra = inst.algebra
    n_poly = inst.trunc.n_poly if n_poly is None else n_poly
    n_hbar = inst.trunc.n_hbar if n_hbar is None else n_hbar
    hdeg = algebra.hbar_degree
    cells = {}
    for e in algebra.monomials(n_poly):
        for k in range(n_hbar + 1):
            cells.setdefault(algebra.mono_degree(e) + k * hdeg, []).append((k, e))
    delta = inst.delta

    def op(cell):
        k, e = cell
        return {(k + k2, e2): c for (k2, e2), c in delta.cached_image(e).items()
                if k + k2 <= n_hbar}

    cx = _Complex(cells, op, lambda c: (sum(c[1]), c[0], _mono_key(c[1])))
    base = inst.ring
    reps = {}
    for d in cx.degrees:
        reps[d] = [Series(base, {(k, (0,) * base.ns + e): x
                                 for (k, e), x in cx.vector_to_dict(d, v).items()})
                   for v in cx.H[d]]
    b0 = Contraction(inst, n_poly).cx.betti()
    expected = {}
    for d in cx.degrees:
        expected[d] = sum(b0.get(d - k * hdeg, 0) for k in range(n_hbar + 1))
    betti = cx.betti()
    generators = [str(r) for d in cx.degrees for r in reps[d] if r.valuation() == 0]
    extra = {"free_over_truncated_hbar": betti == expected,
             "expected_dims": {str(d): v for d, v in sorted(expected.items())},
             "module_generators": generators}
    return CohomologySlice("Delta", {"n_poly": n_poly, "n_hbar": n_hbar}, betti, reps,
                           {d: len(cx.Z[d]) for d in cx.degrees},
                           {d: len(cx.B.get(d, [])) for d in cx.degrees},
                           dict(cx.excluded), extra)


# -- lifting and reduction ----------------------------------------------------

def lift_cocycle(inst, c, pcd=None):
    """Delta-closed alpha = c + h(...) with classical part c (the map S)."""
    pcd = pcd or full_perturbation(inst, Contraction(inst))
    cd = pcd.base
    d0 = inst.delta.component(0)
    if not d0(c).is_zero():
        raise GradedError(f"{c} is not a Delta_0-cocycle")
    ring = c.ring
    alpha = pcd.iota(cd.pi(c), ring) + inst.delta(cd.h(c))
    if not inst.delta(alpha).is_zero():
        raise ObstructionError(f"lift of {c} is obstructed on this window")
    return alpha


def classical_part(alpha):
    """The map T: alpha |-> alpha at h = 0."""
    return alpha.at_hbar_zero()


def reduce_mod_image(inst, s, pcd=None):
    """Coordinates of the class of a Delta-cocycle in the representative basis."""
    pcd = pcd or full_perturbation(inst, Contraction(inst))
    if not inst.delta(s).is_zero():
        raise GradedError(f"{s} is not a Delta-cocycle")
    return pcd.pi(s)


def check_degeneration(inst, n_poly=None, pcd=None):
    """Every Delta_0 representative lifts (pi A iota = 0) and T S = id."""
    cd = pcd.base if pcd is not None else Contraction(inst, n_poly)
    pcd = pcd or full_perturbation(inst, cd)
    ring = inst.ring
    rep = Report(f"degeneration[{inst.name}]", inst.trunc.as_dict())
    bad = []
    for i, c in enumerate(cd.representatives(ring)):
        dh = pcd.d_H(i, ring)
        if any(not x.is_zero() for x in dh):
            bad.append((cd.labels[i], "pi A iota != 0"))
            continue
        try:
            alpha = lift_cocycle(inst, c, pcd)
        except ObstructionError as exc:
            bad.append((cd.labels[i], str(exc)))
            continue
        if not (classical_part(alpha) - c).is_zero():
            bad.append((cd.labels[i], "T(S(c)) != c"))
            continue
        coords = reduce_mod_image(inst, alpha, pcd)
        unit = [x for x in pcd.unit_coords(i, ring)]
        if any(not (a - b).is_zero() for a, b in zip(coords, unit)):
            bad.append((cd.labels[i], "reduce(S(c)) != [c]"))
    hb = min(inst.trunc.n_hbar, ring.hbar_cap)
    rep.add("lifts_exist", not bad,
            certified={"representatives": cd.rank, "poly_degree": cd.n_poly, "hbar_order": hb},
            witness={lab: why for lab, why in bad})
    rep.add("T_S_identity", not bad, certified={"representatives": cd.rank})
    rep.data["representatives"] = list(cd.labels)
    return rep
