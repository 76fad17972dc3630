"""End-to-end reproduction of the A1 example as a single report."""

from __future__ import annotations

from .fixtures import (a1_pairing_formula, as_scalar, build_a1, build_a2,
                       connected_cumulant_oracle, double_factorial, non_trace_certificate,
                       wick_moment)
from .graded import Generator
from .hodge import Contraction, check_degeneration, cohomology, full_perturbation, \
    lift_cocycle, reduce_mod_image
from .mc import (mc_residual, pushforward_mc, solve_mc_universal, twist_morphism,
                 twist_operator, twisted_contraction)
from .morphisms import cumulant_n, quasi_iso_check, verify_morphism
from .operators import verify_bv
from .report import Report
from .vhs import (FlatConnection, check_pairing_compatibility, check_twisted_compatibility,
                  good_basis_check, miniversality_check, polarization_check,
                  residue_symplectic, verify_flatness, verify_pairing_axioms)


def demo_a1(trunc, arity_max=5):
    fx = build_a1(trunc)
    A, B, f = fx.source, fx.target, fx.f
    ring = A.ring
    sring = ring.scalar_ring()
    rep = Report("demo-a1", trunc.as_dict())
    tc = min(trunc.n_poly, 10)

    rep.extend(verify_bv(A, 4, tuple_cutoff=min(tc, 8)), "A1_")
    rep.extend(verify_bv(B, 4), "B_")
    rep.extend(verify_morphism(f, n_max=arity_max, tuple_cutoff=tc), "f_")
    rep.extend(quasi_iso_check(f), "f_")

    t = [ring.monomial((k, 0)) for k in range(trunc.n_poly + 1)]
    kmax = min(trunc.n_hbar, trunc.n_poly // 2)
    bad = []
    moments = {}
    for k in range(kmax + 1):
        fk = f.component(k, t[2 * k]).shift(k)
        wm = as_scalar(wick_moment(k), fk.ring)
        closed = fk.ring.scalar((-1) ** k * double_factorial(2 * k - 1), k)
        moments[f"f_{k}(t^{2 * k}) h^{k}"] = str(fk)
        if not ((fk - wm).is_zero() and (fk - closed).is_zero()):
            bad.append(k)
    rep.add("wick_moments", not bad, certified={"k_max": kmax},
            witness={"k": str(bad)} if bad else {})
    rep.data["moments"] = moments

    sl = cohomology(A, "delta0")
    ok = sl.betti.get(0) == 1 and sl.betti.get(-1) == 0
    rep.add("betti_delta0", ok, certified={"betti": {str(d): b for d, b in sl.betti.items()}})
    slh = cohomology(A, "delta")
    rep.add("delta_cohomology_free", slh.extra["free_over_truncated_hbar"],
            certified={"generators": slh.extra["module_generators"]})

    cd = Contraction(A)
    pcd = full_perturbation(A, cd)
    bad = []
    reductions = {}
    for k in range((trunc.n_poly - 1) // 2 + 1):
        ev = reduce_mod_image(A, t[2 * k], pcd)[0]
        od = reduce_mod_image(A, t[2 * k + 1], pcd)[0]
        want = sring.scalar((-1) ** k * double_factorial(2 * k - 1), k)
        reductions[f"t^{2 * k}"] = str(ev)
        reductions[f"t^{2 * k + 1}"] = str(od)
        if not ((ev - want).is_zero() and od.is_zero()):
            bad.append(k)
    rep.add("reduce_mod_image", not bad, certified={"k_max": (trunc.n_poly - 1) // 2},
            witness={"k": str(bad)} if bad else {})
    rep.data["reductions"] = reductions
    rep.data["lift(t^2)"] = str(lift_cocycle(A, t[2], pcd))
    rep.extend(check_degeneration(A, pcd=pcd), "A1_")
    rep.extend(check_degeneration(B), "B_")

    pa, pb = fx.pairing_source, fx.pairing_target
    rep.extend(verify_pairing_axioms(pa.table), "A1_")
    rep.extend(verify_pairing_axioms(pb.table), "B_")
    rep.extend(good_basis_check(pa.table), "A1_")
    rep.extend(polarization_check(pa.table, 3), "A1_")
    one = sring.one()
    rep.data["omega(h^-1[1],[1])"] = str(residue_symplectic(pa.table, [sring.hbar(-1)], [one]))
    lmax = min(4, trunc.n_poly // 2)
    bad = []
    for a in range(2 * lmax + 1):
        for b in range(2 * lmax + 1):
            want = as_scalar(a1_pairing_formula(a, b), sring)
            if not (pa(t[a], t[b]) - want).is_zero():
                bad.append((a, b))
    rep.add("A1_pairing_formula", not bad, certified={"max_exponent": 2 * lmax},
            witness={"pairs": str(bad)} if bad else {})
    comp = check_pairing_compatibility(f, pa, pb, t[: 2 * lmax + 1])
    rep.extend(comp)
    rep.data["(t^2,t^2)"] = str(pa(t[2], t[2]))
    cert = non_trace_certificate(lmax)
    rep.add("A1_not_a_trace_pairing", cert["infeasible"],
            certified={"rank": cert["rank"], "augmented_rank": cert["augmented_rank"]},
            witness=cert["conflict"] or {})

    bad = []
    for total in range(1, 9):
        for prof in _profiles(total, 6):
            args = [t[a] for a in prof]
            got = cumulant_n(f, args, check=False)
            want = as_scalar(connected_cumulant_oracle(prof), got.ring)
            if not (got - want).is_zero():
                bad.append(prof)
    rep.add("connected_matching_oracle", not bad, certified={"total_legs": 8},
            witness={"profiles": str(bad[:3])} if bad else {})

    gamma = solve_mc_universal(A, cd)
    rep.data["gamma_A1"] = gamma.to_dict()
    res = mc_residual(A, gamma)
    rep.add("A1_mc_residual", res.is_zero(), certified={"u_order": trunc.n_param})
    rep.extend(miniversality_check(gamma.value, cd), "A1_")
    a2 = build_a2(trunc).source
    cd2 = Contraction(a2)
    gamma2 = solve_mc_universal(a2, cd2)
    rep.data["gamma_A2"] = gamma2.to_dict()
    rep.add("A2_mc_residual", mc_residual(a2, gamma2).is_zero())
    rep.extend(miniversality_check(gamma2.value, cd2), "A2_")
    rep.extend(check_degeneration(a2), "A2_")

    g = gamma.value
    _, sub = twist_operator(A, g)
    rep.extend(sub, "A1_u1_op_")
    gb, sub = pushforward_mc(f, g)
    rep.extend(sub, "A1_u1_push_")
    _, sub = twist_morphism(f, g, gb)
    rep.extend(sub, "A1_u1_mor_")

    tw = twisted_contraction(A, g, cd)
    conn = FlatConnection(A, g, tw)
    pu = pa.transported(g)
    gsr = g.ring.scalar_ring()
    u = gsr.gen(g.ring.params[0].name)

    def pair_coords(s, s2):
        return pu(tw.iota(s, g.ring), tw.iota(s2, g.ring))
    rep.extend(verify_flatness(pair_coords, conn, [[gsr.one()], [u], [gsr.hbar(1)]]), "A1_")
    rep.extend(check_twisted_compatibility(f, pa, pb, g, gb, t[:5]), "A1_")

    pring = ring.with_params([Generator("u", 0, 0, "param")])
    gt = pring.gen("u") * pring.embed(t[1])
    _, sub = twist_operator(A, gt)
    rep.extend(sub, "A1_ut_op_")
    gbt, sub = pushforward_mc(f, gt)
    rep.extend(sub, "A1_ut_push_")
    _, sub = twist_morphism(f, gt, gbt)
    rep.extend(sub, "A1_ut_mor_")
    return rep


def _profiles(total, max_len):
    """Non-decreasing tuples of positive integers summing to ``total``."""
    out = []

    def rec(rest, lo, acc):
        if rest == 0:
            out.append(tuple(acc))
            return
        if len(acc) == max_len:
            return
        for a in range(lo, rest + 1):
            rec(rest - a, a, acc + [a])
    rec(total, 1, [])
    return out
