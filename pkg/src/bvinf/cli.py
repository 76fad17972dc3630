"""Command-line front end: run verification suites over config files."""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .config import ConfigError, _read, load_algebra, load_morphism, load_pairing
from .graded import Generator, GradedError, Truncation, parse_element
from .report import Report, render_text

EXIT_OK, EXIT_FAIL, EXIT_PARSE = 0, 1, 2


def _overrides(args):
    return {"n_poly": args.n_poly, "n_hbar": args.n_hbar, "n_param": args.n_param}


def _emit(report, args):
    doc = report.to_dict()
    text = (json.dumps(doc, indent=2, sort_keys=True) if args.format == "json"
            else render_text(doc)) + "\n"
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return EXIT_OK if report.ok else EXIT_FAIL


def _tuple_cutoff(args, inst):
    return args.tuple_cutoff if args.tuple_cutoff is not None else min(inst.trunc.n_poly, 8)


# -- subcommands ----------------------------------------------------------------

def cmd_check_bv(args):
    from .operators import check_l_infinity, verify_bv
    inst = load_algebra(args.config, _overrides(args))
    rep = Report(f"check-bv[{inst.name}]", inst.trunc.as_dict())
    rep.extend(verify_bv(inst, n_max=args.arity_max or 4, tuple_cutoff=_tuple_cutoff(args, inst)))
    if rep.ok:
        rep.extend(check_l_infinity(inst, arity_max=min(args.arity_max or 3, 3),
                                    cutoff=min(inst.trunc.n_poly, 5)))
    return rep


def cmd_check_morphism(args):
    from .morphisms import quasi_iso_check, verify_morphism
    from .operators import verify_bv
    f = load_morphism(args.config, _overrides(args))
    rep = Report(f"check-morphism[{f.name}]", f.source.trunc.as_dict())
    tc = _tuple_cutoff(args, f.source)
    rep.extend(verify_bv(f.source, 4, tuple_cutoff=tc), "source_")
    rep.extend(verify_bv(f.target, 4, tuple_cutoff=tc), "target_")
    rep.extend(verify_morphism(f, n_max=args.arity_max or 4, tuple_cutoff=tc))
    rep.extend(quasi_iso_check(f))
    return rep


def cmd_solve_mc(args):
    from .hodge import Contraction, ObstructionError, check_degeneration
    from .mc import mc_residual, solve_mc_universal
    from .vhs import miniversality_check
    inst = load_algebra(args.config, _overrides(args))
    cd = Contraction(inst)
    basis = [b.strip() for b in args.basis.split(",")] if args.basis else None
    rep = Report(f"solve-mc[{inst.name}]", inst.trunc.as_dict())
    rep.extend(check_degeneration(inst, pcd=None))
    try:
        gamma = solve_mc_universal(inst, cd, basis=basis)
    except ObstructionError as exc:
        rep.add("solved", False, witness={"obstruction": str(exc)})
        return rep
    res = mc_residual(inst, gamma)
    rep.add("residual_zero", res.is_zero(), certified={"u_order": inst.trunc.n_param},
            witness={} if res.is_zero() else {"residual": str(res)})
    if basis is None or sorted(basis) == sorted(cd.labels):
        rep.extend(miniversality_check(gamma.value, cd))
    rep.data["mc_element"] = gamma.to_dict()
    return rep


def _load_gamma(args, ring):
    if args.gamma_file:
        doc, _ = _read(args.gamma_file)
        params = [(p["name"], int(p.get("degree", 0))) for p in doc.get("params", [])]
        text = doc["gamma"]
    else:
        if not args.gamma:
            raise ConfigError("twist needs --gamma or --gamma-file")
        text = args.gamma
        params = []
        for item in (args.params or "u:0").split(","):
            name, _, deg = item.partition(":")
            params.append((name.strip(), int(deg or 0)))
    pring = ring.with_params([Generator(n, d, 0, "param") for n, d in params])
    return parse_element(text, pring)


def cmd_twist(args):
    from .mc import mc_residual, pushforward_mc, twist_morphism, twist_operator
    doc, _ = _read(args.config)
    f = None
    if "source" in doc:
        f = load_morphism(args.config, _overrides(args))
        inst = f.source
    else:
        inst = load_algebra(args.config, _overrides(args))
    gamma = _load_gamma(args, inst.ring)
    rep = Report(f"twist[{inst.name}]", inst.trunc.as_dict())
    res = mc_residual(inst, gamma)
    rep.add("gamma_is_mc", res.is_zero(), witness={} if res.is_zero() else {"residual": str(res)})
    rep.data["gamma"] = str(gamma)
    if not res.is_zero():
        return rep
    _, sub = twist_operator(inst, gamma, n_max=args.arity_max or 3)
    rep.extend(sub)
    if f is not None:
        gb, sub = pushforward_mc(f, gamma)
        rep.extend(sub)
        if sub.ok:
            _, sub = twist_morphism(f, gamma, gb, n_max=min(args.arity_max or 3, 3))
            rep.extend(sub)
    return rep


def _closed_monomials(inst, cutoff):
    ring = inst.ring
    out = []
    for e in inst.monomials(cutoff):
        x = ring.monomial(e)
        if inst.delta(x).is_zero():
            out.append(x)
    return out


def cmd_pairing(args):
    from .vhs import (ElementPairing, check_pairing_compatibility, good_basis_check,
                      polarization_check, verify_pairing_axioms)
    inst, table = load_pairing(args.config, _overrides(args))
    rep = Report(f"pairing[{inst.name}]", inst.trunc.as_dict())
    rep.extend(verify_pairing_axioms(table))
    rep.extend(good_basis_check(table))
    rep.extend(polarization_check(table, args.pole_window))
    rep.data["table"] = table.to_dict()
    if args.target_pairing or args.morphism:
        if not (args.target_pairing and args.morphism):
            raise ConfigError("compatibility needs both --morphism and a target pairing")
        f = load_morphism(args.morphism, _overrides(args), source=inst)
        _, tb = load_pairing(args.target_pairing, inst=f.target)
        pa = ElementPairing(inst, table)
        pb = ElementPairing(f.target, tb)
        elements = _closed_monomials(inst, min(inst.trunc.n_poly, 8))
        rep.extend(check_pairing_compatibility(f, pa, pb, elements))
    return rep


def cmd_demo_a1(args):
    from .demo import demo_a1
    trunc = Truncation(n_poly=args.n_poly or 12, n_hbar=args.n_hbar or 6,
                       n_param=args.n_param or 5)
    return demo_a1(trunc, arity_max=args.arity_max or 5)


COMMANDS = {
    "check-bv": cmd_check_bv,
    "check-morphism": cmd_check_morphism,
    "solve-mc": cmd_solve_mc,
    "twist": cmd_twist,
    "pairing": cmd_pairing,
    "demo-a1": cmd_demo_a1,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n-hbar", type=int, help="hbar truncation order")
    common.add_argument("--n-poly", type=int, help="polynomial degree cutoff")
    common.add_argument("--n-param", type=int, help="parameter (u) truncation order")
    common.add_argument("--arity-max", type=int, help="largest arity checked")
    common.add_argument("--tuple-cutoff", type=int,
                        help="total polynomial degree of argument tuples")
    common.add_argument("--report", help="also write the report to this path")
    common.add_argument("--format", choices=("json", "text"), default="json")

    p = argparse.ArgumentParser(prog="bvinf", description=__doc__)
    p.add_argument("--version", action="version", version=f"bvinf {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check-bv", parents=[common], help="verify the BV-infinity axioms")
    s.add_argument("config")
    s = sub.add_parser("check-morphism", parents=[common], help="verify a BV-infinity morphism")
    s.add_argument("config")
    s = sub.add_parser("solve-mc", parents=[common], help="solve the MC equation")
    s.add_argument("config")
    s.add_argument("--basis", help="comma-separated representative labels")
    s = sub.add_parser("twist", parents=[common], help="twist by an MC element")
    s.add_argument("config", help="algebra or morphism config")
    s.add_argument("--gamma", help="MC element in the element grammar")
    s.add_argument("--params", help="parameters as name:degree, comma-separated")
    s.add_argument("--gamma-file", help="TOML file with 'gamma' and 'params'")
    s = sub.add_parser("pairing", parents=[common], help="pairing axioms and compatibility")
    s.add_argument("config", help="pairing config of the source")
    s.add_argument("target_pairing", nargs="?", help="pairing config of the target")
    s.add_argument("--morphism", help="morphism config for the compatibility check")
    s.add_argument("--pole-window", type=int, default=3)
    sub.add_parser("demo-a1", parents=[common], help="reproduce the A1 example")
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = COMMANDS[args.command](args)
    except (ConfigError, GradedError, KeyError, OSError) as exc:
        sys.stderr.write(f"bvinf: error: {exc}\n")
        return EXIT_PARSE
    return _emit(report, args)


if __name__ == "__main__":
    sys.exit(main())
