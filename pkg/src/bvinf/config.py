"""TOML configuration files for algebras, morphisms and pairing tables."""

from __future__ import annotations

import sys
from dataclasses import replace
from importlib import resources
from pathlib import Path

from .graded import Algebra, GradedError, Truncation, parse_element
from .morphisms import BVMorphism, LinearRuleMap
from .operators import BVAlgebra, HbarOperator, PolyDiffOperator

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class ConfigError(ValueError):
    pass


def data_path(name):
    """Path of a shipped fixture config."""
    return Path(str(resources.files("bvinf") / "data" / name))


def _read(path):
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh), path
    except FileNotFoundError as exc:
        raise ConfigError(f"config not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _resolve(ref, base):
    p = Path(ref)
    return p if p.is_absolute() else base.parent / p


def truncation_from(doc, overrides=None):
    t = doc.get("truncation", {})
    trunc = Truncation(n_poly=t.get("n_poly", 12), n_hbar=t.get("n_hbar", 6),
                       n_param=t.get("n_param", 5), margin=t.get("margin"))
    for k, v in (overrides or {}).items():
        if v is not None:
            trunc = replace(trunc, **{k: v})
    return trunc


def algebra_from_dict(doc, overrides=None):
    try:
        gens = [(g["name"], int(g["degree"])) for g in doc.get("generators", [])]
        algebra = Algebra(gens, m=int(doc.get("m", 1)), name=doc.get("name", ""))
        trunc = truncation_from(doc, overrides)
        comps = []
        for k, text in enumerate(doc.get("delta", [])):
            want = 1 + k * (algebra.m - 1)
            comps.append(PolyDiffOperator.parse(text, algebra, degree=want))
        if not comps:
            comps = [PolyDiffOperator(algebra, [], degree=1)]
        return BVAlgebra(algebra, HbarOperator(comps, algebra), trunc)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed algebra config: {exc}") from exc
    except GradedError as exc:
        raise ConfigError(str(exc)) from exc


def load_algebra(path, overrides=None):
    doc, _ = _read(path)
    return algebra_from_dict(doc, overrides)


def _monomial(text, ring):
    x = parse_element(text, ring)
    if len(x.terms) != 1:
        raise ConfigError(f"rule key {text!r} is not a single monomial")
    (k, e), c = next(iter(x.terms.items()))
    if k or c != 1:
        raise ConfigError(f"rule key {text!r} must be a bare monomial")
    return e


def morphism_from_dict(doc, source, target):
    try:
        sring = source.algebra.ring(source.trunc)
        tring = target.algebra.ring(target.trunc)
        ks = [int(r["k"]) for r in doc.get("rules", [])]
        tables = [dict() for _ in range(max(ks, default=0) + 1)]
        for r in doc.get("rules", []):
            for key, val in r["map"].items():
                tables[int(r["k"])][_monomial(key, sring)] = parse_element(val, tring)
        rules = LinearRuleMap(source.algebra, target.algebra, tables,
                              int(doc["cutoff"]), bool(doc.get("complete", False)))
        return BVMorphism(source, target, rules, doc.get("name", ""))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed morphism config: {exc}") from exc
    except GradedError as exc:
        raise ConfigError(str(exc)) from exc


def load_morphism(path, overrides=None, source=None, target=None):
    doc, p = _read(path)
    source = source or load_algebra(_resolve(doc["source"], p), overrides)
    target = target or load_algebra(_resolve(doc["target"], p), overrides)
    return morphism_from_dict(doc, source, target)


def pairing_from_dict(doc, inst):
    from .vhs import PairingTable
    try:
        ring = inst.algebra.ring(inst.trunc)
        sring = ring.scalar_ring()
        basis = [parse_element(b, ring) for b in doc["basis"]]
        entries = {}
        for key, val in doc.get("entries", {}).items():
            i, j = (int(x) - 1 for x in key.split(","))
            entries[(i, j)] = parse_element(val, sring)
        return PairingTable(list(doc["basis"]), [b.degree() for b in basis], entries,
                            sring, sesquilinear=bool(doc.get("sesquilinear", True)))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed pairing config: {exc}") from exc


def load_pairing(path, overrides=None, inst=None):
    doc, p = _read(path)
    inst = inst or load_algebra(_resolve(doc["algebra"], p), overrides)
    return inst, pairing_from_dict(doc, inst)
