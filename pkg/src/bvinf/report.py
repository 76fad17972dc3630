"""Verification reports: one structured document per run."""

import json
from dataclasses import dataclass, field

FORMAT = "bvinf-report/1"


@dataclass
class Check:
    name: str
    status: str  # "pass" | "fail" | "skipped"
    certified: dict = field(default_factory=dict)
    witness: dict = field(default_factory=dict)
    note: str = ""

    def to_dict(self):
        d = {"name": self.name, "status": self.status}
        if self.certified:
            d["certified"] = self.certified
        if self.witness:
            d["witness"] = self.witness
        if self.note:
            d["note"] = self.note
        return d


@dataclass
class Report:
    suite: str
    truncation: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def add(self, name, passed, certified=None, witness=None, note=""):
        status = "skipped" if passed is None else ("pass" if passed else "fail")
        chk = Check(name, status, certified or {}, witness or {}, note)
        self.checks.append(chk)
        return chk

    def extend(self, other, prefix=""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.status, c.certified, c.witness, c.note))
        for k, v in other.data.items():
            self.data[prefix + k] = v
        return self

    @property
    def ok(self):
        return all(c.status != "fail" for c in self.checks)

    def failures(self):
        return [c for c in self.checks if c.status == "fail"]

    def check(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        return {
            "format": FORMAT,
            "suite": self.suite,
            "ok": self.ok,
            "truncation": self.truncation,
            "checks": [c.to_dict() for c in self.checks],
            "data": self.data,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def render_text(doc):
    """Human-readable rendering of a report document (a dict)."""
    lines = [f"suite: {doc['suite']}  [{'OK' if doc['ok'] else 'FAILED'}]"]
    if doc.get("truncation"):
        tr = ", ".join(f"{k}={v}" for k, v in sorted(doc["truncation"].items()))
        lines.append(f"truncation: {tr}")
    for c in doc["checks"]:
        line = f"  [{c['status'].upper():7}] {c['name']}"
        if c.get("certified"):
            line += "  (" + ", ".join(f"{k}={v}" for k, v in sorted(c["certified"].items())) + ")"
        lines.append(line)
        if c.get("note"):
            lines.append(f"            {c['note']}")
        for k, v in sorted(c.get("witness", {}).items()):
            lines.append(f"            {k}: {v}")
    for k, v in sorted(doc.get("data", {}).items()):
        if isinstance(v, dict):
            lines.append(f"{k}:")
            for kk, vv in sorted(v.items()):
                lines.append(f"  {kk}: {vv}")
        else:
            lines.append(f"{k}: {v}")
    return "\n".join(lines)
