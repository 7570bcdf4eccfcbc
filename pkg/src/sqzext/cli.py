"""Command-line driver: ``sqzext {check,classify,equiv,scheme-equiv,axioms}``.

Exit codes: 0 pass, 1 verified failure, 2 operational error (bad input,
budget exhausted).  Reports are deterministic for a fixed config and seed;
wall-clock time is only included with ``--timing``.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import asdict, dataclass

from . import cotors, exal, finalg, finspace, grouptor, modalg, sheafspace
from .corpus import corrupt_cogroup, corrupt_group_object, drop_second_summand, random_pairs
from .equivfun import verify_equivalence
from .report import SIZE_CAP, STEP_BUDGET, Budget, BudgetExceeded, Report


class SpecSyntaxError(ValueError):
    pass


# --- builtin object specs ---------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text, self.pos = text, 0

    def error(self, msg: str):
        raise SpecSyntaxError(f"{msg} at position {self.pos} in {self.text!r}")

    def take(self, word: str) -> bool:
        if self.text.startswith(word, self.pos):
            self.pos += len(word)
            return True
        return False

    def number(self) -> int:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected a number")
        return int(self.text[start:self.pos])

    def ring(self) -> finalg.FiniteRing:
        if self.take("zmod:"):
            n = self.number()
            if n < 1:
                self.error("zmod needs n >= 1")
            return finalg.make_cyclic_ring(n)
        if self.take("prod:"):
            left = self.ring()
            if not self.take(","):
                self.error("expected ','")
            right = self.ring()
            return finalg.product_ring(left, right)[0]
        self.error("expected 'zmod:' or 'prod:'")

    def module(self, A: finalg.FiniteRing) -> modalg.FiniteModule:
        if self.take("zero"):
            return modalg.zero_module(A)
        if self.take("regular"):
            return modalg.regular_module(A)
        if self.take("zmod:"):
            return modalg.cyclic_module(A, self.number())
        if self.take("prod:"):
            left = self.module(A)
            if not self.take(","):
                self.error("expected ','")
            return modalg.direct_sum(left, self.module(A))
        self.error("expected 'zero', 'regular', 'zmod:' or 'prod:'")

    def done(self):
        if self.pos != len(self.text):
            self.error("trailing input")


def parse_ring_spec(text: str) -> finalg.FiniteRing:
    p = _Parser(text)
    R = p.ring()
    p.done()
    return R


def parse_module_spec(text: str, A: finalg.FiniteRing) -> modalg.FiniteModule:
    p = _Parser(text)
    M = p.module(A)
    p.done()
    return M


def parse_spec_base(text: str) -> sheafspace.SpecData:
    if not text.startswith("spec-ring:"):
        raise SpecSyntaxError(f"expected 'spec-ring:<ring spec>', got {text!r}")
    return sheafspace.spec_finite_ring(parse_ring_spec(text[len("spec-ring:"):]))


# --- JSON inputs ------------------------------------------------------------


def detect_kind(d: dict) -> str:
    if "kind" in d:
        return d["kind"]
    keys = set(d)
    if {"points", "opens"} <= keys:
        return "space"
    if "cmap" in keys:
        return "morphism"
    if {"space", "sections", "res"} <= keys:
        return "sheaf"
    if {"rings", "sections", "res"} <= keys:
        return "module-sheaf"
    if {"f", "alpha"} <= keys:
        return "thickening" if isinstance(d["alpha"], dict) else "extension"
    if {"f", "tau"} <= keys:
        return "cotorsor" if isinstance(d["tau"], dict) else "torsor"
    if {"ring", "act"} <= keys:
        return "module"
    if {"source", "target", "map"} <= keys:
        return "hom"
    if {"add", "mul"} <= keys:
        return "ring"
    raise ValueError(f"cannot tell what object this is (keys: {sorted(keys)})")


def check_object(d: dict) -> tuple[str, Report]:
    kind = detect_kind(d)
    if kind == "ring":
        return kind, finalg.verify_ring(finalg.ring_from_json(d))
    if kind == "hom":
        return kind, finalg.verify_hom(finalg.hom_from_json(d))
    if kind == "module":
        return kind, modalg.verify_module(modalg.module_from_json(d))
    if kind == "extension":
        return kind, exal.verify_extension(exal.extension_from_json(d))
    if kind == "torsor":
        return kind, grouptor.verify_torsor(grouptor.torsor_from_json(d))
    if kind == "space":
        return kind, finspace.verify_space(finspace.space_from_json(d))
    if kind == "sheaf":
        return kind, sheafspace.verify_sheaf(sheafspace.sheaf_from_json(d))
    if kind == "module-sheaf":
        return kind, sheafspace.verify_sheaf(sheafspace.module_sheaf_from_json(d))
    if kind == "morphism":
        return kind, sheafspace.verify_morphism(sheafspace.morphism_from_json(d))
    if kind == "thickening":
        return kind, cotors.verify_thickening(cotors.thickening_from_json(d))
    if kind == "cotorsor":
        C = cotors.cotorsor_from_json(d)
        rep = cotors.verify_cotorsor(C)
        rep.extend(cotors.verify_cotorsor_alt(C), "alternative.")
        return kind, rep
    raise ValueError(f"unknown object kind {kind!r}")


# --- commands ---------------------------------------------------------------


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    base: str | None = None
    module: str | None = None
    budget: int = STEP_BUDGET
    cap: int = SIZE_CAP
    mode: str = "spec"
    seed: int = 0
    count: int = 20
    out: str | None = None
    format: str = "json"
    timing: bool = False

    def __post_init__(self):
        if self.budget <= 0 or self.cap <= 0:
            raise ValueError("budget and cap must be positive")
        if self.mode not in ("spec", "ringed"):
            raise ValueError("mode must be spec or ringed")

    def new_budget(self) -> Budget:
        return Budget(self.budget, self.cap)

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("out")
        d.pop("format")
        d.pop("timing")
        return d


def _report_checks(rep: Report) -> list[dict]:
    return [c.to_dict() for c in rep.checks]


def _ensure_witness(payload: dict) -> dict:
    # a failing report always names what failed
    if payload["status"] == "fail" and "witnesses" not in json.dumps(payload) and "witness" not in json.dumps(payload):
        payload["witnesses"] = payload.get("failed", ["unspecified"])
    return payload


def cmd_check(cfg: RunConfig) -> dict:
    if not cfg.input:
        raise ValueError("check needs --input")
    with open(cfg.input, encoding="utf-8") as fh:
        d = json.load(fh)
    kind, rep = check_object(d)
    return {
        "kind": kind,
        "status": "pass" if rep.ok else "fail",
        "checks": _report_checks(rep),
        "failed": [c.name for c in rep.failures()],
    }


def _base_ring(cfg: RunConfig) -> finalg.FiniteRing:
    if not cfg.base:
        raise ValueError("--base is required")
    return parse_ring_spec(cfg.base)


def cmd_classify(cfg: RunConfig) -> dict:
    A = _base_ring(cfg)
    M = parse_module_spec(cfg.module or "zero", A)
    b = cfg.new_budget()
    cl_e = exal.classify_extensions(A, M, b)
    torsors = grouptor.enumerate_torsors(A, M, b)
    cl_t = grouptor.classify_torsors(torsors, b)
    ok = cl_e.count == cl_t.count
    out = {
        "status": "pass" if ok else "fail",
        "extensions": exal.classification_to_json(cl_e),
        "torsors": {
            "classes": [{"representative": grouptor.torsor_to_json(torsors[c[0]]), "members": len(c)} for c in cl_t.classes],
            "total": len(torsors),
        },
        "counts": {"extension_classes": cl_e.count, "torsor_classes": cl_t.count},
    }
    if not ok:
        out["witnesses"] = [{"class_counts": [cl_e.count, cl_t.count]}]
    return out


def cmd_equiv(cfg: RunConfig) -> dict:
    A = _base_ring(cfg)
    M = parse_module_spec(cfg.module or "zero", A)
    rep = verify_equivalence(A, M, cfg.new_budget())
    out = rep.to_dict()
    out["elapsed"] = rep.elapsed
    return out


def cmd_scheme_equiv(cfg: RunConfig) -> dict:
    if not cfg.base:
        raise ValueError("--base is required")
    spec = parse_spec_base(cfg.base)
    M = sheafspace.module_on_spec(spec, parse_module_spec(cfg.module or "zero", spec.ring))
    rep = cotors.verify_scheme_equivalence(spec.sheaf, M, cfg.new_budget())
    out = rep.to_dict()
    out["elapsed"] = rep.elapsed
    return out


COGROUP_CASES = (("zmod:2", "regular"), ("zmod:6", "regular"))


def cmd_axioms(cfg: RunConfig) -> dict:
    """Group objects on seeded random (A, M), cogroups on Spec instances, and corruptions."""
    rng = random.Random(cfg.seed)
    checks: list[dict] = []
    ok = True

    def record(name, passed, witness=None):
        nonlocal ok
        ok = ok and passed
        d = {"name": name, "verdict": "pass" if passed else "fail"}
        if witness is not None:
            d["witness"] = witness
        checks.append(d)

    for k, (A, M) in enumerate(random_pairs(cfg.seed, cfg.count, cfg.cap)):
        label = f"group[{k}] |A|={A.size} |M|={M.size}"
        G = grouptor.group_object(A, M)
        rep = grouptor.verify_group_object(G)
        record(label, rep.ok, [c.name for c in rep.failures()] or None)
        if G.base.total.size < 2:
            continue
        for t in range(3):
            bad, where = corrupt_group_object(G, rng)
            r = grouptor.verify_group_object(bad)
            fails = r.failures()
            record(f"{label} corruption[{t}] rejected", not r.ok and any(c.witness is not None for c in fails),
                   {"corruption": where, "caught_by": [c.to_dict() for c in fails][:1]})
    for base, mod in COGROUP_CASES:
        spec = sheafspace.spec_finite_ring(parse_ring_spec(base))
        Msh = sheafspace.module_on_spec(spec, parse_module_spec(mod, spec.ring))
        cg = sheafspace.cogroup_structure(spec.sheaf, Msh)
        label = f"cogroup[Spec {base}, {mod}]"
        rep = sheafspace.verify_cogroup(cg)
        record(label, rep.ok, [c.name for c in rep.failures()] or None)
        for t in range(3):
            bad, where = corrupt_cogroup(cg, rng)
            r = sheafspace.verify_cogroup(bad)
            fails = r.failures()
            record(f"{label} corruption[{t}] rejected", not r.ok and any(c.witness is not None for c in fails),
                   {"corruption": where, "caught_by": [c.to_dict() for c in fails][:1]})
        r = sheafspace.verify_cogroup(drop_second_summand(cg))
        counit = [c.to_dict() for c in r.failures() if "counit" in c.name]
        record(f"{label} dropped summand rejected by counit", bool(counit), counit[:1] or None)
    return {"status": "pass" if ok else "fail", "checks": checks}


COMMANDS = {
    "check": cmd_check,
    "classify": cmd_classify,
    "equiv": cmd_equiv,
    "scheme-equiv": cmd_scheme_equiv,
    "axioms": cmd_axioms,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sqzext", description="Exhaustive checks for square-zero extensions, torsors and cotorsors.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--input")
        s.add_argument("--base", help="ring spec (zmod:n, prod:R,S) or spec-ring:<ring spec>")
        s.add_argument("--module", help="module spec (zero, regular, zmod:n, prod:M,N)")
        s.add_argument("--budget", type=int, default=STEP_BUDGET)
        s.add_argument("--cap", type=int, default=SIZE_CAP)
        s.add_argument("--mode", choices=["spec", "ringed"], default="spec")
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--count", type=int, default=20, help="random pairs for axioms")
        s.add_argument("--out")
        s.add_argument("--format", choices=["json", "text"], default="json")
        s.add_argument("--timing", action="store_true", help="include wall-clock time (breaks byte reproducibility)")
    return p


def _text(payload: dict) -> str:
    lines = [f"{payload['command']}: {payload['status']}"]
    for c in payload.get("checks", []):
        w = f"  witness={json.dumps(c['witness'], sort_keys=True)}" if "witness" in c else ""
        lines.append(f"  [{c['verdict']}] {c['name']}{w}")
    for k in ("faithful", "full", "ess_surj", "hom_counts", "round_trips", "lemmas", "five_lemma"):
        if k in payload:
            lines.append(f"  {k}: {payload[k]['verdict']}")
    if "counts" in payload:
        lines.append(f"  counts: {json.dumps(payload['counts'], sort_keys=True)}")
    if "elapsed" in payload:
        lines.append(f"  elapsed: {payload['elapsed']} s")
    if "error" in payload:
        lines.append(f"  error: {payload['error']}")
    return "\n".join(lines) + "\n"


def run(cfg: RunConfig) -> tuple[int, dict]:
    t0 = time.perf_counter()
    try:
        payload = COMMANDS[cfg.command](cfg)
        code = 0 if payload["status"] == "pass" else 1
    except json.JSONDecodeError as exc:
        payload, code = {"status": "error", "error": f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"}, 2
    except (BudgetExceeded, SpecSyntaxError, ValueError, KeyError, TypeError, OSError) as exc:
        payload, code = {"status": "error", "error": f"{type(exc).__name__}: {exc}"}, 2
    payload.pop("elapsed", None)
    if cfg.timing:
        payload["elapsed"] = round(time.perf_counter() - t0, 3)
    payload["command"] = cfg.command
    payload["config"] = cfg.echo()
    return code, _ensure_witness(payload)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(**vars(args))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    code, payload = run(cfg)
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n" if cfg.format == "json" else _text(payload)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
