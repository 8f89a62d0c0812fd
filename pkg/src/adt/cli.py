"""Command line entry point: ``adt SUBCOMMAND ...``.

Exit codes: 0 success, 1 a check failed, 2 usage or parse error, 3 resource or
budget exhausted.  Check reports are JSON lines, one object per check.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Any, Optional, Sequence

from . import corpus, sexp
from .algebra import (
    BUILTINS, Algebra, Bounds, builtin_signature, load_algebra, sample_value, satisfies, show_value,
)
from .approx import (
    check_fast_approx, constant_sequence, exp_oracle, maclaurin_modulus, modulus_to_fast,
    sequence_from_derivation,
)
from .compiler import (
    SpecSet, array_axioms, compile_mupr_spec, compile_pr_spec, count_report, eliminate_bu,
    nstd_axioms, parse_spec, print_spec, spec_algebra,
)
from .engine import initial_model
from .errors import AdtError, ExtractionError, ResourceError
from .extractor import ExtractionTask, extract_value
from .interpreter import run, universal_eval
from .rng import SplitMix64
from .schemes import Derivation, encode, parse_derivation
from .syntax import Equation, Signature, parse_formula, parse_signature, print_term, star_signature

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# input helpers


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def load_signature(ref: str) -> Signature:
    name = ref.partition(":")[0]
    if name in BUILTINS:
        return builtin_signature(name)
    if os.path.exists(ref):
        return parse_signature(_read(ref))
    p = corpus.path(ref if ref.endswith(".sig") else ref + ".sig")
    if os.path.exists(p):
        return parse_signature(_read(p))
    raise UsageError(f"unknown signature {ref!r}")


def load_derivation(ref: str, alg: Optional[str]) -> tuple[Derivation, str]:
    """A .der path or a bundled corpus name; returns the derivation and the algebra name used."""
    if os.path.exists(ref):
        text = _read(ref)
        stem = os.path.splitext(os.path.basename(ref))[0]
    elif ref in corpus.SIGNATURE_OF:
        text = corpus.text(ref)
        stem = ref
    else:
        raise UsageError(f"no derivation file or corpus entry {ref!r}")
    alg = alg or corpus.SIGNATURE_OF.get(stem, "N")
    return parse_derivation(load_signature(alg), text), alg


def parse_values(text: str, sorts: Sequence, A: Algebra) -> tuple:
    items = sexp.read_one(text)
    if not isinstance(items, list):
        items = [items]
    if len(items) != len(sorts):
        raise UsageError(f"expected {len(sorts)} arguments, got {len(items)}")
    return tuple(_value(x, s.name, A) for x, s in zip(items, sorts))


def _value(x: Any, sort: str, A: Algebra) -> Any:
    if isinstance(x, list):
        raise UsageError(f"cannot read argument {sexp.write(x)}")
    s = str(x)
    if sort == "bool":
        if s not in ("true", "false"):
            raise UsageError(f"expected a boolean, got {s}")
        return s == "true"
    if sort == "nat":
        if not s.isdigit():
            raise UsageError(f"expected a natural number, got {s}")
        return int(s)
    if sort in ("real", "intvl"):
        try:
            v = Fraction(s)
        except ValueError:
            raise UsageError(f"expected a number, got {s}") from None
        return float(v) if A.real_mode == "float" else v
    raise UsageError(f"cannot read values of sort {sort} from the command line")


def _json_value(v: Any) -> Any:
    if isinstance(v, bool) or isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    return show_value(v)


class Reporter:
    def __init__(self, out) -> None:
        self.out = out
        self.failed = False

    def emit(self, check: str, status: str, detail: Any = None, counterexample: Any = None) -> None:
        obj = {"check": check, "status": status, "detail": detail}
        if counterexample is not None:
            obj["counterexample"] = counterexample
        if status == "fail":
            self.failed = True
        self.out.write(json.dumps(obj, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# commands


def cmd_eval(a, out) -> int:
    d, algname = load_derivation(a.der, a.alg)
    A = load_algebra(a.alg or algname)
    args = parse_values(a.args, d.type.domain, A)
    r = run(d, A, args, a.fuel)
    if r.outcome == "value":
        out.write(show_value(r.value) + "\n")
        return EXIT_OK
    if r.outcome == "divergence":
        out.write(f"divergence at entry {r.site}\n")
        return EXIT_FAIL
    out.write(f"error: {r.error}\n")
    return EXIT_FAIL


def _compile(d: Derivation, mode: str, elim: Optional[str]) -> SpecSet:
    spec = compile_pr_spec(d) if mode == "pr" else compile_mupr_spec(d)
    if elim:
        spec = eliminate_bu(spec, elim)
    return spec


def cmd_compile(a, out) -> int:
    d, _ = load_derivation(a.der, a.alg)
    spec = _compile(d, a.mode, a.eliminate_bu)
    out.write(print_spec(spec, d.name or "spec") + "\n")
    return EXIT_OK


def cmd_eliminate_bu(a, out) -> int:
    spec = parse_spec(_read(a.spec))
    out.write(print_spec(eliminate_bu(spec, a.mode)) + "\n")
    return EXIT_OK


def cmd_arrax(a, out) -> int:
    sig = star_signature(load_signature(a.sig))
    ax = array_axioms(sig, True if a.include_equality else None)
    spec = SpecSet(sig, tuple(ax), tuple(["ArrAx"] * len(ax)))
    out.write(print_spec(spec, "arrax") + "\n")
    return EXIT_OK


def cmd_nstdax(a, out) -> int:
    sig = load_signature(a.sig)
    mode = "closed" if a.closed else "schematic"
    ax = nstd_axioms(sig, mode, a.depth, a.nat_cap)
    spec = SpecSet(sig, tuple(ax), tuple(["NStdAx"] * len(ax)))
    out.write(print_spec(spec, "nstdax") + "\n")
    return EXIT_OK


def _model_spec(a) -> SpecSet:
    spec = parse_spec(_read(a.spec))
    if a.nstdax:
        spec = spec.plus(nstd_axioms(spec.signature), "NStdAx")
    return spec


def cmd_model(a, out) -> int:
    spec = _model_spec(a)
    M = initial_model(spec, a.depth, a.nat_cap, mode=a.mode)
    rep = Reporter(out)
    flags = dict(M.flags)
    status = "pass" if M.consistent else "fail"
    rep.emit("model", status, {"flags": flags, "certified": M.certified,
                               "depth": a.depth, "nat_cap": a.nat_cap,
                               "result": "consistent" if M.consistent else "inconsistent"})
    if a.dump:
        for s in spec.signature.sorts:
            for t, size in M.classes(s):
                rep.emit("class", "info", {"sort": s, "rep": None if t is None else print_term(t), "size": size})
    for q in a.query or ():
        rc = _query(M, q, rep)
        if rc:
            rep.failed = True
    return EXIT_FAIL if rep.failed else EXIT_OK


def _query(M, text: str, rep: Reporter) -> int:
    phi = parse_formula(M.spec.signature, text)
    if not isinstance(phi, Equation):
        raise UsageError("queries are closed equations (= t1 t2)")
    ok = M.proves_equal(phi.lhs, phi.rhs)
    rep.emit("query", "pass" if ok else "fail", {"equation": text, "provable": ok})
    return 0 if ok else 1


def cmd_query(a, out) -> int:
    spec = _model_spec(a)
    M = initial_model(spec, a.depth, a.nat_cap, mode="lazy")
    rep = Reporter(out)
    _query(M, a.equation, rep)
    return EXIT_FAIL if rep.failed else EXIT_OK


def cmd_extract(a, out) -> int:
    if a.spec:
        spec = parse_spec(_read(a.spec))
        alg = a.alg or "N"
    else:
        d, alg = load_derivation(a.der, a.alg)
        spec = _compile(d, "mupr", None)
    A = load_algebra(alg)
    fn = a.fn or spec.target
    if fn is None:
        raise UsageError("no target symbol; pass --fn")
    f = spec.signature.funcs.get(fn)
    if f is None:
        raise UsageError(f"unknown function symbol {fn!r}")
    params = sexp.read_one(a.params) if a.params else []
    params = [p for p in (params if isinstance(params, list) else [params])]
    n_par = len(params)
    args = parse_values(a.args, f.domain[:f.arity - n_par], A)
    pvals = tuple(_value(p, s.name, A) for p, s in zip(params, f.domain[f.arity - n_par:]))
    r = extract_value(ExtractionTask(spec, fn, args, A, pvals), depth=a.depth, budget_ms=a.budget_ms)
    out.write(json.dumps({"check": "extract", "status": "pass",
                          "detail": {"term": print_term(r.term), "value": _json_value(r.value),
                                     "depth": r.depth}}, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_approx(a, out) -> int:
    d, alg = load_derivation(a.der, a.alg)
    A = load_algebra((a.alg or alg) + (":float" if ":" not in (a.alg or alg) else ""))
    if a.oracle != "exp":
        raise UsageError(f"unknown oracle {a.oracle!r}")
    seq = sequence_from_derivation(d, A)
    if a.modulus == "maclaurin":
        seq = modulus_to_fast(seq, maclaurin_modulus)
    elif a.modulus == "zero":
        seq = constant_sequence(0.0, "zero")
    r = check_fast_approx(seq, exp_oracle, a.samples, a.nmax, a.seed)
    rep = Reporter(out)
    det = r.as_dict()
    cex = None
    if r.violations:
        n, x, dist = r.violations[0]
        cex = {"n": n, "x": str(x), "d": float(dist)}
        det.pop("violations")
    rep.emit("fast-approx", "pass" if r.passed else "fail", det, cex)
    return EXIT_FAIL if rep.failed else EXIT_OK


def cmd_counts(a, out) -> int:
    spec = parse_spec(_read(a.spec))
    before = parse_spec(_read(a.before)) if a.before else None
    out.write(json.dumps({"check": "counts", "status": "pass", "detail": count_report(spec, before)},
                         sort_keys=True) + "\n")
    return EXIT_OK


def cmd_corpus_run(a, out) -> int:
    rep = Reporter(out)
    for name in sorted(corpus.SIGNATURE_OF):
        d = corpus.load(name)
        alg = corpus.SIGNATURE_OF[name]
        A = load_algebra(alg)
        rng = SplitMix64(a.seed ^ _stable_hash(name))
        bounds = Bounds(nat_max=min(corpus.nat_max(name), 8))
        fuel = 300
        rows = []
        for _ in range(a.samples):
            args = tuple(sample_value(A, s, rng, bounds) for s in d.type.domain)
            r = run(d, A, args, fuel)
            u = universal_eval(A, d.type, encode(d), args, fuel)
            if r != u:
                rep.emit(f"{name}:universal", "fail", None, [_json_value(v) for v in args])
            rows.append([[_json_value(v) for v in args], r.outcome, _json_value(r.value)])
        rep.emit(f"{name}:run", "pass", {"code_bits": encode(d).bit_length(), "samples": rows})
        spec = compile_mupr_spec(d)
        if not d.uses_mu:
            B = spec_algebra(spec, A, fuel)
            bad = None
            for i, phi in enumerate(spec.axioms):
                res = satisfies(B, phi, a.samples, a.seed + i, Bounds(nat_max=corpus.nat_max(name, 8)))
                if not res:
                    bad = {"axiom": i, "assignment": {k: _json_value(v) for k, v in res.counterexample.items()}}
                    break
            rep.emit(f"{name}:soundness", "fail" if bad else "pass",
                     {"axioms": len(spec.axioms)}, bad)
        if alg == "N" and d.type.range.name == "nat" and name != "nohalf":
            vals = []
            ok = True
            for k in range(3):
                args = tuple(k for _ in d.type.domain)
                want = run(d, A, args, fuel)
                try:
                    got = extract_value(ExtractionTask(spec, spec.target, args, A), budget_ms=10_000)
                    vals.append([list(args), got.value, print_term(got.term)])
                    ok = ok and got.value == want.value
                except ExtractionError as e:
                    vals.append([list(args), None, e.kind])
                    ok = False
            rep.emit(f"{name}:extract", "pass" if ok else "fail", vals)
    return EXIT_FAIL if rep.failed else EXIT_OK


def _stable_hash(s: str) -> int:
    h = 1469598103934665603
    for b in s.encode():
        h = ((h ^ b) * 1099511628211) & ((1 << 64) - 1)
    return h


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="adt", description="Abstract data type specifications and computability")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("eval", help="run a derivation on an algebra")
    s.add_argument("--alg", help="built-in algebra (N, Id, Id:float, ...) or .alg file")
    s.add_argument("--der", required=True, help=".der file or corpus name")
    s.add_argument("--args", required=True, help='arguments as an s-expression, e.g. "(2 3)"')
    s.add_argument("--fuel", type=int, default=10**6)
    s.set_defaults(handler=cmd_eval)

    s = sub.add_parser("compile", help="compile a derivation to a specification")
    s.add_argument("--der", required=True)
    s.add_argument("--alg", help="signature the derivation is written over")
    s.add_argument("--mode", choices=("pr", "mupr"), default="mupr")
    s.add_argument("--eliminate-bu", choices=("bool", "sortD"))
    s.set_defaults(handler=cmd_compile)

    s = sub.add_parser("eliminate-bu", help="replace bounded quantifiers by hidden functions")
    s.add_argument("--spec", required=True)
    s.add_argument("--mode", choices=("bool", "sortD"), default="sortD")
    s.set_defaults(handler=cmd_eliminate_bu)

    s = sub.add_parser("arrax", help="array axioms over the starred signature")
    s.add_argument("--sig", required=True, help="built-in name or .sig file")
    s.add_argument("--include-equality", action="store_true")
    s.set_defaults(handler=cmd_arrax)

    s = sub.add_parser("nstdax", help="N-standardness axioms")
    s.add_argument("--sig", required=True)
    s.add_argument("--closed", action="store_true", help="closed instances over a term universe")
    s.add_argument("--depth", type=int, default=3)
    s.add_argument("--nat-cap", type=int, default=8)
    s.set_defaults(handler=cmd_nstdax)

    for name, fn in (("model", cmd_model), ("query", cmd_query)):
        s = sub.add_parser(name, help="bounded initial model" if name == "model" else "prove a closed equation")
        s.add_argument("--spec", required=True)
        s.add_argument("--depth", type=int, default=4)
        s.add_argument("--nat-cap", type=int, default=16)
        s.add_argument("--nstdax", action="store_true", help="add the N-standardness axioms")
        if name == "model":
            s.add_argument("--mode", choices=("full", "lazy"), default="full")
            s.add_argument("--query", action="append", help='closed equation "(= t1 t2)"')
            s.add_argument("--dump", action="store_true", help="list classes by representative")
        else:
            s.add_argument("equation")
        s.set_defaults(handler=fn)

    s = sub.add_parser("extract", help="read a function value off a specification")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--spec")
    g.add_argument("--der")
    s.add_argument("--alg")
    s.add_argument("--fn")
    s.add_argument("--args", required=True)
    s.add_argument("--params", default="()")
    s.add_argument("--depth", type=int)
    s.add_argument("--budget-ms", type=int, default=10_000)
    s.set_defaults(handler=cmd_extract)

    s = sub.add_parser("approx", help="check a fast approximating sequence")
    s.add_argument("--der", required=True)
    s.add_argument("--alg")
    s.add_argument("--oracle", default="exp")
    s.add_argument("--modulus", choices=("none", "maclaurin", "zero"), default="none",
                   help="compose with a modulus; 'zero' replaces the sequence by the constant 0")
    s.add_argument("--nmax", type=int, default=20)
    s.add_argument("--samples", type=int, default=100)
    s.add_argument("--seed", type=int, required=True)
    s.set_defaults(handler=cmd_approx)

    s = sub.add_parser("counts", help="signature and axiom counts of a specification")
    s.add_argument("--spec", required=True)
    s.add_argument("--before")
    s.set_defaults(handler=cmd_counts)

    s = sub.add_parser("corpus-run", help="deterministic report over the bundled derivations")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--samples", type=int, default=10)
    s.set_defaults(handler=cmd_corpus_run)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    out = sys.stdout
    try:
        return a.handler(a, out)
    except UsageError as e:
        print(f"adt: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as e:
        print(f"adt: resource limit: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except ExtractionError as e:
        print(f"adt: extraction failed ({e.kind}): {e}", file=sys.stderr)
        return EXIT_RESOURCE if e.kind == "budget" else EXIT_FAIL
    except (AdtError, OSError) as e:
        print(f"adt: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
