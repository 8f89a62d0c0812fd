"""End-to-end acceptance criteria, one test each, at fixed tolerances and time limits.

Every test records a PASS or FAIL line; the lines are printed as they happen and
again in the terminal summary.
"""

import os
import subprocess
import sys
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from adt import corpus
from adt.algebra import Bounds, builtin, builtin_signature, eval_term, sample_value, satisfies, star_algebra
from adt.approx import (
    check_fast_approx, constant_sequence, exp_oracle, invexp, invexp_algebra, invexp_equations,
    sequence_from_derivation,
)
from adt.compiler import (
    SpecSet, array_axioms, boundedness_instances, compile_mupr_spec, compile_pr_spec, count_report,
    eliminate_bu, nstd_axioms, spec_algebra,
)
from adt.engine import initial_model, old_signature_table
from adt.extractor import ExtractionTask, clear_cache, extract_value
from adt.interpreter import run, universal_eval
from adt.rng import SplitMix64
from adt.schemes import encode, parse_derivation
from adt.syntax import (
    App, bu_count, n_standardize, numeral, parse_formula, parse_signature, parse_term, star_signature,
)

from oracles import factorial, isqrt_scan

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
RESULTS = []


@contextmanager
def criterion(number, title, limit_s=None):
    t0 = time.monotonic()
    ok = False
    note = ""
    try:
        yield
        ok = True
    except AssertionError as e:
        note = str(e).splitlines()[0] if str(e) else "assertion failed"
        raise
    finally:
        elapsed = time.monotonic() - t0
        if ok and limit_s is not None and elapsed >= limit_s:
            ok = False
            note = f"took {elapsed:.1f}s, limit {limit_s}s"
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}  ({elapsed:.2f}s){'  ' + note if note else ''}"
        RESULTS.append(line)
        print(line)
    assert limit_s is None or elapsed < limit_s, f"criterion {number} exceeded {limit_s}s"


def test_01_array_axioms_hold_on_array_algebras():
    with criterion(1, "array axioms hold on B*, N*, RN*", 10):
        bounds = Bounds(nat_max=16, array_max=8)
        for name in ("B", "N", "RN"):
            A = star_algebra(builtin(name))
            ax = array_axioms(A.signature, include_equality=True)
            assert len(ax) == 8 * len([s for s in A.signature.sorts.values() if s.starred])
            for i, phi in enumerate(ax):
                r = satisfies(A, phi, samples=1000, seed=i, bounds=bounds)
                assert r.holds, (name, i, r.counterexample)


def test_02_pr_specs_are_sound():
    with criterion(2, "compiled PR specs hold under the interpreter", 30):
        N = builtin("N")
        assert len(corpus.PR_CORPUS) == 10
        for name in corpus.PR_CORPUS:
            spec = compile_pr_spec(corpus.load(name))
            B = spec_algebra(spec, N)
            for i, phi in enumerate(spec.axioms):
                r = satisfies(B, phi, samples=500, seed=i, bounds=Bounds(nat_max=corpus.nat_max(name, 16)))
                assert r.holds, (name, i, r.counterexample)


def test_03_factorial_is_determined():
    with criterion(3, "bounded initial model proves fact(n) = n!", 60):
        N = builtin("N")
        d = corpus.load("fact")
        spec = compile_mupr_spec(d)
        spec = spec.plus(nstd_axioms(spec.signature), "NStdAx")
        M = initial_model(spec, 4, 24, mode="lazy")
        f = spec.signature.funcs[spec.target]
        for n in range(5):
            m = run(d, N, (n,)).value
            assert m == factorial(n)
            assert M.proves_equal(App(f, (numeral(n),)), numeral(m)), n
        assert M.consistent


def test_04_mu_spec_and_extraction():
    with criterion(4, "isqrt: mu spec sound and values extracted", 60):
        N = builtin("N")
        spec = compile_mupr_spec(corpus.load("isqrt"))
        B = spec_algebra(spec, N)
        for i, phi in enumerate(spec.axioms):
            assert satisfies(B, phi, samples=500, seed=i, bounds=Bounds(nat_max=40)).holds, i
        elim = eliminate_bu(spec, "sortD")
        assert not any(bu_count(phi) for phi in elim.axioms)
        clear_cache()
        for n in range(17):
            ex = extract_value(ExtractionTask(elim, spec.target, (n,), N), budget_ms=10_000)
            assert ex.value == isqrt_scan(n), n


TWO_MU = """(derivation twomu ((nat) nat)
  (entry id (proj (nat) 1))
  (entry p3 (proj (nat nat nat) 3))
  (entry s (prim S))
  (entry succ3 (comp s (p3)))
  (entry add (primrec 1 (id) (succ3)))
  (entry less (prim less_nat))
  (entry n (proj (nat nat) 1))
  (entry z (proj (nat nat) 2))
  (entry sz (comp s (z)))
  (entry twice (comp add (sz sz)))
  (entry test (comp less (n twice)))
  (entry half (mu test))
  (entry test2 (comp less (n sz)))
  (entry pred1 (mu test2))
  (entry both (comp add (half pred1))))"""


def _bu_specs():
    N = builtin_signature("N")
    yield compile_mupr_spec(corpus.load("isqrt"))
    yield compile_mupr_spec(corpus.load("half"))
    yield compile_mupr_spec(parse_derivation(N, TWO_MU))
    three = [parse_formula(N, "(= (eq_nat 0 0) true)"),
             parse_formula(N, "(= (less_nat 0 (S x:nat)) true)"),
             parse_formula(N, "(forall z:nat 3 (= (less_nat z:nat 3) true))")]
    yield SpecSet(N, tuple(three), ("given",) * 3)
    p = parse_formula(N, "(= (eq_nat z:nat z:nat) true)")
    q = parse_formula(N, "(= (less_nat z:nat (S z:nat)) true)")
    inst = boundedness_instances(N, [p, q], 2)
    yield SpecSet(N, tuple(inst) + tuple(three[:2]), ("given",) * (len(inst) + 2))


def test_05_axiom_count_identities():
    with criterion(5, "axiom counts e+4q, 8s, e+8s, e+12s", 1):
        specs = list(_bu_specs())
        assert len(specs) == 5
        for spec in specs:
            e = len(spec.axioms)
            q = sum(bu_count(phi) for phi in spec.axioms)
            assert q >= 1
            for mode in ("bool", "sortD"):
                out = eliminate_bu(spec, mode)
                assert len(out.axioms) == e + 4 * q, (mode, e, q, len(out.axioms))
                assert count_report(out, spec)["bu_occurrences"] == 0
        for k in (1, 2, 3):
            sorts = " ".join(f"c{i}" for i in range(k))
            consts = " ".join(f"(const k{i} c{i})" for i in range(k))
            defaults = " ".join(f"(default c{i} k{i})" for i in range(k))
            sig = parse_signature(f"(signature E{k} (flags standard) (sorts bool {sorts}) (eqsorts bool {sorts})"
                                  f" {consts} {defaults})")
            s = k + 1
            ax = array_axioms(sig)
            assert len(ax) == 8 * s and sum(bu_count(phi) for phi in ax) == s
            arr = SpecSet(star_signature(sig), tuple(ax), ("ArrAx",) * len(ax))
            extra = nstd_axioms(arr.signature)[:5]
            E = arr.plus(extra, "given")
            assert len(E.axioms) == len(extra) + 8 * s
            out = eliminate_bu(E, "sortD")
            assert len(out.axioms) == len(extra) + 12 * s


def test_06_elimination_is_conservative():
    with criterion(6, "bounded-quantifier elimination is ground conservative", 120):
        for name in ("isqrt", "half", "nohalf"):
            spec = compile_mupr_spec(corpus.load(name))
            base = spec.plus(nstd_axioms(spec.signature), "NStdAx")
            before = old_signature_table(initial_model(base, 3, 3, mode="full"), spec.signature, 3)
            for mode in ("bool", "sortD"):
                e = eliminate_bu(spec, mode)
                e = e.plus(nstd_axioms(e.signature), "NStdAx")
                after = old_signature_table(initial_model(e, 3, 3, mode="full"), spec.signature, 3)
                assert before == after, (name, mode)


def test_07_strict_n_standardness():
    with criterion(7, "N-standardness axioms determine nat and bool", 60):
        sigs = [n_standardize(builtin_signature("B")), compile_mupr_spec(corpus.load("isqrt")).visible()]
        for sig in sigs:
            ax = nstd_axioms(sig)
            spec = SpecSet(sig, tuple(ax), ("NStdAx",) * len(ax))
            for d in range(2, 7):
                M = initial_model(spec, d, d + 2, mode="full")
                assert M.determines_nat and M.determines_bool and M.consistent, (sig.name, d)


def test_08_unconstrained_boolean_is_not_determined():
    with criterion(8, "an unconstrained boolean constant stays undetermined", 1):
        sig = parse_signature("(signature U (flags standard) (sorts bool) (const u bool) (default bool false))")
        u = parse_term(sig, "u")
        for axioms in ((), tuple(nstd_axioms(n_standardize(sig)))):
            s = n_standardize(sig) if axioms else sig
            M = initial_model(SpecSet(s, axioms, ("given",) * len(axioms)), 3, 2, mode="full")
            assert not M.determines_bool
            assert M.class_terms(u) == [u]


def test_09_universal_evaluation():
    with criterion(9, "universal evaluation agrees with direct runs", 10):
        for name in sorted(corpus.SIGNATURE_OF):
            d = corpus.load(name)
            A = builtin(corpus.SIGNATURE_OF[name])
            code = encode(d)
            rng = SplitMix64(len(name))
            bounds = Bounds(nat_max=min(corpus.nat_max(name), 10))
            for _ in range(20):
                args = tuple(sample_value(A, s, rng, bounds) for s in d.type.domain)
                assert universal_eval(A, d.type, code, args, fuel=300) == run(d, A, args, fuel=300), (name, args)


def test_10_fast_approximation_of_exp():
    with criterion(10, "shifted exp series approximates e^x within 2^-n", 30):
        A = builtin("Id", "float")
        seq = sequence_from_derivation(corpus.load("exp_fast"), A)
        rep = check_fast_approx(seq, exp_oracle, samples=100, n_max=20, seed=10)
        assert rep.passed, rep.violations[:3]
        control = check_fast_approx(constant_sequence(0.0), exp_oracle, samples=100, n_max=20, seed=10)
        assert not control.passed and 1 in control.failing_n


def test_11_invexp_is_exact():
    with criterion(11, "invexp is exactly 2^-n and meets its equations", 1):
        A = invexp_algebra()
        inv = A.signature.funcs["invexp"]
        zero, step = invexp_equations()
        assert eval_term(A, {}, zero.lhs) == eval_term(A, {}, zero.rhs) == 1
        for n in range(65):
            assert invexp(n).to_fraction() == Fraction(1, 1 << n)
            assert eval_term(A, {}, App(inv, (numeral(n),))) == Fraction(1, 1 << n)
            env = {v: n for v in step.lhs.args[0].args}
            assert eval_term(A, env, step.lhs) == eval_term(A, env, step.rhs) == Fraction(1, 1 << (n + 1))


def test_12_extraction_agrees_with_runs():
    with criterion(12, "extracted values agree with runs for arguments <= 4"):
        N = builtin("N")
        clear_cache()
        for name in ("add", "mult", "fact", "max", "monus", "isqrt"):
            d = corpus.load(name)
            spec = compile_mupr_spec(d)
            k = len(d.type.domain)
            t0 = time.monotonic()
            for i in range(5 ** k):
                args = tuple((i // 5 ** j) % 5 for j in range(k))
                ex = extract_value(ExtractionTask(spec, spec.target, args, N), budget_ms=10_000)
                assert ex.value == run(d, N, args).value, (name, args)
            assert time.monotonic() - t0 < 10, f"{name} exceeded 10s"


def _corpus_report(hashseed):
    env = dict(os.environ, PYTHONHASHSEED=str(hashseed))
    r = subprocess.run([sys.executable, "-m", "adt.cli", "corpus-run", "--seed", "13"], cwd=ROOT,
                       capture_output=True, env=env, timeout=600)
    assert r.returncode == 0, r.stderr.decode()
    return r.stdout


def test_13_reports_are_deterministic():
    with criterion(13, "same seed gives byte-identical reports"):
        a = _corpus_report(1)
        b = _corpus_report(2)
        assert a and a == b
