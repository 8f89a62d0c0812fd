import pytest

from adt import corpus
from adt.algebra import Bounds, builtin, builtin_signature, satisfies
from adt.compiler import (
    SpecSet, array_axioms, boundedness_instances, compile_mupr_spec, compile_pr_spec, count_report,
    eliminate_bu, fresh_symbols, nstd_axioms, parse_spec, print_spec, spec_algebra,
)
from adt.errors import DerivationError
from adt.schemes import Derivation, parse_derivation
from adt.syntax import (
    BuEquation, Conditional, Equation, Inequality, bu_count, formula_terms, formula_variables,
    is_closed, n_standardize, numeral, parse_formula, parse_signature, print_formula, star_signature,
    typecheck_formula,
)

N = builtin("N")

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
  (entry zero1 (const 0 (nat)))
  (entry q2 (proj (nat nat nat) 2))
  (entry addstep (comp add (q2 p3)))
  (entry mult (primrec 1 (zero1) (addstep)))
  (entry sq (comp mult (sz sz)))
  (entry test2 (comp less (n sq)))
  (entry isqrt (mu test2))
  (entry both (comp add (half isqrt))))"""

ALL_EQ = parse_signature(
    "(signature BC (flags standard) (sorts bool color) (eqsorts bool color)"
    " (const red color) (const green color) (default color red))")


def test_equation_counts_per_entry():
    d = corpus.load("fib")
    spec = compile_pr_spec(d)
    want = 0
    for e in d.entries:
        kind = type(e.scheme).__name__
        want += 2 * len(e.scheme.base) if kind == "PrimRec" else 2 if kind == "Cases" else 1
    assert len(spec.axioms) == want
    last = len(d.entries) - 1
    assert spec.provenance.count(f"entry:{last}") == 4


def test_cases_gives_two_equations():
    d = corpus.load("max")
    spec = compile_pr_spec(d)
    idx = next(i for i, e in enumerate(d.entries) if type(e.scheme).__name__ == "Cases")
    eqs = [phi for phi, p in zip(spec.axioms, spec.provenance) if p.endswith(f":{idx}")]
    assert len(eqs) == 2
    assert {print_formula(phi).split()[2] for phi in eqs} == {"true", "false"}


def test_empty_derivation_rejected():
    with pytest.raises(DerivationError, match="nonempty"):
        compile_pr_spec(Derivation((), N.signature, "empty"))


def test_pr_compiler_rejects_mu():
    with pytest.raises(DerivationError):
        compile_pr_spec(corpus.load("isqrt"))


@pytest.mark.parametrize("name", corpus.PR_CORPUS)
def test_mupr_equals_pr_without_mu(name):
    d = corpus.load(name)
    a, b = compile_pr_spec(d), compile_mupr_spec(d)
    assert a.axioms == b.axioms and a.signature == b.signature


def test_mu_formulas():
    spec = compile_mupr_spec(corpus.load("isqrt"))
    mu = [phi for phi, p in zip(spec.axioms, spec.provenance) if p.startswith("F_mu")]
    assert len(mu) == 1 and bu_count(mu[0]) == 1
    d = parse_derivation(N.signature, TWO_MU)
    spec2 = compile_mupr_spec(d)
    mu2 = [phi for phi, p in zip(spec2.axioms, spec2.provenance) if p.startswith("F_mu")]
    assert len(mu2) == 2
    tests = {phi.antecedents[1].lhs.fn.name for phi in mu2}
    assert len(tests) == 2


def test_fresh_names_are_deterministic_and_distinct():
    a = fresh_symbols(corpus.load("add"))
    b = fresh_symbols(corpus.load("add"))
    c = fresh_symbols(corpus.load("mult"))
    assert a == b
    assert {f.name for g in a for f in g}.isdisjoint({f.name for g in c for f in g})
    assert a[0][0].name.startswith("f0_")


@pytest.mark.parametrize("name", corpus.PR_CORPUS + corpus.MU_CORPUS)
def test_axioms_typecheck_with_provenance(name):
    spec = compile_mupr_spec(corpus.load(name))
    assert len(spec.provenance) == len(spec.axioms)
    for phi in spec.axioms:
        typecheck_formula(spec.signature, phi)
    for mode in ("bool", "sortD"):
        out = eliminate_bu(spec, mode)
        for phi in out.axioms:
            typecheck_formula(out.signature, phi)
            assert bu_count(phi) == 0


@pytest.mark.parametrize("name", corpus.PR_CORPUS + corpus.MU_CORPUS)
def test_soundness_on_samples(name):
    d = corpus.load(name)
    spec = compile_mupr_spec(d)
    B = spec_algebra(spec, N)
    for i, phi in enumerate(spec.axioms):
        r = satisfies(B, phi, samples=200, seed=i, bounds=Bounds(nat_max=corpus.nat_max(name, 12)))
        assert r.holds, (print_formula(phi), r.counterexample)


def test_array_axiom_counts():
    R = parse_signature("(signature R (flags standard) (sorts real) (const zero_real real)"
                        " (default real zero_real))")
    ax = array_axioms(R)
    real_ax = [phi for phi in ax if "real" in print_formula(phi)]
    assert len(real_ax) == 7 and not any(bu_count(phi) for phi in real_ax)
    assert len(array_axioms(ALL_EQ)) == 8 * 2
    assert len(array_axioms(builtin_signature("B"), include_equality=True)) == 8
    first = array_axioms(builtin_signature("B"))[0]
    assert print_formula(first) == "(= (Lgth_bool Null_bool) 0)"


def test_nstd_axioms_contents():
    sig = n_standardize(builtin_signature("B"))
    ax = nstd_axioms(sig)
    texts = {print_formula(phi) for phi in ax}
    assert "(= (or false false) false)" in texts
    assert "(= (and true true) true)" in texts
    assert not any(phi for phi in ax if "eq_nat x" in print_formula(phi) and isinstance(phi, Conditional))
    closed = nstd_axioms(sig, "closed", depth=1, nat_cap=2)
    assert closed and all(not formula_variables(phi) for phi in closed)
    assert all(is_closed(t) for phi in closed for t in formula_terms(phi))


def test_nstd_equality_axioms_for_user_sorts():
    ax = nstd_axioms(ALL_EQ if ALL_EQ.is_n_standard else n_standardize(ALL_EQ))
    conds = [phi for phi in ax if isinstance(phi, Conditional)]
    assert {phi.antecedents[0].lhs.fn.name for phi in conds} == {"eq_bool", "eq_color"}


def test_boundedness_instances():
    sig = builtin_signature("N")
    p = parse_formula(sig, "(= (eq_nat z:nat z:nat) true)")
    q = parse_formula(sig, "(= (less_nat z:nat (S z:nat)) true)")
    one = boundedness_instances(sig, [p], 0)
    assert len(one) == 1 and one[0].antecedents == () and isinstance(one[0].consequent, BuEquation)
    two = boundedness_instances(sig, [p], 2)[2]
    assert len(two.antecedents) == 2 and two.consequent.bound == numeral(2)
    assert len(boundedness_instances(sig, [p, q], 3)) == 8


def test_elimination_counts_and_identity():
    spec = compile_mupr_spec(corpus.load("isqrt"))
    e = len(spec.axioms)
    for mode in ("bool", "sortD"):
        out = eliminate_bu(spec, mode)
        rep = count_report(out, spec)
        assert rep["axioms"] == e + 4
        assert rep["new_symbols"] == 1
        assert rep["new_sorts"] == (1 if mode == "sortD" else 0)
    plain = compile_mupr_spec(corpus.load("add"))
    for mode in ("bool", "sortD"):
        out = eliminate_bu(plain, mode)
        assert out.axioms == plain.axioms and out.signature == plain.signature


def test_three_axiom_spec_with_one_quantifier():
    sig = builtin_signature("N")
    axioms = [
        parse_formula(sig, "(= (eq_nat 0 0) true)"),
        parse_formula(sig, "(= (less_nat 0 (S x:nat)) true)"),
        parse_formula(sig, "(forall z:nat 3 (= (less_nat z:nat 3) true))"),
    ]
    spec = SpecSet(sig, tuple(axioms), ("a", "b", "c"))
    out = eliminate_bu(spec, "bool")
    assert len(out.axioms) == 7
    assert count_report(out, spec)["new_symbols"] == 1


def test_sort_d_on_array_axioms():
    ax = array_axioms(ALL_EQ)
    spec = SpecSet(star_signature(ALL_EQ), tuple(ax), ("ArrAx",) * len(ax))
    out = eliminate_bu(spec, "sortD")
    rep = count_report(out, spec)
    assert rep["new_sorts"] == 1 and rep["new_symbols"] == 2
    assert rep["axioms"] == 16 + 8 == 12 * 2


def test_count_report_of_empty_spec():
    sig = builtin_signature("B")
    rep = count_report(SpecSet(sig, (), ()))
    assert rep["axioms"] == 0 and rep["bu_occurrences"] == 0


@pytest.mark.parametrize("name", ["add", "isqrt", "fib"])
def test_spec_text_round_trip(name):
    spec = compile_mupr_spec(corpus.load(name))
    back = parse_spec(print_spec(spec))
    assert back.axioms == spec.axioms
    assert back.signature == spec.signature
    assert back.target == spec.target
    assert back.visible().funcs.keys() == spec.visible().funcs.keys()


def test_inequalities_parse():
    sig = builtin_signature("Rd")
    phi = parse_formula(sig, "(< (d_real x:real x:real) one_real)")
    assert isinstance(phi, Inequality)
    assert isinstance(parse_formula(sig, "(= x:real x:real)"), Equation)
