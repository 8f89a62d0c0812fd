import pytest
from hypothesis import given
from hypothesis import strategies as st

from adt import corpus
from adt.algebra import builtin, builtin_signature, eval_term
from adt.compiler import SpecSet, array_axioms, compile_mupr_spec, nstd_axioms, parse_spec, spec_algebra
from adt.engine import Closure, initial_model, make_plan, old_signature_table, proves_equal, query_model
from adt.errors import ResourceError, SpecError
from adt.extractor import prepare_spec
from adt.rng import SplitMix64
from adt.syntax import (
    App, FALSE, TRUE, n_standardize, numeral, parse_formula, parse_signature, parse_term, star_signature,
)

from oracles import factorial, replay

BN = n_standardize(builtin_signature("B"))


def _spec(sig, axioms=()):
    return SpecSet(sig, tuple(axioms), tuple("given" for _ in axioms))


def _nstd(sig):
    return _spec(sig, nstd_axioms(sig))


def test_constants_merged():
    sig = parse_signature("(signature C (sorts s) (const c s) (const d s) (const e s) (default s c))")
    M = initial_model(_spec(sig, [parse_formula(sig, "(= c d)")]), 2, 0)
    c, d, e = (parse_term(sig, x) for x in "cde")
    assert M.proves_equal(c, d)
    assert not M.proves_equal(c, e)
    assert M.proves_equal(e, e)


def test_eq_nat_two_two():
    M = initial_model(_nstd(BN), 3, 4)
    assert M.proves_equal(parse_term(BN, "(eq_nat 2 2)"), TRUE)
    assert M.proves_equal(parse_term(BN, "(less_nat 0 1)"), TRUE)
    assert M.proves_equal(parse_term(BN, "(eq_nat 1 3)"), FALSE)


def test_true_equals_false_is_inconsistent():
    M = initial_model(_spec(BN, [parse_formula(BN, "(= true false)")]), 2, 2)
    assert not M.consistent and not M.certified


def test_free_model_keeps_constants_apart():
    with open(corpus.path("color.sig")) as fh:
        sig = parse_signature(fh.read())
    M = initial_model(_spec(sig), 2, 2)
    assert not M.proves_equal(parse_term(sig, "red"), parse_term(sig, "green"))


def test_fact_values():
    spec = prepare_spec(compile_mupr_spec(corpus.load("fact")))
    M = initial_model(spec, 4, 24, mode="lazy")
    f = spec.signature.funcs[spec.target]
    for n in range(4):
        assert M.proves_equal(App(f, (numeral(n),)), numeral(factorial(n)))
    assert M.consistent


def test_unconstrained_boolean_constant():
    sig = n_standardize(parse_signature(
        "(signature U (flags standard) (sorts bool) (const u bool) (default bool false))"))
    M = initial_model(_nstd(sig), 3, 2)
    assert not M.determines_bool
    assert M.consistent
    u = parse_term(sig, "u")
    assert M.class_terms(u) == [u]
    assert not M.proves_equal(u, TRUE) and not M.proves_equal(u, FALSE)


def test_array_length_of_null():
    sig = star_signature(builtin_signature("B"))
    spec = _spec(sig, array_axioms(sig))
    M = initial_model(spec, 2, 2, mode="lazy")
    assert M.proves_equal(parse_term(sig, "(Lgth_bool Null_bool)"), numeral(0))


def test_inequalities_rejected():
    sig = builtin_signature("Rd")
    with pytest.raises(SpecError):
        make_plan(0, parse_formula(sig, "(< (d_real x:real x:real) one_real)"))


def test_query_parsing():
    M = initial_model(_nstd(BN), 3, 4, mode="lazy")
    assert query_model(M, "(= (and true (not false)) true)")
    with pytest.raises(SpecError):
        query_model(M, "(= x:nat x:nat)")


def test_ceiling_is_a_resource_error():
    with pytest.raises(ResourceError):
        initial_model(_nstd(BN), 5, 6, ceiling=200)


@pytest.mark.parametrize("name,args", [("add", (2, 2)), ("fact", (3,)), ("isqrt", (5,)), ("half", (3,))])
def test_replay_of_logged_merges(name, args):
    """Every axiom firing is re-derived by a naive closure; 100 sampled equalities agree."""
    spec = prepare_spec(compile_mupr_spec(corpus.load(name)))
    M = initial_model(spec, 3, 12, mode="lazy", log=True)
    f = spec.signature.funcs[spec.target]
    M.add_term(App(f, tuple(numeral(a) for a in args)))
    g = M.graph
    cc = replay(spec, g.log, g.node_term)
    rng = SplitMix64(len(name))
    merged = [n for n in range(len(g.parent)) if len(g.members[g.find(n)]) > 1]
    assert merged
    for _ in range(100):
        a = merged[rng.below(len(merged))]
        b = g.members[g.find(a)][rng.below(len(g.members[g.find(a)]))]
        assert cc.equal(g.node_term[a], g.node_term[b])
        c = rng.below(len(g.parent))
        assert cc.equal(g.node_term[a], g.node_term[c]) == (g.find(a) == g.find(c))


@pytest.mark.parametrize("name", ["add", "max", "iszero", "pred"])
def test_proved_equations_hold_in_the_standard_model(name):
    spec = prepare_spec(compile_mupr_spec(corpus.load(name)))
    B = spec_algebra(spec, builtin("N"))
    M = initial_model(spec, 3, 3, mode="full", log=True)
    g = M.graph
    values = {}
    for n, t in enumerate(g.node_term):
        v = eval_term(B, {}, t)
        assert values.setdefault(g.find(n), v) == v, t


def test_partition_is_a_congruence():
    spec = prepare_spec(compile_mupr_spec(corpus.load("add")))
    M = initial_model(spec, 3, 3)
    g = M.graph
    seen = {}
    for n in range(len(g.parent)):
        key = (g.sym[n], tuple(g.find(a) for a in g.args[n]))
        other = seen.setdefault(key, n)
        assert g.find(other) == g.find(n)
        assert g.sort[n] == g.sort[g.find(n)]


def test_monotone_in_depth():
    spec = prepare_spec(compile_mupr_spec(corpus.load("max")))
    small = initial_model(spec, 2, 3, log=True)
    big = initial_model(spec, 3, 3)
    g = small.graph
    for n, t in enumerate(g.node_term):
        root = g.node_term[g.find(n)]
        assert big.proves_equal(t, root)


def test_monotone_in_rounds():
    spec = prepare_spec(compile_mupr_spec(corpus.load("add")))
    full = initial_model(spec, 3, 3)
    for rounds in (1, 2, 4):
        few = Closure(spec, 3, 3, max_rounds=rounds, log=True)
        try:
            few.materialize()
        except ResourceError:
            pass
        g = few.g
        for n, t in enumerate(g.node_term):
            assert full.proves_equal(t, g.node_term[g.find(n)])


@given(st.randoms(use_true_random=False))
def test_partition_independent_of_axiom_order(rnd):
    spec = prepare_spec(compile_mupr_spec(corpus.load("max")))
    order = list(range(len(spec.axioms)))
    rnd.shuffle(order)
    shuffled = SpecSet(spec.signature, tuple(spec.axioms[i] for i in order),
                       tuple(spec.provenance[i] for i in order), spec.base, spec.symbols, spec.target)
    a = old_signature_table(initial_model(spec, 2, 3), spec.signature)
    b = old_signature_table(initial_model(shuffled, 2, 3), spec.signature)
    assert a == b


def test_repeatable():
    spec = prepare_spec(compile_mupr_spec(corpus.load("monus")))
    a = initial_model(spec, 3, 3)
    b = initial_model(spec, 3, 3)
    assert a.stats() == b.stats()
    assert a.representatives() == b.representatives()


def test_spec_text_model():
    text = """(spec s
      (signature S (flags standard n_standard) (sorts bool) (const c bool) (default bool false))
      (axiom given (= c (and true false))))"""
    spec = parse_spec(text)
    spec = spec.plus(nstd_axioms(spec.signature), "NStdAx")
    M = initial_model(spec, 3, 3)
    assert M.certified
    assert proves_equal(M, parse_term(spec.signature, "c"), FALSE)
