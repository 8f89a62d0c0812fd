import pytest
from hypothesis import given
from hypothesis import strategies as st

from adt import sexp
from adt.algebra import builtin_signature
from adt.errors import SexpSyntaxError, SignatureError, SortError
from adt.syntax import (
    BOOL, FALSE, NAT, REAL, TRUE, App, BuEquation, Conditional, Equation, FuncSymbol, Sort, Var,
    add_symbol, bu_count, check_strict_n_standard, default_term, depth, is_closed, n_standardize,
    numeral, numeral_value, parse_formula, parse_signature, parse_term, print_formula,
    print_signature, print_term, size, star_signature, subterms, typecheck_term,
)

from strategies import closed_terms

SIGS = ["B", "N", "RN", "Rd", "Id"]


def test_sexp_reader_round_trip():
    x = sexp.read_one("(a (b c) d)")
    assert x == ["a", ["b", "c"], "d"]
    assert sexp.write(x) == "(a (b c) d)"


def test_sexp_reports_position():
    with pytest.raises(SexpSyntaxError) as e:
        sexp.read_one("(a (b c)")
    assert "line 1" in str(e.value)


def test_boolean_signature():
    sig = parse_signature("(signature B (flags standard) (sorts bool) (default bool false))")
    assert list(sig.sorts) == ["bool"]
    assert {"true", "false", "and", "or", "not"} <= set(sig.funcs)


def test_empty_sort_list_rejected():
    with pytest.raises(SignatureError):
        parse_signature("(signature E (sorts))")
    with pytest.raises(SignatureError):
        parse_signature("(signature E (flags standard))")


def test_missing_default_rejected():
    with pytest.raises(SignatureError, match="default"):
        parse_signature("(signature E (sorts real))")


def test_collision_with_standard_symbol():
    text = "(signature E (flags standard n_standard) (sorts q) (func S (q) q) (const c q) (default q c))"
    with pytest.raises(SignatureError, match="collision"):
        parse_signature(text)


def test_standard_typing():
    N = builtin_signature("N")
    assert typecheck_term(N, parse_term(N, "(if_nat true 0 (S 0))")) == NAT
    with pytest.raises(SortError):
        parse_term(N, "(and 0 true)")
    with pytest.raises(SortError, match="unknown symbol"):
        parse_term(builtin_signature("Rd"), "(eq_real x:real y:real)")


def test_depth_with_and_without_numeral_atoms():
    N = builtin_signature("N")
    t = parse_term(N, "(if_nat (less_nat 2 3) (S 4) 0)")
    assert print_term(t) == "(if_nat (less_nat 2 3) 5 0)"
    assert depth(t) == 7
    assert depth(t, nat_cap=5) == 3
    assert size(t) == 16
    assert is_closed(t)
    assert numeral_value(numeral(5)) == 5


def test_n_standardize_adds_nat_and_is_idempotent():
    B = builtin_signature("B")
    BN = n_standardize(B)
    assert BN.funcs["eq_nat"] == FuncSymbol("eq_nat", (NAT, NAT), BOOL)
    assert "nat" in BN.eq_sorts
    assert n_standardize(BN) == BN


def test_star_signature_shapes():
    sig = parse_signature(
        "(signature BR (flags standard) (sorts bool real) (eqsorts bool)"
        " (const zero_real real) (default real zero_real))")
    S = star_signature(sig)
    starred = sorted(n for n, s in S.sorts.items() if s.starred)
    assert starred == ["bool*", "real*"]
    assert "nat*" not in S.sorts
    assert "eq_bool*" in S.funcs and "eq_real*" not in S.funcs
    with pytest.raises(SignatureError, match="already starred"):
        star_signature(S)


def test_star_reduct_is_n_standardization():
    for name in ["B", "N", "RN", "Rd"]:
        sig = builtin_signature(name)
        S = star_signature(sig)
        base = n_standardize(sig)
        assert {k: S.funcs[k] for k in base.funcs} == base.funcs
        assert {k: S.sorts[k] for k in base.sorts} == base.sorts


def test_default_terms():
    N = builtin_signature("N")
    assert default_term(N, NAT) == numeral(0)
    S = star_signature(builtin_signature("B"))
    t = default_term(S, BOOL.star())
    assert print_term(t) == "Null_bool"
    for name in SIGS:
        sig = star_signature(builtin_signature(name))
        for s in sig.sorts.values():
            t = default_term(sig, s)
            assert is_closed(t) and typecheck_term(sig, t) == s


def test_strict_n_standard():
    assert check_strict_n_standard(n_standardize(builtin_signature("B"))).ok
    bad = parse_signature(
        "(signature Q (flags standard n_standard) (sorts q) (func bad (q) nat) (const c q) (default q c))")
    v = check_strict_n_standard(bad)
    assert not v.ok and v.witness == "bad"
    real_sig = builtin_signature("Rd").copy()
    add_symbol(real_sig, FuncSymbol("g", (NAT,), REAL))
    assert check_strict_n_standard(real_sig).ok


@pytest.mark.parametrize("name", ["RN", "Rd", "Id"])
def test_adding_real_ranged_symbol_keeps_strictness(name):
    sig = builtin_signature(name)
    before = check_strict_n_standard(sig).ok
    more = sig.copy()
    add_symbol(more, FuncSymbol("extra", (NAT, REAL), REAL))
    assert check_strict_n_standard(more).ok or not before


@pytest.mark.parametrize("name", SIGS)
def test_signature_round_trip(name):
    sig = star_signature(builtin_signature(name))
    assert parse_signature(print_signature(sig)) == sig
    plain = builtin_signature(name)
    assert parse_signature(print_signature(plain)) == plain


@given(closed_terms(builtin_signature("N"), NAT, 4))
def test_term_round_trip(t):
    N = builtin_signature("N")
    assert parse_term(N, print_term(t)) == t


@given(closed_terms(builtin_signature("N"), BOOL, 4))
def test_subterms_of_strict_terms_are_nat_or_bool(t):
    for u in subterms(t):
        assert u.fn.range in (NAT, BOOL)


def test_formula_round_trip_and_bu_count():
    N = builtin_signature("N")
    texts = [
        "(= (S x:nat) (S y:nat))",
        "(=> ((= (less_nat x:nat y:nat) true)) (= (eq_nat x:nat y:nat) false))",
        "(forall z:nat y:nat (= (less_nat z:nat y:nat) true))",
        "(=> ((forall z:nat 3 (= (eq_nat z:nat z:nat) true))) (= x:nat x:nat))",
    ]
    for text in texts:
        phi = parse_formula(N, text)
        assert parse_formula(N, print_formula(phi)) == phi
    assert bu_count(parse_formula(N, texts[2])) == 1
    assert isinstance(parse_formula(N, texts[1]), Conditional)
    assert isinstance(parse_formula(N, texts[2]), BuEquation)


def test_formula_side_sorts_checked():
    N = builtin_signature("N")
    with pytest.raises(SortError):
        parse_formula(N, "(= 0 true)")


def test_variables_carry_sorts():
    x = Var("x", NAT)
    assert x != Var("x", BOOL)
    assert hash(x) == hash(Var("x", NAT))
    assert Equation(x, x).lhs.sort == NAT
    assert Sort("bool*").starred and Sort("bool*").base == BOOL
    assert TRUE != FALSE and isinstance(TRUE, App)


@given(st.integers(0, 40))
def test_numerals(n):
    assert numeral_value(numeral(n)) == n
    assert depth(numeral(n)) == n + 1
    assert depth(numeral(n), nat_cap=n) == 1
