"""Sorts, signatures, terms and formulas, plus their textual form."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Optional, Union

from . import sexp
from .errors import SignatureError, SortError

# ---------------------------------------------------------------------------
# sorts and function symbols


@dataclass(frozen=True)
class Sort:
    name: str

    @property
    def starred(self) -> bool:
        return self.name.endswith("*")

    @property
    def base(self) -> "Sort":
        if not self.starred:
            raise SortError(f"sort {self.name} is not an array sort")
        return Sort(self.name[:-1])

    @property
    def kind(self) -> str:
        if self.starred:
            return "starred"
        return {"bool": "bool", "nat": "nat", "real": "real", "intvl": "interval"}.get(
            self.name, "user")

    def star(self) -> "Sort":
        if self.starred:
            raise SignatureError(f"sort {self.name} is already starred")
        if self.name == "nat":
            raise SignatureError("nat* is not formed")
        return Sort(self.name + "*")

    def __str__(self) -> str:
        return self.name


BOOL = Sort("bool")
NAT = Sort("nat")
REAL = Sort("real")
INTVL = Sort("intvl")


@dataclass(frozen=True)
class FuncSymbol:
    name: str
    domain: tuple[Sort, ...]
    range: Sort

    @property
    def arity(self) -> int:
        return len(self.domain)

    def __str__(self) -> str:
        dom = " ".join(s.name for s in self.domain)
        return f"{self.name}: ({dom}) -> {self.range.name}"


_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_'.]*\*?$")

BOOL_OPS = ("true", "false", "and", "or", "not")
NAT_OPS = ("0", "S", "less_nat")
ARRAY_PREFIXES = ("Lgth_", "Ap_", "Null_", "Update_", "Newlength_")


def bool_symbols() -> list[FuncSymbol]:
    return [
        FuncSymbol("true", (), BOOL),
        FuncSymbol("false", (), BOOL),
        FuncSymbol("and", (BOOL, BOOL), BOOL),
        FuncSymbol("or", (BOOL, BOOL), BOOL),
        FuncSymbol("not", (BOOL,), BOOL),
    ]


def if_symbol(s: Sort) -> FuncSymbol:
    return FuncSymbol(f"if_{s.name}", (BOOL, s, s), s)


def eq_symbol(s: Sort) -> FuncSymbol:
    return FuncSymbol(f"eq_{s.name}", (s, s), BOOL)


def nat_symbols() -> list[FuncSymbol]:
    return [
        FuncSymbol("0", (), NAT),
        FuncSymbol("S", (NAT,), NAT),
        if_symbol(NAT),
        eq_symbol(NAT),
        FuncSymbol("less_nat", (NAT, NAT), BOOL),
    ]


def array_symbols(s: Sort, with_eq: bool) -> list[FuncSymbol]:
    a = s.star()
    syms = [
        FuncSymbol(f"Lgth_{s.name}", (a,), NAT),
        FuncSymbol(f"Ap_{s.name}", (a, NAT), s),
        FuncSymbol(f"Null_{s.name}", (), a),
        FuncSymbol(f"Update_{s.name}", (a, NAT, s), a),
        FuncSymbol(f"Newlength_{s.name}", (a, NAT), a),
        if_symbol(a),
    ]
    if with_eq:
        syms.append(eq_symbol(a))
    return syms


def reserved_type(name: str) -> Optional[FuncSymbol]:
    """Type that a reserved standard name must carry, or None for ordinary names."""
    for sym in bool_symbols() + nat_symbols():
        if sym.name == name:
            return sym
    for prefix in ("if_", "eq_"):
        if name.startswith(prefix) and len(name) > len(prefix):
            s = Sort(name[len(prefix):])
            return if_symbol(s) if prefix == "if_" else eq_symbol(s)
    for prefix in ARRAY_PREFIXES:
        if name.startswith(prefix) and len(name) > len(prefix):
            base = Sort(name[len(prefix):])
            if base.starred or base == NAT:
                return None
            return next(f for f in array_symbols(base, False) if f.name == name)
    return None


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True, slots=True)
class Var:
    name: str
    sort: Sort
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash((self.name, self.sort.name)))

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return f"{self.name}:{self.sort.name}"


@dataclass(frozen=True, slots=True)
class App:
    fn: FuncSymbol
    args: tuple = ()
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash((self.fn.name, self.args)))

    def __hash__(self) -> int:
        return self._hash

    @property
    def sort(self) -> Sort:
        return self.fn.range

    def __str__(self) -> str:
        return print_term(self)


Term = Union[Var, App]


def term_sort(t: Term) -> Sort:
    return t.sort


def depth(t: Term, nat_cap: int = -1) -> int:
    """Term depth; numerals up to ``nat_cap`` count as depth-1 atoms."""
    if isinstance(t, Var):
        return 1
    if nat_cap >= 0:
        k = numeral_value(t)
        if k is not None and k <= nat_cap:
            return 1
    if not t.args:
        return 1
    return 1 + max(depth(a, nat_cap) for a in t.args)


def size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(size(a) for a in t.args)


def variables(t: Term) -> list[Var]:
    """Variables of ``t`` in order of first occurrence."""
    seen: dict[Var, None] = {}

    def walk(u: Term) -> None:
        if isinstance(u, Var):
            seen.setdefault(u)
        else:
            for a in u.args:
                walk(a)

    walk(t)
    return list(seen)


def is_closed(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    return all(is_closed(a) for a in t.args)


def substitute(t: Term, env: dict) -> Term:
    if isinstance(t, Var):
        return env.get(t, t)
    if not t.args:
        return t
    return App(t.fn, tuple(substitute(a, env) for a in t.args))


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


ZERO = FuncSymbol("0", (), NAT)
SUCC = FuncSymbol("S", (NAT,), NAT)
TRUE = App(FuncSymbol("true", (), BOOL))
FALSE = App(FuncSymbol("false", (), BOOL))


def numeral(n: int) -> App:
    t = App(ZERO)
    for _ in range(n):
        t = App(SUCC, (t,))
    return t


def numeral_value(t: Term) -> Optional[int]:
    k = 0
    while isinstance(t, App) and t.fn == SUCC:
        t = t.args[0]
        k += 1
    if isinstance(t, App) and t.fn == ZERO:
        return k
    return None


def app(sig: "Signature", name: str, *args: Term) -> App:
    """Build an application, checking argument sorts against ``sig``."""
    fn = sig.func(name)
    if len(args) != fn.arity:
        raise SortError(f"arity mismatch: {name} takes {fn.arity} arguments, got {len(args)}")
    for i, (a, s) in enumerate(zip(args, fn.domain)):
        if a.sort != s:
            raise SortError(f"sort mismatch: argument {i + 1} of {name} is {a.sort}, expected {s}")
    return App(fn, tuple(args))


# ---------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Inequality:
    """``lhs < rhs`` over the reals."""
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class BuEquation:
    """Bounded universal: for all ``var`` below ``bound``, ``body`` holds."""
    var: Var
    bound: Term
    body: Union[Equation, "BuEquation"]


Atomic = Union[Equation, Inequality, BuEquation]


@dataclass(frozen=True)
class Conditional:
    antecedents: tuple
    consequent: Atomic


Formula = Union[Equation, Inequality, BuEquation, Conditional]


def atoms(phi: Formula) -> list[Atomic]:
    if isinstance(phi, Conditional):
        return list(phi.antecedents) + [phi.consequent]
    return [phi]


def formula_variables(phi: Formula) -> list[Var]:
    """Free variables in first-occurrence order."""
    out: dict[Var, None] = {}

    def visit(a, bound: frozenset) -> None:
        if isinstance(a, (Equation, Inequality)):
            for t in (a.lhs, a.rhs):
                for v in variables(t):
                    if v not in bound:
                        out.setdefault(v)
        elif isinstance(a, BuEquation):
            for v in variables(a.bound):
                if v not in bound:
                    out.setdefault(v)
            visit(a.body, bound | {a.var})
        else:
            raise TypeError(a)

    for a in atoms(phi):
        visit(a, frozenset())
    return list(out)


def substitute_formula(phi: Formula, env: dict) -> Formula:
    if isinstance(phi, Equation):
        return Equation(substitute(phi.lhs, env), substitute(phi.rhs, env))
    if isinstance(phi, Inequality):
        return Inequality(substitute(phi.lhs, env), substitute(phi.rhs, env))
    if isinstance(phi, BuEquation):
        inner = {k: v for k, v in env.items() if k != phi.var}
        return BuEquation(phi.var, substitute(phi.bound, env), substitute_formula(phi.body, inner))
    return Conditional(tuple(substitute_formula(a, env) for a in phi.antecedents),
                       substitute_formula(phi.consequent, env))


def formula_terms(phi: Formula) -> Iterator[Term]:
    for a in atoms(phi):
        while isinstance(a, BuEquation):
            yield a.bound
            a = a.body
        yield a.lhs
        yield a.rhs


def bu_count(phi: Formula) -> int:
    n = 0
    for a in atoms(phi):
        while isinstance(a, BuEquation):
            n += 1
            a = a.body
    return n


# ---------------------------------------------------------------------------
# signatures


FLAGS = ("standard", "n_standard", "starred")


@dataclass(eq=True)
class Signature:
    name: str
    sorts: dict = field(default_factory=dict)
    eq_sorts: frozenset = frozenset()
    funcs: dict = field(default_factory=dict)
    defaults: dict = field(default_factory=dict)
    flags: frozenset = frozenset()
    hidden_sorts: frozenset = frozenset()

    __hash__ = None  # type: ignore[assignment]

    def func(self, name: str) -> FuncSymbol:
        try:
            return self.funcs[name]
        except KeyError:
            raise SortError(f"unknown symbol {name!r}") from None

    def sort(self, name: str) -> Sort:
        try:
            return self.sorts[name]
        except KeyError:
            raise SortError(f"unknown sort {name!r}") from None

    def has(self, name: str) -> bool:
        return name in self.funcs

    @property
    def is_standard(self) -> bool:
        return "standard" in self.flags

    @property
    def is_n_standard(self) -> bool:
        return "n_standard" in self.flags

    @property
    def is_starred(self) -> bool:
        return "starred" in self.flags

    def copy(self, **changes) -> "Signature":
        data = dict(name=self.name, sorts=dict(self.sorts), eq_sorts=self.eq_sorts,
                    funcs=dict(self.funcs), defaults=dict(self.defaults), flags=self.flags,
                    hidden_sorts=self.hidden_sorts)
        data.update(changes)
        return Signature(**data)

    def default(self, s: Sort) -> Term:
        try:
            return self.defaults[s.name]
        except KeyError:
            raise SignatureError(f"sort {s.name} has no default") from None

    def sort_index(self) -> list[Sort]:
        return list(self.sorts.values())

    def func_index(self) -> list[FuncSymbol]:
        return list(self.funcs.values())

    def with_funcs(self, syms: Iterable[FuncSymbol]) -> "Signature":
        out = self.copy()
        for f in syms:
            add_symbol(out, f)
        return out

    def reduct(self, sorts: Iterable[str], funcs: Iterable[str], name: Optional[str] = None) -> "Signature":
        keep_s = set(sorts)
        keep_f = set(funcs)
        out = Signature(
            name=name or self.name,
            sorts={k: v for k, v in self.sorts.items() if k in keep_s},
            eq_sorts=frozenset(s for s in self.eq_sorts if s in keep_s),
            funcs={k: v for k, v in self.funcs.items() if k in keep_f},
            defaults={k: v for k, v in self.defaults.items() if k in keep_s},
            flags=self.flags if any(Sort(k).starred for k in keep_s & set(self.sorts))
            else self.flags - {"starred"},
            hidden_sorts=frozenset(s for s in self.hidden_sorts if s in keep_s),
        )
        return out


def add_symbol(sig: Signature, f: FuncSymbol) -> None:
    """Add ``f`` in place; an identical symbol is a no-op, a clash is an error."""
    old = sig.funcs.get(f.name)
    if old is not None:
        if old != f:
            raise SignatureError(f"name collision: {old} versus {f}")
        return
    for s in f.domain + (f.range,):
        if s.name not in sig.sorts:
            raise SignatureError(f"symbol {f.name} uses undeclared sort {s.name}")
    sig.funcs[f.name] = f


def add_sort(sig: Signature, s: Sort, default: Optional[Term] = None, eq: bool = False) -> None:
    if s.name not in sig.sorts:
        sig.sorts[s.name] = s
    if eq:
        sig.eq_sorts = sig.eq_sorts | {s.name}
    if default is not None and s.name not in sig.defaults:
        sig.defaults[s.name] = default


def standardize(sig: Signature) -> Signature:
    """Add bool and the boolean operations, if_s and eq_s (for equality sorts)."""
    out = sig.copy()
    add_sort(out, BOOL, default=FALSE)
    for f in bool_symbols():
        add_symbol(out, f)
    for s in list(out.sorts.values()):
        if s != BOOL and s.name not in out.hidden_sorts:
            add_symbol(out, if_symbol(s))
    for name in sorted(out.eq_sorts):
        add_symbol(out, eq_symbol(out.sorts[name]))
    out.flags = out.flags | {"standard"}
    return out


def n_standardize(sig: Signature) -> Signature:
    """Add nat with 0, S, if_nat, eq_nat, less_nat.  Idempotent."""
    out = standardize(sig) if not sig.is_standard else sig.copy()
    add_sort(out, NAT, default=App(ZERO), eq=True)
    for f in nat_symbols():
        add_symbol(out, f)
    out.flags = out.flags | {"n_standard"}
    validate(out)
    return out


def star_signature(sig: Signature) -> Signature:
    """Array expansion: every non-nat sort s gets s* with the array operations."""
    if sig.is_starred:
        raise SignatureError("signature is already starred; nested stars are not formed")
    if not sig.is_standard:
        raise SignatureError("array expansion needs a standard signature")
    base = n_standardize(sig)
    out = base.copy()
    for s in list(base.sorts.values()):
        if s == NAT or s.name in base.hidden_sorts:
            continue
        a = s.star()
        with_eq = s.name in base.eq_sorts
        add_sort(out, a, eq=with_eq)
        for f in array_symbols(s, with_eq):
            add_symbol(out, f)
        out.defaults[a.name] = App(out.funcs[f"Null_{s.name}"])
    out.flags = out.flags | {"starred"}
    validate(out)
    return out


def base_sorts(sig: Signature) -> list[Sort]:
    """Sorts s of a starred signature for which s* is present."""
    return [s.base for s in sig.sorts.values() if s.starred]


def validate(sig: Signature) -> None:
    """Check defaults exist and the standard operations promised by the flags are present."""
    for s in sig.sorts.values():
        if s.starred:
            if s.base.name not in sig.sorts:
                raise SignatureError(f"array sort {s.name} without base sort")
            if s.base.starred:
                raise SignatureError(f"nested array sort {s.name}")
            if s.base == NAT:
                raise SignatureError("nat* is not formed")
        if s.name not in sig.defaults:
            raise SignatureError(f"sort {s.name} has no default term")
        d = sig.defaults[s.name]
        if not is_closed(d):
            raise SignatureError(f"default for {s.name} is not closed")
        if typecheck_term(sig, d) != s:
            raise SignatureError(f"default for {s.name} has the wrong sort")
    for name in sig.eq_sorts:
        if name not in sig.sorts:
            raise SignatureError(f"equality sort {name} is not declared")
    for name, f in sig.funcs.items():
        want = reserved_type(name)
        if want is not None and want != f:
            raise SignatureError(f"name collision: reserved symbol {name} must be {want}")
    required: list[FuncSymbol] = []
    if "standard" in sig.flags:
        if BOOL.name not in sig.sorts:
            raise SignatureError("standard signature without bool")
        required += bool_symbols()
        required += [if_symbol(s) for s in sig.sorts.values()
                     if s != BOOL and s.name not in sig.hidden_sorts]
        required += [eq_symbol(sig.sorts[n]) for n in sorted(sig.eq_sorts)]
    if "n_standard" in sig.flags:
        if NAT.name not in sig.sorts or NAT.name not in sig.eq_sorts:
            raise SignatureError("N-standard signature needs nat as an equality sort")
        required += nat_symbols()
    if "starred" in sig.flags:
        for s in base_sorts(sig):
            required += array_symbols(s, s.name in sig.eq_sorts)
    for f in required:
        if sig.funcs.get(f.name) != f:
            raise SignatureError(f"missing standard symbol {f}")


class Verdict(NamedTuple):
    ok: bool
    witness: Optional[str] = None


STRICT_NAMES = frozenset({"0", "S", "if_nat", "eq_nat", "less_nat", "true", "false", "and",
                          "or", "not"})


def check_strict_n_standard(sig: Signature) -> Verdict:
    """No symbol other than the standard ones may have range nat or bool."""
    if not sig.is_n_standard:
        return Verdict(False, "not N-standard")
    for f in sig.funcs.values():
        if f.range in (NAT, BOOL) and f.name not in STRICT_NAMES:
            return Verdict(False, f.name)
    return Verdict(True, None)


def default_term(sig: Signature, s: Sort) -> Term:
    return sig.default(s)


def typecheck_term(sig: Signature, t: Term) -> Sort:
    if isinstance(t, Var):
        if t.sort.name not in sig.sorts:
            raise SortError(f"variable {t.name} has unknown sort {t.sort}")
        return t.sort
    f = sig.funcs.get(t.fn.name)
    if f is None:
        raise SortError(f"unknown symbol {t.fn.name!r}")
    if f != t.fn:
        raise SortError(f"symbol {t.fn.name} used at the wrong type")
    if len(t.args) != f.arity:
        raise SortError(f"arity mismatch: {f.name} takes {f.arity} arguments, got {len(t.args)}")
    for i, (a, s) in enumerate(zip(t.args, f.domain)):
        got = typecheck_term(sig, a)
        if got != s:
            raise SortError(f"sort mismatch: argument {i + 1} of {f.name} is {got}, expected {s}")
    return f.range


def typecheck_formula(sig: Signature, phi: Formula) -> None:
    for a in atoms(phi):
        _check_atom(sig, a)


def _check_atom(sig: Signature, a) -> None:
    if isinstance(a, BuEquation):
        if a.var.sort != NAT:
            raise SortError("bounded quantifier variable must be nat")
        if typecheck_term(sig, a.bound) != NAT:
            raise SortError("bound of a bounded quantifier must be nat")
        _check_atom(sig, a.body)
        return
    ls = typecheck_term(sig, a.lhs)
    rs = typecheck_term(sig, a.rhs)
    if ls != rs:
        raise SortError(f"sort mismatch between sides: {ls} versus {rs}")
    if isinstance(a, Inequality) and ls != REAL:
        raise SortError("inequalities are only formed over real")


# ---------------------------------------------------------------------------
# text form


def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return f"{t.name}:{t.sort.name}"
    k = numeral_value(t)
    if k is not None:
        return str(k)
    if not t.args:
        return t.fn.name
    return "(" + " ".join([t.fn.name] + [print_term(a) for a in t.args]) + ")"


def print_formula(phi: Formula) -> str:
    if isinstance(phi, Equation):
        return f"(= {print_term(phi.lhs)} {print_term(phi.rhs)})"
    if isinstance(phi, Inequality):
        return f"(< {print_term(phi.lhs)} {print_term(phi.rhs)})"
    if isinstance(phi, BuEquation):
        return f"(forall {print_term(phi.var)} {print_term(phi.bound)} {print_formula(phi.body)})"
    ants = " ".join(print_formula(a) for a in phi.antecedents)
    return f"(=> ({ants}) {print_formula(phi.consequent)})"


def parse_term_sexp(sig: Signature, x, scope: Optional[dict] = None) -> Term:
    if isinstance(x, list):
        if not x:
            raise SortError(f"empty application at {sexp.where(x)}")
        head = x[0]
        if isinstance(head, list):
            raise SortError(f"application head must be a symbol at {sexp.where(x)}")
        args = [parse_term_sexp(sig, a, scope) for a in x[1:]]
        try:
            return app(sig, str(head), *args)
        except SortError as e:
            raise SortError(f"{e} at {sexp.where(head)}") from None
    text = str(x)
    if text.isdigit():
        if "0" not in sig.funcs or "S" not in sig.funcs:
            raise SortError(f"numeral {text} needs 0 and S at {sexp.where(x)}")
        return numeral(int(text))
    if ":" in text:
        name, _, sname = text.partition(":")
        if sname not in sig.sorts:
            raise SortError(f"unknown sort {sname!r} at {sexp.where(x)}")
        v = Var(name, sig.sorts[sname])
        if scope is not None:
            prev = scope.setdefault(name, v)
            if prev != v:
                raise SortError(f"variable {name} used at two sorts at {sexp.where(x)}")
        return v
    try:
        return app(sig, text)
    except SortError as e:
        raise SortError(f"{e} at {sexp.where(x)}") from None


def parse_term(sig: Signature, text: str) -> Term:
    return parse_term_sexp(sig, sexp.read_one(text))


def parse_formula_sexp(sig: Signature, x, scope: Optional[dict] = None) -> Formula:
    scope = {} if scope is None else scope
    if not isinstance(x, list) or not x:
        raise SortError(f"expected a formula at {sexp.where(x)}")
    head = str(x[0])
    if head in ("=", "<") and len(x) == 3:
        l = parse_term_sexp(sig, x[1], scope)
        r = parse_term_sexp(sig, x[2], scope)
        phi: Formula = Equation(l, r) if head == "=" else Inequality(l, r)
        _check_atom(sig, phi)
        return phi
    if head == "forall" and len(x) == 4:
        v = parse_term_sexp(sig, x[1], scope)
        if not isinstance(v, Var):
            raise SortError(f"forall needs a variable at {sexp.where(x)}")
        bound = parse_term_sexp(sig, x[2], scope)
        body = parse_formula_sexp(sig, x[3], scope)
        if isinstance(body, (Conditional, Inequality)):
            raise SortError(f"forall body must be an equation at {sexp.where(x)}")
        phi = BuEquation(v, bound, body)
        _check_atom(sig, phi)
        return phi
    if head == "=>" and len(x) == 3 and isinstance(x[1], list):
        ants = tuple(parse_formula_sexp(sig, a, scope) for a in x[1])
        cons = parse_formula_sexp(sig, x[2], scope)
        if any(isinstance(a, Conditional) for a in ants + (cons,)):
            raise SortError(f"conditionals do not nest at {sexp.where(x)}")
        return Conditional(ants, cons)
    raise SortError(f"malformed formula at {sexp.where(x)}")


def parse_formula(sig: Signature, text: str) -> Formula:
    return parse_formula_sexp(sig, sexp.read_one(text))


def _check_ident(x, what: str) -> str:
    if isinstance(x, list) or not _IDENT.match(str(x)) and str(x) != "0":
        raise SignatureError(f"bad {what} name {sexp.write(x)!s} at {sexp.where(x)}")
    return str(x)


def signature_from_sexp(x) -> Signature:
    if not isinstance(x, list) or len(x) < 2 or x[0] != "signature":
        raise SignatureError(f"expected (signature NAME ...) at {sexp.where(x)}")
    sig = Signature(name=_check_ident(x[1], "signature"))
    flags: set[str] = set()
    pending_defaults = []
    funcs = []
    for clause in x[2:]:
        if not isinstance(clause, list) or not clause:
            raise SignatureError(f"malformed clause at {sexp.where(clause)}")
        kw = str(clause[0])
        if kw == "flags":
            for fl in clause[1:]:
                if fl not in FLAGS:
                    raise SignatureError(f"unknown flag {fl} at {sexp.where(fl)}")
                flags.add(str(fl))
        elif kw == "sorts":
            if len(clause) == 1:
                raise SignatureError(f"empty sort list at {sexp.where(clause)}")
            for s in clause[1:]:
                add_sort(sig, Sort(_check_ident(s, "sort")))
        elif kw == "eqsorts":
            sig.eq_sorts = sig.eq_sorts | {str(s) for s in clause[1:]}
        elif kw == "hidden":
            sig.hidden_sorts = sig.hidden_sorts | {str(s) for s in clause[1:]}
        elif kw == "func" and len(clause) == 4 and isinstance(clause[2], list):
            funcs.append((clause, str(clause[1]), [str(s) for s in clause[2]], str(clause[3])))
        elif kw == "const" and len(clause) == 3:
            funcs.append((clause, str(clause[1]), [], str(clause[2])))
        elif kw == "default" and len(clause) == 3:
            pending_defaults.append(clause)
        else:
            raise SignatureError(f"unknown clause {kw!r} at {sexp.where(clause)}")
    if not sig.sorts:
        raise SignatureError("signature declares no sorts")
    # user symbols may mention bool and nat before the flags fill them in
    if "standard" in flags:
        add_sort(sig, BOOL)
    if "n_standard" in flags:
        add_sort(sig, NAT, eq=True)
    for clause, name, dom, rng in funcs:
        _check_ident(clause[1], "function")
        try:
            f = FuncSymbol(name, tuple(sig.sort(s) for s in dom), sig.sort(rng))
        except SortError as e:
            raise SignatureError(f"{e} at {sexp.where(clause)}") from None
        add_symbol(sig, f)
    if "starred" in flags:
        for s in list(sig.sorts.values()):
            if s.starred:
                sig.defaults.setdefault(s.name, App(FuncSymbol(f"Null_{s.base.name}", (), s)))
    if "n_standard" in flags:
        sig.defaults.setdefault("nat", App(ZERO))
    sig.flags = frozenset(flags)
    if "standard" in flags:
        add_sort(sig, BOOL)
        sig.defaults.setdefault("bool", FALSE)
        filled = standardize(sig)
        sig = filled
    if "n_standard" in flags:
        add_sort(sig, NAT, default=App(ZERO), eq=True)
        for f in nat_symbols():
            add_symbol(sig, f)
    if "starred" in flags:
        for s in base_sorts(sig):
            for f in array_symbols(s, s.name in sig.eq_sorts):
                add_symbol(sig, f)
    for clause in pending_defaults:
        s = str(clause[1])
        if s not in sig.sorts:
            raise SignatureError(f"default for undeclared sort {s} at {sexp.where(clause)}")
        sig.defaults[s] = parse_term_sexp(sig, clause[2])
    sig.flags = frozenset(flags)
    validate(sig)
    return sig


def parse_signature(text: Union[str, bytes]) -> Signature:
    return signature_from_sexp(sexp.read_one(text))


def signature_to_sexp_text(sig: Signature) -> str:
    lines = [f"(signature {sig.name}"]
    if sig.flags:
        lines.append("  (flags " + " ".join(f for f in FLAGS if f in sig.flags) + ")")
    lines.append("  (sorts " + " ".join(sig.sorts) + ")")
    if sig.eq_sorts:
        lines.append("  (eqsorts " + " ".join(s for s in sig.sorts if s in sig.eq_sorts) + ")")
    if sig.hidden_sorts:
        lines.append("  (hidden " + " ".join(s for s in sig.sorts if s in sig.hidden_sorts) + ")")
    for f in sig.funcs.values():
        if f.arity == 0:
            lines.append(f"  (const {f.name} {f.range.name})")
        else:
            dom = " ".join(s.name for s in f.domain)
            lines.append(f"  (func {f.name} ({dom}) {f.range.name})")
    for s, t in sig.defaults.items():
        lines.append(f"  (default {s} {print_term(t)})")
    return "\n".join(lines) + ")"


def print_signature(sig: Signature) -> str:
    return signature_to_sexp_text(sig)
