"""Concrete algebras: carriers, interpretations, evaluation and sampled satisfaction."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional, Union

from . import sexp
from .errors import EvaluationError, SignatureError, SortError, UnsamplableSort
from .rng import SplitMix64
from .syntax import (
    BOOL, INTVL, NAT, REAL, App, BuEquation, Conditional, Equation, FuncSymbol, Inequality,
    Signature, Sort, Term, Var, add_sort, add_symbol, base_sorts, formula_variables,
    n_standardize, signature_from_sexp, standardize, star_signature, validate,
)


@dataclass(frozen=True)
class Array:
    """A finite array over sort ``sort`` (the base sort, not the starred one)."""
    sort: Sort
    items: tuple = ()

    def __len__(self) -> int:
        return len(self.items)

    def __str__(self) -> str:
        return "[" + ", ".join(show_value(v) for v in self.items) + "]"


@dataclass(frozen=True)
class UserValue:
    sort: str
    token: str

    def __str__(self) -> str:
        return self.token


@dataclass(frozen=True)
class Carrier:
    kind: str  # finite | naturals | rationals | floats | interval | arrays | abstract
    elements: tuple = ()
    base: Optional[Sort] = None


@dataclass
class Algebra:
    name: str
    signature: Signature
    carriers: dict
    interp: dict
    real_mode: str = "exact"
    metrics: dict = field(default_factory=dict)

    def op(self, name: str) -> Callable[..., Any]:
        try:
            return self.interp[name]
        except KeyError:
            raise EvaluationError(f"algebra {self.name} does not interpret {name!r}") from None

    def default_value(self, s: Sort) -> Any:
        return eval_term(self, {}, self.signature.default(s))

    def expand(self, signature: Signature, interp: dict, carriers: Optional[dict] = None,
               name: Optional[str] = None) -> "Algebra":
        """The same algebra seen through a larger signature."""
        new = dict(self.interp)
        new.update(interp)
        car = dict(self.carriers)
        car.update(carriers or {})
        return Algebra(name or self.name, signature, car, new, self.real_mode, dict(self.metrics))


def show_value(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return str(v)
    return str(v)


# ---------------------------------------------------------------------------
# standard interpretations


def _if(c, x, y):
    return x if c else y


def _less(a: int, b: int) -> bool:
    return a < b


def standard_interp(sig: Signature) -> dict:
    """Interpretations of the boolean, conditional, equality and nat operations."""
    out: dict = {}
    table = {
        "true": lambda: True,
        "false": lambda: False,
        "and": lambda a, b: a and b,
        "or": lambda a, b: a or b,
        "not": lambda a: not a,
        "0": lambda: 0,
        "S": lambda n: n + 1,
        "less_nat": _less,
    }
    for name, f in sig.funcs.items():
        if name in table:
            out[name] = table[name]
        elif name.startswith("if_"):
            out[name] = _if
        elif name.startswith("eq_"):
            out[name] = _eq
    return out


def _eq(a, b) -> bool:
    return a == b


def array_interp(s: Sort, delta: Any) -> dict:
    def lgth(a: Array) -> int:
        return len(a.items)

    def ap(a: Array, z: int):
        return a.items[z] if z < len(a.items) else delta

    def update(a: Array, z: int, x) -> Array:
        if z >= len(a.items):
            return a
        items = list(a.items)
        items[z] = x
        return Array(s, tuple(items))

    def newlength(a: Array, z: int) -> Array:
        n = len(a.items)
        if z <= n:
            return Array(s, a.items[:z])
        return Array(s, a.items + (delta,) * (z - n))

    n = s.name
    return {
        f"Lgth_{n}": lgth,
        f"Ap_{n}": ap,
        f"Null_{n}": lambda: Array(s, ()),
        f"Update_{n}": update,
        f"Newlength_{n}": newlength,
        f"if_{n}*": _if,
        f"eq_{n}*": _eq,
    }


# ---------------------------------------------------------------------------
# built-in algebras


def _real_ops(mode: str) -> dict:
    if mode == "exact":
        zero, one = Fraction(0), Fraction(1)
        num = Fraction
    elif mode == "float":
        zero, one = 0.0, 1.0
        num = float
    else:
        raise ValueError(f"unknown real mode {mode!r}")

    def div_n(x, n: int):
        return zero if n == 0 else (x / n if mode == "float" else Fraction(x) / n)

    def discrete(a, b):
        return zero if a == b else one

    return {
        "zero_real": lambda: zero,
        "one_real": lambda: one,
        "add_real": lambda a, b: a + b,
        "mul_real": lambda a, b: a * b,
        "neg_real": lambda a: -a,
        "div_N": div_n,
        "d_real": lambda a, b: abs(a - b),
        "d_nat": discrete,
        "d_bool": discrete,
        "d_intvl": lambda a, b: abs(a - b),
        "i_I": lambda a: num(a),
        "zero_intvl": lambda: zero,
    }


def _sig(name: str, sorts: list[Sort], funcs: list[FuncSymbol], defaults: dict,
         eq: tuple = ()) -> Signature:
    sig = Signature(name=name)
    for s in sorts:
        add_sort(sig, s, default=defaults.get(s.name), eq=s.name in eq)
    for f in funcs:
        add_symbol(sig, f)
    return sig


def builtin_signature(name: str) -> Signature:
    false = App(FuncSymbol("false", (), BOOL))
    b = standardize(_sig("B", [BOOL], [], {"bool": false}))
    if name == "B":
        return b
    if name == "Beq":
        return standardize(b.copy(name="Beq", eq_sorts=frozenset({"bool"})))
    if name == "N0":
        z = FuncSymbol("0", (), NAT)
        return _sig("N0", [NAT], [z, FuncSymbol("S", (NAT,), NAT)], {"nat": App(z)})
    if name == "N":
        return n_standardize(b).copy(name="N")
    zero = FuncSymbol("zero_real", (), REAL)
    r0_funcs = [zero, FuncSymbol("one_real", (), REAL),
                FuncSymbol("add_real", (REAL, REAL), REAL),
                FuncSymbol("mul_real", (REAL, REAL), REAL),
                FuncSymbol("neg_real", (REAL,), REAL)]
    if name == "R0":
        return _sig("R0", [REAL], r0_funcs, {"real": App(zero)})
    rn = n_standardize(standardize(_sig("RN", [BOOL, REAL], r0_funcs,
                                        {"bool": false, "real": App(zero)})))
    if name == "RN":
        return rn
    rd = rn.with_funcs([FuncSymbol("div_N", (REAL, NAT), REAL),
                        FuncSymbol("d_real", (REAL, REAL), REAL),
                        FuncSymbol("d_nat", (NAT, NAT), REAL),
                        FuncSymbol("d_bool", (BOOL, BOOL), REAL)]).copy(name="Rd")
    if name == "Rd":
        return rd
    if name == "Id":
        zi = FuncSymbol("zero_intvl", (), INTVL)
        sig = rd.copy(name="Id")
        add_sort(sig, INTVL, default=App(zi))
        for f in [zi, FuncSymbol("i_I", (INTVL,), REAL), FuncSymbol("d_intvl", (INTVL, INTVL), REAL),
                  FuncSymbol("if_intvl", (BOOL, INTVL, INTVL), INTVL)]:
            add_symbol(sig, f)
        validate(sig)
        return sig
    raise SignatureError(f"unknown built-in algebra {name!r}")


BUILTINS = ("B", "Beq", "N0", "N", "R0", "RN", "Rd", "Id")


def builtin(name: str, real_mode: str = "exact") -> Algebra:
    sig = builtin_signature(name)
    carriers: dict = {}
    for s in sig.sorts.values():
        carriers[s.name] = {
            "bool": Carrier("finite", (False, True)),
            "nat": Carrier("naturals"),
            "real": Carrier("rationals" if real_mode == "exact" else "floats"),
            "intvl": Carrier("interval"),
        }[s.name]
    interp = standard_interp(sig)
    reals = _real_ops(real_mode)
    for f in sig.funcs:
        if f in reals:
            interp[f] = reals[f]
    metrics = {}
    for s in ("real", "nat", "bool", "intvl"):
        if f"d_{s}" in sig.funcs:
            metrics[s] = interp[f"d_{s}"]
    return Algebra(name, sig, carriers, interp, real_mode, metrics)


def n_standardize_algebra(A: Algebra) -> Algebra:
    if A.signature.is_n_standard:
        return A
    sig = n_standardize(A.signature)
    interp = standard_interp(sig)
    interp.update(A.interp)
    carriers = dict(A.carriers)
    carriers.setdefault("nat", Carrier("naturals"))
    return Algebra(A.name, sig, carriers, interp, A.real_mode, dict(A.metrics))


def star_algebra(A: Algebra) -> Algebra:
    """Array expansion of a standard algebra (N-standardising it first)."""
    N = n_standardize_algebra(A)
    sig = star_signature(N.signature)
    interp = dict(N.interp)
    carriers = dict(N.carriers)
    for s in base_sorts(sig):
        delta = N.default_value(s)
        interp.update(array_interp(s, delta))
        carriers[s.star().name] = Carrier("arrays", base=s)
    return Algebra(A.name + "*", sig, carriers, interp, A.real_mode, dict(A.metrics))


# ---------------------------------------------------------------------------
# evaluation


def eval_term(A: Algebra, env: dict, t: Term) -> Any:
    """Value of ``t`` in ``A``; ``env`` maps variables (or their names) to values."""
    if isinstance(t, Var):
        if t in env:
            return env[t]
        if t.name in env:
            return env[t.name]
        raise EvaluationError(f"unbound variable {t.name}")
    try:
        f = A.interp[t.fn.name]
    except KeyError:
        raise EvaluationError(f"algebra {A.name} does not interpret {t.fn.name!r}") from None
    if not t.args:
        return f()
    return f(*[eval_term(A, env, a) for a in t.args])


def holds(A: Algebra, env: dict, phi) -> bool:
    if isinstance(phi, Equation):
        return eval_term(A, env, phi.lhs) == eval_term(A, env, phi.rhs)
    if isinstance(phi, Inequality):
        return eval_term(A, env, phi.lhs) < eval_term(A, env, phi.rhs)
    if isinstance(phi, BuEquation):
        n = eval_term(A, env, phi.bound)
        inner = dict(env)
        for z in range(n):
            inner[phi.var] = z
            if not holds(A, inner, phi.body):
                return False
        return True
    if isinstance(phi, Conditional):
        for a in phi.antecedents:
            if not holds(A, env, a):
                return True
        return holds(A, env, phi.consequent)
    raise TypeError(f"not a formula: {phi!r}")


# ---------------------------------------------------------------------------
# sampling


@dataclass(frozen=True)
class Bounds:
    nat_max: int = 32
    array_max: int = 8
    real_lo: int = -4
    real_hi: int = 4
    grid_bits: int = 16


def sample_value(A: Algebra, s: Sort, rng: SplitMix64, bounds: Bounds = Bounds()) -> Any:
    car = A.carriers.get(s.name)
    if car is None:
        raise UnsamplableSort(f"no carrier for sort {s.name}")
    k = car.kind
    if k == "finite":
        return car.elements[rng.below(len(car.elements))]
    if k == "naturals":
        return rng.between(0, bounds.nat_max)
    if k == "rationals":
        g = 1 << bounds.grid_bits
        return Fraction(rng.between(bounds.real_lo * g, bounds.real_hi * g), g)
    if k == "floats":
        return bounds.real_lo + (bounds.real_hi - bounds.real_lo) * rng.unit()
    if k == "interval":
        g = 1 << bounds.grid_bits
        v = Fraction(rng.between(0, g), g)
        return v if A.real_mode == "exact" else float(v)
    if k == "arrays":
        n = rng.between(0, bounds.array_max)
        return Array(car.base, tuple(sample_value(A, car.base, rng, bounds) for _ in range(n)))
    raise UnsamplableSort(f"cannot sample sort {s.name} ({k})")


@dataclass
class SatResult:
    holds: bool
    checked: int
    vacuous: int = 0
    counterexample: Optional[dict] = None

    def __bool__(self) -> bool:
        return self.holds


def satisfies(A: Algebra, phi, samples: int = 1000, seed: int = 0,
              bounds: Bounds = Bounds()) -> SatResult:
    """Check ``phi`` on ``samples`` random assignments of its free variables."""
    rng = SplitMix64(seed)
    vs = formula_variables(phi)
    vacuous = 0
    for i in range(samples):
        env = {v: sample_value(A, v.sort, rng, bounds) for v in vs}
        if isinstance(phi, Conditional) and not all(holds(A, env, a) for a in phi.antecedents):
            vacuous += 1
            continue
        if not holds(A, env, phi):
            cex = {v.name: env[v] for v in vs}
            return SatResult(False, i + 1, vacuous, cex)
    return SatResult(True, samples, vacuous)


def distance(A: Algebra, s: Sort, v1: Any, v2: Any) -> Any:
    try:
        d = A.metrics[s.name]
    except KeyError:
        raise SortError(f"no metric for sort {s.name}") from None
    return d(v1, v2)


# ---------------------------------------------------------------------------
# textual finite algebras


def _atom_value(sig: Signature, s: Sort, x) -> Any:
    text = str(x)
    if s == BOOL and text in ("true", "false"):
        return text == "true"
    if s == NAT and text.isdigit():
        return int(text)
    if s == REAL:
        return Fraction(text)
    return UserValue(s.name, text)


def parse_algebra(text: Union[str, bytes]) -> Algebra:
    """``(algebra NAME (signature SIG) (carrier S (finite e ...)) (interp F (table ((a ...) v) ...)))``.

    SIG is either a built-in name or an inline signature.  Built-in sorts keep their
    standard carriers unless overridden; standard operations are filled in.
    """
    x = sexp.read_one(text)
    if not isinstance(x, list) or len(x) < 3 or x[0] != "algebra":
        raise SignatureError("expected (algebra NAME (signature ...) ...)")
    name = str(x[1])
    sig_clause = x[2]
    if not (isinstance(sig_clause, list) and sig_clause and sig_clause[0] == "signature"):
        raise SignatureError(f"expected a signature clause at {sexp.where(sig_clause)}")
    if len(sig_clause) == 2 and not isinstance(sig_clause[1], list):
        base = builtin(str(sig_clause[1]))
        sig = base.signature
        carriers, interp = dict(base.carriers), dict(base.interp)
    else:
        sig = signature_from_sexp(sig_clause)
        carriers = {}
        interp = standard_interp(sig)
        for s in sig.sorts.values():
            if s == BOOL:
                carriers[s.name] = Carrier("finite", (False, True))
            elif s == NAT:
                carriers[s.name] = Carrier("naturals")
    for clause in x[3:]:
        kw = str(clause[0])
        if kw == "carrier":
            s = sig.sort(str(clause[1]))
            spec = clause[2]
            if not (isinstance(spec, list) and spec and spec[0] == "finite"):
                raise SignatureError(f"only finite carriers can be declared at {sexp.where(clause)}")
            carriers[s.name] = Carrier("finite", tuple(_atom_value(sig, s, e) for e in spec[1:]))
        elif kw == "interp":
            f = sig.func(str(clause[1]))
            tab = clause[2]
            if not (isinstance(tab, list) and tab and tab[0] == "table"):
                raise SignatureError(f"expected (table ...) at {sexp.where(clause)}")
            rows = {}
            for row in tab[1:]:
                args = tuple(_atom_value(sig, s, a) for s, a in zip(f.domain, row[0]))
                rows[args] = _atom_value(sig, f.range, row[1])
            interp[f.name] = _table_fn(f.name, rows)
        else:
            raise SignatureError(f"unknown clause {kw!r} at {sexp.where(clause)}")
    for f in sig.funcs:
        if f not in interp:
            raise SignatureError(f"algebra {name} gives no interpretation for {f}")
    for s in sig.sorts:
        carriers.setdefault(s, Carrier("abstract"))
    return Algebra(name, sig, carriers, interp)


def _table_fn(name: str, rows: dict) -> Callable[..., Any]:
    def f(*args):
        try:
            return rows[args]
        except KeyError:
            raise EvaluationError(f"table for {name} has no row for {args}") from None
    return f


def load_algebra(ref: str) -> Algebra:
    """A built-in name (optionally ``name:float``) or a path to an .alg file."""
    name, _, mode = ref.partition(":")
    if name in BUILTINS:
        return builtin(name, mode or "exact")
    with open(ref, "rb") as fh:
        return parse_algebra(fh.read())


__all__ = [
    "Algebra", "Array", "Bounds", "Carrier", "SatResult", "UserValue", "builtin",
    "builtin_signature", "distance", "eval_term", "holds", "load_algebra", "n_standardize_algebra",
    "parse_algebra", "sample_value", "satisfies", "show_value", "standard_interp", "star_algebra",
]

