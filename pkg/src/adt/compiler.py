"""From derivations to specifications, and the axiom schemes that go with them."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Optional, Union

from . import sexp
from .algebra import Algebra
from .errors import DerivationError, SortError, SpecError
from .interpreter import DEFAULT_FUEL, entry_functions
from .schemes import Cases, Comp, Const, Derivation, Mu, PrimRec, Prim, Proj, encode_bytes
from .syntax import (
    BOOL, FALSE, NAT, TRUE, App, BuEquation, Conditional, Equation, FuncSymbol, Signature, Sort,
    Var, add_sort, add_symbol, base_sorts, bu_count, formula_variables, numeral,
    parse_formula_sexp, print_formula, signature_from_sexp, signature_to_sexp_text,
    star_signature, substitute_formula,
)
from .universe import term_universe


@dataclass
class SpecSet:
    signature: Signature
    axioms: tuple
    provenance: tuple
    base: Optional[Signature] = None  # the visible signature, before fresh symbols
    symbols: tuple = ()  # per entry: names of its fresh symbols
    target: Optional[str] = None
    derivation: Optional[Derivation] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if len(self.axioms) != len(self.provenance):
            raise SpecError("every axiom needs a provenance")

    def __len__(self) -> int:
        return len(self.axioms)

    def plus(self, axioms: list, provenance: Union[str, list], signature: Optional[Signature] = None,
             front: bool = False) -> "SpecSet":
        prov = [provenance] * len(axioms) if isinstance(provenance, str) else list(provenance)
        if front:
            ax = tuple(axioms) + self.axioms
            pv = tuple(prov) + self.provenance
        else:
            ax = self.axioms + tuple(axioms)
            pv = self.provenance + tuple(prov)
        return SpecSet(signature or self.signature, ax, pv, self.base, self.symbols, self.target,
                       self.derivation)

    def visible(self) -> Signature:
        return self.base or self.signature


# ---------------------------------------------------------------------------
# fresh symbols and specification equations


def derivation_tag(d: Derivation) -> str:
    return hashlib.sha256(encode_bytes(d)).hexdigest()[:6]


def fresh_symbols(d: Derivation) -> list[list[FuncSymbol]]:
    tag = derivation_tag(d)
    out = []
    for i, e in enumerate(d.entries):
        if len(e.types) == 1:
            names = [f"f{i}_{tag}"]
        else:
            names = [f"f{i}_{k + 1}_{tag}" for k in range(len(e.types))]
        out.append([FuncSymbol(n, t.domain, t.range) for n, t in zip(names, e.types)])
    return out


def _vars(sorts, prefix: str = "x") -> list[Var]:
    return [Var(f"{prefix}{i + 1}", s) for i, s in enumerate(sorts)]


def entry_equations(d: Derivation, syms: list, i: int) -> list:
    e = d.entries[i]
    sch = e.scheme
    sig = d.signature

    def ref(r) -> FuncSymbol:
        return syms[r.entry][r.component]

    f = syms[i][0]
    xs = _vars(f.domain)
    lhs = App(f, tuple(xs))
    if isinstance(sch, Prim):
        return [Equation(lhs, App(sig.funcs[sch.fn], tuple(xs)))]
    if isinstance(sch, Const):
        return [Equation(lhs, App(sig.funcs[sch.fn]))]
    if isinstance(sch, Proj):
        return [Equation(lhs, xs[sch.index - 1])]
    if isinstance(sch, Comp):
        h = ref(sch.head)
        inner = tuple(App(ref(g), tuple(xs)) for g in sch.args)
        return [Equation(lhs, App(h, inner))]
    if isinstance(sch, Cases):
        s = sch.sort
        x, y = Var("x1", s), Var("x2", s)
        return [Equation(App(f, (TRUE, x, y)), x), Equation(App(f, (FALSE, x, y)), y)]
    if isinstance(sch, PrimRec):
        comps = syms[i]
        z = Var("z", NAT)
        us = _vars(comps[0].domain[1:])
        zero = numeral(0)
        sz = App(sig.funcs["S"], (z,))
        prev = tuple(App(c, (z, *us)) for c in comps)
        out = [Equation(App(c, (zero, *us)), App(ref(g), tuple(us)))
               for c, g in zip(comps, sch.base)]
        out += [Equation(App(c, (sz, *us)), App(ref(h), (z, *us) + prev))
                for c, h in zip(comps, sch.step)]
        return out
    raise DerivationError(f"entry {i} has no equational definition")


def mu_formula(d: Derivation, syms: list, i: int) -> Conditional:
    """forall z < y [g(x, z) = false] and g(x, y) = true  ->  f(x) = y"""
    sch = d.entries[i].scheme
    assert isinstance(sch, Mu)
    f = syms[i][0]
    g = syms[sch.test.entry][sch.test.component]
    xs = _vars(f.domain)
    y, z = Var("y", NAT), Var("z", NAT)
    bu = BuEquation(z, y, Equation(App(g, (*xs, z)), FALSE))
    return Conditional((bu, Equation(App(g, (*xs, y)), TRUE)), Equation(App(f, tuple(xs)), y))


def _spec_signature(d: Derivation, syms: list) -> Signature:
    sig = d.signature.copy()
    for group in syms:
        for f in group:
            add_symbol(sig, f)
    return sig


def compile_pr_spec(d: Derivation) -> SpecSet:
    """Equations of a PR (or PR*) derivation: 1, 2 or 2m equations per entry."""
    if not d.entries:
        raise DerivationError("derivation must be nonempty")
    if d.uses_mu:
        raise DerivationError("derivation uses minimisation; use the mu-PR compiler")
    return _compile(d)


def compile_mupr_spec(d: Derivation) -> SpecSet:
    """E plus the minimisation formulas, preceded by the array axioms when arrays occur."""
    if not d.entries:
        raise DerivationError("derivation must be nonempty")
    spec = _compile(d)
    if d.uses_star:
        arr = array_axioms(d.signature)
        spec = spec.plus(arr, "ArrAx", front=True)
    return spec


def _compile(d: Derivation) -> SpecSet:
    syms = fresh_symbols(d)
    sig = _spec_signature(d, syms)
    axioms: list = []
    prov: list[str] = []
    for i, e in enumerate(d.entries):
        if isinstance(e.scheme, Mu):
            axioms.append(mu_formula(d, syms, i))
            prov.append(f"F_mu:{i}")
        else:
            eqs = entry_equations(d, syms, i)
            axioms += eqs
            prov += [f"entry:{i}"] * len(eqs)
    return SpecSet(sig, tuple(axioms), tuple(prov), d.signature,
                   tuple(tuple(f.name for f in g) for g in syms), syms[-1][0].name, d)


def spec_algebra(spec: SpecSet, A: Algebra, fuel: int = DEFAULT_FUEL) -> Algebra:
    """Expand ``A`` by interpreting each fresh symbol as the function its entry computes."""
    d = spec.derivation
    if d is None:
        raise SpecError("specification does not come from a derivation")
    fns = entry_functions(d, A, fuel)
    interp = {}
    k = 0
    for names in spec.symbols:
        for n in names:
            interp[n] = fns[k]
            k += 1
    return A.expand(spec.signature, interp)


# ---------------------------------------------------------------------------
# array axioms


def array_axioms(sig: Signature, include_equality: Optional[bool] = None) -> list:
    """Eight axioms per array sort; the extensionality axiom only for equality sorts other than nat.

    ``include_equality=True`` forces extensionality for every array sort, which is
    sound in the array algebras whatever the base sort.
    """
    star = sig if sig.is_starred else star_signature(sig)
    out = []
    z, z0, z1 = Var("z", NAT), Var("z0", NAT), Var("z1", NAT)
    F = star.funcs
    less, eqn = F["less_nat"], F["eq_nat"]
    for s in base_sorts(star):
        n = s.name
        a, a1, a2 = Var("a", s.star()), Var("a1", s.star()), Var("a2", s.star())
        x = Var("x", s)
        lg, ap, null, upd, nl = (F[f"Lgth_{n}"], F[f"Ap_{n}"], F[f"Null_{n}"], F[f"Update_{n}"],
                                 F[f"Newlength_{n}"])
        delta = star.default(s)
        out.append(Equation(App(lg, (App(null),)), numeral(0)))
        out.append(Conditional((Equation(App(less, (z, App(lg, (a,)))), FALSE),),
                               Equation(App(ap, (a, z)), delta)))
        out.append(Equation(App(lg, (App(upd, (a, z, x)),)), App(lg, (a,))))
        out.append(Conditional((Equation(App(eqn, (z, z0)), FALSE),),
                               Equation(App(ap, (App(upd, (a, z0, x)), z)), App(ap, (a, z)))))
        out.append(Conditional((Equation(App(less, (z, App(lg, (a,)))), TRUE),),
                               Equation(App(ap, (App(upd, (a, z, x)), z)), x)))
        out.append(Equation(App(lg, (App(nl, (a, z)),)), z))
        out.append(Conditional((Equation(App(less, (z, z1)), TRUE),),
                               Equation(App(ap, (App(nl, (a, z1)), z)), App(ap, (a, z)))))
        want_eq = (n in star.eq_sorts and s != NAT) if include_equality is None else include_equality
        if want_eq:
            out.append(Conditional(
                (Equation(App(lg, (a1,)), App(lg, (a2,))),
                 BuEquation(z, App(lg, (a1,)), Equation(App(ap, (a1, z)), App(ap, (a2, z))))),
                Equation(a1, a2)))
    return out


# ---------------------------------------------------------------------------
# N-standardness axioms


def nstd_schemes(sig: Signature) -> list:
    F = sig.funcs
    out: list = []
    if "and" in F:
        T, Fa = TRUE, FALSE
        for p in (T, Fa):
            for q in (T, Fa):
                out.append(Equation(App(F["and"], (p, q)), T if (p == T and q == T) else Fa))
        for p in (T, Fa):
            for q in (T, Fa):
                out.append(Equation(App(F["or"], (p, q)), T if (p == T or q == T) else Fa))
        out.append(Equation(App(F["not"], (T,)), Fa))
        out.append(Equation(App(F["not"], (Fa,)), T))
    for s in sig.sorts.values():
        fname = f"if_{s.name}"
        if s == BOOL or fname not in F:
            continue
        x1, x2 = Var("x1", s), Var("x2", s)
        out.append(Equation(App(F[fname], (TRUE, x1, x2)), x1))
        out.append(Equation(App(F[fname], (FALSE, x1, x2)), x2))
    if "eq_nat" in F and "less_nat" in F:
        z, z1, z2 = Var("z", NAT), Var("z1", NAT), Var("z2", NAT)
        S = F["S"]
        zero = numeral(0)
        eq, lt = F["eq_nat"], F["less_nat"]
        out += [
            Equation(App(eq, (zero, zero)), TRUE),
            Equation(App(eq, (App(S, (z,)), zero)), FALSE),
            Equation(App(eq, (zero, App(S, (z,)))), FALSE),
            Equation(App(eq, (App(S, (z1,)), App(S, (z2,)))), App(eq, (z1, z2))),
            Equation(App(lt, (zero, App(S, (z,)))), TRUE),
            Equation(App(lt, (z, zero)), FALSE),
            Equation(App(lt, (App(S, (z1,)), App(S, (z2,)))), App(lt, (z1, z2))),
        ]
    for name in sig.sorts:
        if name not in sig.eq_sorts or name == "nat":
            continue
        s = sig.sorts[name]
        x, x1, x2 = Var("x", s), Var("x1", s), Var("x2", s)
        eq = F[f"eq_{name}"]
        out.append(Equation(App(eq, (x, x)), TRUE))
        out.append(Conditional((Equation(App(eq, (x1, x2)), TRUE),), Equation(x1, x2)))
    return out


def nstd_axioms(sig: Signature, mode: str = "schematic", depth: int = 3,
                nat_cap: int = 8, ceiling: Optional[int] = None) -> list:
    """The N-standardness axioms; ``mode='closed'`` gives all instances over closed terms."""
    schemes = nstd_schemes(sig)
    if mode == "schematic":
        return schemes
    if mode != "closed":
        raise ValueError(f"unknown mode {mode!r}")
    U = term_universe(sig, depth, nat_cap, ceiling)
    pools = {s: list(U.terms(sig.sorts[s])) for s in sig.sorts}
    out = []
    for phi in schemes:
        vs = formula_variables(phi)
        for combo in _product([pools[v.sort.name] for v in vs]):
            out.append(substitute_formula(phi, dict(zip(vs, combo))))
    return out


def _product(pools):
    if not pools:
        yield ()
        return
    for head in pools[0]:
        for rest in _product(pools[1:]):
            yield (head,) + rest


def boundedness_instances(sig: Signature, equations: list, bound: int) -> list:
    """P(0), ..., P(k-1)  ->  forall z < k P(z), for k <= bound."""
    out = []
    for eq in equations:
        vs = [v for v in formula_variables(eq)]
        nat_vs = [v for v in vs if v.sort == NAT]
        if not isinstance(eq, Equation) or len(vs) != 1 or len(nat_vs) != 1:
            raise SpecError("boundedness instances need equations with exactly one nat variable")
        z = nat_vs[0]
        for k in range(bound + 1):
            ants = tuple(substitute_formula(eq, {z: numeral(i)}) for i in range(k))
            out.append(Conditional(ants, BuEquation(z, numeral(k), eq)))
    return out


# ---------------------------------------------------------------------------
# eliminating bounded quantifiers


def _fresh(sig: Signature, stem: str, start: int = 0) -> tuple[str, int]:
    j = start
    while f"{stem}{j}" in sig.funcs or f"{stem}{j}" in sig.sorts:
        j += 1
    return f"{stem}{j}", j + 1


def eliminate_bu(spec: SpecSet, mode: str = "bool") -> SpecSet:
    """Replace every bounded quantifier by a fresh function symbol and four axioms.

    ``mode`` is ``bool`` (the new symbols are boolean) or ``sortD`` (a hidden sort D with
    a single constant d).  Quantifiers are removed innermost first, left to right.
    """
    if mode not in ("bool", "sortD"):
        raise ValueError(f"unknown elimination mode {mode!r}")
    sig = spec.signature.copy()
    if mode == "bool":
        if "bool" not in sig.sorts:
            raise SpecError("boolean elimination needs bool")
        target_sort, target = BOOL, TRUE
    else:
        dname = "D"
        k = 0
        while dname in sig.sorts:
            k += 1
            dname = f"D{k}"
        target_sort = Sort(dname)
        dconst = FuncSymbol("d" if "d" not in sig.funcs else f"d_{dname}", (), target_sort)
        target = App(dconst)
        add_sort(sig, target_sort, default=target)
        add_symbol(sig, dconst)
        sig.hidden_sorts = sig.hidden_sorts | {dname}
        if not any(bu_count(phi) for phi in spec.axioms):
            sig = spec.signature.copy()
    counter = [0]
    new_axioms: list = []
    new_prov: list = []
    S = sig.funcs.get("S")
    if S is None and any(bu_count(phi) for phi in spec.axioms):
        raise SpecError("bounded quantifiers need nat with S")

    def elim(atom, added: list):
        if not isinstance(atom, BuEquation):
            return atom
        body = elim(atom.body, added)
        z = atom.var
        us = [v for v in formula_variables(body) if v != z]
        name, counter[0] = _fresh(sig, "chi", counter[0])
        chi = FuncSymbol(name, (NAT,) + tuple(v.sort for v in us), target_sort)
        add_symbol(sig, chi)
        sz = App(S, (z,))
        t1, t2 = body.lhs, body.rhs
        at = lambda n: App(chi, (n,) + tuple(us))  # noqa: E731
        added += [
            Equation(at(numeral(0)), target),
            Conditional((Equation(at(z), target), Equation(t1, t2)), Equation(at(sz), target)),
            Conditional((Equation(at(sz), target),), Equation(at(z), target)),
            Conditional((Equation(at(sz), target),), Equation(t1, t2)),
        ]
        return Equation(App(chi, (atom.bound,) + tuple(us)), target)

    for phi, prov in zip(spec.axioms, spec.provenance):
        added: list = []
        if isinstance(phi, Conditional):
            ants = tuple(elim(a, added) for a in phi.antecedents)
            cons = elim(phi.consequent, added)
            out = Conditional(ants, cons)
        else:
            out = elim(phi, added)
        new_axioms.append(out)
        new_prov.append(prov)
        new_axioms += added
        new_prov += ["BU-elim"] * len(added)
    return SpecSet(sig, tuple(new_axioms), tuple(new_prov), spec.base, spec.symbols, spec.target,
                   spec.derivation)


def count_report(spec: SpecSet, before: Optional[SpecSet] = None) -> dict:
    sig = spec.signature
    rep = {
        "sorts": len(sig.sorts),
        "symbols": len(sig.funcs),
        "axioms": len(spec.axioms),
        "bu_occurrences": sum(bu_count(phi) for phi in spec.axioms),
    }
    if before is not None:
        new_syms = [f for f in sig.funcs.values() if f.name not in before.signature.funcs]
        rep["new_sorts"] = len([s for s in sig.sorts if s not in before.signature.sorts])
        rep["new_symbols"] = len([f for f in new_syms if f.arity > 0])
        rep["new_constants"] = len([f for f in new_syms if f.arity == 0])
        rep["axioms_before"] = len(before.axioms)
        rep["bu_before"] = sum(bu_count(phi) for phi in before.axioms)
    return rep


# ---------------------------------------------------------------------------
# text form


def print_spec(spec: SpecSet, name: str = "spec") -> str:
    lines = [f"(spec {name}", signature_to_sexp_text(spec.signature)]
    if spec.base is not None:
        lines.append("(visible " + " ".join(spec.base.funcs) + ")")
    if spec.target:
        lines.append(f"(target {spec.target})")
    for phi, p in zip(spec.axioms, spec.provenance):
        lines.append(f"(axiom {p} {print_formula(phi)})")
    return "\n".join(lines) + ")"


def parse_spec(text: Union[str, bytes]) -> SpecSet:
    x = sexp.read_one(text)
    if not (isinstance(x, list) and len(x) >= 3 and x[0] == "spec"):
        raise SpecError("expected (spec NAME (signature ...) ...)")
    sig = signature_from_sexp(x[2])
    axioms, prov = [], []
    target = None
    base = None
    for clause in x[3:]:
        kw = str(clause[0])
        if kw == "axiom" and len(clause) == 3:
            try:
                axioms.append(parse_formula_sexp(sig, clause[2]))
            except SortError as e:
                raise SpecError(f"axiom at {sexp.where(clause)}: {e}") from None
            prov.append(str(clause[1]))
        elif kw == "target" and len(clause) == 2:
            target = str(clause[1])
        elif kw == "visible":
            names = [str(c) for c in clause[1:]]
            base = sig.reduct([s for s in sig.sorts if s not in sig.hidden_sorts], names)
        else:
            raise SpecError(f"unknown clause {kw!r} at {sexp.where(clause)}")
    return SpecSet(sig, tuple(axioms), tuple(prov), base, (), target)


__all__ = [
    "SpecSet", "array_axioms", "boundedness_instances", "compile_mupr_spec", "compile_pr_spec",
    "count_report", "eliminate_bu", "fresh_symbols", "nstd_axioms", "nstd_schemes", "parse_spec",
    "print_spec", "spec_algebra",
]

