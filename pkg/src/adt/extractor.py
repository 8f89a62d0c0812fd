"""Recovering function values from specifications.

A value f(a) is extracted by naming a with a closed term t0, closing the
specification (plus the N-standardness axioms) over a bounded universe, and
reading off a closed term t over the visible signature with f(t0) = t provable.
Depth is deepened until such a t appears or the time budget runs out.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

from .algebra import Algebra, eval_term
from .compiler import SpecSet, eliminate_bu, nstd_axioms, spec_algebra
from .engine import Closure, TermModel
from .errors import EvaluationError, ExtractionError, ResourceError
from .rng import SplitMix64
from .syntax import App, FALSE, TRUE, Signature, Sort, Term, bu_count, numeral, print_term
from .universe import TermUniverse


def find_naming_term(A: Algebra, U: TermUniverse, a: Sequence, sorts: Optional[Sequence[Sort]] = None,
                     deadline: Optional[float] = None) -> tuple:
    """Least closed terms of ``U`` denoting the values ``a`` in ``A``.

    Naturals and booleans are named by numerals and truth values; other values by
    the first universe term that evaluates to them.
    """
    out = []
    for i, v in enumerate(a):
        s = sorts[i] if sorts is not None else _sort_of_value(v)
        t = _name(A, U, s, v, deadline)
        if t is None:
            raise ExtractionError("not-named", f"value {v!r} of sort {s.name} not named at depth {U.depth}")
        out.append(t)
    return tuple(out)


def _sort_of_value(v: Any) -> Sort:
    if isinstance(v, bool):
        return Sort("bool")
    if isinstance(v, int):
        return Sort("nat")
    raise ExtractionError("not-named", f"cannot infer the sort of {v!r}; pass sorts explicitly")


def _name(A: Algebra, U: TermUniverse, s: Sort, v: Any, deadline: Optional[float] = None) -> Optional[Term]:
    if s.name == "nat" and isinstance(v, int) and not isinstance(v, bool):
        # S^k of the largest atom numeral has depth k + 1
        return numeral(v) if v <= U.nat_cap + U.depth - 1 else None
    if s.name == "bool" and isinstance(v, bool):
        return TRUE if v else FALSE
    for i, t in enumerate(U.terms(s)):
        if deadline is not None and i % 256 == 0 and time.monotonic() > deadline:
            raise ExtractionError("budget", "time budget exhausted while naming arguments")
        try:
            if eval_term(A, {}, t) == v:
                return t
        except EvaluationError:
            continue
    return None


@dataclass
class ExtractionTask:
    spec: SpecSet
    target: str
    args: tuple
    algebra: Algebra
    params: tuple = ()


@dataclass
class Extraction:
    term: Term
    value: Any
    depth: int
    naming: tuple
    elapsed_ms: float = 0.0

    def as_dict(self) -> dict:
        return {"term": print_term(self.term), "value": self.value, "depth": self.depth,
                "naming": [print_term(t) for t in self.naming]}


# closure reuse across tasks; keyed on the prepared specification object
_CACHE: dict = {}
_CACHE_SIZE = 16


def prepare_spec(spec: SpecSet) -> SpecSet:
    """Eliminate bounded quantifiers (hidden-sort mode) and add the N-standardness axioms."""
    if any(bu_count(phi) for phi in spec.axioms):
        spec = eliminate_bu(spec, "sortD")
    if "NStdAx" not in spec.provenance:
        spec = spec.plus(nstd_axioms(spec.signature), "NStdAx")
    return spec


def _closure(spec: SpecSet, depth: int, nat_cap: int, rounds: int) -> Closure:
    key = (id(spec), depth, nat_cap)
    hit = _CACHE.get(key)
    if hit is not None and hit[0] is spec:
        return hit[1]
    cl = Closure(spec, depth, nat_cap, max_rounds=rounds)
    if len(_CACHE) >= _CACHE_SIZE:
        _CACHE.pop(next(iter(_CACHE)))
    _CACHE[key] = (spec, cl)
    return cl


def clear_cache() -> None:
    _CACHE.clear()


def _param_term(k: Any) -> Term:
    if isinstance(k, bool):
        return TRUE if k else FALSE
    if isinstance(k, int):
        return numeral(k)
    if isinstance(k, App):
        return k
    raise ExtractionError("bad-parameter", f"parameters are naturals or booleans, got {k!r}")


def extract_value(task: ExtractionTask, depth: Optional[int] = None, rounds: int = 10_000,
                  budget_ms: int = 10_000, start_depth: int = 2) -> Extraction:
    """Term and value of ``target(args, params)`` read off the bounded initial model.

    With ``depth`` given only that depth is tried; otherwise depths 2, 3, ... are
    tried with ``nat_cap = 4 * depth`` until a visible-signature witness appears.
    """
    t_start = time.monotonic()
    deadline = t_start + budget_ms / 1000.0
    spec = prepare_spec(task.spec)
    visible: Signature = task.spec.visible()
    allowed = set(visible.funcs)
    f = spec.signature.funcs.get(task.target)
    if f is None:
        raise ExtractionError("bad-target", f"unknown function symbol {task.target!r}")
    n_args = len(task.args)
    if n_args + len(task.params) != f.arity:
        raise ExtractionError("bad-target", f"{task.target} takes {f.arity} arguments")
    depths = [depth] if depth is not None else range(start_depth, 10**6)
    last_missing = None
    for d in depths:
        if time.monotonic() > deadline:
            break
        cap = 4 * d
        U = TermUniverse(visible, d, cap)
        try:
            naming = find_naming_term(task.algebra, U, task.args, f.domain[:n_args], deadline)
        except ExtractionError as e:
            if depth is not None or e.kind == "budget":
                raise
            continue
        query = App(f, tuple(naming) + tuple(_param_term(k) for k in task.params))
        cl = _closure(spec, d, cap, rounds)
        cl.deadline = deadline
        try:
            M = TermModel(cl, "lazy")
            c = M.add_term(query)
        except ResourceError as e:
            if "time budget" in str(e):
                break
            raise
        finally:
            cl.deadline = None
        if not M.consistent:
            raise ExtractionError("inconsistent", "spec inconsistent: true = false is provable")
        reps = M.representatives(allowed)
        t = reps.get(M.graph.find(c))
        if t is not None:
            value = eval_term(task.algebra, {}, t)
            return Extraction(t, value, d, tuple(naming), (time.monotonic() - t_start) * 1000)
        last_missing = d
        if depth is not None:
            break
    if depth is not None and last_missing is not None:
        raise ExtractionError("no-witness", f"no visible-signature term equals {task.target}(...) at depth {depth}")
    raise ExtractionError("budget", f"budget of {budget_ms} ms exceeded before a witness appeared")


# ---------------------------------------------------------------------------
# strong specifiability


@dataclass
class Subalgebra:
    """A subset given by seed values closed under generating operations.

    ``ops`` lists (function, argument sorts, result sort).  ``member`` decides
    membership outright when the generated closure cannot be exhausted.
    """

    seed: dict
    ops: list = field(default_factory=list)
    member: Optional[Callable[[str, Any], bool]] = None
    bound: int = 2000

    def generate(self) -> tuple[dict, bool]:
        elems = {s: list(dict.fromkeys(vs)) for s, vs in self.seed.items()}
        seen = {s: set(vs) for s, vs in elems.items()}
        total = sum(len(v) for v in elems.values())
        changed = True
        while changed:
            changed = False
            for fn, dom, rng in self.ops:
                pools = [list(elems.get(s, ())) for s in dom]
                for args in _product(pools):
                    v = fn(*args)
                    if v in seen.setdefault(rng, set()):
                        continue
                    seen[rng].add(v)
                    elems.setdefault(rng, []).append(v)
                    total += 1
                    changed = True
                    if total >= self.bound:
                        return elems, False
        return elems, True

    def contains(self, elems: dict, exhaustive: bool, s: str, v: Any) -> bool:
        if self.member is not None:
            return self.member(s, v)
        if v in set(elems.get(s, ())):
            return True
        if not exhaustive:
            raise ExtractionError("closure-bound", f"subalgebra closure exceeded {self.bound} elements")
        return False


def _product(pools):
    if not pools:
        yield ()
        return
    for head in pools[0]:
        for rest in _product(pools[1:]):
            yield (head,) + rest


@dataclass
class SpecifiabilityVerdict:
    closed: bool
    checked: int
    counterexample: Optional[tuple] = None

    def as_dict(self) -> dict:
        return {"closed": self.closed, "checked": self.checked,
                "counterexample": None if self.counterexample is None else list(map(repr, self.counterexample))}


def check_strong_specifiability(spec: Optional[SpecSet], f: Any, A: Algebra, B: Subalgebra,
                                samples: int = 200, seed: int = 0) -> SpecifiabilityVerdict:
    """Check on samples from ``B`` that ``B`` is closed under ``f`` interpreted in ``A``.

    ``f`` is a symbol of ``spec`` (interpreted through its derivation) or a tuple
    (callable, argument sorts, result sort).
    """
    if isinstance(f, str):
        if spec is None:
            raise ExtractionError("bad-target", "a symbol name needs a specification")
        sym = spec.signature.funcs[f]
        fn = spec_algebra(spec, A).op(f)
        dom = [s.name for s in sym.domain]
        rng = sym.range.name
    else:
        fn, dom, rng = f
    elems, exhaustive = B.generate()
    if not exhaustive and B.member is None:
        raise ExtractionError("closure-bound", f"subalgebra closure exceeded {B.bound} elements")
    pools = [elems.get(s, []) for s in dom]
    if any(not p for p in pools):
        return SpecifiabilityVerdict(True, 0)
    rng_state = SplitMix64(seed)
    checked = 0
    for _ in range(samples):
        args = tuple(p[rng_state.below(len(p))] for p in pools)
        v = fn(*args)
        checked += 1
        if not B.contains(elems, exhaustive, rng, v):
            return SpecifiabilityVerdict(False, checked, args + (v,))
    return SpecifiabilityVerdict(True, checked)
