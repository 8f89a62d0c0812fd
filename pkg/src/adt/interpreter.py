"""Running derivations over an algebra, with fuel-bounded minimisation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence

from .algebra import Algebra, sample_value, Bounds
from .errors import DecodeError, EvaluationError
from .rng import SplitMix64
from .schemes import Cases, Comp, Const, Derivation, FnType, Mu, PrimRec, Prim, Proj, decode

DEFAULT_FUEL = 10**6


@dataclass(frozen=True)
class RunResult:
    outcome: str  # value | divergence | error
    value: Any = None
    site: Optional[int] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.outcome == "value"


class OutOfFuel(Exception):
    def __init__(self, site: int) -> None:
        super().__init__(f"minimisation at entry {site} ran out of fuel")
        self.site = site


class _Tank:
    __slots__ = ("fuel",)

    def __init__(self, fuel: int) -> None:
        self.fuel = fuel


def check_compatible(d: Derivation, A: Algebra) -> Optional[str]:
    """Return a description of the first mismatch between ``d`` and ``A``, if any."""
    sig = A.signature
    for e in d.entries:
        sch = e.scheme
        if isinstance(sch, (Prim, Const)):
            f = sig.funcs.get(sch.fn)
            if f is None or (d.signature is not None and d.signature.funcs.get(sch.fn) != f):
                return f"signature mismatch: algebra {A.name} lacks {sch.fn}"
            if sch.fn not in A.interp:
                return f"signature mismatch: algebra {A.name} does not interpret {sch.fn}"
        for t in e.types:
            for s in t.domain + (t.range,):
                if s.name not in sig.sorts:
                    return f"signature mismatch: algebra {A.name} has no sort {s.name}"
    return None


def compile_derivation(d: Derivation, A: Algebra, tank: _Tank) -> list:
    """One callable per entry; primitive recursion entries return all components."""
    fns: list[Callable] = []

    def component(r) -> Callable:
        f = fns[r.entry]
        if len(d.entries[r.entry].types) == 1:
            return f
        c = r.component
        return lambda *a: f(*a)[c]

    for i, e in enumerate(d.entries):
        sch = e.scheme
        if isinstance(sch, Prim):
            fns.append(A.interp[sch.fn])
        elif isinstance(sch, Const):
            c = A.interp[sch.fn]
            fns.append(lambda *a, c=c: c())
        elif isinstance(sch, Proj):
            k = sch.index - 1
            fns.append(lambda *a, k=k: a[k])
        elif isinstance(sch, Comp):
            h = component(sch.head)
            gs = [component(g) for g in sch.args]
            if not gs:
                fns.append(lambda *a, h=h: h())
            else:
                fns.append(lambda *a, h=h, gs=gs: h(*[g(*a) for g in gs]))
        elif isinstance(sch, Cases):
            fns.append(lambda c, x, y: x if c else y)
        elif isinstance(sch, PrimRec):
            fns.append(_primrec([component(g) for g in sch.base], [component(h) for h in sch.step],
                                len(e.types) == 1))
        elif isinstance(sch, Mu):
            fns.append(_mu(component(sch.test), tank, i))
        else:
            raise EvaluationError(f"unknown scheme {sch!r}")
    return fns


def _primrec(gs: list, hs: list, single: bool) -> Callable:
    def f(n, *x):
        vals = tuple(g(*x) for g in gs)
        for z in range(n):
            vals = tuple(h(z, *x, *vals) for h in hs)
        return vals[0] if single else vals
    return f


def _mu(g: Callable, tank: _Tank, site: int) -> Callable:
    def f(*x):
        z = 0
        while not g(*x, z):
            if tank.fuel <= 0:
                raise OutOfFuel(site)
            tank.fuel -= 1
            z += 1
        return z
    return f


def run(d: Derivation, A: Algebra, args: Sequence, fuel: int = DEFAULT_FUEL) -> RunResult:
    """Evaluate ``d`` at ``args``.  Each step of a minimisation search costs one unit of fuel."""
    problem = check_compatible(d, A)
    if problem:
        return RunResult("error", error=problem)
    if len(args) != len(d.type.domain):
        return RunResult("error", error=f"arity mismatch: expected {len(d.type.domain)} arguments, got {len(args)}")
    tank = _Tank(fuel)
    fns = compile_derivation(d, A, tank)
    top = fns[-1]
    if len(d.entries[-1].types) > 1:
        inner = top
        top = lambda *a: inner(*a)[0]  # noqa: E731
    try:
        return RunResult("value", value=top(*args))
    except OutOfFuel as e:
        return RunResult("divergence", site=e.site)
    except RecursionError:
        return RunResult("error", error="recursion limit")


def as_function(d: Derivation, A: Algebra, fuel: int = DEFAULT_FUEL) -> Callable:
    """A Python function computing ``d``; raises OutOfFuel on divergence."""
    tank = _Tank(fuel)
    fns = compile_derivation(d, A, tank)
    return fns[-1]


def entry_functions(d: Derivation, A: Algebra, fuel: int = DEFAULT_FUEL) -> list:
    """One callable per (entry, component), with fuel reset on every outermost call."""
    tank = _Tank(fuel)
    fns = compile_derivation(d, A, tank)
    out = []
    for i, e in enumerate(d.entries):
        for c in range(len(e.types)):
            f = fns[i]
            if len(e.types) > 1:
                f = (lambda f, c: lambda *a: f(*a)[c])(f, c)

            def fueled(*a, f=f):
                tank.fuel = fuel
                return f(*a)
            out.append(fueled)
    return out


def universal_eval(A: Algebra, ftype: FnType, code: int, args: Sequence,
                   fuel: int = DEFAULT_FUEL) -> RunResult:
    """Run the derivation with Goedel number ``code``; junk codes give the default value."""
    try:
        d = decode(A.signature, code)
    except DecodeError:
        return RunResult("value", value=A.default_value(ftype.range))
    if d.type != ftype:
        return RunResult("value", value=A.default_value(ftype.range))
    return run(d, A, args, fuel)


@dataclass(frozen=True)
class TotalityReport:
    total: bool
    checked: int
    diverged_at: Optional[tuple] = None


def probe_totality(d: Derivation, A: Algebra, samples: int = 100, seed: int = 0,
                   fuel: int = DEFAULT_FUEL, bounds: Bounds = Bounds()) -> TotalityReport:
    rng = SplitMix64(seed)
    for i in range(samples):
        args = tuple(sample_value(A, s, rng, bounds) for s in d.type.domain)
        r = run(d, A, args, fuel)
        if r.outcome == "divergence":
            return TotalityReport(False, i + 1, args)
        if r.outcome == "error":
            raise EvaluationError(r.error or "error")
    return TotalityReport(True, samples)
