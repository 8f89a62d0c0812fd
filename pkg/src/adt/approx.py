"""Approximation over metric algebras: invexp, fast approximating sequences and their specs."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional

from .algebra import Algebra, Bounds, builtin
from .compiler import SpecSet, compile_mupr_spec
from .errors import SpecError
from .interpreter import as_function, probe_totality
from .rng import SplitMix64
from .schemes import Derivation
from .syntax import (
    NAT, REAL, App, Equation, FuncSymbol, Inequality, Var, add_symbol, numeral,
)

GUARD_BITS = 20
ORACLE_BITS = 128


# ---------------------------------------------------------------------------
# dyadic reals


@dataclass(frozen=True)
class DyadicReal:
    """mantissa * 2**exponent, kept with an odd mantissa (or zero with exponent 0)."""

    mantissa: int
    exponent: int = 0

    def __post_init__(self) -> None:
        m, e = self.mantissa, self.exponent
        if m == 0:
            e = 0
        else:
            while m % 2 == 0:
                m //= 2
                e += 1
        object.__setattr__(self, "mantissa", m)
        object.__setattr__(self, "exponent", e)

    def to_fraction(self) -> Fraction:
        if self.exponent >= 0:
            return Fraction(self.mantissa * (1 << self.exponent))
        return Fraction(self.mantissa, 1 << -self.exponent)

    def __float__(self) -> float:
        return float(self.to_fraction())

    def __str__(self) -> str:
        return f"{self.mantissa}*2^{self.exponent}"


def invexp(n: int) -> DyadicReal:
    """Exactly 2^-n."""
    if n < 0:
        raise ValueError("invexp is defined on naturals")
    return DyadicReal(1, -n)


INVEXP = FuncSymbol("invexp", (NAT,), REAL)


def invexp_equations(sig=None) -> list:
    """invexp(0) = 1 and invexp(S n) = div_N(invexp(n), 2)."""
    one = FuncSymbol("one_real", (), REAL)
    div = FuncSymbol("div_N", (REAL, NAT), REAL)
    s = FuncSymbol("S", (NAT,), NAT)
    n = Var("n", NAT)
    return [
        Equation(App(INVEXP, (numeral(0),)), App(one)),
        Equation(App(INVEXP, (App(s, (n,)),)), App(div, (App(INVEXP, (n,)), numeral(2)))),
    ]


def invexp_algebra(real_mode: str = "exact") -> Algebra:
    """The metric reals with invexp interpreted on the dyadic carrier."""
    A = builtin("Rd", real_mode)
    sig = A.signature.copy()
    add_symbol(sig, INVEXP)
    if real_mode == "exact":
        fn = lambda n: invexp(n).to_fraction()  # noqa: E731
    else:
        fn = lambda n: float(invexp(n))  # noqa: E731
    return A.expand(sig, {"invexp": fn})


# ---------------------------------------------------------------------------
# the exponential oracle


def exp_oracle(x, bits: int = ORACLE_BITS) -> Fraction:
    """e^x summed in fixed point with ``bits`` fractional bits (|x| <= 8).

    Terms are truncated toward zero and summed until they vanish; the error is
    below (number of terms + 1) * 2^-bits.
    """
    x = Fraction(x)
    if abs(x) > 8:
        raise ValueError("oracle range is |x| <= 8")
    one = 1 << bits
    X = (x.numerator << bits) // x.denominator
    total = term = one
    k = 0
    while term:
        k += 1
        p = term * X
        q = (abs(p) >> bits) // k
        term = q if p >= 0 else -q
        total += term
    return Fraction(total, one)


def maclaurin_modulus(n: int) -> int:
    """Least N with 3/(N+1)! < 2^-n: partial sums up to index N are within 2^-n on [0,1]."""
    N = 0
    fact = 1  # (N+1)!
    while 3 * (1 << n) >= fact:
        N += 1
        fact *= N + 1
    return N


# ---------------------------------------------------------------------------
# approximating sequences


@dataclass
class ApproxSequence:
    name: str
    evaluator: Callable[[int, Any], Any]
    source: Optional[Derivation] = field(default=None, repr=False)

    def __call__(self, n: int, *x) -> Any:
        return self.evaluator(n, *x)


def sequence_from_derivation(d: Derivation, A: Algebra, fuel: int = 10**6) -> ApproxSequence:
    f = as_function(d, A, fuel)
    if len(d.entries[-1].types) > 1:
        g = f
        f = lambda *a: g(*a)[0]  # noqa: E731
    return ApproxSequence(d.name or "derivation", f, d)


def constant_sequence(value: Any, name: str = "constant") -> ApproxSequence:
    return ApproxSequence(name, lambda n, *x: value)


def alternating_sequence() -> ApproxSequence:
    return ApproxSequence("alternating", lambda n, *x: 0.0 if n % 2 == 0 else 1.0)


def modulus_to_fast(seq: ApproxSequence, g: Callable[[int], int]) -> ApproxSequence:
    """n -> G_{g(n)}."""
    return ApproxSequence(f"{seq.name}@modulus", lambda n, *x: seq.evaluator(g(n), *x), seq.source)


def maclaurin_partial_sums() -> ApproxSequence:
    """Partial sums of the exponential series up to index N (no modulus)."""
    def G(N: int, x) -> Fraction:
        x = Fraction(x)
        total = term = Fraction(1)
        for k in range(1, N + 1):
            term = term * x / k
            total += term
        return total
    return ApproxSequence("maclaurin", G)


def interval_grid_samples(samples: int, seed: int, grid_bits: int = 16) -> list:
    rng = SplitMix64(seed)
    g = 1 << grid_bits
    return [Fraction(rng.between(0, g), g) for _ in range(samples)]


# ---------------------------------------------------------------------------
# checks


@dataclass
class FastApproxReport:
    passed: bool
    checked: int
    max_scaled: float  # max over samples of d * 2^n
    violations: list  # (n, x, d) for every failing (n, sample)
    failing_n: list  # every n with at least one violation, ascending

    @property
    def first_failure(self) -> Optional[int]:
        return self.failing_n[0] if self.failing_n else None

    def as_dict(self) -> dict:
        return {
            "passed": self.passed, "checked": self.checked, "max_scaled": self.max_scaled,
            "failing_n": self.failing_n,
            "violations": [[n, str(x), float(d)] for n, x, d in self.violations[:10]],
        }


def _exact(v) -> Fraction:
    if isinstance(v, DyadicReal):
        return v.to_fraction()
    return Fraction(v)


def check_fast_approx(seq: ApproxSequence, oracle: Callable[[Any], Any], samples: int = 100,
                      n_max: int = 20, seed: int = 0, xs: Optional[list] = None,
                      guard_bits: int = GUARD_BITS, metric: Optional[Callable] = None) -> FastApproxReport:
    """Check d(G_n(x), f(x)) < 2^-n * (1 - 2^-guard_bits) for n <= n_max at sampled x.

    Distances are computed exactly from the (possibly binary64) values, so the
    guard band only absorbs rounding inside the sequence itself.
    """
    if xs is None:
        xs = interval_grid_samples(samples, seed)
    dist = metric or (lambda a, b: abs(_exact(a) - _exact(b)))
    refs = [oracle(x) for x in xs]
    factor = 1 - Fraction(1, 1 << guard_bits) if guard_bits else Fraction(1)
    violations = []
    failing = []
    worst = Fraction(0)
    checked = 0
    for n in range(n_max + 1):
        bound = invexp(n).to_fraction() * factor
        bad = False
        for x, ref in zip(xs, refs):
            d = Fraction(dist(seq(n, x), ref))
            checked += 1
            worst = max(worst, d * (1 << n))
            if not d < bound:
                violations.append((n, x, d))
                bad = True
        if bad:
            failing.append(n)
    return FastApproxReport(not violations, checked, float(worst), violations, failing)


@dataclass
class CauchyReport:
    passed: bool
    checked: int
    violations: list


def verify_cauchy_uniqueness(seq: ApproxSequence, samples: int = 20, n_max: int = 12, seed: int = 0,
                             xs: Optional[list] = None, guard_bits: int = GUARD_BITS) -> CauchyReport:
    """d(G_m(x), G_n(x)) < 2^-m + 2^-n for all m, n <= n_max at sampled x."""
    if xs is None:
        xs = interval_grid_samples(samples, seed)
    factor = 1 - Fraction(1, 1 << guard_bits) if guard_bits else Fraction(1)
    violations = []
    checked = 0
    for x in xs:
        vals = [_exact(seq(n, x)) for n in range(n_max + 1)]
        for m in range(n_max + 1):
            for n in range(m, n_max + 1):
                checked += 1
                bound = (invexp(m).to_fraction() + invexp(n).to_fraction()) * factor
                if not abs(vals[m] - vals[n]) < bound:
                    violations.append((m, n, x))
    return CauchyReport(not violations, checked, violations)


def exp_functional_equation(samples: int = 100, seed: int = 0, tol: float = 1e-9) -> tuple[bool, float]:
    """f(x+y) = f(x) f(y) for the oracle exponential at sampled rationals; (ok, worst relative error)."""
    rng = SplitMix64(seed)
    worst = 0.0
    g = 1 << 16
    for _ in range(samples):
        x = Fraction(rng.between(-2 * g, 2 * g), g)
        y = Fraction(rng.between(-2 * g, 2 * g), g)
        lhs = exp_oracle(x + y)
        rhs = exp_oracle(x) * exp_oracle(y)
        worst = max(worst, float(abs(lhs - rhs) / abs(lhs)))
    return worst < tol, worst


# ---------------------------------------------------------------------------
# specifications with inequalities


def compile_approx_spec(gamma: Derivation, target_name: str = "f", check_totality: bool = True,
                        A: Optional[Algebra] = None) -> SpecSet:
    """F_gamma, the two invexp equations and d(G(n, x), f(x)) < invexp(n)."""
    ft = gamma.type
    if not ft.domain or ft.domain[0] != NAT:
        raise SpecError("approximating derivations take a leading nat argument")
    base = compile_mupr_spec(gamma)
    sig = base.signature.copy()
    out = ft.range
    dname = f"d_{out.name}"
    if dname not in sig.funcs or "div_N" not in sig.funcs or "one_real" not in sig.funcs:
        raise SpecError("metric required for inequality axioms")
    if check_totality and A is not None:
        rep = probe_totality(gamma, A, samples=20, fuel=10**5, bounds=Bounds(nat_max=8))
        if not rep.total:
            raise SpecError(f"approximating derivation diverges at {rep.diverged_at}")
    add_symbol(sig, INVEXP)
    f = FuncSymbol(target_name, ft.domain[1:], out)
    add_symbol(sig, f)
    G = sig.funcs[base.target]
    n = Var("n", NAT)
    xs = tuple(Var(f"x{i + 1}", s) for i, s in enumerate(ft.domain[1:]))
    ineq = Inequality(App(sig.funcs[dname], (App(G, (n,) + xs), App(f, xs))), App(INVEXP, (n,)))
    spec = SpecSet(sig, base.axioms, base.provenance, base.base, base.symbols, base.target, gamma)
    spec = spec.plus(invexp_equations(), "invexp")
    return spec.plus([ineq], "approx")


def approx_spec_algebra(spec: SpecSet, A: Algebra, oracle: Callable[[Any], Any],
                        target_name: str = "f") -> Algebra:
    """Interpret an approximation spec: derivation symbols by the interpreter, f by ``oracle``."""
    from .compiler import spec_algebra
    base = SpecSet(spec.signature, (), (), spec.base, spec.symbols, spec.target, spec.derivation)
    B = spec_algebra(base, A)
    if A.real_mode == "exact":
        inv = lambda n: invexp(n).to_fraction()  # noqa: E731
    else:
        inv = lambda n: float(invexp(n))  # noqa: E731
    return B.expand(spec.signature, {"invexp": inv, target_name: oracle})
