"""Bounded universes of closed terms.

Depth counts constants and the numerals 0..nat_cap as atoms of depth 1.  Terms are
enumerated by depth, then by symbol order in the signature, then argument-wise.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .errors import ResourceError
from .syntax import App, Signature, Sort, Term, depth, numeral, numeral_value

DEFAULT_CEILING = 1_000_000


def ceiling_from_env(default: int = DEFAULT_CEILING) -> int:
    raw = os.environ.get("ADT_CEILING")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return default


@dataclass
class TermUniverse:
    signature: Signature
    depth: int
    nat_cap: int
    ceiling: Optional[int] = None
    _levels: list = field(default_factory=list, repr=False)

    def __post_init__(self) -> None:
        if self.ceiling is not None:
            counts = self.counts()
            total = sum(counts.values())
            if total > self.ceiling:
                worst = max(counts, key=lambda s: counts[s])
                raise ResourceError(
                    f"term universe would hold {total} terms (ceiling {self.ceiling}); "
                    f"sort {worst} exploded with {counts[worst]} terms")

    def contains(self, t: Term) -> bool:
        if not isinstance(t, App):
            return False
        for u in _walk(t):
            if self.signature.funcs.get(u.fn.name) != u.fn:
                return False
        return depth(t, self.nat_cap) <= self.depth

    def counts(self) -> dict:
        """Number of closed terms per sort, computed without enumerating them."""
        sig = self.signature
        upto: dict[int, dict[str, int]] = {0: {s: 0 for s in sig.sorts}}
        for k in range(1, self.depth + 1):
            exact = {s: 0 for s in sig.sorts}
            for f in sig.funcs.values():
                if k == 1:
                    if f.arity == 0:
                        exact[f.range.name] += (self.nat_cap + 1) if f.name == "0" else 1
                    continue
                if f.arity == 0:
                    continue
                hi = 1
                lo = 1
                for s in f.domain:
                    hi *= upto[k - 1][s.name]
                    lo *= upto[k - 2][s.name] if k >= 2 else 0
                n = hi - lo
                if k == 2 and f.name == "S" and "0" in sig.funcs:
                    n -= self.nat_cap  # S(m) for m < nat_cap is already an atom
                exact[f.range.name] += n
            upto[k] = {s: upto[k - 1][s] + exact[s] for s in sig.sorts}
        return upto[self.depth]

    def _level(self, k: int) -> dict:
        """Terms of exact depth ``k`` by sort; levels are built on first use."""
        sig = self.signature
        levels = self._levels
        if not levels:
            lvl1 = {s: [] for s in sig.sorts}
            for f in sig.funcs.values():
                if f.arity == 0:
                    if f.name == "0":
                        lvl1["nat"].extend(numeral(i) for i in range(self.nat_cap + 1))
                    else:
                        lvl1[f.range.name].append(App(f))
            levels.extend([{s: [] for s in sig.sorts}, lvl1])
        total = sum(len(v) for lv in levels for v in lv.values())
        while len(levels) <= k:
            j = len(levels)
            upto = {s: [t for lv in levels[1:j] for t in lv[s]] for s in sig.sorts}
            newest = {s: set(map(id, levels[j - 1][s])) for s in sig.sorts}
            cur = {s: [] for s in sig.sorts}
            for f in sig.funcs.values():
                if f.arity == 0:
                    continue
                pools = [upto[s.name] for s in f.domain]
                for args in itertools.product(*pools):
                    if not any(id(a) in newest[s.name] for a, s in zip(args, f.domain)):
                        continue
                    if f.name == "S":
                        v = numeral_value(args[0])
                        if v is not None and v < self.nat_cap:
                            continue
                    cur[f.range.name].append(App(f, args))
                    total += 1
                    if self.ceiling is not None and total > self.ceiling:
                        raise ResourceError(f"term universe exceeded {self.ceiling} terms at sort {f.range.name}")
            levels.append(cur)
        return levels[k]

    def terms(self, s: Sort) -> Iterator[Term]:
        for k in range(1, self.depth + 1):
            yield from self._level(k)[s.name]

    def all_terms(self) -> Iterator[Term]:
        for k in range(1, self.depth + 1):
            lv = self._level(k)
            for s in self.signature.sorts:
                yield from lv[s]


def _walk(t: App) -> Iterator[App]:
    yield t
    for a in t.args:
        if isinstance(a, App):
            yield from _walk(a)


def term_universe(sig: Signature, depth: int, nat_cap: int,
                  ceiling: Optional[int] = None) -> TermUniverse:
    if depth < 1:
        raise ValueError("depth must be at least 1")
    return TermUniverse(sig, depth, nat_cap, ceiling)
