"""Ground closure of conditional equational specifications over bounded term universes.

The closure lives in an e-graph: nodes are (symbol, child classes) and a node is only
admitted when its depth (1 + the largest least depth of its child classes, numerals
up to ``nat_cap`` being atoms) stays within the universe depth.  Axioms are used
through ground instances whose terms live in the graph.

Each axiom gets a trigger pattern.  Instances are found by matching triggers at
nodes, extended by an equality join or by ranging leftover variables over all
classes of their sort.  Antecedents are checked left to right and their terms are
created on demand, so the same machinery answers single queries without building
the whole universe ("lazy" mode) or saturates the full universe ("full" mode).
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .compiler import SpecSet
from .errors import ResourceError, SpecError
from .syntax import (
    App, BuEquation, Conditional, Equation, Inequality, Signature, Term, Var,
    formula_variables, numeral, size, variables,
)
from .universe import TermUniverse, ceiling_from_env

DEFAULT_ROUNDS = 10_000


# ---------------------------------------------------------------------------
# instance plans


@dataclass
class Plan:
    index: int
    axiom: object
    antecedents: tuple
    consequent: object
    trigger: Optional[App]
    join: Optional[tuple] = None  # (bound side, pattern to match against its class)
    ranged: tuple = ()
    variables: tuple = ()


def _sides(atom) -> list:
    if isinstance(atom, Equation):
        return [atom.lhs, atom.rhs]
    return []


def _covers(t: Term, vs: Iterable[Var]) -> bool:
    have = set(variables(t))
    return all(v in have for v in vs)


def make_plan(index: int, phi) -> Plan:
    if isinstance(phi, Inequality) or (
            isinstance(phi, Conditional) and any(isinstance(a, Inequality)
                                                 for a in phi.antecedents + (phi.consequent,))):
        raise SpecError("inequalities cannot be used by the equational closure")
    if isinstance(phi, Conditional):
        ants, cons = phi.antecedents, phi.consequent
    else:
        ants, cons = (), phi
    vs = tuple(formula_variables(phi))
    plan = Plan(index, phi, tuple(ants), cons, None, variables=vs)
    if not vs:
        return plan
    trigger: Optional[App] = None
    join = None
    if isinstance(cons, Equation):
        l, r = cons.lhs, cons.rhs
        if not ants:
            if isinstance(l, App) and _covers(l, vs):
                trigger = l
            elif isinstance(r, App) and _covers(r, vs):
                trigger = r
            else:
                trigger = l if isinstance(l, App) else (r if isinstance(r, App) else None)
        elif isinstance(l, App) and isinstance(r, Var) and r not in variables(l):
            trigger = l  # a function definition f(x) = y: range y
        elif isinstance(l, App) or isinstance(r, App):
            head = l if isinstance(l, App) else r
            bigger = [s for a in ants for s in _sides(a)
                      if isinstance(s, App) and s.fn == head.fn and size(s) > size(head)]
            covering = [s for a in ants for s in _sides(a) if isinstance(s, App) and _covers(s, vs)]
            if bigger:
                trigger = max(bigger, key=size)
            elif _covers(head, vs) or not covering:
                trigger = head
            else:
                trigger = max(covering, key=size)
    if trigger is None:
        for a in ants:
            if isinstance(a, Equation):
                for side, other in ((a.lhs, a.rhs), (a.rhs, a.lhs)):
                    if isinstance(side, App) and variables(side):
                        trigger = side
                        if isinstance(other, App) and set(variables(other)) - set(variables(side)):
                            join = (side, other)
                        break
            if trigger is not None:
                break
    if trigger is None:
        raise SpecError(f"axiom {index} has no usable pattern")
    covered = set(variables(trigger))
    if join:
        covered |= set(variables(join[1]))
    plan.trigger = trigger
    plan.join = join
    plan.ranged = tuple(v for v in vs if v not in covered)
    return plan


# ---------------------------------------------------------------------------
# the e-graph


class EGraph:
    def __init__(self, sig: Signature, depth: int, nat_cap: int, ceiling: int) -> None:
        self.sig = sig
        self.depth = depth
        self.nat_cap = nat_cap
        self.ceiling = ceiling
        self.parent: list[int] = []
        self.sym: list[str] = []
        self.args: list[tuple] = []
        self.ndepth: list[int] = []
        self.sort: list[str] = []
        self.hashcons: dict = {}
        self.members: dict[int, list] = {}
        self.by_sym: dict[int, dict] = {}
        self.parents: dict[int, list] = {}
        self.cdepth: dict[int, int] = {}
        self.numval: dict[int, int] = {}
        self.sym_nodes: dict[str, list] = {}
        self.sort_nodes: dict[str, list] = {}
        self.todo: list[int] = []  # nodes whose children changed class
        self.fresh: deque = deque()  # nodes to match
        self.queued: set = set()
        self.merges = 0
        self.contradiction = False
        self.log: Optional[list] = None
        self.node_term: Optional[list] = None

    def push(self, n: int) -> None:
        if n not in self.queued:
            self.queued.add(n)
            self.fresh.append(n)

    def pop(self) -> int:
        n = self.fresh.popleft()
        self.queued.discard(n)
        return n

    # union-find -----------------------------------------------------------

    def find(self, a: int) -> int:
        p = self.parent
        while p[a] != a:
            p[a] = p[p[a]]
            a = p[a]
        return a

    def num(self, c: int) -> Optional[int]:
        return self.numval.get(self.find(c))

    # node creation --------------------------------------------------------

    def lookup(self, sym: str, args: tuple) -> Optional[int]:
        args = tuple(self.find(a) for a in args)
        n = self.hashcons.get((sym, args))
        return None if n is None else self.find(n)

    def node_depth(self, sym: str, args: tuple) -> int:
        if not args:
            return 1
        if sym == "S":
            k = self.numval.get(args[0])
            if k is not None and k < self.nat_cap:
                return 1
        return 1 + max(self.cdepth[a] for a in args)

    def add(self, sym: str, args: tuple = (), force: bool = False) -> Optional[int]:
        args = tuple(self.find(a) for a in args)
        key = (sym, args)
        n = self.hashcons.get(key)
        if n is not None:
            return self.find(n)
        d = self.node_depth(sym, args)
        if d > self.depth and not force:
            return None
        f = self.sig.funcs[sym]
        if len(self.parent) >= self.ceiling:
            raise ResourceError(f"closure exceeded {self.ceiling} nodes while adding sort {f.range.name}")
        n = len(self.parent)
        self.parent.append(n)
        self.sym.append(sym)
        self.args.append(args)
        self.ndepth.append(d)
        self.sort.append(f.range.name)
        self.hashcons[key] = n
        self.members[n] = [n]
        self.by_sym[n] = {sym: [n]}
        self.parents[n] = []
        self.cdepth[n] = d
        for a in set(args):
            self.parents[a].append(n)
        if sym == "0":
            self.numval[n] = 0
        elif sym == "S" and args[0] in self.numval:
            self.numval[n] = self.numval[args[0]] + 1
        self.sym_nodes.setdefault(sym, []).append(n)
        self.sort_nodes.setdefault(f.range.name, []).append(n)
        self.push(n)
        if self.node_term is not None:
            self.node_term.append(App(f, tuple(self.node_term[a] for a in args)))
        return n

    def build(self, t: Term, env: dict, force: bool = False) -> Optional[int]:
        if isinstance(t, Var):
            return self.find(env[t])
        kids = []
        for a in t.args:
            c = self.build(a, env, force)
            if c is None:
                return None
            kids.append(c)
        return self.add(t.fn.name, tuple(kids), force)

    def find_term(self, t: Term, env: dict) -> Optional[int]:
        """Class of ``t`` if it is already represented, without creating nodes."""
        if isinstance(t, Var):
            return self.find(env[t])
        kids = []
        for a in t.args:
            c = self.find_term(a, env)
            if c is None:
                return None
            kids.append(c)
        return self.lookup(t.fn.name, tuple(kids))

    # merging --------------------------------------------------------------

    def merge(self, a: int, b: int, why=None) -> bool:
        a, b = self.find(a), self.find(b)
        if a == b:
            return False
        if len(self.members[a]) < len(self.members[b]):
            a, b = b, a
        self.parent[b] = a
        self.merges += 1
        if self.log is not None and why is not None:
            self.log.append(why)
        self.members[a].extend(self.members.pop(b))
        bs = self.by_sym.pop(b)
        asym = self.by_sym[a]
        for s, ns in bs.items():
            asym.setdefault(s, []).extend(ns)
        pb = self.parents.pop(b)
        self.todo.extend(pb)
        self.parents[a].extend(pb)
        for p in self.parents[a]:
            self.push(p)
        self.cdepth[a] = min(self.cdepth[a], self.cdepth.pop(b))
        va, vb = self.numval.get(a), self.numval.pop(b, None)
        if vb is not None:
            if va is not None and va != vb:
                self.contradiction = True
                self.numval[a] = min(va, vb)
            elif va is None:
                self.numval[a] = vb
                self._spread_numval(a)
        if "true" in asym and "false" in asym:
            self.contradiction = True
        return True

    def _spread_numval(self, c: int) -> None:
        stack = [c]
        while stack:
            c = self.find(stack.pop())
            k = self.numval[c]
            for p in self.parents[c]:
                if self.sym[p] == "S":
                    pc = self.find(p)
                    if pc not in self.numval:
                        self.numval[pc] = k + 1
                        stack.append(pc)

    def rebuild(self) -> None:
        while self.todo:
            n = self.todo.pop()
            old = self.args[n]
            new = tuple(self.find(a) for a in old)
            if new == old:
                continue
            self.args[n] = new
            self.hashcons.pop((self.sym[n], old), None)
            key = (self.sym[n], new)
            other = self.hashcons.get(key)
            if other is None:
                self.hashcons[key] = n
            elif self.find(other) != self.find(n):
                self.merge(other, n, ("congruence",))
            self.push(n)

    def refresh_depths(self) -> bool:
        """Recompute least depths after merges; True if any class got shallower."""
        changed = False
        again = True
        while again:
            again = False
            for n in range(len(self.parent)):
                args = tuple(self.find(a) for a in self.args[n])
                d = self.node_depth(self.sym[n], args)
                if d < self.ndepth[n]:
                    self.ndepth[n] = d
                    c = self.find(n)
                    if d < self.cdepth[c]:
                        self.cdepth[c] = d
                        again = changed = True
        return changed

    def roots(self, sort: str) -> list:
        seen = set()
        out = []
        for n in self.sort_nodes.get(sort, ()):
            c = self.find(n)
            if c not in seen:
                seen.add(c)
                out.append(c)
        return out

    # matching -------------------------------------------------------------

    def match(self, pat: Term, c: int, env: dict) -> Iterator[dict]:
        if isinstance(pat, Var):
            bound = env.get(pat)
            if bound is None:
                e2 = dict(env)
                e2[pat] = c
                yield e2
            elif self.find(bound) == c:
                yield env
            return
        for n in list(self.by_sym.get(c, {}).get(pat.fn.name, ())):
            yield from self.match_args(pat.args, self.args[n], env)

    def match_args(self, pats: tuple, classes: tuple, env: dict) -> Iterator[dict]:
        if not pats:
            yield env
            return
        c0 = self.find(classes[0])
        for e2 in self.match(pats[0], c0, env):
            yield from self.match_args(pats[1:], classes[1:], e2)


# ---------------------------------------------------------------------------
# closure driver


class Closure:
    def __init__(self, spec: SpecSet, depth: int, nat_cap: int, ceiling: Optional[int] = None,
                 max_rounds: int = DEFAULT_ROUNDS, log: bool = False) -> None:
        self.spec = spec
        self.sig = spec.signature
        self.depth = depth
        self.nat_cap = nat_cap
        self.max_rounds = max_rounds
        self.g = EGraph(self.sig, depth, nat_cap, ceiling or ceiling_from_env())
        if log:
            self.g.log = []
            self.g.node_term = []
        self.plans = [make_plan(i, phi) for i, phi in enumerate(spec.axioms)]
        self.by_head: dict[str, list] = {}
        for p in self.plans:
            if p.trigger is not None:
                self.by_head.setdefault(p.trigger.fn.name, []).append(p)
        self.join_heads = {p.trigger.fn.name for p in self.plans if p.join}
        self.seen: set = set()
        self.pending: dict = {}
        self.partials: dict = {}
        self.rounds = 0
        self.deadline: Optional[float] = None
        self._seed()

    def _seed(self) -> None:
        g = self.g
        for f in self.sig.funcs.values():
            if f.arity == 0:
                g.add(f.name)
        prev = g.hashcons.get(("0", ()))
        if prev is not None:
            c = prev
            for _ in range(self.nat_cap):
                c = g.add("S", (c,))
        for p in self.plans:
            if p.trigger is None:
                self._instance(p, {})

    # instances --------------------------------------------------------------

    def _key(self, p: Plan, env: dict) -> tuple:
        f = self.g.find
        return (p.index,) + tuple(f(env[v]) for v in p.variables)

    def _instance(self, p: Plan, env: dict) -> None:
        key = self._key(p, env)
        if key in self.seen or key in self.pending:
            return
        if self._fire(p, env):
            self.seen.add(key)
        else:
            self.pending[key] = (p, env)

    def _prove(self, atom, env: dict) -> bool:
        g = self.g
        if isinstance(atom, Equation):
            a = g.build(atom.lhs, env)
            if a is None:
                return False
            b = g.build(atom.rhs, env)
            return b is not None and g.find(a) == g.find(b)
        if isinstance(atom, BuEquation):
            b = g.build(atom.bound, env)
            if b is None:
                return False
            k = g.num(b)
            if k is None:
                return False
            for i in range(k):
                zc = g.build(numeral(i), {})
                if zc is None:
                    return False
                e2 = dict(env)
                e2[atom.var] = zc
                if not self._prove(atom.body, e2):
                    return False
            return True
        raise SpecError(f"cannot use atom {atom!r}")

    def _assert(self, atom, env: dict, why) -> bool:
        g = self.g
        if isinstance(atom, Equation):
            a = g.build(atom.lhs, env)
            if a is None:
                return False
            b = g.build(atom.rhs, env)
            if b is None:
                return False
            g.merge(a, b, why)
            return True
        if isinstance(atom, BuEquation):
            b = g.build(atom.bound, env)
            if b is None or g.num(b) is None:
                return False
            done = True
            for i in range(g.num(b)):
                zc = g.build(numeral(i), {})
                if zc is None:
                    return False
                e2 = dict(env)
                e2[atom.var] = zc
                done = self._assert(atom.body, e2, why) and done
            return done
        raise SpecError(f"cannot use atom {atom!r}")

    def _fire(self, p: Plan, env: dict) -> bool:
        for a in p.antecedents:
            if not self._prove(a, env):
                return False
        why = None
        if self.g.log is not None:
            nt = self.g.node_term
            why = ("axiom", p.index, {v: nt[self._witness(env[v])] for v in p.variables},
                   self._bu_values(p, env))
        done = self._assert(p.consequent, env, why)
        self.g.rebuild()
        return done

    def _witness(self, c: int) -> int:
        c = self.g.find(c)
        return min(self.g.members[c], key=lambda n: self.g.ndepth[n])

    def _bu_values(self, p: Plan, env: dict) -> list:
        out = []
        for a in p.antecedents + (p.consequent,):
            if isinstance(a, BuEquation):
                c = self.g.find_term(a.bound, env)
                out.append(None if c is None else self.g.num(c))
        return out

    def _matches_at(self, p: Plan, n: int) -> None:
        g = self.g
        for env in g.match_args(p.trigger.args, g.args[n], {}):
            if p.join:
                for e2 in g.match(p.join[1], g.find(n), env):
                    self._register(p, e2)
            else:
                self._register(p, env)

    def _register(self, p: Plan, env: dict) -> None:
        free = tuple(v for v in p.ranged if v not in env)
        if not free:
            self._instance(p, env)
            return
        f = self.g.find
        key = (p.index,) + tuple(f(c) for c in env.values())
        if key in self.partials:
            return
        rec = [p, env, free, {v.sort.name: 0 for v in free}]
        self.partials[key] = rec
        self._expand(rec)

    def _expand(self, rec: list) -> None:
        """Instances of a partial match over classes not yet tried."""
        p, env, free, marks = rec
        g = self.g
        sorts = [v.sort.name for v in free]
        if all(marks[s] == len(g.sort_nodes.get(s, ())) for s in sorts):
            return
        if len(free) == 1:
            s = sorts[0]
            nodes = g.sort_nodes.get(s, ())
            seen = set()
            for n in nodes[marks[s]:]:
                c = g.find(n)
                if c in seen:
                    continue
                seen.add(c)
                e2 = dict(env)
                e2[free[0]] = c
                self._instance(p, e2)
            marks[s] = len(nodes)
            return
        pools = [g.roots(s) for s in sorts]
        for s in sorts:
            marks[s] = len(g.sort_nodes.get(s, ()))
        for combo in _product(pools):
            e2 = dict(env)
            e2.update(zip(free, combo))
            self._instance(p, e2)

    # main loop --------------------------------------------------------------

    def saturate(self) -> None:
        g = self.g
        while True:
            self.rounds += 1
            if self.rounds > self.max_rounds:
                raise ResourceError(f"closure did not finish within {self.max_rounds} rounds")
            if self.deadline is not None and time.monotonic() > self.deadline:
                raise ResourceError("time budget exhausted during closure")
            before = (len(g.parent), g.merges)
            while g.fresh or g.todo:
                while g.fresh:
                    n = g.pop()
                    for p in self.by_head.get(g.sym[n], ()):
                        self._matches_at(p, n)
                    if g.contradiction:
                        return
                g.rebuild()
                self._rematch_joins()
            for key, (p, env) in list(self.pending.items()):
                if key not in self.pending:
                    continue
                if self._fire(p, env):
                    del self.pending[key]
                    self.seen.add(key)
            for rec in list(self.partials.values()):
                self._expand(rec)
            g.rebuild()
            if g.contradiction:
                return
            shallower = g.refresh_depths()
            if not g.fresh and not g.todo and (len(g.parent), g.merges) == before and not shallower:
                return

    def _rematch_joins(self) -> None:
        # classes that grew may offer new join partners
        if not self.join_heads:
            return
        g = self.g
        for s in self.join_heads:
            for n in g.sym_nodes.get(s, ()):
                for p in self.by_head.get(s, ()):
                    if p.join:
                        self._matches_at(p, n)

    def materialize(self) -> None:
        """Add every admissible node, level by level, saturating in between."""
        g = self.g
        funcs = [f for f in self.sig.funcs.values() if f.arity > 0]
        self.saturate()
        while not g.contradiction:
            size_before = len(g.parent)
            for _ in range(self.depth):
                snapshot = {s: [c for c in g.roots(s) if g.cdepth[c] < self.depth] for s in self.sig.sorts}
                for f in funcs:
                    for args in _product([snapshot[s.name] for s in f.domain]):
                        g.add(f.name, tuple(g.find(a) for a in args))
                self.saturate()
            if len(g.parent) == size_before:
                return


def _product(pools):
    if not pools:
        yield ()
        return
    for head in pools[0]:
        for rest in _product(pools[1:]):
            yield (head,) + rest


# ---------------------------------------------------------------------------
# models


@dataclass
class TermModel:
    closure: Closure
    mode: str
    flags: dict = field(default_factory=dict)

    @property
    def spec(self) -> SpecSet:
        return self.closure.spec

    @property
    def graph(self) -> EGraph:
        return self.closure.g

    @property
    def consistent(self) -> bool:
        return self.flags["consistent"]

    @property
    def determines_nat(self) -> bool:
        return self.flags["determines_nat"]

    @property
    def determines_bool(self) -> bool:
        return self.flags["determines_bool"]

    @property
    def certified(self) -> bool:
        return self.consistent and self.determines_nat and self.determines_bool

    def add_term(self, t: Term) -> int:
        c = self.graph.build(t, {}, force=True)
        self.closure.saturate()
        self._update_flags()
        return self.graph.find(c)

    def proves_equal(self, t1: Term, t2: Term) -> bool:
        a = self.graph.build(t1, {}, force=True)
        b = self.graph.build(t2, {}, force=True)
        self.closure.saturate()
        self._update_flags()
        if self.graph.contradiction:
            return True
        return self.graph.find(a) == self.graph.find(b)

    def class_terms(self, t: Term) -> list:
        """Terms of the nodes in the class of ``t``, each built from least representatives."""
        c = self.add_term(t)
        reps = self.representatives()
        out = []
        g = self.graph
        for n in g.members[c]:
            f = self.spec.signature.funcs[g.sym[n]]
            kids = [reps.get(g.find(a)) for a in g.args[n]]
            if all(k is not None for k in kids):
                out.append(App(f, tuple(kids)))
        return out

    def representative(self, t: Term) -> Optional[Term]:
        c = self.add_term(t)
        return self.representatives().get(c)

    def representatives(self, allowed: Optional[set] = None) -> dict:
        """Least term of every class (restricted to ``allowed`` symbols if given)."""
        g = self.graph
        order = {name: i for i, name in enumerate(self.spec.signature.funcs)}
        best: dict[int, tuple] = {}
        changed = True
        while changed:
            changed = False
            for n in range(len(g.parent)):
                s = g.sym[n]
                if allowed is not None and s not in allowed:
                    continue
                c = g.find(n)
                kids = [g.find(a) for a in g.args[n]]
                if any(k not in best for k in kids):
                    continue
                f = self.spec.signature.funcs[s]
                k1 = g.numval.get(kids[0]) if s == "S" else None
                if s == "0":
                    key = (1, order["0"], 0)
                    term: Term = App(f)
                elif k1 is not None and k1 < self.closure.nat_cap and best[kids[0]][0][0] == 1 \
                        and best[kids[0]][0][1] == order["0"]:
                    key = (1, order["0"], k1 + 1)
                    term = numeral(k1 + 1)
                elif not kids:
                    key = (1, order[s], 0)
                    term = App(f)
                else:
                    ck = tuple(best[k][0] for k in kids)
                    key = (1 + max(x[0] for x in ck), order[s], ck)
                    term = App(f, tuple(best[k][1] for k in kids))
                cur = best.get(c)
                if cur is None or key < cur[0]:
                    best[c] = (key, term)
                    changed = True
        return {c: v[1] for c, v in best.items()}

    def _update_flags(self) -> None:
        g = self.graph
        cons = not g.contradiction
        t, f = g.lookup("true", ()), g.lookup("false", ())
        if t is not None and f is not None and g.find(t) == g.find(f):
            cons = False
        dn = all(g.numval.get(c) is not None for c in g.roots("nat"))
        db = True
        for c in g.roots("bool"):
            syms = g.by_sym.get(c, {})
            if "true" not in syms and "false" not in syms:
                db = False
                break
        self.flags = {"consistent": cons, "determines_nat": dn, "determines_bool": db}

    def stats(self) -> dict:
        g = self.graph
        return {
            "nodes": len(g.parent),
            "classes": len(g.members),
            "merges": g.merges,
            "rounds": self.closure.rounds,
            "pending": len(self.closure.pending),
        }

    def classes(self, sort: str) -> list:
        reps = self.representatives()
        g = self.graph
        return [(reps.get(c), len(g.members[c])) for c in g.roots(sort)]


def ground_closure(spec: SpecSet, universe: TermUniverse, mode: str = "full",
                   max_rounds: int = DEFAULT_ROUNDS, log: bool = False) -> TermModel:
    cl = Closure(spec, universe.depth, universe.nat_cap, universe.ceiling, max_rounds, log)
    if mode == "full":
        cl.materialize()
    elif mode == "lazy":
        cl.saturate()
    else:
        raise ValueError(f"unknown closure mode {mode!r}")
    model = TermModel(cl, mode)
    model._update_flags()
    return model


def initial_model(spec: SpecSet, depth: int, nat_cap: int, mode: str = "full",
                  ceiling: Optional[int] = None, max_rounds: int = DEFAULT_ROUNDS,
                  log: bool = False) -> TermModel:
    """Bounded initial term model of ``spec`` with its consistency and determination flags."""
    U = TermUniverse(spec.signature, depth, nat_cap)
    U.ceiling = ceiling or ceiling_from_env()
    return ground_closure(spec, U, mode, max_rounds, log)


def proves_equal(M: TermModel, t1: Term, t2: Term) -> bool:
    return M.proves_equal(t1, t2)


def query_model(M: TermModel, text: str) -> bool:
    from .syntax import parse_formula
    phi = parse_formula(M.spec.signature, text)
    if not isinstance(phi, Equation) or formula_variables(phi):
        raise SpecError("queries are closed equations")
    return M.proves_equal(phi.lhs, phi.rhs)


def old_signature_table(M: TermModel, old: Signature, depth: Optional[int] = None) -> dict:
    """Congruence table of the old-signature nodes: (symbol, child reps) -> rep.

    Representatives are least old-signature terms.  Two closures prove the same
    closed old-signature equations of depth <= ``depth`` exactly when their tables,
    cut to entries of that depth, coincide.
    """
    from .syntax import depth as term_depth
    g = M.graph
    allowed = set(old.funcs)
    reps = M.representatives(allowed)
    table = {}
    for n in range(len(g.parent)):
        s = g.sym[n]
        if s not in allowed:
            continue
        kids = tuple(reps.get(g.find(a)) for a in g.args[n])
        if any(k is None for k in kids):
            continue
        t = App(old.funcs[s], kids)
        if depth is not None and term_depth(t, M.closure.nat_cap) > depth:
            continue
        table[t] = reps.get(g.find(n))
    return table


__all__ = [
    "Closure", "EGraph", "Plan", "TermModel", "ground_closure", "initial_model", "make_plan",
    "old_signature_table", "proves_equal", "query_model",
]

