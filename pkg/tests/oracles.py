"""Reference implementations the package is checked against."""

from adt.syntax import App, BuEquation, Equation, numeral, substitute


def isqrt_scan(n):
    z = 0
    while not n < (z + 1) * (z + 1):
        z += 1
    return z


def factorial(n):
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


class NaiveClosure:
    """Congruence closure by recomputing a signature table after every merge."""

    def __init__(self):
        self.parent = {}

    def add(self, t):
        if t in self.parent:
            return
        self.parent[t] = t
        for a in t.args:
            self.add(a)

    def find(self, t):
        self.add(t)
        while self.parent[t] != t:
            t = self.parent[t]
        return t

    def merge(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb
            self.close()

    def close(self):
        changed = True
        while changed:
            changed = False
            table = {}
            for t in list(self.parent):
                key = (t.fn.name, tuple(self.find(a) for a in t.args))
                other = table.setdefault(key, t)
                if self.find(other) != self.find(t):
                    self.parent[self.find(t)] = self.find(other)
                    changed = True

    def equal(self, a, b):
        return self.find(a) == self.find(b)


def _bound_value(cc, t, limit=64):
    for k in range(limit):
        if cc.equal(t, numeral(k)):
            return k
    return None


def _holds(cc, atom, env):
    if isinstance(atom, Equation):
        return cc.equal(substitute(atom.lhs, env), substitute(atom.rhs, env))
    k = _bound_value(cc, substitute(atom.bound, env))
    if k is None:
        return False
    return all(_holds(cc, atom.body, {**env, atom.var: numeral(i)}) for i in range(k))


def _assert(cc, atom, env):
    if isinstance(atom, Equation):
        cc.merge(substitute(atom.lhs, env), substitute(atom.rhs, env))
        return
    assert isinstance(atom, BuEquation)
    k = _bound_value(cc, substitute(atom.bound, env))
    assert k is not None, "bounded consequent without a numeral bound"
    for i in range(k):
        _assert(cc, atom.body, {**env, atom.var: numeral(i)})


def replay(spec, log, node_terms):
    """Re-derive every logged merge from its axiom instance; returns the closure."""
    cc = NaiveClosure()
    for t in node_terms:
        cc.add(t)
    cc.close()
    for entry in log:
        if entry[0] == "congruence":
            continue
        _, idx, env, _ = entry
        phi = spec.axioms[idx]
        ants = getattr(phi, "antecedents", ())
        cons = getattr(phi, "consequent", phi)
        for a in ants:
            assert _holds(cc, a, env), f"antecedent of axiom {idx} not derivable"
        _assert(cc, cons, env)
    return cc


def is_app(t):
    return isinstance(t, App)
