"""Derivations built from the primitive-recursive schemes (plus minimisation).

A derivation is a linear list of entries; each entry applies one scheme to earlier
entries.  Simultaneous primitive recursion of degree m yields m functions from a
single entry, referred to as ``NAME.1`` ... ``NAME.m``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from . import sexp
from .errors import DecodeError, DerivationError, SortError
from .syntax import BOOL, NAT, Signature, Sort


@dataclass(frozen=True)
class FnType:
    domain: tuple
    range: Sort

    def __str__(self) -> str:
        return "(" + " ".join(s.name for s in self.domain) + ") -> " + self.range.name


@dataclass(frozen=True)
class Ref:
    entry: int
    component: int = 0  # 0-based


@dataclass(frozen=True)
class Prim:
    fn: str


@dataclass(frozen=True)
class Const:
    fn: str
    domain: tuple = ()


@dataclass(frozen=True)
class Proj:
    domain: tuple
    index: int  # 1-based


@dataclass(frozen=True)
class Comp:
    head: Ref
    args: tuple = ()


@dataclass(frozen=True)
class Cases:
    sort: Sort


@dataclass(frozen=True)
class PrimRec:
    base: tuple
    step: tuple

    @property
    def degree(self) -> int:
        return len(self.base)


@dataclass(frozen=True)
class Mu:
    test: Ref


Scheme = Union[Prim, Const, Proj, Comp, Cases, PrimRec, Mu]


@dataclass(frozen=True)
class Entry:
    scheme: Scheme
    types: tuple
    name: str = field(default="", compare=False)


@dataclass(frozen=True)
class Derivation:
    entries: tuple
    signature: Signature = field(compare=False, repr=False, default=None)  # type: ignore[assignment]
    name: str = field(default="", compare=False)

    def __hash__(self) -> int:
        return hash(self.entries)

    @property
    def type(self) -> FnType:
        return self.entries[-1].types[0]

    @property
    def uses_mu(self) -> bool:
        return any(isinstance(e.scheme, Mu) for e in self.entries)

    @property
    def uses_star(self) -> bool:
        for e in self.entries:
            for t in e.types:
                if any(s.starred for s in t.domain + (t.range,)):
                    return True
        return False

    @property
    def kind(self) -> str:
        return ("muPR" if self.uses_mu else "PR") + ("*" if self.uses_star else "")

    def __len__(self) -> int:
        return len(self.entries)


# ---------------------------------------------------------------------------
# typing


def _ref_type(entries: list, r: Ref) -> FnType:
    if r.entry < 0 or r.entry >= len(entries):
        raise DerivationError(f"reference to entry {r.entry} which is not earlier")
    e = entries[r.entry]
    if r.component < 0 or r.component >= len(e.types):
        raise DerivationError(f"entry {r.entry} has no component {r.component + 1}")
    return e.types[r.component]


def scheme_types(sig: Signature, entries: list, sch: Scheme) -> tuple:
    """Types produced by ``sch`` given the earlier ``entries``."""
    if isinstance(sch, Prim):
        f = sig.funcs.get(sch.fn)
        if f is None:
            raise DerivationError(f"unknown symbol {sch.fn!r}")
        return (FnType(f.domain, f.range),)
    if isinstance(sch, Const):
        f = sig.funcs.get(sch.fn)
        if f is None:
            raise DerivationError(f"unknown symbol {sch.fn!r}")
        if f.arity:
            raise DerivationError(f"{sch.fn} is not a constant")
        for s in sch.domain:
            _sort_ok(sig, s)
        return (FnType(tuple(sch.domain), f.range),)
    if isinstance(sch, Proj):
        for s in sch.domain:
            _sort_ok(sig, s)
        if not 1 <= sch.index <= len(sch.domain):
            raise DerivationError(f"projection index {sch.index} out of range 1..{len(sch.domain)}")
        return (FnType(tuple(sch.domain), sch.domain[sch.index - 1]),)
    if isinstance(sch, Comp):
        h = _ref_type(entries, sch.head)
        if len(sch.args) != len(h.domain):
            raise DerivationError(f"composition: head takes {len(h.domain)} arguments, got {len(sch.args)}")
        if not sch.args:
            return (FnType((), h.range),)
        gts = [_ref_type(entries, g) for g in sch.args]
        u = gts[0].domain
        for i, (g, s) in enumerate(zip(gts, h.domain)):
            if g.domain != u:
                raise DerivationError("composition: inner functions disagree on their domain")
            if g.range != s:
                raise DerivationError(f"composition: argument {i + 1} has sort {g.range}, expected {s}")
        return (FnType(u, h.range),)
    if isinstance(sch, Cases):
        _sort_ok(sig, sch.sort)
        if "bool" not in sig.sorts:
            raise DerivationError("definition by cases needs bool")
        return (FnType((BOOL, sch.sort, sch.sort), sch.sort),)
    if isinstance(sch, PrimRec):
        m = len(sch.base)
        if m == 0 or len(sch.step) != m:
            raise DerivationError("primitive recursion needs m >= 1 base and m step functions")
        if "nat" not in sig.sorts:
            raise DerivationError("primitive recursion needs nat")
        gts = [_ref_type(entries, g) for g in sch.base]
        u = gts[0].domain
        if any(g.domain != u for g in gts):
            raise DerivationError("primitive recursion: base functions disagree on their domain")
        ranges = tuple(g.range for g in gts)
        for i, h in enumerate(sch.step):
            ht = _ref_type(entries, h)
            want = (NAT,) + u + ranges
            if ht.domain != want or ht.range != ranges[i]:
                raise DerivationError(
                    f"primitive recursion: step {i + 1} has type {ht}, expected "
                    f"{FnType(want, ranges[i])}")
        return tuple(FnType((NAT,) + u, r) for r in ranges)
    if isinstance(sch, Mu):
        g = _ref_type(entries, sch.test)
        if not g.domain or g.domain[-1] != NAT:
            raise DerivationError("minimisation needs a test whose last argument is nat")
        if g.range != BOOL:
            raise DerivationError("minimisation requires a boolean-valued test")
        return (FnType(g.domain[:-1], NAT),)
    raise DerivationError(f"unknown scheme {sch!r}")


def _sort_ok(sig: Signature, s: Sort) -> None:
    if s.name not in sig.sorts:
        raise DerivationError(f"unknown sort {s.name}")


def build(sig: Signature, schemes: list, names: Optional[list] = None, name: str = "") -> Derivation:
    """Type-check a list of schemes into a derivation."""
    if not schemes:
        raise DerivationError("derivation must be nonempty")
    entries: list[Entry] = []
    for i, sch in enumerate(schemes):
        types = scheme_types(sig, entries, sch)
        entries.append(Entry(sch, types, names[i] if names else f"e{i}"))
    return Derivation(tuple(entries), sig, name)


def refs_of(sch: Scheme) -> list:
    if isinstance(sch, Comp):
        return [sch.head, *sch.args]
    if isinstance(sch, PrimRec):
        return [*sch.base, *sch.step]
    if isinstance(sch, Mu):
        return [sch.test]
    return []


# ---------------------------------------------------------------------------
# text form


def derivation_from_sexp(sig: Signature, x) -> Derivation:
    if not (isinstance(x, list) and len(x) >= 3 and x[0] == "derivation"):
        raise DerivationError(f"expected (derivation NAME TYPE ENTRY ...) at {sexp.where(x)}")
    name = str(x[1])
    ty = x[2]
    if not (isinstance(ty, list) and len(ty) == 2 and isinstance(ty[0], list)):
        raise DerivationError(f"expected ((DOM ...) RANGE) at {sexp.where(ty)}")
    try:
        declared = FnType(tuple(sig.sort(str(s)) for s in ty[0]), sig.sort(str(ty[1])))
    except SortError as e:
        raise DerivationError(f"{e} at {sexp.where(ty)}") from None
    names: list[str] = []
    index: dict[str, int] = {}
    entries: list[Entry] = []
    for clause in x[3:]:
        if not (isinstance(clause, list) and len(clause) == 3 and clause[0] == "entry"):
            raise DerivationError(f"expected (entry NAME SCHEME) at {sexp.where(clause)}")
        ename = str(clause[1])
        if ename in index:
            raise DerivationError(f"duplicate entry name {ename} at {sexp.where(clause)}")
        try:
            sch = _scheme_from_sexp(sig, clause[2], index, entries)
            types = scheme_types(sig, entries, sch)
        except (DerivationError, SortError) as e:
            raise DerivationError(f"entry {ename}: {e} at {sexp.where(clause)}") from None
        index[ename] = len(entries)
        names.append(ename)
        entries.append(Entry(sch, types, ename))
    if not entries:
        raise DerivationError("derivation must be nonempty")
    d = Derivation(tuple(entries), sig, name)
    if d.type != declared:
        raise DerivationError(f"derivation {name} has type {d.type}, declared {declared}")
    return d


def _ref(x, index: dict, entries: list) -> Ref:
    text = str(x)
    if isinstance(x, list):
        raise DerivationError(f"expected an entry reference at {sexp.where(x)}")
    base, dot, comp = text.rpartition(".")
    if dot and comp.isdigit() and base in index:
        return Ref(index[base], int(comp) - 1)
    if text not in index:
        raise DerivationError(f"unknown or forward reference {text!r} at {sexp.where(x)}")
    return Ref(index[text], 0)


def _scheme_from_sexp(sig: Signature, x, index: dict, entries: list) -> Scheme:
    if not (isinstance(x, list) and x):
        raise DerivationError(f"malformed scheme at {sexp.where(x)}")
    kw = str(x[0])
    if kw == "prim" and len(x) == 2:
        return Prim(str(x[1]))
    if kw == "const" and len(x) in (2, 3):
        dom = tuple(sig.sort(str(s)) for s in x[2]) if len(x) == 3 else ()
        return Const(str(x[1]), dom)
    if kw == "proj" and len(x) == 3 and isinstance(x[1], list):
        return Proj(tuple(sig.sort(str(s)) for s in x[1]), int(str(x[2])))
    if kw == "comp" and len(x) == 3 and isinstance(x[2], list):
        return Comp(_ref(x[1], index, entries), tuple(_ref(g, index, entries) for g in x[2]))
    if kw == "cases" and len(x) == 2:
        return Cases(sig.sort(str(x[1])))
    if kw == "primrec" and len(x) == 4:
        m = int(str(x[1]))
        g = tuple(_ref(r, index, entries) for r in x[2])
        h = tuple(_ref(r, index, entries) for r in x[3])
        if len(g) != m or len(h) != m:
            raise DerivationError(f"primrec of degree {m} needs {m} base and {m} step functions")
        return PrimRec(g, h)
    if kw == "mu" and len(x) == 2:
        return Mu(_ref(x[1], index, entries))
    raise DerivationError(f"unknown scheme {kw!r} at {sexp.where(x)}")


def parse_derivation(sig: Signature, text: Union[str, bytes]) -> Derivation:
    return derivation_from_sexp(sig, sexp.read_one(text))


def _ref_text(d: Derivation, r: Ref) -> str:
    e = d.entries[r.entry]
    if len(e.types) > 1:
        return f"{e.name}.{r.component + 1}"
    return e.name


def print_derivation(d: Derivation) -> str:
    t = d.type
    lines = [f"(derivation {d.name or 'anonymous'} (({' '.join(s.name for s in t.domain)}) {t.range.name})"]
    for e in d.entries:
        lines.append(f"  (entry {e.name} {print_scheme(d, e.scheme)})")
    return "\n".join(lines) + ")"


def print_scheme(d: Derivation, sch: Scheme) -> str:
    if isinstance(sch, Prim):
        return f"(prim {sch.fn})"
    if isinstance(sch, Const):
        if sch.domain:
            return f"(const {sch.fn} ({' '.join(s.name for s in sch.domain)}))"
        return f"(const {sch.fn})"
    if isinstance(sch, Proj):
        return f"(proj ({' '.join(s.name for s in sch.domain)}) {sch.index})"
    if isinstance(sch, Comp):
        return f"(comp {_ref_text(d, sch.head)} ({' '.join(_ref_text(d, g) for g in sch.args)}))"
    if isinstance(sch, Cases):
        return f"(cases {sch.sort.name})"
    if isinstance(sch, PrimRec):
        g = " ".join(_ref_text(d, r) for r in sch.base)
        h = " ".join(_ref_text(d, r) for r in sch.step)
        return f"(primrec {sch.degree} ({g}) ({h}))"
    return f"(mu {_ref_text(d, sch.test)})"


# ---------------------------------------------------------------------------
# Goedel numbering
#
# Each entry is a tag byte followed by LEB128 operands, with sorts and symbols
# given by their position in the signature.  References are an entry index,
# followed by a component index only when the target has several components.
# The byte string is read as a bijective base-256 numeral, so the codes of all
# strings are exactly the naturals and shorter strings get smaller codes.

TAGS = {Prim: 0, Const: 1, Proj: 2, Comp: 3, Cases: 4, PrimRec: 5, Mu: 6}


def _varint(n: int) -> bytes:
    out = bytearray()
    while True:
        b = n & 0x7F
        n >>= 7
        if n:
            out.append(b | 0x80)
        else:
            out.append(b)
            return bytes(out)


def _enc_ref(entries, r: Ref) -> bytes:
    out = _varint(r.entry)
    if len(entries[r.entry].types) > 1:
        out += _varint(r.component)
    return out


def encode_bytes(d: Derivation, sig: Optional[Signature] = None) -> bytes:
    sig = sig or d.signature
    sorts = {s.name: i for i, s in enumerate(sig.sorts.values())}
    funcs = {f: i for i, f in enumerate(sig.funcs)}
    out = bytearray()
    ents = d.entries
    for e in ents:
        s = e.scheme
        out += _varint(TAGS[type(s)])
        if isinstance(s, Prim):
            out += _varint(funcs[s.fn])
        elif isinstance(s, Const):
            out += _varint(funcs[s.fn]) + _varint(len(s.domain))
            for srt in s.domain:
                out += _varint(sorts[srt.name])
        elif isinstance(s, Proj):
            out += _varint(len(s.domain))
            for srt in s.domain:
                out += _varint(sorts[srt.name])
            out += _varint(s.index)
        elif isinstance(s, Comp):
            out += _enc_ref(ents, s.head) + _varint(len(s.args))
            for g in s.args:
                out += _enc_ref(ents, g)
        elif isinstance(s, Cases):
            out += _varint(sorts[s.sort.name])
        elif isinstance(s, PrimRec):
            out += _varint(s.degree)
            for r in s.base + s.step:
                out += _enc_ref(ents, r)
        else:
            out += _enc_ref(ents, s.test)
    return bytes(out)


def bytes_to_code(b: bytes) -> int:
    n = 0
    for byte in b:
        n = n * 256 + byte + 1
    return n


def code_to_bytes(n: int) -> bytes:
    if n < 0:
        raise DecodeError("codes are natural numbers")
    out = bytearray()
    while n > 0:
        n -= 1
        out.append(n % 256)
        n //= 256
    return bytes(reversed(out))


def encode(d: Derivation, sig: Optional[Signature] = None) -> int:
    return bytes_to_code(encode_bytes(d, sig))


class _Reader:
    def __init__(self, data: bytes) -> None:
        self.data = data
        self.pos = 0

    def done(self) -> bool:
        return self.pos >= len(self.data)

    def varint(self) -> int:
        n, shift = 0, 0
        while True:
            if self.pos >= len(self.data):
                raise DecodeError("truncated varint")
            b = self.data[self.pos]
            self.pos += 1
            n |= (b & 0x7F) << shift
            shift += 7
            if not b & 0x80:
                if b == 0 and shift > 7:
                    raise DecodeError("non-canonical varint")
                return n


def _dec_ref(rd: _Reader, entries: list) -> Ref:
    i = rd.varint()
    if i >= len(entries):
        raise DecodeError("forward reference")
    c = rd.varint() if len(entries[i].types) > 1 else 0
    return Ref(i, c)


def _dec_entry(rd: _Reader, sig: Signature, sorts: list, funcs: list, entries: list) -> Scheme:
    tag = rd.varint()

    def sort() -> Sort:
        k = rd.varint()
        if k >= len(sorts):
            raise DecodeError("sort index out of range")
        return sorts[k]

    def func() -> str:
        k = rd.varint()
        if k >= len(funcs):
            raise DecodeError("symbol index out of range")
        return funcs[k]

    def count() -> int:
        k = rd.varint()
        if k > len(rd.data):
            raise DecodeError("count exceeds input")
        return k

    if tag == 0:
        return Prim(func())
    if tag == 1:
        f = func()
        return Const(f, tuple(sort() for _ in range(count())))
    if tag == 2:
        dom = tuple(sort() for _ in range(count()))
        return Proj(dom, rd.varint())
    if tag == 3:
        h = _dec_ref(rd, entries)
        return Comp(h, tuple(_dec_ref(rd, entries) for _ in range(count())))
    if tag == 4:
        return Cases(sort())
    if tag == 5:
        m = count()
        refs = [_dec_ref(rd, entries) for _ in range(2 * m)]
        return PrimRec(tuple(refs[:m]), tuple(refs[m:]))
    if tag == 6:
        return Mu(_dec_ref(rd, entries))
    raise DecodeError(f"unknown scheme tag {tag}")


def decode(sig: Signature, code: int) -> Derivation:
    """Inverse of :func:`encode`; raises DecodeError on codes of non-derivations."""
    data = code_to_bytes(code)
    if not data:
        raise DecodeError("the empty derivation has no code")
    rd = _Reader(data)
    sorts = list(sig.sorts.values())
    funcs = list(sig.funcs)
    entries: list[Entry] = []
    while not rd.done():
        sch = _dec_entry(rd, sig, sorts, funcs, entries)
        try:
            types = scheme_types(sig, entries, sch)
        except DerivationError as e:
            raise DecodeError(f"ill-typed entry: {e}") from None
        entries.append(Entry(sch, types, f"e{len(entries)}"))
    return Derivation(tuple(entries), sig, f"d{code}")


def enumerate_derivations(sig: Signature, ftype: FnType, budget: int) -> Iterator[tuple[int, Derivation]]:
    """Codes below ``budget`` of derivations of type ``ftype``, in increasing order."""
    max_len = len(code_to_bytes(max(budget - 1, 0)))
    sorts = list(sig.sorts.values())
    funcs = list(sig.funcs)
    for length in range(1, max_len + 1):
        for data in _strings(sig, sorts, funcs, [], length):
            code = bytes_to_code(data)
            if code >= budget:
                return
            d = decode(sig, code)
            if d.type == ftype:
                yield code, d


def _strings(sig, sorts, funcs, entries, remaining) -> Iterator[bytes]:
    """All byte strings of exactly ``remaining`` bytes that decode to entry sequences."""
    if remaining == 0:
        if entries:
            yield b""
        return
    for enc, sch in sorted(_entry_candidates(sig, sorts, funcs, entries, remaining), key=lambda p: p[0]):
        try:
            types = scheme_types(sig, entries, sch)
        except DerivationError:
            continue
        entries.append(Entry(sch, types))
        for rest in _strings(sig, sorts, funcs, entries, remaining - len(enc)):
            yield enc + rest
        entries.pop()


def _entry_candidates(sig, sorts, funcs, entries, room) -> list:
    """Encodings (at most ``room`` bytes) of every syntactically possible next entry."""
    out = []
    dummy = Derivation(tuple(entries), sig)

    def refs():
        for i, e in enumerate(entries):
            for c in range(len(e.types)):
                yield Ref(i, c)

    def seqs(items, k):
        if k == 0:
            yield ()
            return
        for it in items:
            for rest in seqs(items, k - 1):
                yield (it,) + rest

    cands: list[Scheme] = []
    cands += [Prim(f) for f in funcs]
    for f in funcs:
        if sig.funcs[f].arity == 0:
            for k in range(room):
                cands += [Const(f, dom) for dom in seqs(sorts, k)]
    for k in range(1, room):
        for dom in seqs(sorts, k):
            cands += [Proj(dom, i) for i in range(1, k + 1)]
    rs = list(refs())
    for h in rs:
        for k in range(room):
            if k > len(entries[h.entry].types[h.component].domain):
                break
            if k != len(entries[h.entry].types[h.component].domain):
                continue
            cands += [Comp(h, args) for args in seqs(rs, k)]
    cands += [Cases(s) for s in sorts]
    for m in range(1, room // 2 + 1):
        for g in seqs(rs, m):
            for h in seqs(rs, m):
                cands.append(PrimRec(g, h))
    cands += [Mu(r) for r in rs]
    for sch in cands:
        enc = encode_bytes(Derivation((Entry(sch, ()),), sig), sig) if not refs_of(sch) else \
            _encode_with(dummy, sch, sig)
        if len(enc) <= room:
            out.append((enc, sch))
    return out


def _encode_with(prefix: Derivation, sch: Scheme, sig: Signature) -> bytes:
    full = Derivation(prefix.entries + (Entry(sch, ()),), sig)
    whole = encode_bytes(full, sig)
    return whole[len(encode_bytes(prefix, sig)):] if prefix.entries else whole
