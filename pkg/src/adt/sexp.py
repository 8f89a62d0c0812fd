"""A small S-expression reader and printer.

Atoms come back as :class:`Atom` (a ``str`` carrying its source position), lists as
Python lists.  Comments run from ``;`` to end of line.
"""

from __future__ import annotations

from typing import Union

from .errors import SexpSyntaxError


class Atom(str):
    line: int
    col: int

    def __new__(cls, text: str, line: int = 0, col: int = 0) -> "Atom":
        obj = super().__new__(cls, text)
        obj.line = line
        obj.col = col
        return obj


Sexp = Union[Atom, list]


def read_all(text: Union[str, bytes]) -> list:
    """Parse every top-level expression in ``text``."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    stack: list[list] = [[]]
    opened: list[tuple[int, int]] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line, col = line + 1, 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "(":
            stack.append([])
            opened.append((line, col))
            i += 1
            col += 1
            continue
        if ch == ")":
            if len(stack) == 1:
                raise SexpSyntaxError("unbalanced ')'", line, col)
            done = stack.pop()
            opened.pop()
            stack[-1].append(done)
            i += 1
            col += 1
            continue
        start, start_col = i, col
        while i < n and not text[i].isspace() and text[i] not in "();":
            i += 1
            col += 1
        stack[-1].append(Atom(text[start:i], line, start_col))
    if len(stack) != 1:
        ln, cl = opened[-1]
        raise SexpSyntaxError("unclosed '('", ln, cl)
    return stack[0]


def read_one(text: Union[str, bytes]) -> Sexp:
    items = read_all(text)
    if len(items) != 1:
        raise SexpSyntaxError(f"expected exactly one expression, found {len(items)}", 1, 1)
    return items[0]


def write(x: Sexp) -> str:
    if isinstance(x, list):
        return "(" + " ".join(write(e) for e in x) + ")"
    return str(x)


def where(x: object) -> str:
    """Human-readable position of an atom or list (best effort)."""
    if isinstance(x, Atom):
        return f"line {x.line}, column {x.col}"
    if isinstance(x, list) and x:
        return where(x[0])
    return "unknown position"
