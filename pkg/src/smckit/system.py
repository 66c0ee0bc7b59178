"""Transition systems, the ``.smc`` input language, and path predicates.

A system is a triple of formulas (init, trans, prop) over a fixed bit
width.  States are plain unsigned integers below ``2**width``.  State
sequences are finite windows with an explicit integer origin, and every
path predicate takes (offset, length) bounds so the sequence lemmas can be
stated exactly as executable checks.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from . import formula as fm
from .errors import (IndexOutOfWindow, NextInInit, ParseError,
                     UndeclaredVariable, WidthMismatch)


@dataclass(frozen=True)
class TransitionSystem:
    """Finite-state system: init/prop over current bits, trans over pairs."""

    name: str
    width: int
    init: fm.Formula
    trans: fm.Formula
    prop: fm.Formula

    def __post_init__(self):
        if self.width < 1:
            raise WidthMismatch(f"width must be positive, got {self.width}")
        for label, f in (("init", self.init), ("prop", self.prop)):
            if _uses_next(f):
                raise NextInInit(f"{label} must not mention next-state bits")
        for f in (self.init, self.trans, self.prop):
            bit = _max_bit(f)
            if bit >= self.width:
                raise UndeclaredVariable(
                    f"bit b{bit} out of range for width {self.width}")

    @property
    def n_states(self) -> int:
        return 1 << self.width

    def eval_init(self, s: int) -> bool:
        return fm.eval_formula(self.init, s, width=self.width)

    def eval_prop(self, s: int) -> bool:
        return fm.eval_formula(self.prop, s, width=self.width)

    def eval_trans(self, s: int, t: int) -> bool:
        return fm.eval_formula(self.trans, s, t, width=self.width)

    def format_state(self, s: int) -> str:
        return format(s, f"0{self.width}b")


def _uses_next(f: fm.Formula) -> bool:
    if f.kind == fm.VAR_K:
        return f.idx == fm.NEXT
    return any(_uses_next(c) for c in f.children)


def _max_bit(f: fm.Formula) -> int:
    if f.kind in (fm.VAR_K, fm.TVAR_K):
        return f.bit
    return max((_max_bit(c) for c in f.children), default=-1)


@dataclass(frozen=True)
class StateSeq:
    """Finite window of concrete states covering indices origin..origin+n-1."""

    states: tuple[int, ...]
    origin: int = 0

    def __post_init__(self):
        if not self.states:
            raise ValueError("StateSeq must be non-empty")

    def __len__(self) -> int:
        return len(self.states)

    @property
    def last_index(self) -> int:
        return self.origin + len(self.states) - 1

    def covers(self, index: int) -> bool:
        return self.origin <= index <= self.last_index

    def __getitem__(self, index: int) -> int:
        if not self.covers(index):
            raise IndexOutOfWindow(
                f"index {index} outside window [{self.origin}, {self.last_index}]")
        return self.states[index - self.origin]


def seq(*states: int) -> StateSeq:
    return StateSeq(tuple(states))


def path(trans: fm.Formula, ss: StateSeq, o: int, length: int, *,
         width: int) -> bool:
    """Adjacent pairs of ss at indices o..o+length all satisfy trans.

    A length of zero holds vacuously.
    """
    if length < 0:
        raise IndexOutOfWindow("negative path length")
    if length > 0 and not (ss.covers(o) and ss.covers(o + length)):
        raise IndexOutOfWindow(
            f"path window [{o}, {o + length}] not covered")
    return all(
        fm.eval_formula(trans, ss[o + j], ss[o + j + 1], width=width)
        for j in range(length))


def no_loop(ss: StateSeq, o: int, length: int) -> bool:
    """States at indices o..o+length are pairwise distinct."""
    if length < 0:
        raise IndexOutOfWindow("negative window length")
    window = [ss[o + j] for j in range(length + 1)]
    return len(set(window)) == len(window)


def loop_free(trans: fm.Formula, ss: StateSeq, o: int, length: int, *,
              width: int) -> bool:
    """Path whose states are pairwise distinct."""
    return path(trans, ss, o, length, width=width) and no_loop(ss, o, length)


def skipn(j: int, ss: StateSeq) -> StateSeq:
    """Shift the window: result index m reads the source at index m + j."""
    if not ss.covers(j):
        raise IndexOutOfWindow(f"shift {j} outside window")
    new_origin = max(ss.origin - j, 0)
    drop = new_origin + j - ss.origin
    return StateSeq(ss.states[drop:], new_origin)


def shorter_ss(o: int, k: int, d: int, ss: StateSeq, ss2: StateSeq) -> bool:
    """ss2 equals ss with the fragment between k and k+d cut out.

    Two clauses: the windows agree on indices o..k, and from index k on,
    ss2 tracks ss shifted left by d for as long as both windows last.
    """
    for i in range(k - o + 1):
        if not (ss.covers(k - i) and ss2.covers(k - i)):
            raise IndexOutOfWindow(f"prefix index {k - i} not covered")
        if ss[k - i] != ss2[k - i]:
            return False
    i = 0
    while ss.covers(k + d + i) and ss2.covers(k + i):
        if ss[k + d + i] != ss2[k + i]:
            return False
        i += 1
    return True


# --- input language -------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<var>b(?P<bit>\d+)(?P<prime>')?)"
    r"|(?P<const>true|false)"
    r"|(?P<op><->|->|[!&|()])"
    r"|(?P<bad>\S))")


class _FormulaParser:
    """Recursive descent over one formula; <-> and -> associate right."""

    def __init__(self, text: str, line: int, col0: int, width: int,
                 allow_next: bool):
        self.tokens: list[tuple[str, str, int]] = []
        self.width = width
        self.allow_next = allow_next
        self.line = line
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                break
            col = col0 + m.start(m.lastgroup)
            if m.group("bad"):
                raise ParseError(f"unexpected character {m.group('bad')!r}",
                                 line, col + 1)
            kind = m.lastgroup or "op"
            self.tokens.append((kind, m.group(kind), col + 1))
            pos = m.end()
        self.i = 0

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of formula", self.line, 0)
        self.i += 1
        return tok

    def expect(self, text: str) -> None:
        tok = self.take()
        if tok[1] != text:
            raise ParseError(f"expected {text!r}, got {tok[1]!r}",
                             self.line, tok[2])

    def parse(self) -> fm.Formula:
        f = self.parse_iff()
        tok = self.peek()
        if tok is not None:
            raise ParseError(f"unexpected {tok[1]!r}", self.line, tok[2])
        return f

    def parse_iff(self) -> fm.Formula:
        left = self.parse_implies()
        tok = self.peek()
        if tok and tok[1] == "<->":
            self.take()
            return fm.Iff(left, self.parse_iff())
        return left

    def parse_implies(self) -> fm.Formula:
        left = self.parse_or()
        tok = self.peek()
        if tok and tok[1] == "->":
            self.take()
            return fm.Implies(left, self.parse_implies())
        return left

    def parse_or(self) -> fm.Formula:
        parts = [self.parse_and()]
        while True:
            tok = self.peek()
            if tok and tok[1] == "|":
                self.take()
                parts.append(self.parse_and())
            else:
                break
        return parts[0] if len(parts) == 1 else fm.Or(*parts)

    def parse_and(self) -> fm.Formula:
        parts = [self.parse_unary()]
        while True:
            tok = self.peek()
            if tok and tok[1] == "&":
                self.take()
                parts.append(self.parse_unary())
            else:
                break
        return parts[0] if len(parts) == 1 else fm.And(*parts)

    def parse_unary(self) -> fm.Formula:
        kind, text, col = self.take()
        if text == "!":
            return fm.Not(self.parse_unary())
        if text == "(":
            inner = self.parse_iff()
            self.expect(")")
            return inner
        if kind == "const":
            return fm.TRUE if text == "true" else fm.FALSE
        if kind == "var":
            bit = int(text.rstrip("'")[1:])
            primed = text.endswith("'")
            if bit >= self.width:
                raise UndeclaredVariable(
                    f"b{bit} undeclared for width {self.width}", self.line, col)
            if primed and not self.allow_next:
                raise NextInInit(
                    f"primed variable {text} not allowed here", self.line, col)
            return fm.nxt(bit) if primed else fm.cur(bit)
        raise ParseError(f"unexpected {text!r}", self.line, col)


def parse_system(text: str) -> TransitionSystem:
    """Parse an ``.smc`` document into a TransitionSystem."""
    name: str | None = None
    width: int | None = None
    parts: dict[str, fm.Formula] = {}
    pending: list[tuple[str, str, int, int]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        m = re.match(r"\s*(\w+)\s*(.*)$", line)
        if m is None:
            raise ParseError("unreadable line", lineno, 1)
        keyword, rest = m.group(1), m.group(2)
        col = m.start(2) + 1
        if keyword == "system":
            if name is not None:
                raise ParseError("duplicate system declaration", lineno, 1)
            if not re.fullmatch(r"\w+", rest.strip()):
                raise ParseError("system name must be an identifier", lineno, col)
            name = rest.strip()
        elif keyword == "width":
            if width is not None:
                raise WidthMismatch("duplicate width declaration", lineno, 1)
            try:
                width = int(rest.strip())
            except ValueError:
                raise WidthMismatch("width must be an integer", lineno, col)
            if width < 1:
                raise WidthMismatch("width must be positive", lineno, col)
        elif keyword in ("init", "trans", "prop"):
            if keyword in parts or any(p[0] == keyword for p in pending):
                raise ParseError(f"duplicate {keyword} section", lineno, 1)
            pending.append((keyword, rest, lineno, col))
        else:
            raise ParseError(f"unknown directive {keyword!r}", lineno, 1)

    if name is None:
        raise ParseError("missing system declaration", 0, 0)
    if width is None:
        raise WidthMismatch("missing width declaration", 0, 0)
    for keyword, rest, lineno, col in pending:
        parser = _FormulaParser(rest, lineno, col - 1, width,
                                allow_next=(keyword == "trans"))
        parts[keyword] = parser.parse()
    for keyword in ("init", "trans", "prop"):
        if keyword not in parts:
            raise ParseError(f"missing {keyword} section", 0, 0)

    return TransitionSystem(name=name, width=width, init=parts["init"],
                            trans=parts["trans"], prop=parts["prop"])


def load_system(path) -> TransitionSystem:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_system(fh.read())


def bundled_system(name: str) -> TransitionSystem:
    """Load one of the systems shipped with the package (e.g. ``shift3``)."""
    data = resources.files("smckit.systems").joinpath(f"{name}.smc")
    return parse_system(data.read_text(encoding="utf-8"))
