"""Concrete syntax for rTPL programs and configurations.

Grammar (program mode)::

    program := (IDENT "=" proc ";")* proc
    proc    := par ; par := sum ("|" sum)* ; sum := res ("+" res)*
    res     := pre ("\\" NAME)* ; pre := act "." pre | atom
    act     := NAME | "'" NAME | "tau" | "s"
    atom    := "0" | IDENT | "(" proc ")" | "[" proc "]" "(" proc ")"

Configuration mode extends ``act`` with ``act "[" NAT "]"``, adds the ghost
prefix ``s_[NAT]`` and decorated timeouts ``"[" conf "]" "(" conf ")" "@"
("L"|"R") "[" NAT "]"``. Constants are uppercase, action names lowercase;
``tau``, ``s`` and ``s_`` are reserved.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .terms import (
    CoName, Const, DefinitionEnv, KeyedPrefix, Kind, Name, Nil, Par, Prefix,
    Restrict, RpAct, RpGhost, RpSigma, RtplError, SIGMA, Sigma, Sum, TAU,
    Term, Timeout, TimeoutL, TimeoutR, ValidationError, rp_kind, subterms,
)
from .analysis import is_standard, keys_of


class RtplSyntaxError(RtplError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+)
  | (?P<lname>[a-z][a-z0-9_]*)
  | (?P<uname>[A-Z][A-Za-z0-9_]*)
  | (?P<punct>'|\.|\(|\)|\[|\]|\+|\||\\|=|;|@)
""", re.VERBOSE)

RESERVED = {"tau", "s", "s_"}


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise RtplSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        lexeme = m.group(0)
        kind = m.lastgroup or "ws"
        if kind != "ws":
            out.append(Token(kind, lexeme, line, col))
        nl = lexeme.count("\n")
        if nl:
            line += nl
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


class _Parser:
    def __init__(self, text: str, keyed: bool):
        self.toks = tokenize(text)
        self.i = 0
        self.keyed = keyed

    # -- token helpers ------------------------------------------------------

    def peek(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg: str) -> "RtplSyntaxError":
        t = self.peek()
        return RtplSyntaxError(msg + (f", got {t.text!r}" if t.text else ", got end of input"),
                               t.line, t.col)

    def expect(self, text: str) -> Token:
        t = self.peek()
        if t.text != text:
            raise self.fail(f"expected {text!r}")
        return self.next()

    def at(self, text: str) -> bool:
        return self.peek().text == text

    # -- grammar ------------------------------------------------------------

    def program(self) -> tuple[dict[str, Term], tuple[str, ...], Term]:
        defs: dict[str, Term] = {}
        order: list[str] = []
        while self.peek().kind == "uname" and self.toks[self.i + 1].text == "=":
            name = self.next().text
            self.expect("=")
            body = self.proc()
            self.expect(";")
            if name in defs:
                raise self.fail(f"duplicate definition of {name!r}")
            defs[name] = body
            order.append(name)
        main = self.proc()
        if self.peek().kind != "eof":
            raise self.fail("trailing input after term")
        return defs, tuple(order), main

    def proc(self) -> Term:
        t = self.sum()
        while self.at("|"):
            self.next()
            t = Par(t, self.sum())
        return t

    def sum(self) -> Term:
        t = self.res()
        while self.at("+"):
            self.next()
            t = Sum(t, self.res())
        return t

    def res(self) -> Term:
        t = self.pre()
        while self.at("\\"):
            self.next()
            tok = self.peek()
            if tok.kind != "lname" or tok.text in RESERVED:
                raise self.fail("expected an action name after '\\'")
            self.next()
            t = Restrict(t, tok.text)
        return t

    def pre(self) -> Term:
        tok = self.peek()
        if tok.text == "'" or (tok.kind == "lname"):
            return self.prefixed()
        return self.atom()

    def prefixed(self) -> Term:
        tok = self.peek()
        if tok.text == "'":
            self.next()
            nm = self.peek()
            if nm.kind != "lname" or nm.text in RESERVED:
                raise self.fail("expected an action name after \"'\"")
            self.next()
            act = CoName(nm.text)
            ghost = False
        else:
            self.next()
            if tok.text == "tau":
                act, ghost = TAU, False
            elif tok.text == "s":
                act, ghost = SIGMA, False
            elif tok.text == "s_":
                act, ghost = SIGMA, True
            else:
                act, ghost = Name(tok.text), False
        key: int | None = None
        if self.at("["):
            if not self.keyed:
                raise self.fail("keys are not allowed in a process term")
            self.next()
            num = self.peek()
            if num.kind != "num":
                raise self.fail("expected a key number")
            self.next()
            key = int(num.text)
            self.expect("]")
        if ghost and key is None:
            raise self.fail("ghost prefix s_ requires a key")
        self.expect(".")
        cont = self.pre()
        if key is None:
            return Prefix(act, cont)
        if ghost:
            return KeyedPrefix(RpGhost(), key, cont)
        if isinstance(act, Sigma):
            return KeyedPrefix(RpSigma(), key, cont)
        return KeyedPrefix(RpAct(act), key, cont)

    def atom(self) -> Term:
        tok = self.peek()
        if tok.kind == "num" and tok.text == "0":
            self.next()
            return Nil()
        if tok.kind == "uname":
            self.next()
            return Const(tok.text)
        if tok.text == "(":
            self.next()
            t = self.proc()
            self.expect(")")
            return t
        if tok.text == "[":
            self.next()
            main = self.proc()
            self.expect("]")
            self.expect("(")
            alt = self.proc()
            self.expect(")")
            if self.at("@"):
                if not self.keyed:
                    raise self.fail("decorated timeouts are not allowed in a process term")
                self.next()
                side = self.peek()
                if side.text not in ("L", "R") or side.kind != "uname":
                    raise self.fail("expected 'L' or 'R' after '@'")
                self.next()
                self.expect("[")
                num = self.peek()
                if num.kind != "num":
                    raise self.fail("expected a key number")
                self.next()
                self.expect("]")
                key = int(num.text)
                if side.text == "L":
                    return TimeoutL(main, alt, key)
                return TimeoutR(main, alt, key)
            return Timeout(main, alt)
        raise self.fail("expected a term")


def parse_program(text: str) -> tuple[DefinitionEnv, Term]:
    """Parse definitions and a main process; checks binding and guardedness."""
    p = _Parser(text, keyed=False)
    defs, order, main = p.program()
    env = DefinitionEnv.make(defs, order)
    for s in subterms(main):
        if isinstance(s, Const) and s.ident not in defs:
            raise RtplError(f"unbound constant {s.ident!r} in main term")
    return env, main


def parse_configuration(text: str, env: DefinitionEnv) -> Term:
    """Parse a configuration (keyed forms allowed) and validate it."""
    p = _Parser(text, keyed=True)
    defs, order, main = p.program()
    if defs:
        raise RtplError("definitions are not allowed in a configuration")
    for s in subterms(main):
        if isinstance(s, Const) and s.ident not in env.defs:
            raise RtplError(f"unbound constant {s.ident!r} in configuration")
    validate_configuration(main)
    return main


def validate_configuration(t: Term) -> None:
    """Structural invariants of reachable configurations.

    Unexecuted prefixes and timeouts have standard branches; a TimeoutL alt
    and a TimeoutR main are standard; decoration/prefix keys do not repeat in
    the parts the rules keep fresh; key kinds are consistent per id.
    """
    kinds: dict[int, Kind] = {}

    def kind(k: int, kd: Kind) -> None:
        if kinds.setdefault(k, kd) is not kd:
            raise ValidationError(f"key {k} is used both as a time and a communication key")

    def walk(x: Term) -> None:
        match x:
            case Prefix(_, c):
                if not is_standard(c):
                    raise ValidationError("prefix continuation must be standard")
                walk(c)
            case Timeout(m, a):
                if not (is_standard(m) and is_standard(a)):
                    raise ValidationError("undecorated timeout branches must be standard")
                walk(m)
                walk(a)
            case KeyedPrefix(rp, k, c):
                kind(k, rp_kind(rp))
                if k in {key.id for key in keys_of(c)}:
                    raise ValidationError(f"key {k} repeats under its own prefix")
                walk(c)
            case TimeoutL(m, a, k):
                kind(k, Kind.COMM)
                if not is_standard(a):
                    raise ValidationError("the alt branch of @L must be standard")
                walk(m)
                walk(a)
            case TimeoutR(m, a, k):
                kind(k, Kind.TIME)
                if not is_standard(m):
                    raise ValidationError("the main branch of @R must be standard")
                if k in {key.id for key in keys_of(a)}:
                    raise ValidationError(f"key {k} repeats inside the selected branch")
                walk(m)
                walk(a)
            case Sum(l, r) | Par(l, r):
                walk(l)
                walk(r)
            case Restrict(b, _):
                walk(b)
            case _:
                pass

    walk(t)
