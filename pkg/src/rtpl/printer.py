"""Canonical pretty-printer; `parse(print(x))` is the identity."""

from __future__ import annotations

from .terms import (
    Const, KeyedPrefix, Nil, Par, Prefix, Restrict, RpAct, RpGhost, RpSigma,
    Sum, Term, Timeout, TimeoutL, TimeoutR, action_text,
)

# precedence levels, loosest to tightest
_PAR, _SUM, _RES, _PRE = 0, 1, 2, 3


def print_term(t: Term) -> str:
    return _pp(t, _PAR)


def _pp(t: Term, level: int) -> str:
    match t:
        case Nil():
            return "0"
        case Const(ident):
            return ident
        case Prefix(act, cont):
            return _wrap(f"{action_text(act)}.{_pp(cont, _PRE)}", _PRE, level)
        case KeyedPrefix(rp, k, cont):
            match rp:
                case RpAct(a):
                    head = f"{action_text(a)}[{k}]"
                case RpSigma():
                    head = f"s[{k}]"
                case RpGhost():
                    head = f"s_[{k}]"
            return _wrap(f"{head}.{_pp(cont, _PRE)}", _PRE, level)
        case Timeout(m, a):
            return f"[{_pp(m, _PAR)}]({_pp(a, _PAR)})"
        case TimeoutL(m, a, k):
            return f"[{_pp(m, _PAR)}]({_pp(a, _PAR)})@L[{k}]"
        case TimeoutR(m, a, k):
            return f"[{_pp(m, _PAR)}]({_pp(a, _PAR)})@R[{k}]"
        case Restrict(b, n):
            return _wrap(f"{_pp(b, _RES)} \\ {n}", _RES, level)
        case Sum(l, r):
            # sums associate left; a right operand that is itself a sum needs parens
            return _wrap(f"{_pp(l, _SUM)} + {_pp(r, _SUM + 1)}", _SUM, level)
        case Par(l, r):
            return _wrap(f"{_pp(l, _PAR)} | {_pp(r, _PAR + 1)}", _PAR, level)
    raise TypeError(t)


def _wrap(text: str, prec: int, level: int) -> str:
    return f"({text})" if prec < level else text


def print_program(env_defs: dict[str, Term], order: tuple[str, ...], main: Term) -> str:
    lines = [f"{name} = {print_term(env_defs[name])};" for name in order]
    lines.append(print_term(main))
    return "\n".join(lines)
