"""Concrete syntax: lexing, parsing and printing.

Program files consist of an optional signature block (``type d = C of t |
... ;`` with ``and`` for mutual recursion), an optional observation
selection line (``observations: eq, lt``), and one expression.  Comments run
from ``--`` to the end of the line.  Atom literals are written ``#a<n>``;
atom bindings ``< v > v``; observation application ``@obs v1 ... vk``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .errors import ParseError
from .observations import EQ, Observation, builtin_registry
from .surface import (
    SApp,
    SArm,
    SAtom,
    SBind,
    SCon,
    SFreshIn,
    SFresh,
    SFst,
    SFun,
    SIf,
    SLam,
    SLet,
    SLetBind,
    SMatch,
    SObs,
    SPair,
    SSnd,
    SUnbind,
    SUnit,
    SVar,
    SurfaceExpr,
)
from .syntax import (
    App,
    AtomLit,
    Arm,
    Atom,
    Bind,
    Con,
    Expr,
    Fresh,
    Fst,
    Fun,
    Let,
    Match,
    ObsApp,
    Pair,
    Snd,
    Unbind,
    Unit,
    Var,
)
from .typecheck import (
    ATM,
    Signature,
    TBnd,
    TData,
    TFun,
    TProd,
    TUnit,
    Type,
    UNIT,
    make_signature,
    type_to_str,
)

KEYWORDS = {
    "fun", "let", "in", "match", "with", "fresh", "unbind", "fst", "snd",
    "if", "then", "else", "type", "of", "and", "observations",
    "unit", "atm", "bnd",
}

_TOKEN = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<comment>--[^\n]*)
    | (?P<atom>\#a(?P<atomid>\d+))
    | (?P<arrow>->)
    | (?P<conid>[A-Z][A-Za-z0-9_']*)
    | (?P<ident>[%a-z_][A-Za-z0-9_']*)
    | (?P<punct>[()<>,=|.:;*\\@])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # 'atom' | 'arrow' | 'conid' | 'ident' | 'kw' | punct char | 'eof'
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        col = pos - line_start + 1
        kind = m.lastgroup
        lexeme = m.group(0)
        if kind == "ws":
            line += lexeme.count("\n")
            if "\n" in lexeme:
                line_start = pos + lexeme.rindex("\n") + 1
        elif kind == "comment":
            pass
        elif kind == "atom":
            tokens.append(Token("atom", m.group("atomid"), line, col))
        elif kind == "arrow":
            tokens.append(Token("arrow", "->", line, col))
        elif kind == "conid":
            tokens.append(Token("conid", lexeme, line, col))
        elif kind == "ident":
            tokkind = "kw" if lexeme in KEYWORDS else "ident"
            tokens.append(Token(tokkind, lexeme, line, col))
        else:
            tokens.append(Token(lexeme, lexeme, line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, len(text) - line_start + 1))
    return tokens


@dataclass(frozen=True)
class ProgramFile:
    signature: Signature
    body: SurfaceExpr
    observation_names: tuple[str, ...]


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def at(self, kind: str, text: Optional[str] = None, ahead: int = 0) -> bool:
        tok = self.peek(ahead)
        return tok.kind == kind and (text is None or tok.text == text)

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        tok = self.peek()
        if not self.at(kind, text):
            want = text or kind
            raise ParseError(f"expected {want!r}, found {tok.text or tok.kind!r}", tok.line, tok.col)
        return self.next()

    def fail(self, message: str):
        tok = self.peek()
        raise ParseError(message, tok.line, tok.col)

    # -- types ------------------------------------------------------------

    def type_(self) -> Type:
        left = self.type_prod()
        if self.at("arrow"):
            self.next()
            return TFun(left, self.type_())
        return left

    def type_prod(self) -> Type:
        left = self.type_postfix()
        while self.at("*"):
            self.next()
            left = TProd(left, self.type_postfix())
        return left

    def type_postfix(self) -> Type:
        t = self.type_atom()
        while self.at("kw", "bnd"):
            self.next()
            t = TBnd(t)
        return t

    def type_atom(self) -> Type:
        if self.at("kw", "unit"):
            self.next()
            return UNIT
        if self.at("kw", "atm"):
            self.next()
            return ATM
        if self.at("ident"):
            return TData(self.next().text)
        if self.at("("):
            self.next()
            t = self.type_()
            self.expect(")")
            return t
        self.fail("expected a type")

    # -- expressions ------------------------------------------------------

    _PRIMARY_STARTS = ("(", "<", "atom", "ident", "conid")
    _PRIMARY_KWS = ("fst", "snd", "unbind", "fun", "fresh")

    def _starts_primary(self, ahead: int = 0) -> bool:
        tok = self.peek(ahead)
        if tok.kind in self._PRIMARY_STARTS:
            return True
        return tok.kind == "kw" and tok.text in self._PRIMARY_KWS

    def expr(self) -> SurfaceExpr:
        tok = self.peek()
        if tok.kind == "kw":
            if tok.text == "let":
                return self.let_expr()
            if tok.text == "if":
                self.next()
                cond = self.expr()
                self.expect("kw", "then")
                then = self.expr()
                self.expect("kw", "else")
                return SIf(cond, then, self.expr())
            if tok.text == "match":
                self.next()
                scrut = self.expr()
                self.expect("kw", "with")
                return SMatch(scrut, self.arms())
            if tok.text == "fresh" and self.at("ident", ahead=1):
                self.next()
                var = self.next().text
                self.expect("kw", "in")
                return SFreshIn(var, self.expr())
        if tok.kind == "\\":
            self.next()
            param = self.expect("ident").text
            pty = None
            if self.at(":"):
                self.next()
                pty = self.type_()
            self.expect(".")
            return SLam(param, self.expr(), pty)
        if tok.kind == "@":
            self.next()
            name = self.expect("ident").text
            args = []
            while self._starts_primary():
                args.append(self.primary())
            return SObs(name, tuple(args))
        e = self.primary()
        while self._starts_primary():
            e = SApp(e, self.primary())
        return e

    def let_expr(self) -> SurfaceExpr:
        self.expect("kw", "let")
        if self.at("<"):
            self.next()
            x1 = self.expect("ident").text
            self.expect(">")
            x2 = self.expect("ident").text
            self.expect("=")
            bound = self.expr()
            self.expect("kw", "in")
            return SLetBind(x1, x2, bound, self.expr())
        var = self.expect("ident").text
        self.expect("=")
        bound = self.expr()
        self.expect("kw", "in")
        return SLet(var, bound, self.expr())

    def arms(self) -> tuple[SArm, ...]:
        self.expect("(")
        out = [self.arm()]
        while self.at("|"):
            self.next()
            out.append(self.arm())
        self.expect(")")
        return tuple(out)

    def arm(self) -> SArm:
        con = self.expect("conid").text
        var: Optional[str] = None
        if self.at("ident"):
            var = self.next().text
        elif self.at("(") and self.at(")", ahead=1):
            self.next()
            self.next()
        self.expect("arrow")
        return SArm(con, var, self.expr())

    def primary(self) -> SurfaceExpr:
        tok = self.peek()
        if tok.kind == "(":
            self.next()
            if self.at(")"):
                self.next()
                return SUnit()
            first = self.expr()
            if self.at(","):
                self.next()
                second = self.expr()
                self.expect(")")
                return SPair(first, second)
            self.expect(")")
            return first
        if tok.kind == "<":
            self.next()
            name = self.expr()
            self.expect(">")
            return SBind(name, self.primary())
        if tok.kind == "atom":
            self.next()
            return SAtom(Atom(int(tok.text)))
        if tok.kind == "ident":
            self.next()
            return SVar(tok.text)
        if tok.kind == "conid":
            self.next()
            if not self._starts_primary():
                self.fail(f"constructor {tok.text} needs an argument")
            return SCon(tok.text, self.primary())
        if tok.kind == "kw":
            if tok.text == "fst":
                self.next()
                return SFst(self.primary())
            if tok.text == "snd":
                self.next()
                return SSnd(self.primary())
            if tok.text == "unbind":
                self.next()
                return SUnbind(self.primary())
            if tok.text == "fresh":
                self.next()
                self.expect("(")
                self.expect(")")
                return SFresh()
            if tok.text == "fun":
                return self.fun_value()
        self.fail(f"expected an expression, found {tok.text or tok.kind!r}")

    def fun_value(self) -> SurfaceExpr:
        self.expect("kw", "fun")
        self.expect("(")
        fname = self.expect("ident").text
        pty = rty = None
        if self.at("("):
            self.next()
            param = self.expect("ident").text
            self.expect(":")
            pty = self.type_()
            self.expect(")")
        else:
            param = self.expect("ident").text
        if self.at(":"):
            self.next()
            rty = self.type_()
        self.expect("=")
        body = self.expr()
        self.expect(")")
        return SFun(fname, param, body, pty, rty)

    # -- declarations -----------------------------------------------------

    def datatype_group(self) -> list[tuple[str, tuple[tuple[str, Type], ...]]]:
        self.expect("kw", "type")
        groups = [self.one_datatype()]
        while self.at("kw", "and"):
            self.next()
            groups.append(self.one_datatype())
        self.expect(";")
        return groups

    def one_datatype(self) -> tuple[str, tuple[tuple[str, Type], ...]]:
        name = self.expect("ident").text
        self.expect("=")
        cons = [self.one_constructor()]
        while self.at("|"):
            self.next()
            cons.append(self.one_constructor())
        return name, tuple(cons)

    def one_constructor(self) -> tuple[str, Type]:
        con = self.expect("conid").text
        self.expect("kw", "of")
        return con, self.type_()

    def observation_line(self) -> list[str]:
        self.expect("kw", "observations")
        self.expect(":")
        names = [self.expect("ident").text]
        while self.at(","):
            self.next()
            names.append(self.expect("ident").text)
        return names


def parse(text: str) -> SurfaceExpr:
    """Parse a single surface expression."""
    p = _Parser(tokenize(text))
    e = p.expr()
    p.expect("eof")
    return e


def parse_type(text: str) -> Type:
    p = _Parser(tokenize(text))
    t = p.type_()
    p.expect("eof")
    return t


def _observations_by_name(names: list[str]) -> tuple[Observation, ...]:
    by_name = {o.name: o for o in builtin_registry()}
    out = []
    for n in names:
        if n not in by_name:
            raise ParseError(f"unknown observation {n!r}")
        out.append(by_name[n])
    return tuple(out)


def parse_program(text: str) -> ProgramFile:
    """Parse an optional signature block, observation line and one expression."""
    p = _Parser(tokenize(text))
    decls: list[tuple[str, tuple[tuple[str, Type], ...]]] = []
    obs_names: list[str] = []
    while True:
        if p.at("kw", "type"):
            decls.extend(p.datatype_group())
        elif p.at("kw", "observations"):
            obs_names.extend(p.observation_line())
        else:
            break
    body = p.expr()
    p.expect("eof")
    observations = _observations_by_name(obs_names) if obs_names else (EQ,)
    sig = make_signature(decls, observations, check_observations=False)
    return ProgramFile(sig, body, tuple(o.name for o in sig.observations))


# -- printing ---------------------------------------------------------------


def _atomic(s: str, atomic: bool) -> str:
    return f"({s})" if atomic else s


def print_expr(e: Expr) -> str:
    """Concrete syntax for a reduced expression; reparses to an equal term."""
    return _print(e, False)


def _print(e: Expr, atomic: bool) -> str:
    match e:
        case Var(x):
            return x
        case Unit():
            return "()"
        case AtomLit(a):
            return str(a)
        case Pair(a, b):
            return f"({_print(a, False)}, {_print(b, False)})"
        case Fun(f, x, body, pty, rty):
            param = f"({x} : {type_to_str(pty)})" if pty is not None else x
            result = f" : {type_to_str(rty)}" if rty is not None else ""
            return f"fun({f} {param}{result} = {_print(body, False)})"
        case Con(c, Unit()):
            return f"{c}()"
        case Con(c, Pair(_, _) as v):
            return f"{c}{_print(v, False)}"
        case Con(c, v):
            return f"{c}({_print(v, False)})"
        case Bind(a, b):
            return _atomic(f"<{_print(a, False)}> {_print(b, True)}", atomic)
        case Let(x, e1, e2):
            return _atomic(
                f"let {x} = {_print(e1, False)} in {_print(e2, False)}", atomic
            )
        case Fst(v):
            return _atomic(f"fst {_print(v, True)}", atomic)
        case Snd(v):
            return _atomic(f"snd {_print(v, True)}", atomic)
        case Unbind(v):
            return _atomic(f"unbind {_print(v, True)}", atomic)
        case App(f, a):
            return _atomic(f"{_print(f, True)} {_print(a, True)}", atomic)
        case Match(v, arms):
            body = " | ".join(
                f"{arm.con} {arm.var} -> {_print(arm.body, False)}" for arm in arms
            )
            return _atomic(f"match {_print(v, True)} with ({body})", atomic)
        case Fresh():
            return "fresh ()"
        case ObsApp(o, args):
            parts = " ".join(_print(v, True) for v in args)
            text = f"@{o} {parts}" if parts else f"@{o}"
            return _atomic(text, atomic)
        case _:
            raise TypeError(f"cannot print {type(e).__name__}")
