"""Parser for `.jcore` source files.

Surface syntax is Java-like: class declarations with private fields, a
parameterless constructor `con { ... }`, and public or `module` methods.
Statements use `:=` for assignment, `if/then/else/fi`, `while/do/od`, and
local declarations whose scope extends to the end of the enclosing sequence
(an explicit `in` is also accepted). `//` comments run to end of line.

The parser produces a surface tree in which method calls may appear inside
expressions and `new` may initialize fields and locals; `desugar` lowers all
of that to the core AST. Boolean negation `!e` and disequality `e1 != e2`
are accepted and represented with equality against `false`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from . import ast as A
from .ast import Span

KEYWORDS = {
    "class", "extends", "con", "module",
    "skip", "abort", "if", "then", "else", "fi", "while", "do", "od", "in",
    "new", "null", "true", "false", "it", "is", "super",
    "bool", "unit", "int", "mod",
}

_PUNCT = [":=", "!=", "{", "}", "(", ")", ";", ",", ".", "=", "<", "+", "-", "!"]


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # 'ident' | 'int' | 'punct' | 'kw' | 'eof'
    text: str
    span: Span


def tokenize(src: str) -> List[Token]:
    toks: List[Token] = []
    i, line, col = 0, 1, 1
    n = len(src)
    while i < n:
        c = src[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if src.startswith("//", i):
            while i < n and src[i] != "\n":
                i += 1
            continue
        start, sl, sc = i, line, col
        if c.isalpha() or c == "_" or c == "$":
            j = i + 1
            while j < n and (src[j].isalnum() or src[j] in "_$"):
                j += 1
            text = src[i:j]
            kind = "kw" if text in KEYWORDS else "ident"
            toks.append(Token(kind, text, Span(start, j, sl, sc)))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i + 1
            while j < n and src[j].isdigit():
                j += 1
            toks.append(Token("int", src[i:j], Span(start, j, sl, sc)))
            col += j - i
            i = j
            continue
        for p in _PUNCT:
            if src.startswith(p, i):
                toks.append(Token("punct", p, Span(start, i + len(p), sl, sc)))
                i += len(p)
                col += len(p)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    toks.append(Token("eof", "", Span(n, n, line, col)))
    return toks


# ---------------------------------------------------------------------------
# Surface tree


@dataclass(frozen=True)
class SLocal:
    var_type: object
    name: str
    rhs: object  # expression (may be NewExpr / CallExpr / SuperCallExpr)
    body: object  # SSeq | statement | None (None: scope ran to end of sequence)
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SAssign:
    lhs: object  # Var or FieldAccess
    rhs: object
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SCallStmt:
    call: object  # CallExpr | SuperCallExpr
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SIf:
    cond: object
    then_seq: object
    else_seq: object
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SWhile:
    cond: object
    body: object
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SSkip:
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SAbort:
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SSeq:
    items: Tuple[object, ...]
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SurfaceMethod:
    name: str
    return_type: object
    params: Tuple[Tuple[str, object], ...]
    body: object
    module_scoped: bool
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SurfaceClass:
    name: str
    super_name: str
    fields: Tuple[Tuple[str, object], ...]
    constructor: object  # statement or None
    methods: Tuple[SurfaceMethod, ...]
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SurfaceProgram:
    classes: Tuple[SurfaceClass, ...]
    source: str = field(default="", compare=False, repr=False)


_EXPR_START = {"null", "true", "false", "it", "new", "super"}


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.toks = tokenize(src)
        self.pos = 0

    # -- token helpers

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.text == text and t.kind in ("punct", "kw")

    def accept(self, text: str) -> Optional[Token]:
        if self.at(text):
            return self.next()
        return None

    def expect(self, text: str, what: str = "") -> Token:
        t = self.peek()
        if not self.at(text):
            msg = what or f"expected {text!r}, found {t.text or 'end of input'!r}"
            raise ParseError(msg, t.span.line, t.span.col)
        return self.next()

    def expect_ident(self, what: str) -> Token:
        t = self.peek()
        if t.kind != "ident":
            raise ParseError(f"expected {what}, found {t.text or 'end of input'!r}", t.span.line, t.span.col)
        return self.next()

    def span_from(self, start: Span) -> Span:
        end = self.toks[self.pos - 1].span if self.pos > 0 else start
        return Span(start.start, end.end, start.line, start.col)

    # -- program structure

    def program(self) -> SurfaceProgram:
        classes = []
        while not self.peek().kind == "eof":
            classes.append(self.class_decl())
        return SurfaceProgram(tuple(classes), self.src)

    def class_decl(self) -> SurfaceClass:
        start = self.expect("class").span
        name = self.expect_ident("class name").text
        self.expect("extends")
        sup = self.expect_ident("superclass name").text
        self.expect("{")
        fields: List[Tuple[str, object]] = []
        methods: List[SurfaceMethod] = []
        ctor = None
        while not self.at("}"):
            if self.accept("con"):
                self.expect("{")
                body = self.stmt_seq()
                self.expect("}")
                ctor = body
                continue
            mstart = self.peek().span
            module_scoped = bool(self.accept("module"))
            t = self.type_expr()
            member = self.expect_ident("member name").text
            if self.accept(";"):
                if module_scoped:
                    raise ParseError("fields cannot be module-scoped", mstart.line, mstart.col)
                fields.append((member, t))
                continue
            self.expect("(", "expected ';' or '(' after member name")
            params: List[Tuple[str, object]] = []
            if not self.at(")"):
                while True:
                    pt = self.type_expr()
                    pn = self.expect_ident("parameter name").text
                    params.append((pn, pt))
                    if not self.accept(","):
                        break
            self.expect(")")
            self.expect("{")
            body = self.stmt_seq()
            self.expect("}")
            methods.append(
                SurfaceMethod(member, t, tuple(params), body, module_scoped, self.span_from(mstart))
            )
        self.expect("}")
        return SurfaceClass(name, sup, tuple(fields), ctor, tuple(methods), self.span_from(start))

    def type_expr(self):
        t = self.peek()
        if t.text in A.PRIM_NAMES:
            self.next()
            return A.PRIM_NAMES[t.text]
        tok = self.expect_ident("type name")
        return A.ClassType(tok.text)

    # -- statements

    def stmt_seq(self):
        """Parse statements up to the enclosing terminator ('}', else, fi, od)."""
        items: List[object] = []
        while True:
            if self.peek().kind == "eof" or self.at("}") or self.at("else") or self.at("fi") or self.at("od"):
                break
            items.append(self.stmt())
            if not self.accept(";"):
                break
        if not items:
            return SSkip()
        if len(items) == 1:
            return items[0]
        return SSeq(tuple(items))

    def _at_local_decl(self) -> bool:
        t0, t1 = self.peek(), self.peek(1)
        if t0.text in A.PRIM_NAMES and t0.kind == "kw":
            return t1.kind == "ident"
        return t0.kind == "ident" and t1.kind == "ident"

    def stmt(self):
        start = self.peek().span
        if self.accept("skip"):
            return SSkip(self.span_from(start))
        if self.accept("abort"):
            return SAbort(self.span_from(start))
        if self.accept("{"):
            body = self.stmt_seq()
            self.expect("}")
            return body
        if self.accept("if"):
            cond = self.expr()
            self.expect("then")
            then_seq = self.stmt_seq()
            self.expect("else")
            else_seq = self.stmt_seq()
            self.expect("fi")
            return SIf(cond, then_seq, else_seq, self.span_from(start))
        if self.accept("while"):
            cond = self.expr()
            self.expect("do")
            body = self.stmt_seq()
            self.expect("od")
            return SWhile(cond, body, self.span_from(start))
        if self._at_local_decl():
            t = self.type_expr()
            name = self.expect_ident("variable name").text
            self.expect(":=", "expected ':=' in local declaration")
            rhs = self.rhs()
            if self.accept("in"):
                body = self.stmt_seq()
                return SLocal(t, name, rhs, body, self.span_from(start))
            return SLocal(t, name, rhs, None, self.span_from(start))
        # assignment or call statement
        e = self.expr()
        if self.accept(":="):
            if not isinstance(e, (A.Var, A.FieldAccess)):
                raise ParseError("assignment target must be a variable or a field", start.line, start.col)
            rhs = self.rhs()
            return SAssign(e, rhs, self.span_from(start))
        if isinstance(e, (A.CallExpr, A.SuperCallExpr)):
            return SCallStmt(e, self.span_from(start))
        raise ParseError("expected ':=' or a method call statement", start.line, start.col)

    def rhs(self):
        start = self.peek().span
        if self.accept("new"):
            name = self.expect_ident("class name after 'new'").text
            return A.NewExpr(name, self.span_from(start))
        return self.expr()

    # -- expressions

    def expr(self):
        return self.equality()

    def equality(self):
        start = self.peek().span
        e = self.relational()
        while True:
            if self.accept("="):
                r = self.relational()
                e = A.Eq(e, r, self.span_from(start))
            elif self.accept("!="):
                r = self.relational()
                e = A.Eq(A.Eq(e, r, self.span_from(start)), A.BoolLit(False), self.span_from(start))
            else:
                return e

    def relational(self):
        start = self.peek().span
        e = self.additive()
        while self.accept("<"):
            r = self.additive()
            e = A.IntOp("<", e, r, self.span_from(start))
        return e

    def additive(self):
        start = self.peek().span
        e = self.multiplicative()
        while True:
            if self.accept("+"):
                e = A.IntOp("+", e, self.multiplicative(), self.span_from(start))
            elif self.accept("-"):
                e = A.IntOp("-", e, self.multiplicative(), self.span_from(start))
            else:
                return e

    def multiplicative(self):
        start = self.peek().span
        e = self.unary()
        while self.accept("mod"):
            e = A.IntOp("mod", e, self.unary(), self.span_from(start))
        return e

    def unary(self):
        start = self.peek().span
        if self.accept("!"):
            e = self.unary()
            return A.Eq(e, A.BoolLit(False), self.span_from(start))
        if self._at_cast():
            self.expect("(")
            name = self.expect_ident("class name in cast").text
            self.expect(")")
            e = self.unary()
            return A.Cast(name, e, self.span_from(start))
        return self.postfix()

    def _at_cast(self) -> bool:
        if not self.at("("):
            return False
        t1, t2, t3 = self.peek(1), self.peek(2), self.peek(3)
        if t1.kind != "ident" or t2.text != ")":
            return False
        return t3.kind in ("ident", "int") or t3.text in _EXPR_START or t3.text in ("(", "!")

    def postfix(self):
        start = self.peek().span
        e = self.primary()
        while True:
            if self.accept("."):
                name = self.expect_ident("member name").text
                if self.accept("("):
                    args = self.call_args()
                    e = A.CallExpr(e, name, tuple(args), self.span_from(start))
                else:
                    e = A.FieldAccess(e, name, self.span_from(start))
            elif self.accept("is"):
                name = self.expect_ident("class name after 'is'").text
                e = A.InstanceTest(e, name, self.span_from(start))
            else:
                return e

    def call_args(self):
        args = []
        if not self.at(")"):
            while True:
                args.append(self.expr())
                if not self.accept(","):
                    break
        self.expect(")")
        return args

    def primary(self):
        t = self.peek()
        start = t.span
        if self.accept("null"):
            return A.NullLit(self.span_from(start))
        if self.accept("true"):
            return A.BoolLit(True, self.span_from(start))
        if self.accept("false"):
            return A.BoolLit(False, self.span_from(start))
        if self.accept("it"):
            return A.UnitLit(self.span_from(start))
        if t.kind == "int":
            self.next()
            return A.IntLit(int(t.text), self.span_from(start))
        if self.accept("super"):
            self.expect(".", "expected '.' after 'super'")
            name = self.expect_ident("method name").text
            self.expect("(", "super calls require an argument list")
            args = self.call_args()
            return A.SuperCallExpr(name, tuple(args), self.span_from(start))
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "ident":
            self.next()
            return A.Var(t.text, self.span_from(start))
        raise ParseError(f"expected an expression, found {t.text or 'end of input'!r}", t.span.line, t.span.col)


def parse(src: str) -> SurfaceProgram:
    return _Parser(src).program()


def parse_file(path) -> SurfaceProgram:
    with open(path, "r", encoding="utf-8") as f:
        return parse(f.read())
