"""Lowering of surface programs to the core AST.

Three abbreviations are eliminated:

* a method call used as a statement becomes a call assignment to a fresh,
  otherwise unused local;
* `new` initializing a field or a local becomes a default-initialized local
  block plus an object-construction assignment;
* method calls in expression position (receivers, arguments, operands) are
  hoisted into fresh locals, strictly left to right, receiver before
  arguments.

Fresh locals are named `$tmp0`, `$tmp1`, ... with the counter reset per body;
`$` cannot appear in hand-written identifiers that the counter would collide
with, because numbering starts past any `$tmpN` already present. The pass is
idempotent: lowering a program that is already in core form changes nothing.

Hoisted locals are typed by a signature-level synthesis over the surface
program; where a call cannot be resolved (the program is ill-typed), the
local falls back to `unit` and the type checker reports the real error.
"""

from __future__ import annotations

import re
from typing import Dict, List, Optional, Tuple

from . import ast as A
from .parser import (
    SAbort, SAssign, SCallStmt, SIf, SLocal, SSeq, SSkip, SWhile,
    SurfaceClass, SurfaceMethod, SurfaceProgram,
)

_TMP_RE = re.compile(r"^\$tmp(\d+)$")


def default_literal(t):
    if t == A.BOOL:
        return A.BoolLit(False)
    if t == A.INT:
        return A.IntLit(0)
    if t == A.UNIT:
        return A.UnitLit()
    return A.NullLit()


class _Sigs:
    """Signature-level view of a surface program, for typing hoisted locals."""

    def __init__(self, prog: SurfaceProgram):
        self.classes: Dict[str, SurfaceClass] = {c.name: c for c in prog.classes}

    def super_of(self, name: str) -> Optional[str]:
        c = self.classes.get(name)
        return c.super_name if c else None

    def field_type(self, cname: str, fname: str):
        seen = set()
        while cname and cname != A.OBJECT and cname in self.classes and cname not in seen:
            seen.add(cname)
            for fn, ft in self.classes[cname].fields:
                if fn == fname:
                    return ft
            cname = self.classes[cname].super_name
        return None

    def method_sig(self, cname: str, mname: str):
        seen = set()
        while cname and cname != A.OBJECT and cname in self.classes and cname not in seen:
            seen.add(cname)
            for m in self.classes[cname].methods:
                if m.name == mname:
                    return m
            cname = self.classes[cname].super_name
        return None


class _BodyLowerer:
    def __init__(self, sigs: _Sigs, cls: SurfaceClass, env: Dict[str, object], body):
        self.sigs = sigs
        self.cls = cls
        self.env = dict(env)
        self.counter = self._first_free_tmp(body)

    @staticmethod
    def _first_free_tmp(body) -> int:
        mx = -1
        for name in re.findall(r"\$tmp(\d+)", _names_blob(body)):
            mx = max(mx, int(name))
        return mx + 1

    def fresh(self) -> str:
        name = f"$tmp{self.counter}"
        self.counter += 1
        return name

    # -- type synthesis over surface expressions (best effort)

    def synth(self, e, env) -> Optional[object]:
        if isinstance(e, A.Var):
            return env.get(e.name)
        if isinstance(e, A.BoolLit):
            return A.BOOL
        if isinstance(e, A.IntLit):
            return A.INT
        if isinstance(e, A.UnitLit):
            return A.UNIT
        if isinstance(e, A.NullLit):
            return None
        if isinstance(e, (A.Eq, A.InstanceTest)):
            return A.BOOL
        if isinstance(e, A.IntOp):
            return A.BOOL if e.op == "<" else A.INT
        if isinstance(e, A.Cast):
            return A.ClassType(e.class_name)
        if isinstance(e, A.FieldAccess):
            t = self.synth(e.target, env)
            if isinstance(t, A.ClassType):
                return self.sigs.field_type(t.name, e.fieldname)
            return None
        if isinstance(e, A.CallExpr):
            t = self.synth(e.receiver, env)
            if isinstance(t, A.ClassType):
                m = self.sigs.method_sig(t.name, e.method)
                if m:
                    return m.return_type
            return None
        if isinstance(e, A.SuperCallExpr):
            sup = self.sigs.super_of(self.cls.name)
            if sup:
                m = self.sigs.method_sig(sup, e.method)
                if m:
                    return m.return_type
            return None
        if isinstance(e, A.NewExpr):
            return A.ClassType(e.class_name)
        return None

    # -- hoisting

    def hoist(self, e, env, bindings: List[Tuple[object, str, object]]):
        """Rewrite `e` so it contains no calls; emit (type, name, call) bindings."""
        if isinstance(e, (A.Var, A.NullLit, A.BoolLit, A.IntLit, A.UnitLit)):
            return e
        if isinstance(e, A.FieldAccess):
            return A.FieldAccess(self.hoist(e.target, env, bindings), e.fieldname, e.span)
        if isinstance(e, A.Eq):
            left = self.hoist(e.left, env, bindings)
            right = self.hoist(e.right, env, bindings)
            return A.Eq(left, right, e.span)
        if isinstance(e, A.IntOp):
            left = self.hoist(e.left, env, bindings)
            right = self.hoist(e.right, env, bindings)
            return A.IntOp(e.op, left, right, e.span)
        if isinstance(e, A.InstanceTest):
            return A.InstanceTest(self.hoist(e.target, env, bindings), e.class_name, e.span)
        if isinstance(e, A.Cast):
            return A.Cast(e.class_name, self.hoist(e.target, env, bindings), e.span)
        if isinstance(e, A.CallExpr):
            t = self.synth(e, env) or A.UNIT
            recv = self.hoist(e.receiver, env, bindings)
            args = tuple(self.hoist(a, env, bindings) for a in e.args)
            name = self.fresh()
            bindings.append((t, name, A.CallExpr(recv, e.method, args, e.span)))
            return A.Var(name, e.span)
        if isinstance(e, A.SuperCallExpr):
            t = self.synth(e, env) or A.UNIT
            args = tuple(self.hoist(a, env, bindings) for a in e.args)
            name = self.fresh()
            bindings.append((t, name, A.SuperCallExpr(e.method, args, e.span)))
            return A.Var(name, e.span)
        raise TypeError(f"unexpected surface expression: {e!r}")

    def _call_assign(self, name, call):
        if isinstance(call, A.SuperCallExpr):
            return A.SuperCallAssign(name, call.method, call.args, call.span)
        return A.CallAssign(name, call.receiver, call.method, call.args, call.span)

    def _wrap(self, bindings, core_cmd):
        """Wrap a command in default-init blocks executing the hoisted calls."""
        for t, name, call in reversed(bindings):
            inner = A.seq([self._call_assign(name, call), core_cmd])
            core_cmd = A.LocalBlock(t, name, default_literal(t), inner, call.span)
        return core_cmd

    # -- statements

    def lower_seq(self, items: List[object], env) -> object:
        if not items:
            return A.Skip()
        head, rest = items[0], items[1:]

        if isinstance(head, SSeq):
            # a braced group is a closed scope: locals inside it do not extend
            # over the statements that follow the group
            closed = self.lower_seq(list(head.items), env)
            if rest:
                return A.seq([closed, self.lower_seq(rest, env)])
            return closed

        if isinstance(head, SLocal):
            scope_items = [head.body] if head.body is not None else rest
            after = [] if head.body is None else rest
            env2 = dict(env)
            env2[head.name] = head.var_type
            rhs = head.rhs
            if isinstance(rhs, A.NewExpr):
                body = A.seq([
                    A.NewAssign(head.name, rhs.class_name, head.span),
                    self.lower_seq(scope_items, env2),
                ])
                cmd = A.LocalBlock(head.var_type, head.name, default_literal(head.var_type), body, head.span)
            elif isinstance(rhs, (A.CallExpr, A.SuperCallExpr)):
                bindings: List[Tuple[object, str, object]] = []
                if isinstance(rhs, A.CallExpr):
                    recv = self.hoist(rhs.receiver, env, bindings)
                    args = tuple(self.hoist(a, env, bindings) for a in rhs.args)
                    call = A.CallExpr(recv, rhs.method, args, rhs.span)
                else:
                    args = tuple(self.hoist(a, env, bindings) for a in rhs.args)
                    call = A.SuperCallExpr(rhs.method, args, rhs.span)
                body = A.seq([
                    self._call_assign(head.name, call),
                    self.lower_seq(scope_items, env2),
                ])
                cmd = self._wrap(
                    bindings,
                    A.LocalBlock(head.var_type, head.name, default_literal(head.var_type), body, head.span),
                )
            else:
                bindings = []
                init = self.hoist(rhs, env, bindings)
                cmd = self._wrap(
                    bindings,
                    A.LocalBlock(head.var_type, head.name, init, self.lower_seq(scope_items, env2), head.span),
                )
            if after:
                return A.seq([cmd, self.lower_seq(after, env)])
            return cmd

        core = self.lower_one(head, env)
        if rest:
            return A.seq([core, self.lower_seq(rest, env)])
        return core

    def lower_one(self, s, env) -> object:
        if isinstance(s, SSkip):
            return A.Skip(s.span)
        if isinstance(s, SAbort):
            return A.Abort(s.span)
        if isinstance(s, SSeq):
            return self.lower_seq(list(s.items), env)
        if isinstance(s, SIf):
            bindings: List[Tuple[object, str, object]] = []
            cond = self.hoist(s.cond, env, bindings)
            cmd = A.If(cond, self.lower_one(s.then_seq, env), self.lower_one(s.else_seq, env), s.span)
            return self._wrap(bindings, cmd)
        if isinstance(s, SWhile):
            bindings = []
            cond = self.hoist(s.cond, env, bindings)
            body = self.lower_one(s.body, env)
            if bindings:
                # effectful guard: re-evaluate the hoisted calls at the end of
                # each iteration so the loop observes a fresh guard value
                recalls = A.seq([self._call_assign(n, c) for _, n, c in bindings])
                loop = A.While(cond, A.seq([body, recalls]), s.span)
                return self._wrap(bindings, loop)
            return A.While(cond, body, s.span)
        if isinstance(s, SCallStmt):
            call = s.call
            t = self.synth(call, env) or A.UNIT
            bindings = []
            if isinstance(call, A.CallExpr):
                recv = self.hoist(call.receiver, env, bindings)
                args = tuple(self.hoist(a, env, bindings) for a in call.args)
                call2 = A.CallExpr(recv, call.method, args, call.span)
            else:
                args = tuple(self.hoist(a, env, bindings) for a in call.args)
                call2 = A.SuperCallExpr(call.method, args, call.span)
            name = self.fresh()
            inner = A.seq([self._call_assign(name, call2), A.Skip()])
            return self._wrap(bindings, A.LocalBlock(t, name, default_literal(t), inner, s.span))
        if isinstance(s, SAssign):
            return self.lower_assign(s, env)
        raise TypeError(f"unexpected surface statement: {s!r}")

    def lower_assign(self, s: SAssign, env) -> object:
        lhs, rhs = s.lhs, s.rhs
        if isinstance(lhs, A.Var):
            if isinstance(rhs, A.NewExpr):
                return A.NewAssign(lhs.name, rhs.class_name, s.span)
            if isinstance(rhs, (A.CallExpr, A.SuperCallExpr)):
                bindings: List[Tuple[object, str, object]] = []
                if isinstance(rhs, A.CallExpr):
                    recv = self.hoist(rhs.receiver, env, bindings)
                    args = tuple(self.hoist(a, env, bindings) for a in rhs.args)
                    call = A.CallExpr(recv, rhs.method, args, rhs.span)
                else:
                    args = tuple(self.hoist(a, env, bindings) for a in rhs.args)
                    call = A.SuperCallExpr(rhs.method, args, rhs.span)
                return self._wrap(bindings, self._call_assign(lhs.name, call))
            bindings = []
            e = self.hoist(rhs, env, bindings)
            return self._wrap(bindings, A.Assign(lhs.name, e, s.span))
        # field assignment
        assert isinstance(lhs, A.FieldAccess)
        if isinstance(rhs, A.NewExpr):
            tmp = self.fresh()
            t = A.ClassType(rhs.class_name)
            bindings = []
            target = self.hoist(lhs.target, env, bindings)
            body = A.seq([
                A.NewAssign(tmp, rhs.class_name, s.span),
                A.FieldAssign(target, lhs.fieldname, A.Var(tmp), s.span),
            ])
            return self._wrap(bindings, A.LocalBlock(t, tmp, A.NullLit(), body, s.span))
        if isinstance(rhs, (A.CallExpr, A.SuperCallExpr)):
            t = self.synth(rhs, env) or A.UNIT
            bindings = []
            target = self.hoist(lhs.target, env, bindings)
            if isinstance(rhs, A.CallExpr):
                recv = self.hoist(rhs.receiver, env, bindings)
                args = tuple(self.hoist(a, env, bindings) for a in rhs.args)
                call = A.CallExpr(recv, rhs.method, args, rhs.span)
            else:
                args = tuple(self.hoist(a, env, bindings) for a in rhs.args)
                call = A.SuperCallExpr(rhs.method, args, rhs.span)
            tmp = self.fresh()
            body = A.seq([
                self._call_assign(tmp, call),
                A.FieldAssign(target, lhs.fieldname, A.Var(tmp), s.span),
            ])
            return self._wrap(bindings, A.LocalBlock(t, tmp, default_literal(t), body, s.span))
        bindings = []
        target = self.hoist(lhs.target, env, bindings)
        value = self.hoist(rhs, env, bindings)
        return self._wrap(bindings, A.FieldAssign(target, lhs.fieldname, value, s.span))


def _names_blob(body) -> str:
    return repr(body)


def desugar(prog: SurfaceProgram) -> List[A.ClassDecl]:
    sigs = _Sigs(prog)
    out: List[A.ClassDecl] = []
    for c in prog.classes:
        methods = []
        for m in c.methods:
            env = {n: t for n, t in m.params}
            env["self"] = A.ClassType(c.name)
            env["result"] = m.return_type
            lw = _BodyLowerer(sigs, c, env, m.body)
            body = lw.lower_seq([m.body], env)
            methods.append(A.MethodDecl(m.name, m.return_type, m.params, body, m.module_scoped, m.span))
        if c.constructor is None:
            ctor = A.Skip()
        else:
            env = {"self": A.ClassType(c.name)}
            lw = _BodyLowerer(sigs, c, env, c.constructor)
            ctor = lw.lower_seq([c.constructor], env)
        out.append(A.ClassDecl(c.name, c.super_name, c.fields, ctor, tuple(methods), c.span))
    return out


def parse_and_desugar(src: str) -> List[A.ClassDecl]:
    from .parser import parse

    return desugar(parse(src))
