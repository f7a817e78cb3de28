"""Class tables: well-formedness checking and the derived static relations.

A class table maps class names to declarations and carries the designated
owner/rep class names used by the confinement machinery. Everything derived
(subtyping, field and method lookup, method depth, constructor dependence,
module scope, prot methods) is computed once at build time; the table is
immutable afterwards and all queries are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

from . import ast as A
from .ast import OBJECT, ClassDecl, ClassType, MethodDecl, NullType, PrimType


class WellFormednessError(Exception):
    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind
        self.message = message


@dataclass(frozen=True)
class Designations:
    own: str
    rep: str
    rep2: Optional[str] = None

    def rep_names(self) -> Tuple[str, ...]:
        return (self.rep,) if self.rep2 is None else (self.rep, self.rep2)


class ClassTable:
    """Immutable program: declarations plus every derived static table."""

    def __init__(self, decls: List[ClassDecl], designations: Optional[Designations] = None):
        self.decls: Dict[str, ClassDecl] = {}
        for d in decls:
            if d.name == OBJECT:
                raise WellFormednessError("DuplicateMember", f"class {OBJECT} is built in and cannot be declared")
            if d.name in self.decls:
                raise WellFormednessError("DuplicateMember", f"class {d.name} declared twice")
            self.decls[d.name] = d
        self.designations = designations
        self._subtype_cache: Dict[Tuple[str, str], bool] = {}
        self._resolve_cache: Dict[Tuple[str, str], Optional[Tuple[str, MethodDecl]]] = {}
        self._check_hierarchy()
        self._fields: Dict[str, Tuple[Tuple[str, object], ...]] = {}
        self._build_fields()
        self._check_members()
        self._check_designations()
        self._check_constructor_dependence()
        self._check_mscope()
        self._prot: Optional[Set[Tuple[str, str]]] = None

    # -- construction-time checks

    def _check_hierarchy(self):
        for d in self.decls.values():
            if d.super_name != OBJECT and d.super_name not in self.decls:
                raise WellFormednessError("UndeclaredClass", f"superclass {d.super_name} of {d.name} is not declared")
        for name in self.decls:
            seen = {name}
            cur = self.decls[name].super_name
            while cur != OBJECT:
                if cur in seen:
                    raise WellFormednessError("CyclicInheritance", f"cycle through class {name}")
                seen.add(cur)
                cur = self.decls[cur].super_name

    def _build_fields(self):
        def fields_of(name: str):
            if name == OBJECT:
                return ()
            if name in self._fields:
                return self._fields[name]
            d = self.decls[name]
            inherited = fields_of(d.super_name)
            inames = {f for f, _ in inherited}
            for f, _ in d.fields:
                if f in inames:
                    raise WellFormednessError(
                        "DuplicateMember", f"field {f} of {name} is already declared in a superclass"
                    )
            self._fields[name] = inherited + d.fields
            return self._fields[name]

        for name in self.decls:
            fields_of(name)

    def _check_members(self):
        for d in self.decls.values():
            seen_f = set()
            for f, t in d.fields:
                if f in seen_f:
                    raise WellFormednessError("DuplicateMember", f"field {f} declared twice in {d.name}")
                seen_f.add(f)
                self._check_type_declared(t, f"field {d.name}.{f}")
            seen_m = set()
            for m in d.methods:
                if m.name in seen_m:
                    raise WellFormednessError("DuplicateMember", f"method {m.name} declared twice in {d.name}")
                seen_m.add(m.name)
                self._check_type_declared(m.return_type, f"return type of {d.name}.{m.name}")
                pnames = set()
                for x, t in m.params:
                    if x in ("self", "result"):
                        raise WellFormednessError("BadParameter", f"{d.name}.{m.name}: parameter named {x}")
                    if x in pnames:
                        raise WellFormednessError("BadParameter", f"{d.name}.{m.name}: duplicate parameter {x}")
                    pnames.add(x)
                    self._check_type_declared(t, f"parameter {x} of {d.name}.{m.name}")

    def _check_type_declared(self, t, where: str):
        if isinstance(t, ClassType) and t.name != OBJECT and t.name not in self.decls:
            raise WellFormednessError("UndeclaredClass", f"{where} has undeclared class {t.name}")

    def _check_designations(self):
        d = self.designations
        if d is None:
            return
        for name in (d.own,) + d.rep_names():
            if name not in self.decls:
                raise WellFormednessError("UndeclaredClass", f"designated class {name} is not declared")
        for r in d.rep_names():
            if not self.incomparable_names(d.own, r):
                raise WellFormednessError(
                    "BadModuleScope", f"designated classes must be incomparable: {d.own} vs {r}"
                )

    def _check_constructor_dependence(self):
        # B < C  iff  `x := new B` occurs in the constructor of C or an ancestor
        direct: Dict[str, Set[str]] = {}
        for name, d in self.decls.items():
            news = set()
            cur = name
            while cur != OBJECT:
                dc = self.decls[cur]
                for cmd in A.walk_commands(dc.constructor):
                    if isinstance(cmd, A.NewAssign):
                        if cmd.class_name != OBJECT and cmd.class_name not in self.decls:
                            raise WellFormednessError(
                                "UndeclaredClass", f"constructor of {cur} constructs undeclared {cmd.class_name}"
                            )
                        news.add(cmd.class_name)
                cur = dc.super_name
            direct[name] = news
        self.constructor_deps = direct
        # transitive closure must be irreflexive
        for start in self.decls:
            stack, seen = [start], set()
            while stack:
                cur = stack.pop()
                for nxt in direct.get(cur, ()):
                    if nxt == start:
                        raise WellFormednessError(
                            "CyclicConstructorDependence",
                            f"constructing {start} entails constructing {start} again",
                        )
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)

    def _check_mscope(self):
        has_mscope = any(m.module_scoped for d in self.decls.values() for m in d.methods)
        if has_mscope and self.designations is None:
            raise WellFormednessError(
                "BadModuleScope", "module-scoped methods require owner/rep designations"
            )
        for d in self.decls.values():
            for m in d.methods:
                sup = d.super_name
                if sup != OBJECT:
                    inherited = self.resolve_method(m.name, sup)
                    if inherited is not None and inherited[1].module_scoped != m.module_scoped:
                        raise WellFormednessError(
                            "BadModuleScope",
                            f"{d.name}.{m.name} disagrees with the inherited declaration on module scope",
                        )
                if not m.module_scoped:
                    continue
                des = self.designations
                inside = self.subtype_names(d.name, des.own) or any(
                    self.subtype_names(d.name, r) for r in des.rep_names()
                )
                if not inside:
                    raise WellFormednessError(
                        "BadModuleScope", f"module-scoped {d.name}.{m.name} outside owner/rep classes"
                    )
                for b in (des.own,) + des.rep_names():
                    cur = self.decls[b].super_name
                    while cur != OBJECT:
                        if self.decls[cur].method(m.name) is not None:
                            raise WellFormednessError(
                                "BadModuleScope",
                                f"module-scoped method {m.name} is also declared above {b} (in {cur})",
                            )
                        cur = self.decls[cur].super_name

    # -- queries

    def declared(self, name: str) -> bool:
        return name == OBJECT or name in self.decls

    def super_of(self, name: str) -> Optional[str]:
        if name == OBJECT:
            return None
        return self.decls[name].super_name

    def ancestors(self, name: str):
        """`name` and its proper ancestors up to and including Object."""
        cur = name
        while cur is not None:
            yield cur
            cur = self.super_of(cur)

    def subtype_names(self, c: str, d: str) -> bool:
        key = (c, d)
        cached = self._subtype_cache.get(key)
        if cached is None:
            cached = d in self.ancestors(c)
            self._subtype_cache[key] = cached
        return cached

    def subtype(self, t, u) -> bool:
        if isinstance(t, NullType):
            return isinstance(u, (ClassType, NullType))
        if isinstance(t, PrimType) or isinstance(u, (PrimType, NullType)):
            return t == u
        return self.subtype_names(t.name, u.name)

    def incomparable_names(self, c: str, d: str) -> bool:
        return not self.subtype_names(c, d) and not self.subtype_names(d, c)

    def incomparable(self, t, u) -> bool:
        return not self.subtype(t, u) and not self.subtype(u, t)

    def fields(self, name: str) -> Tuple[Tuple[str, object], ...]:
        """All fields of `name`, superclass fields first, declaration order."""
        if name == OBJECT:
            return ()
        return self._fields[name]

    def dfields(self, name: str) -> Tuple[Tuple[str, object], ...]:
        if name == OBJECT:
            return ()
        return self.decls[name].fields

    def field_type(self, cname: str, fname: str):
        for f, t in self.fields(cname):
            if f == fname:
                return t
        return None

    def resolve_method(self, mname: str, cname: str) -> Optional[Tuple[str, MethodDecl]]:
        """Least ancestor of `cname` declaring `mname`, with its declaration."""
        key = (mname, cname)
        if key in self._resolve_cache:
            return self._resolve_cache[key]
        result = None
        for anc in self.ancestors(cname):
            if anc == OBJECT:
                break
            m = self.decls[anc].method(mname)
            if m is not None:
                result = (anc, m)
                break
        self._resolve_cache[key] = result
        return result

    def mtype(self, mname: str, cname: str):
        r = self.resolve_method(mname, cname)
        if r is None:
            return None
        m = r[1]
        return tuple(t for _, t in m.params), m.return_type

    def pars(self, mname: str, cname: str):
        r = self.resolve_method(mname, cname)
        if r is None:
            return None
        return tuple(x for x, _ in r[1].params)

    def mscope(self, mname: str, cname: str) -> bool:
        r = self.resolve_method(mname, cname)
        return bool(r and r[1].module_scoped)

    def depth(self, mname: str, cname: str) -> Optional[int]:
        if self.resolve_method(mname, cname) is None:
            return None
        sup = self.super_of(cname)
        if sup is not None and sup != OBJECT and self.resolve_method(mname, sup) is not None:
            return 1 + self.depth(mname, sup)
        return 0

    def method_names(self, cname: str) -> List[str]:
        names: List[str] = []
        for anc in reversed(list(self.ancestors(cname))):
            if anc == OBJECT:
                continue
            for m in self.decls[anc].methods:
                if m.name not in names:
                    names.append(m.name)
        return names

    # -- roles (meaningful only with designations)

    def is_owner_class(self, name: str) -> bool:
        d = self.designations
        return d is not None and self.subtype_names(name, d.own)

    def is_rep_class(self, name: str) -> bool:
        d = self.designations
        return d is not None and any(self.subtype_names(name, r) for r in d.rep_names())

    def is_client_class(self, name: str) -> bool:
        return not self.is_owner_class(name) and not self.is_rep_class(name)

    def comparable_to_rep(self, t) -> bool:
        """Is `t` a class type comparable to some designated rep class?
        Primitives are incomparable to every class."""
        d = self.designations
        if d is None or not isinstance(t, ClassType):
            return False
        return any(not self.incomparable_names(t.name, r) for r in d.rep_names())

    def comparable_to_own(self, t) -> bool:
        d = self.designations
        if d is None or not isinstance(t, ClassType):
            return False
        return not self.incomparable_names(t.name, d.own)

    # -- prot: module-scoped owner methods that sub-owners depend on

    def prot_methods(self) -> Set[Tuple[str, str]]:
        """Module-scoped methods of the owner class that some proper subclass
        of the owner calls or overrides."""
        if self._prot is not None:
            return self._prot
        result: Set[Tuple[str, str]] = set()
        d = self.designations
        if d is None:
            self._prot = result
            return result
        own = d.own
        mscoped = {m for m in self.method_names(own) if self.mscope(m, own)}
        if mscoped:
            for cname, decl in self.decls.items():
                if cname == own or not self.subtype_names(cname, own):
                    continue
                for m in decl.methods:
                    if m.name in mscoped:
                        result.add((m.name, own))
                    for cmd in A.walk_commands(m.body):
                        called = None
                        if isinstance(cmd, A.CallAssign):
                            called = cmd.method
                        elif isinstance(cmd, A.SuperCallAssign):
                            called = cmd.method
                        if called in mscoped:
                            result.add((called, own))
        self._prot = result
        return result


def build_class_table(decls: List[ClassDecl], designations: Optional[Designations] = None) -> ClassTable:
    return ClassTable(list(decls), designations)
