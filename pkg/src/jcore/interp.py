"""Definitional interpreter: heaps, stores, allocation, and method meanings.

States are plain immutable values: a heap is a dict from locations to object
states (dicts from field names to values), a store is a dict from variables
to values, and every update copies. Method meanings are approximated by a
fuel counter: a call executed with fuel j runs the callee body with fuel j-1,
and any call at fuel 0 yields the fuel-exhausted bottom. A successful outcome
at some fuel is identical at every larger fuel, so iterative deepening on the
fuel computes the limit semantics whenever the program terminates.

Bottom outcomes carry a diagnostic reason. For equivalence purposes every
reason is the same improper value; fuel exhaustion is kept separate because
it means "undetermined at this approximation" rather than a genuine error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import ast as A
from .ast import OBJECT, BOOL, INT, UNIT, ClassType, NullType, PrimType
from .classtable import ClassTable

NIL_DEREF = "nil-dereference"
CAST_FAILURE = "cast-failure"
ABORT = "explicit-abort"
FUEL_EXHAUSTED = "fuel-exhausted"


class Unit:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "it"


IT = Unit()


@dataclass(frozen=True, order=True)
class Location:
    class_name: str
    index: int

    def __repr__(self):
        return f"{self.class_name}@{self.index}"


@dataclass(frozen=True)
class Bottom:
    reason: str
    detail: str = ""
    stack: Tuple[str, ...] = field(default=(), compare=False)

    def is_fuel(self) -> bool:
        return self.reason == FUEL_EXHAUSTED


Heap = Dict[Location, Dict[str, object]]
Store = Dict[str, object]


class EntryClassError(Exception):
    pass


def fresh(class_name: str, heap: Heap) -> Location:
    """Least-index parametric allocator: depends only on the per-class slice."""
    n = 0
    while Location(class_name, n) in heap:
        n += 1
    return Location(class_name, n)


def default_value(t):
    if t == BOOL:
        return False
    if t == INT:
        return 0
    if t == UNIT:
        return IT
    return None


def value_kind(v) -> str:
    if v is None:
        return "nil"
    if v is IT:
        return "unit"
    if type(v) is bool:
        return "bool"
    if type(v) is int:
        return "int"
    if isinstance(v, Location):
        return "loc"
    raise TypeError(f"not a value: {v!r}")


def values_equal(a, b) -> bool:
    """Equality on values: same kind and equal; locations by identity."""
    ka, kb = value_kind(a), value_kind(b)
    if ka != kb:
        return False
    return a == b


def value_in_type(ct: ClassTable, v, t) -> bool:
    if isinstance(t, PrimType):
        return value_kind(v) == t.name
    if isinstance(t, NullType):
        return v is None
    if v is None:
        return True
    return isinstance(v, Location) and ct.subtype_names(v.class_name, t.name)


def heap_closed(h: Heap) -> bool:
    for state in h.values():
        for v in state.values():
            if isinstance(v, Location) and v not in h:
                return False
    return True


def store_closed(h: Heap, eta: Store) -> bool:
    return all(not isinstance(v, Location) or v in h for v in eta.values())


def heap_well_typed(ct: ClassTable, h: Heap) -> bool:
    for loc, state in h.items():
        fields = ct.fields(loc.class_name)
        if set(state) != {f for f, _ in fields}:
            return False
        for f, t in fields:
            if not value_in_type(ct, state[f], t):
                return False
    return True


def locations_in(values) -> List[Location]:
    return [v for v in values if isinstance(v, Location)]


def reachable(h: Heap, roots) -> set:
    seen = set()
    stack = [v for v in roots if isinstance(v, Location)]
    while stack:
        loc = stack.pop()
        if loc in seen or loc not in h:
            continue
        seen.add(loc)
        for v in h[loc].values():
            if isinstance(v, Location):
                stack.append(v)
    return seen


def collect(h: Heap, eta: Store) -> Tuple[Heap, Store]:
    """Restrict the heap to the cells reachable from the store."""
    live = reachable(h, eta.values())
    return {loc: h[loc] for loc in sorted(live)}, eta


class InterpHooks:
    """Observation points; the monitor and the test invariants plug in here."""

    def after_command(self, gamma, cmd, pre_state, outcome):
        pass

    def before_call(self, caller_gamma, callee_class, callee_store, heap, site, mscoped):
        pass

    def after_call(self, caller_gamma, callee_class, callee_store, pre_heap, outcome, site, mscoped):
        pass


class HookChain(InterpHooks):
    def __init__(self, *hooks):
        self.hooks = [h for h in hooks if h is not None]

    def after_command(self, *a):
        for h in self.hooks:
            h.after_command(*a)

    def before_call(self, *a):
        for h in self.hooks:
            h.before_call(*a)

    def after_call(self, *a):
        for h in self.hooks:
            h.after_call(*a)


class TraceHooks(InterpHooks):
    """One line per executed command: node kind, source span, state digest."""

    def __init__(self):
        self.lines: List[str] = []

    def after_command(self, gamma, cmd, pre_state, outcome):
        span = getattr(cmd, "span", None)
        if isinstance(outcome, Bottom):
            digest = f"bottom:{outcome.reason}"
        else:
            digest = state_digest(*outcome)
        self.lines.append(f"{type(cmd).__name__}@{span or '?'} {digest}")


@dataclass
class RunResult:
    outcome: object  # Bottom | (heap, store)
    fuel_used: int
    value: object = None
    steps: int = 0

    @property
    def ok(self) -> bool:
        return not isinstance(self.outcome, Bottom)


class Runtime:
    def __init__(self, ct: ClassTable, loop_cap: int = 100000, hooks: Optional[InterpHooks] = None):
        self.ct = ct
        self.loop_cap = loop_cap
        self.hooks = hooks
        self._stack: List[str] = []
        self.steps = 0

    def _bottom(self, reason, detail=""):
        return Bottom(reason, detail, tuple(self._stack))

    # -- expressions

    def eval_expr(self, h: Heap, eta: Store, e):
        ct = self.ct
        if isinstance(e, A.Var):
            return eta[e.name]
        if isinstance(e, A.NullLit):
            return None
        if isinstance(e, A.BoolLit):
            return e.value
        if isinstance(e, A.IntLit):
            return e.value
        if isinstance(e, A.UnitLit):
            return IT
        if isinstance(e, A.Eq):
            d1 = self.eval_expr(h, eta, e.left)
            if isinstance(d1, Bottom):
                return d1
            d2 = self.eval_expr(h, eta, e.right)
            if isinstance(d2, Bottom):
                return d2
            return values_equal(d1, d2)
        if isinstance(e, A.IntOp):
            d1 = self.eval_expr(h, eta, e.left)
            if isinstance(d1, Bottom):
                return d1
            d2 = self.eval_expr(h, eta, e.right)
            if isinstance(d2, Bottom):
                return d2
            if e.op == "+":
                return d1 + d2
            if e.op == "-":
                return d1 - d2
            if e.op == "mod":
                return d1 % d2 if d2 != 0 else 0
            return d1 < d2
        if isinstance(e, A.FieldAccess):
            l = self.eval_expr(h, eta, e.target)
            if isinstance(l, Bottom):
                return l
            if l is None:
                return self._bottom(NIL_DEREF, f"field {e.fieldname} of null")
            assert l in h, "expression produced a dangling location"
            return h[l][e.fieldname]
        if isinstance(e, A.Cast):
            l = self.eval_expr(h, eta, e.target)
            if isinstance(l, Bottom):
                return l
            if l is None or ct.subtype_names(l.class_name, e.class_name):
                return l
            return self._bottom(CAST_FAILURE, f"{l.class_name} is not a {e.class_name}")
        if isinstance(e, A.InstanceTest):
            l = self.eval_expr(h, eta, e.target)
            if isinstance(l, Bottom):
                return l
            return l is not None and ct.subtype_names(l.class_name, e.class_name)
        raise TypeError(f"not a core expression: {e!r}")

    # -- construction

    def new_object(self, class_name: str, h: Heap):
        loc = fresh(class_name, h)
        state = {f: default_value(t) for f, t in self.ct.fields(class_name)}
        h1 = dict(h)
        h1[loc] = state
        h0 = self.exec_constructor(class_name, h1, loc)
        if isinstance(h0, Bottom):
            return h0
        return h0, loc

    def exec_constructor(self, class_name: str, h: Heap, loc: Location):
        """Run the constructor chain of `class_name` on `loc`, root first."""
        sup = self.ct.super_of(class_name)
        if sup is not None and sup != OBJECT:
            h = self.exec_constructor(sup, h, loc)
            if isinstance(h, Bottom):
                return h
        decl = self.ct.decls[class_name]
        gamma = {"self": ClassType(class_name)}
        self._stack.append(f"{class_name}.con")
        try:
            res = self.exec_command(gamma, decl.constructor, h, {"self": loc}, 0)
        finally:
            self._stack.pop()
        if isinstance(res, Bottom):
            return res
        return res[0]

    # -- method invocation (fuel j: body runs with fuel j-1)

    def invoke(self, loc: Location, mname: str, args, h: Heap, fuel: int, start_class: Optional[str] = None):
        if fuel <= 0:
            return self._bottom(FUEL_EXHAUSTED, f"call to {mname}")
        start = start_class or loc.class_name
        resolved = self.ct.resolve_method(mname, start)
        assert resolved is not None, f"unresolvable method {mname} on {start}"
        decl_class, m = resolved
        eta = {x: v for (x, _), v in zip(m.params, args)}
        eta["self"] = loc
        eta["result"] = default_value(m.return_type)
        gamma = {x: t for x, t in m.params}
        gamma["self"] = ClassType(decl_class)
        gamma["result"] = m.return_type
        self._stack.append(f"{decl_class}.{mname}")
        try:
            res = self.exec_command(gamma, m.body, h, eta, fuel - 1)
        finally:
            self._stack.pop()
        if isinstance(res, Bottom):
            return res
        h0, eta0 = res
        return h0, eta0["result"]

    def _call(self, gamma, cmd, h, eta, fuel, loc, start_class, mscoped):
        args = []
        for a in cmd.args:
            d = self.eval_expr(h, eta, a)
            if isinstance(d, Bottom):
                return d
            args.append(d)
        if fuel <= 0:
            return self._bottom(FUEL_EXHAUSTED, f"call to {cmd.method}")
        callee_class = start_class or loc.class_name
        if self.hooks:
            resolved = self.ct.resolve_method(cmd.method, callee_class)
            pars = [x for x, _ in resolved[1].params] if resolved else []
            callee_store = dict(zip(pars, args))
            callee_store["self"] = loc
            self.hooks.before_call(gamma, callee_class, callee_store, h, cmd, mscoped)
        res = self.invoke(loc, cmd.method, args, h, fuel, start_class)
        if self.hooks:
            self.hooks.after_call(gamma, callee_class, callee_store, h, res, cmd, mscoped)
        return res

    # -- commands

    def exec_command(self, gamma, cmd, h: Heap, eta: Store, fuel: int):
        self.steps += 1
        pre = (h, eta)
        res = self._exec(gamma, cmd, h, eta, fuel)
        if self.hooks:
            self.hooks.after_command(gamma, cmd, pre, res)
        return res

    def _exec(self, gamma, cmd, h, eta, fuel):
        ct = self.ct
        if isinstance(cmd, A.Skip):
            return h, eta
        if isinstance(cmd, A.Abort):
            return self._bottom(ABORT)
        if isinstance(cmd, A.Assign):
            d = self.eval_expr(h, eta, cmd.expr)
            if isinstance(d, Bottom):
                return d
            eta2 = dict(eta)
            eta2[cmd.name] = d
            return h, eta2
        if isinstance(cmd, A.FieldAssign):
            l = self.eval_expr(h, eta, cmd.target)
            if isinstance(l, Bottom):
                return l
            if l is None:
                return self._bottom(NIL_DEREF, f"update of field {cmd.fieldname} of null")
            d = self.eval_expr(h, eta, cmd.expr)
            if isinstance(d, Bottom):
                return d
            h2 = dict(h)
            state = dict(h2[l])
            state[cmd.fieldname] = d
            h2[l] = state
            return h2, eta
        if isinstance(cmd, A.NewAssign):
            res = self.new_object(cmd.class_name, h)
            if isinstance(res, Bottom):
                return res
            h0, loc = res
            eta2 = dict(eta)
            eta2[cmd.name] = loc
            return h0, eta2
        if isinstance(cmd, A.CallAssign):
            l = self.eval_expr(h, eta, cmd.receiver)
            if isinstance(l, Bottom):
                return l
            if l is None:
                return self._bottom(NIL_DEREF, f"call of {cmd.method} on null")
            mscoped = ct.mscope(cmd.method, l.class_name)
            res = self._call(gamma, cmd, h, eta, fuel, l, None, mscoped)
            if isinstance(res, Bottom):
                return res
            h1, d1 = res
            eta2 = dict(eta)
            eta2[cmd.name] = d1
            return h1, eta2
        if isinstance(cmd, A.SuperCallAssign):
            l = eta["self"]
            sup = ct.super_of(gamma["self"].name)
            mscoped = ct.mscope(cmd.method, sup)
            res = self._call(gamma, cmd, h, eta, fuel, l, sup, mscoped)
            if isinstance(res, Bottom):
                return res
            h1, d1 = res
            eta2 = dict(eta)
            eta2[cmd.name] = d1
            return h1, eta2
        if isinstance(cmd, A.LocalBlock):
            d = self.eval_expr(h, eta, cmd.init)
            if isinstance(d, Bottom):
                return d
            eta1 = dict(eta)
            eta1[cmd.name] = d
            gamma1 = dict(gamma)
            gamma1[cmd.name] = cmd.var_type
            res = self.exec_command(gamma1, cmd.body, h, eta1, fuel)
            if isinstance(res, Bottom):
                return res
            h1, eta2 = res
            out = dict(eta2)
            if cmd.name in eta:
                out[cmd.name] = eta[cmd.name]  # restore the shadowed variable
            else:
                del out[cmd.name]
            return h1, out
        if isinstance(cmd, A.If):
            b = self.eval_expr(h, eta, cmd.cond)
            if isinstance(b, Bottom):
                return b
            branch = cmd.then_cmd if b else cmd.else_cmd
            return self.exec_command(gamma, branch, h, eta, fuel)
        if isinstance(cmd, A.While):
            iterations = 0
            while True:
                b = self.eval_expr(h, eta, cmd.cond)
                if isinstance(b, Bottom):
                    return b
                if not b:
                    return h, eta
                iterations += 1
                if iterations > self.loop_cap:
                    return self._bottom(FUEL_EXHAUSTED, "loop iteration cap exceeded")
                res = self.exec_command(gamma, cmd.body, h, eta, fuel)
                if isinstance(res, Bottom):
                    return res
                h, eta = res
        if isinstance(cmd, A.Seq):
            for it in cmd.items:
                res = self.exec_command(gamma, it, h, eta, fuel)
                if isinstance(res, Bottom):
                    return res
                h, eta = res
            return h, eta
        raise TypeError(f"not a core command: {cmd!r}")


def fuel_schedule(max_fuel: int):
    f = 1
    while f < max_fuel:
        yield f
        f *= 2
    yield max_fuel


def run(
    ct: ClassTable,
    entry_class: str,
    entry_method: str,
    max_fuel: int = 1024,
    loop_cap: int = 100000,
    hooks: Optional[InterpHooks] = None,
    fixed_fuel: Optional[int] = None,
) -> RunResult:
    """Construct one entry object and execute the entry method body as the
    program command, deepening the fuel until the outcome is determined."""
    if entry_class not in ct.decls:
        raise EntryClassError(f"unknown entry class {entry_class}")
    if ct.designations is not None and not ct.is_client_class(entry_class):
        raise EntryClassError(f"entry class {entry_class} must be a client class")
    resolved = ct.resolve_method(entry_method, entry_class)
    if resolved is None:
        raise EntryClassError(f"{entry_class} has no method {entry_method}")
    decl_class, m = resolved
    if m.params:
        raise EntryClassError(f"entry method {entry_method} must take no parameters")

    schedule = [fixed_fuel] if fixed_fuel is not None else list(fuel_schedule(max_fuel))
    last = None
    for fuel in schedule:
        rt = Runtime(ct, loop_cap=loop_cap, hooks=hooks)
        res = rt.new_object(entry_class, {})
        if isinstance(res, Bottom):
            return RunResult(res, fuel, steps=rt.steps)
        h, loc = res
        gamma = {"self": ClassType(decl_class), "result": m.return_type}
        eta = {"self": loc, "result": default_value(m.return_type)}
        out = rt.exec_command(gamma, m.body, h, eta, fuel)
        last = RunResult(out, fuel, steps=rt.steps)
        if not (isinstance(out, Bottom) and out.is_fuel()):
            return last
    return last


def format_state(ct: ClassTable, h: Heap, eta: Store) -> str:
    """Deterministic listing of a (collected) state: store first, then objects
    in breadth-first order from the store (referents after referrers), any
    unreachable leftovers last."""
    lines = []
    for name in sorted(eta):
        lines.append(f"{name} = {_fmt_value(eta[name])}")
    order, seen = [], set()
    queue = [v for x in sorted(eta) for v in [eta[x]] if isinstance(v, Location)]
    while queue:
        loc = queue.pop(0)
        if loc in seen or loc not in h:
            continue
        seen.add(loc)
        order.append(loc)
        queue.extend(v for v in h[loc].values() if isinstance(v, Location))
    order.extend(loc for loc in sorted(h) if loc not in seen)
    for loc in order:
        fields = ", ".join(f"{f} = {_fmt_value(v)}" for f, v in h[loc].items())
        lines.append(f"{loc}: {{{fields}}}")
    return "\n".join(lines)


def _fmt_value(v) -> str:
    if v is None:
        return "null"
    if v is IT:
        return "it"
    if type(v) is bool:
        return "true" if v else "false"
    return repr(v)


def state_digest(h: Heap, eta: Store) -> str:
    import hashlib

    blob = repr(sorted((str(k), sorted((f, str(v)) for f, v in s.items())) for k, s in h.items()))
    blob += repr(sorted((k, str(v)) for k, v in eta.items()))
    return hashlib.sha1(blob.encode()).hexdigest()[:12]
