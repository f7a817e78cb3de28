"""Couplings between two owner versions and a bounded simulation harness.

A basic coupling is a host-level predicate on corresponding islands of the
two versions, indexed by a type-preserving location bijection. The induced
coupling lifts it to whole states: islands matched through the bijection on
owners, a total bijection between the client blocks, and field-wise value
equivalence for client objects. The harness replays identical call scripts
against both tables, rebuilding the bijection after every step by a rooted
traversal over non-rep structure (rep correspondence is the coupling's own
business), and reports which steps preserve the relation at which fuels.

The evidence is bounded: scripts are finite and fuels are finite, so a clean
report is not a proof, and the report says so.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .classtable import ClassTable
from .confine import ConfinementViolation, Partition, confine_heap, role_of
from .equivalence import Distinguished, canonical_bijection, own_free, value_equiv
from .interp import (
    IT, Bottom, Heap, Location, Runtime, Store, collect, default_value, fresh, value_kind,
)


@dataclass(frozen=True)
class ShapeError:
    clause: int
    message: str


@dataclass(frozen=True)
class CouplingFailure:
    where: str
    message: str


@dataclass(frozen=True)
class BasicCoupling:
    """Island predicate plus metadata. The predicate receives the two class
    tables, the bijection, and the two islands as location->state maps; it
    returns (ok, pairs) where pairs are client-location correspondences the
    island structure itself induces (for clients reachable only from reps)."""

    name: str
    target_pair: str
    predicate: Callable[..., Tuple[object, List[Tuple[Location, Location]]]]


def sigma_extend(sigma: Dict[Location, Location], a: Location, b: Location):
    """Extend a typed bijection; None on type mismatch or conflict. Always
    returns a fresh dict, never an alias of the argument."""
    if a.class_name != b.class_name:
        return None
    if a in sigma and sigma[a] != b:
        return None
    if a not in sigma and b in sigma.values():
        return None
    out = dict(sigma)
    out[a] = b
    return out


def _island_owner(ct: ClassTable, island: Dict[Location, dict]) -> Optional[Location]:
    owners = [l for l in island if ct.is_owner_class(l.class_name)]
    return owners[0] if len(owners) == 1 else None


def check_island_shape(ct_a: ClassTable, ct_b: ClassTable, sigma, island_a, island_b):
    """Shape conditions every basic coupling must respect: one owner per side
    at bijection-related locations, reps drawn from the designated rep class
    of each side, and non-private owner fields pairwise related."""
    own = ct_a.designations.own
    owners_a = [l for l in island_a if ct_a.is_owner_class(l.class_name)]
    owners_b = [l for l in island_b if ct_b.is_owner_class(l.class_name)]
    if len(owners_a) != 1 or len(owners_b) != 1:
        return ShapeError(1, f"islands must have exactly one owner each, got {len(owners_a)} and {len(owners_b)}")
    oa, ob = owners_a[0], owners_b[0]
    if sigma.get(oa) != ob:
        return ShapeError(1, f"owners {oa} and {ob} are not related by the bijection")
    if oa.class_name != ob.class_name:
        return ShapeError(1, f"owners have different classes: {oa.class_name} vs {ob.class_name}")
    rep_a = ct_a.designations.rep
    rep_b = ct_b.designations.rep2 or ct_b.designations.rep
    for l in island_a:
        if l != oa and not ct_a.subtype_names(l.class_name, rep_a):
            return ShapeError(2, f"{l} is not a {rep_a} rep")
    for l in island_b:
        if l != ob and not ct_b.subtype_names(l.class_name, rep_b):
            return ShapeError(2, f"{l} is not a {rep_b} rep")
    private = {f for f, _ in ct_a.dfields(own)} | {f for f, _ in ct_b.dfields(own)}
    fields_a = {f for f, _ in ct_a.fields(oa.class_name)}
    fields_b = {f for f, _ in ct_b.fields(ob.class_name)}
    for f in sorted((fields_a | fields_b) - private):
        if f not in fields_a or f not in fields_b:
            return ShapeError(3, f"non-private owner field {f} exists on one side only")
        if not value_equiv(sigma, island_a[oa][f], island_b[ob][f]):
            return ShapeError(3, f"non-private owner field {f} differs between the versions")
    return None


def induced_heap_coupling(ct_a: ClassTable, ct_b: ClassTable, sigma, h_a: Heap, h_b: Heap, bc: BasicCoupling):
    """Lift `bc` to whole heaps. Returns the possibly extended bijection, or
    a CouplingFailure. Flexible (unforced) reps belong to no island payload;
    any placement satisfies the confinement clauses, and the island predicate
    only inspects structure reachable from the owner."""
    part_a = confine_heap(ct_a, h_a)
    if isinstance(part_a, ConfinementViolation):
        return CouplingFailure("heap A", part_a.render())
    part_b = confine_heap(ct_b, h_b)
    if isinstance(part_b, ConfinementViolation):
        return CouplingFailure("heap B", part_b.render())
    for a in sigma:
        if a not in h_a or sigma[a] not in h_b:
            return CouplingFailure("bijection", f"{a} -> {sigma[a]} leaves the heap domains")
    if len(part_a.islands) != len(part_b.islands):
        return CouplingFailure("islands", f"{len(part_a.islands)} vs {len(part_b.islands)} islands")
    owners_b = {o for o, _ in part_b.islands}
    sigma = dict(sigma)
    for i, (oa, reps_a) in enumerate(part_a.islands):
        ob = sigma.get(oa)
        if ob is None or ob not in owners_b:
            return CouplingFailure(f"island {i}", f"owner {oa} has no bijection partner among the other side's owners")
        reps_b = next(r for o, r in part_b.islands if o == ob)
        island_a = {l: h_a[l] for l in [oa, *sorted(reps_a)]}
        island_b = {l: h_b[l] for l in [ob, *sorted(reps_b)]}
        shape = check_island_shape(ct_a, ct_b, sigma, island_a, island_b)
        if shape is not None:
            return CouplingFailure(f"island {i}", f"clause {shape.clause}: {shape.message}")
        try:
            ok, pairs = bc.predicate(ct_a, ct_b, sigma, island_a, island_b)
        except (KeyError, AttributeError, TypeError) as exc:
            ok, pairs = f"island shape does not fit coupling {bc.name}: {exc!r}", []
        if ok is not True:
            return CouplingFailure(f"island {i}", str(ok))
        for a, b in pairs:
            ext = sigma_extend(sigma, a, b)
            if ext is None:
                return CouplingFailure(f"island {i}", f"island structure pairs {a} with {b}, conflicting with the bijection")
            sigma = ext
    mapped = {sigma.get(c) for c in part_a.clients}
    if len(part_a.clients) != len(part_b.clients) or mapped != set(part_b.clients):
        return CouplingFailure("clients", "the bijection does not match the client blocks")
    for c in sorted(part_a.clients):
        for f, _ in ct_a.fields(c.class_name):
            va, vb = h_a[c][f], h_b[sigma[c]][f]
            if value_kind(va) == "loc" and role_of(ct_a, va) == "rep":
                continue  # confined heaps cannot reach here; defensive
            if not value_equiv(sigma, va, vb):
                return CouplingFailure(f"client {c}", f"field {f} differs")
    return sigma


# ---------------------------------------------------------------------------
# Rooted bijection over non-rep structure


def root_sigma(ct_a: ClassTable, ct_b: ClassTable, roots_a: Store, roots_b: Store, h_a: Heap, h_b: Heap):
    """Pair locations reachable from identically-named roots, stopping at rep
    objects: rep internals are the island predicate's concern. Root values of
    rep type are paired directly (a typed bijection may include reps)."""
    own = ct_a.designations.own
    private = {f for f, _ in ct_a.dfields(own)} | {f for f, _ in ct_b.dfields(own)}
    sigma: Dict[Location, Location] = {}
    queue: List[Tuple[Location, Location]] = []

    def pair(a, b, path):
        ka, kb = value_kind(a), value_kind(b)
        if ka != kb:
            return CouplingFailure(path, f"{ka} vs {kb}")
        if ka in ("nil", "bool", "int", "unit"):
            if a != b or type(a) is not type(b):
                return CouplingFailure(path, f"{a!r} vs {b!r}")
            return None
        if a.class_name != b.class_name:
            return CouplingFailure(path, f"{a.class_name} vs {b.class_name}")
        if role_of(ct_a, a) == "rep":
            if a in sigma:
                if sigma[a] != b:
                    return CouplingFailure(path, f"rep pair {a}/{b} conflicts with the bijection")
            elif b in sigma.values():
                return CouplingFailure(path, f"{b} already paired")
            else:
                sigma[a] = b
            return None  # no traversal into rep structure
        if a in sigma:
            if sigma[a] != b:
                return CouplingFailure(path, f"{a} already paired with {sigma[a]}")
            return None
        if b in sigma.values():
            return CouplingFailure(path, f"{b} already paired")
        sigma[a] = b
        queue.append((a, b))
        return None

    if set(roots_a) != set(roots_b):
        return CouplingFailure("<roots>", "root sets differ")
    for x in sorted(roots_a):
        bad = pair(roots_a[x], roots_b[x], x)
        if bad:
            return bad
    while queue:
        a, b = queue.pop(0)
        is_owner = ct_a.is_owner_class(a.class_name)
        for f, _ in ct_a.fields(a.class_name):
            if is_owner and f in private:
                continue  # private owner state is related by the coupling, not here
            if f not in h_b[b]:
                return CouplingFailure(str(a), f"field {f} missing on partner")
            bad = pair(h_a[a][f], h_b[b][f], f"{a}.{f}")
            if bad:
                return bad
    return sigma


# ---------------------------------------------------------------------------
# Scripts


@dataclass(frozen=True)
class Step:
    op: str  # 'new' | 'call'
    target: str  # variable name (receiver for calls, binder for new)
    method: str = ""
    args: Tuple = ()  # ('root', name) | ('lit', value)
    bind: Optional[str] = None
    prot: bool = False

    def to_json(self):
        return {
            "op": self.op, "target": self.target, "method": self.method,
            "args": [list(a) for a in self.args], "bind": self.bind, "prot": self.prot,
        }


def _arg_candidates(ct: ClassTable, ptype, pool: Dict[str, str]):
    from . import ast as A

    if ptype == A.BOOL:
        return [("lit", True), ("lit", False)]
    if ptype == A.INT:
        return [("lit", 0), ("lit", 1)]
    if ptype == A.UNIT:
        return [("lit", IT)]
    cands = [("root", name) for name, cls in sorted(pool.items()) if ct.subtype_names(cls, ptype.name)]
    return cands or [("lit", None)]


def _concrete_client_arg_class(ct: ClassTable, pname: str) -> str:
    """Most-derived client subclass of `pname`, preferring proper subclasses
    (abstract-style base classes often have aborting stub methods)."""
    best, best_depth = pname, 0
    for cname in sorted(ct.decls):
        if ct.subtype_names(cname, pname) and ct.is_client_class(cname):
            depth = sum(1 for _ in ct.ancestors(cname))
            if depth > best_depth:
                best, best_depth = cname, depth
    return best


def generate_scripts(ct: ClassTable, owner_class: str, max_len: int = 4, max_scripts: int = 120):
    """Deterministic script enumeration: construct one owner plus client-class
    argument objects, then all call sequences of public owner methods up to
    `max_len`, each optionally capped by one direct module-method probe.
    Results of public calls become roots and may be called on in later steps."""
    des = ct.designations
    own = des.own
    prelude: List[Step] = [Step("new", "o", owner_class)]
    pool: Dict[str, str] = {"o": owner_class}
    public = [m for m in ct.method_names(owner_class) if not ct.mscope(m, owner_class)]
    client_params: List[str] = []
    for m in public:
        for t in ct.mtype(m, owner_class)[0]:
            if hasattr(t, "name") and t.name in ct.decls and ct.is_client_class(t.name):
                cc = _concrete_client_arg_class(ct, t.name)
                if cc not in client_params:
                    client_params.append(cc)
    instances = client_params[:1] * 2 + client_params[1:2]
    for i, cc in enumerate(instances):
        var = f"c{i}"
        prelude.append(Step("new", var, cc))
        pool[var] = cc

    prots = sorted(m for m, _ in ct.prot_methods())

    def steps_from(pool: Dict[str, str], bind_counter: int):
        out = []
        for var in sorted(pool):
            cls = pool[var]
            for m in ct.method_names(cls):
                if ct.mscope(m, cls):
                    continue
                ptypes, ret = ct.mtype(m, cls)
                combos = [()] if not ptypes else itertools.product(*[_arg_candidates(ct, t, pool) for t in ptypes])
                for combo in combos:
                    bind = None
                    from . import ast as A

                    if ret != A.UNIT:
                        bind = f"w{bind_counter}"
                    out.append(Step("call", var, m, tuple(combo), bind))
        return out

    scripts: List[Tuple[Step, ...]] = []
    frontier: List[Tuple[Tuple[Step, ...], Dict[str, str]]] = [(tuple(prelude), dict(pool))]
    for _ in range(max_len):
        new_frontier = []
        for script, p in frontier:
            binds = sum(1 for s in script if s.bind)
            for st in steps_from(p, binds):
                s2 = script + (st,)
                p2 = dict(p)
                if st.bind:
                    ret = ct.mtype(st.method, p[st.target])[1]
                    if hasattr(ret, "name") and ret.name in ct.decls:
                        p2[st.bind] = ret.name
                scripts.append(s2)
                new_frontier.append((s2, p2))
                if len(scripts) >= max_scripts:
                    break
            if len(scripts) >= max_scripts:
                break
        frontier = new_frontier
        if len(scripts) >= max_scripts:
            break
    # direct probes of subclass-visible module methods, as final steps
    probed = []
    for m in prots:
        ptypes, ret = ct.mtype(m, owner_class)
        combos = [()] if not ptypes else [tuple(c[0] for c in [_arg_candidates(ct, t, pool) for t in ptypes])]
        for combo in combos:
            from . import ast as A

            bind = "wp" if ret != A.UNIT else None
            probe = Step("call", "o", m, tuple(combo), bind, prot=True)
            probed.append(tuple(prelude) + (probe,))
            for script in scripts[: max(1, max_scripts // 10)]:
                probed.append(script + (probe,))
    return scripts + probed


def _exec_step(rt: Runtime, heap: Heap, roots: Store, st: Step, cls_of: Dict[str, str], fuel: int):
    if st.op == "new":
        res = rt.new_object(cls_of[st.target], heap)
        if isinstance(res, Bottom):
            return res, heap
        h, loc = res
        roots[st.target] = loc
        return None, h
    recv = roots.get(st.target)
    if not isinstance(recv, Location):
        return Bottom("nil-dereference", f"script target {st.target} is not an object"), heap
    args = [roots.get(a[1]) if a[0] == "root" else a[1] for a in st.args]
    # script fuel selects the approximant the method BODIES run under, so a
    # step at fuel i tests the meaning built over the i-th method environment
    res = rt.invoke(recv, st.method, args, heap, fuel + 1)
    if isinstance(res, Bottom):
        return res, heap
    h, d = res
    if st.bind:
        roots[st.bind] = d
    return None, h


@dataclass
class VectorResult:
    script: Tuple[Step, ...]
    fuel: int
    status: str  # 'pass' | 'fail'
    failed_at: int = -1
    message: str = ""
    methods: Tuple[str, ...] = ()

    def replay(self) -> dict:
        return {"fuel": self.fuel, "script": [s.to_json() for s in self.script]}


@dataclass
class CouplingReport:
    coupling: str
    establishment: List[Tuple[str, bool, str]]
    vectors: List[VectorResult]
    note: str = "bounded evidence: finite scripts and fuels, not a proof"

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.establishment) and all(v.status == "pass" for v in self.vectors)

    def method_coverage(self) -> Dict[str, Tuple[int, int]]:
        cov: Dict[str, List[int]] = {}
        for v in self.vectors:
            for m in v.methods:
                cov.setdefault(m, [0, 0])
                cov[m][1 if v.status == "fail" else 0] += 1
        return {m: (p, f) for m, (p, f) in sorted(cov.items())}

    def failures(self) -> List[VectorResult]:
        return [v for v in self.vectors if v.status == "fail"]


def _script_classes(ct: ClassTable, script) -> Dict[str, str]:
    cls_of: Dict[str, str] = {}
    for st in script:
        if st.op == "new":
            cls_of[st.target] = st.method  # class name kept in `method`
    return cls_of


def run_vector(ct_a: ClassTable, ct_b: ClassTable, bc: BasicCoupling, script, fuel: int) -> VectorResult:
    rt_a, rt_b = Runtime(ct_a), Runtime(ct_b)
    h_a: Heap = {}
    h_b: Heap = {}
    roots_a: Store = {}
    roots_b: Store = {}
    cls_of = {st.target: st.method for st in script if st.op == "new"}
    methods = _own_methods_of(ct_a, script)
    for i, st in enumerate(script):
        bot_a, h_a = _exec_step(rt_a, h_a, roots_a, st, cls_of, fuel)
        bot_b, h_b = _exec_step(rt_b, h_b, roots_b, st, cls_of, fuel)
        if bot_a is not None and bot_b is not None:
            return VectorResult(script, fuel, "pass", i, "both sides bottom", methods)
        if (bot_a is None) != (bot_b is None):
            side = "A" if bot_a is not None else "B"
            reason = (bot_a or bot_b).reason
            return VectorResult(
                script, fuel, "fail", i,
                f"outcomes unrelated: side {side} bottoms ({reason}), the other side terminates",
                methods,
            )
        sigma = root_sigma(ct_a, ct_b, roots_a, roots_b, h_a, h_b)
        if isinstance(sigma, CouplingFailure):
            return VectorResult(script, fuel, "fail", i, f"{sigma.where}: {sigma.message}", methods)
        out = induced_heap_coupling(ct_a, ct_b, sigma, h_a, h_b, bc)
        if isinstance(out, CouplingFailure):
            return VectorResult(script, fuel, "fail", i, f"{out.where}: {out.message}", methods)
    return VectorResult(script, fuel, "pass", len(script) - 1, "", methods)


def _own_methods_of(ct: ClassTable, script) -> Tuple[str, ...]:
    cls_of: Dict[str, str] = {}
    out = []
    for st in script:
        if st.op == "new":
            cls_of[st.target] = st.method
        elif st.op == "call":
            tcls = cls_of.get(st.target)
            if tcls and ct.subtype_names(tcls, ct.designations.own):
                out.append(st.method)
            if st.bind:
                mt = ct.mtype(st.method, tcls) if tcls else None
                if mt and hasattr(mt[1], "name"):
                    cls_of[st.bind] = mt[1].name
    return tuple(out)


def check_establishment(ct_a: ClassTable, ct_b: ClassTable, bc: BasicCoupling, owner_class: str):
    """Constructors of the owner class establish the coupling from empty,
    trivially related seed heaps at bijection-related fresh locations."""
    la, lb = fresh(owner_class, {}), fresh(owner_class, {})
    sigma = {la: lb}
    h_a = {la: {f: default_value(t) for f, t in ct_a.fields(owner_class)}}
    h_b = {lb: {f: default_value(t) for f, t in ct_b.fields(owner_class)}}
    ra = Runtime(ct_a).exec_constructor(owner_class, h_a, la)
    rb = Runtime(ct_b).exec_constructor(owner_class, h_b, lb)
    if isinstance(ra, Bottom) or isinstance(rb, Bottom):
        return False, "constructor bottomed"
    out = induced_heap_coupling(ct_a, ct_b, sigma, ra, rb, bc)
    if isinstance(out, CouplingFailure):
        return False, f"{out.where}: {out.message}"
    return True, ""


def test_simulation(
    ct_a: ClassTable,
    ct_b: ClassTable,
    bc: BasicCoupling,
    fuels: Sequence[int] = (1, 2, 4, 8),
    max_len: int = 4,
    max_scripts: int = 120,
    owner_classes: Optional[List[str]] = None,
) -> CouplingReport:
    own = ct_a.designations.own
    if owner_classes is None:
        subs = [c for c in sorted(ct_a.decls) if c != own and ct_a.subtype_names(c, own)]
        owner_classes = [own] + subs[:1]
    establishment = []
    for oc in owner_classes:
        try:
            ok, msg = check_establishment(ct_a, ct_b, bc, oc)
        except Exception as exc:  # never throw; report instead
            ok, msg = False, f"internal error: {exc}"
        establishment.append((oc, ok, msg))
    vectors: List[VectorResult] = []
    for oc in owner_classes:
        scripts = generate_scripts(ct_a, oc, max_len=max_len, max_scripts=max_scripts)
        for script in scripts:
            for fuel in fuels:
                try:
                    vectors.append(run_vector(ct_a, ct_b, bc, script, fuel))
                except Exception as exc:
                    vectors.append(VectorResult(script, fuel, "fail", -1, f"internal error: {exc}"))
    return CouplingReport(bc.name, establishment, vectors)


def identity_extension_check(ct_a: ClassTable, ct_b: ClassTable, sigma, state_a, state_b):
    """Related states whose collected forms are owner-free must be equal up to
    the bijection; checked by the canonical traversal seeded with sigma."""
    ha, ea = collect(*state_a)
    hb, eb = collect(*state_b)
    if not own_free(ct_a, ha, ea) or not own_free(ct_b, hb, eb):
        return "precondition", "an owner is reachable in a collected state"
    seed = {a: b for a, b in sigma.items() if a in ha and b in hb}
    out = canonical_bijection(ct_a, (ha, ea), (hb, eb), seed=seed)
    if isinstance(out, Distinguished):
        return "fail", f"{out.path}: {out.message}"
    return "ok", out


# ---------------------------------------------------------------------------
# Builtin couplings


def _chain(island, start, nxt_field):
    nodes, seen, cur = [], set(), start
    while cur is not None:
        if cur in seen or cur not in island:
            return None
        seen.add(cur)
        nodes.append(cur)
        cur = island[cur][nxt_field]
    return nodes


def _obs_pairs(sigma, obs_a, obs_b):
    """Pointwise relate two observer sequences; contribute missing pairs."""
    if len(obs_a) != len(obs_b):
        return f"lists have different lengths ({len(obs_a)} vs {len(obs_b)})", []
    pairs = []
    for a, b in zip(obs_a, obs_b):
        ka, kb = value_kind(a), value_kind(b)
        if ka != kb:
            return "list entries of different kinds", []
        if ka == "nil":
            continue
        if a in sigma:
            if sigma[a] != b:
                return f"list entry {a} is paired with {sigma[a]}, not {b}", []
        else:
            pairs.append((a, b))
    return True, pairs


def obool_negation(ct_a, ct_b, sigma, island_a, island_b):
    oa = _island_owner(ct_a, island_a)
    ob = _island_owner(ct_b, island_b)
    ga, gb = island_a[oa]["g"], island_b[ob]["g"]
    if ga is None and gb is None:
        return True, []
    if ga is None or gb is None:
        return "one version has an uninitialized cell", []
    if island_a[ga]["f"] != (not island_b[gb]["f"]):
        return "stored flags are not complementary", []
    return True, []


def meyer_sieber_even(ct_a, ct_b, sigma, island_a, island_b):
    oa = _island_owner(ct_a, island_a)
    ob = _island_owner(ct_b, island_b)
    ga, gb = island_a[oa]["g"], island_b[ob]["g"]
    if ga != gb:
        return "counters differ", []
    if ga % 2 != 0:
        return "counter is odd", []
    return True, []


def observer_sentinel_list(ct_a, ct_b, sigma, island_a, island_b):
    """List without sentinel vs list behind a sentinel node: the observer
    sequences must match pointwise through the bijection."""
    oa = _island_owner(ct_a, island_a)
    ob = _island_owner(ct_b, island_b)
    nodes_a = _chain(island_a, island_a[oa]["fst"], "nxt")
    if nodes_a is None:
        return "malformed list in version A", []
    snt = island_b[ob]["snt"]
    if snt is None or snt not in island_b:
        return "sentinel missing in version B", []
    nodes_b = _chain(island_b, island_b[snt]["nxt"], "nxt")
    if nodes_b is None:
        return "malformed list in version B", []
    obs_a = [island_a[n]["ob"] for n in nodes_a]
    obs_b = [island_b[n]["ob"] for n in nodes_b]
    return _obs_pairs(sigma, obs_a, obs_b)


def observer_node_list(ct_a, ct_b, sigma, island_a, island_b):
    """Plain list vs plain list with a different rep class: same observers."""
    oa = _island_owner(ct_a, island_a)
    ob = _island_owner(ct_b, island_b)
    nodes_a = _chain(island_a, island_a[oa]["fst"], "nxt")
    nodes_b = _chain(island_b, island_b[ob]["fst"], "nxt")
    if nodes_a is None or nodes_b is None:
        return "malformed list", []
    obs_a = [island_a[n]["ob"] for n in nodes_a]
    obs_b = [island_b[n]["ob"] for n in nodes_b]
    return _obs_pairs(sigma, obs_a, obs_b)


BUILTIN_COUPLINGS: Dict[str, BasicCoupling] = {
    "obool-negation": BasicCoupling("obool-negation", "obool_v1/obool_v2", obool_negation),
    "meyer-sieber-even": BasicCoupling("meyer-sieber-even", "meyer_sieber_v1/meyer_sieber_v2", meyer_sieber_even),
    "observer-sentinel-list": BasicCoupling(
        "observer-sentinel-list", "observer_v1/observer_sentinel", observer_sentinel_list
    ),
    "observer-node-list": BasicCoupling(
        "observer-node-list", "observer_v1/observer_object", observer_node_list
    ),
}


# ---------------------------------------------------------------------------
# Manifest


@dataclass
class SimManifest:
    table_a: str
    table_b: str
    own: str
    rep_a: str
    rep_b: str
    coupling: str
    fuels: Tuple[int, ...] = (1, 2, 4, 8)
    max_len: int = 4
    max_scripts: int = 120

    @staticmethod
    def from_json(data: dict, base_dir: str = "") -> "SimManifest":
        import os

        join = (lambda p: os.path.join(base_dir, p)) if base_dir else (lambda p: p)
        return SimManifest(
            table_a=join(data["tableA"]),
            table_b=join(data["tableB"]),
            own=data["own"],
            rep_a=data["repA"],
            rep_b=data["repB"],
            coupling=data["coupling"],
            fuels=tuple(data.get("fuels", (1, 2, 4, 8))),
            max_len=data.get("maxLen", 4),
            max_scripts=data.get("maxScripts", 120),
        )


def load_sim_manifest(path: str) -> SimManifest:
    import os

    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    return SimManifest.from_json(data, base_dir=os.path.dirname(path))


def run_sim_manifest(manifest: SimManifest) -> CouplingReport:
    from .classtable import Designations, build_class_table
    from .desugar import parse_and_desugar

    rep2 = manifest.rep_b if manifest.rep_b != manifest.rep_a else None
    des = Designations(manifest.own, manifest.rep_a, rep2)
    with open(manifest.table_a, "r", encoding="utf-8") as f:
        ct_a = build_class_table(parse_and_desugar(f.read()), des)
    with open(manifest.table_b, "r", encoding="utf-8") as f:
        ct_b = build_class_table(parse_and_desugar(f.read()), des)
    bc = BUILTIN_COUPLINGS[manifest.coupling]
    return test_simulation(
        ct_a, ct_b, bc,
        fuels=manifest.fuels, max_len=manifest.max_len, max_scripts=manifest.max_scripts,
    )
