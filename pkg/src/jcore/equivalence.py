"""Program equivalence across two versions of the owner class.

Two tables are comparable when they agree on everything except the owner
class's declaration, with matching public (and subclass-visible module)
method signatures. Client equivalence runs the same entry program against
both tables with synchronized fuel, garbage-collects both finals, and decides
equality of the collected states up to a type-preserving location bijection,
built by one deterministic rooted traversal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .classtable import ClassTable, Designations
from .interp import (
    Bottom, Heap, Location, Store, collect, fuel_schedule, run, value_kind,
)


class ComparabilityError(Exception):
    def __init__(self, problems: List[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


def check_comparable(ct_a: ClassTable, ct_b: ClassTable) -> List[str]:
    """Return the list of comparability violations (empty means comparable)."""
    problems: List[str] = []
    if ct_a.designations != ct_b.designations or ct_a.designations is None:
        problems.append("the two tables must share owner/rep designations")
        return problems
    own = ct_a.designations.own
    names_a, names_b = set(ct_a.decls), set(ct_b.decls)
    for n in sorted(names_a ^ names_b):
        problems.append(f"class {n} is declared in only one table")
    for n in sorted(names_a & names_b):
        if n == own:
            continue
        if ct_a.decls[n] != ct_b.decls[n]:
            problems.append(f"class {n} differs between the tables (only {own} may differ)")
    if own in names_a and own in names_b:
        if ct_a.super_of(own) != ct_b.super_of(own):
            problems.append(f"the two versions of {own} have different superclasses")
        meths = set(ct_a.method_names(own)) | set(ct_b.method_names(own))
        prot_a = {m for m, _ in ct_a.prot_methods()}
        prot_b = {m for m, _ in ct_b.prot_methods()}
        for m in sorted(meths):
            mt_a, mt_b = ct_a.mtype(m, own), ct_b.mtype(m, own)
            ms_a = ct_a.mscope(m, own) if mt_a else None
            ms_b = ct_b.mscope(m, own) if mt_b else None
            public_somewhere = (mt_a and not ms_a) or (mt_b and not ms_b)
            protected = m in prot_a or m in prot_b
            if public_somewhere:
                if mt_a is None or mt_b is None:
                    problems.append(f"public owner method {m} is missing from one table")
                elif mt_a != mt_b:
                    problems.append(f"public owner method {m} has different signatures")
                elif ms_a != ms_b:
                    problems.append(f"owner method {m} is module-scoped in only one table")
            elif protected:
                if mt_a is None or mt_b is None:
                    problems.append(f"subclass-visible module method {m} is missing from one table")
                elif mt_a != mt_b:
                    problems.append(f"subclass-visible module method {m} has different signatures")
                elif not (ms_a and ms_b):
                    problems.append(f"subclass-visible method {m} must be module-scoped in both tables")
    return problems


# ---------------------------------------------------------------------------
# Canonical typed bijection between two rooted states


@dataclass(frozen=True)
class Distinguished:
    path: str
    message: str


def canonical_bijection(
    ct: ClassTable,
    state_a: Tuple[Heap, Store],
    state_b: Tuple[Heap, Store],
    seed: Optional[Dict[Location, Location]] = None,
):
    """Build the type-preserving location bijection equating two collected
    states, by breadth-first traversal from the stores (variables in name
    order, fields in declaration order). Returns the bijection as a dict or
    a Distinguished witness holding the first mismatching access path."""
    h_a, eta_a = state_a
    h_b, eta_b = state_b
    sigma: Dict[Location, Location] = {}
    used = set()
    queue: List[Tuple[Location, Location, str]] = []

    def pair(a, b, path):
        ka, kb = value_kind(a), value_kind(b)
        if ka != kb:
            return Distinguished(path, f"{ka} vs {kb}")
        if ka in ("nil", "bool", "int", "unit"):
            if a != b or type(a) is not type(b):
                return Distinguished(path, f"{a!r} vs {b!r}")
            return None
        if a.class_name != b.class_name:
            return Distinguished(path, f"{a.class_name} vs {b.class_name}")
        if a in sigma:
            if sigma[a] != b:
                return Distinguished(path, f"{a} already paired with {sigma[a]}, not {b}")
            return None
        if b in used:
            return Distinguished(path, f"{b} already the partner of another location")
        sigma[a] = b
        used.add(b)
        queue.append((a, b, path))
        return None

    if seed:
        for a, b in sorted(seed.items()):
            bad = pair(a, b, f"<seed {a}>")
            if bad:
                return bad

    if set(eta_a) != set(eta_b):
        return Distinguished("<store>", "stores bind different variables")
    for x in sorted(eta_a):
        bad = pair(eta_a[x], eta_b[x], x)
        if bad:
            return bad
    while queue:
        a, b, path = queue.pop(0)
        for f, _ in ct.fields(a.class_name):
            bad = pair(h_a[a][f], h_b[b][f], f"{path}.{f}")
            if bad:
                return bad
    if len(sigma) != len(h_a) or len(used) != len(h_b):
        return Distinguished("<domain>", "states differ in unreachable locations")
    return sigma


def value_equiv(sigma: Dict[Location, Location], a, b) -> bool:
    ka, kb = value_kind(a), value_kind(b)
    if ka != kb:
        return False
    if ka == "loc":
        return sigma.get(a) == b
    return a == b and type(a) is type(b)


def own_free(ct: ClassTable, h: Heap, eta: Store) -> bool:
    locs = list(h) + [v for v in eta.values() if isinstance(v, Location)]
    return not any(ct.is_owner_class(l.class_name) for l in locs)


# ---------------------------------------------------------------------------
# Client program equivalence


@dataclass(frozen=True)
class EquivVerdict:
    kind: str  # 'equivalent' | 'distinguished' | 'owners-reachable' | 'inconclusive'
    fuel_used: int = 0
    sigma: Tuple[Tuple[Location, Location], ...] = ()
    witness: str = ""

    @property
    def equivalent(self) -> bool:
        return self.kind == "equivalent"

    def to_json(self) -> dict:
        return {
            "verdict": self.kind,
            "fuelUsed": self.fuel_used,
            "sigma": [[str(a), str(b)] for a, b in self.sigma],
            "witness": self.witness,
        }


def client_equiv(
    ct_a: ClassTable,
    ct_b: ClassTable,
    entry_class: str,
    entry_method: str,
    max_fuel: int = 1024,
    loop_cap: int = 100000,
) -> EquivVerdict:
    problems = check_comparable(ct_a, ct_b)
    if problems:
        raise ComparabilityError(problems)
    if not ct_a.is_client_class(entry_class):
        raise ComparabilityError([f"entry class {entry_class} must be a client class"])

    for fuel in fuel_schedule(max_fuel):
        res_a = run(ct_a, entry_class, entry_method, loop_cap=loop_cap, fixed_fuel=fuel)
        res_b = run(ct_b, entry_class, entry_method, loop_cap=loop_cap, fixed_fuel=fuel)
        bot_a = res_a.outcome if isinstance(res_a.outcome, Bottom) else None
        bot_b = res_b.outcome if isinstance(res_b.outcome, Bottom) else None
        if (bot_a and bot_a.is_fuel()) or (bot_b and bot_b.is_fuel()):
            continue  # undetermined at this approximation; deepen
        if bot_a and bot_b:
            return EquivVerdict("equivalent", fuel, witness=f"both bottom: {bot_a.reason} / {bot_b.reason}")
        if bot_a or bot_b:
            return EquivVerdict(
                "distinguished", fuel,
                witness=f"one side bottoms ({(bot_a or bot_b).reason}), the other terminates",
            )
        ha, ea = collect(*res_a.outcome)
        hb, eb = collect(*res_b.outcome)
        if not own_free(ct_a, ha, ea) or not own_free(ct_b, hb, eb):
            return EquivVerdict("owners-reachable", fuel, witness="an owner is reachable in a collected final state")
        out = canonical_bijection(ct_a, (ha, ea), (hb, eb))
        if isinstance(out, Distinguished):
            return EquivVerdict("distinguished", fuel, witness=f"{out.path}: {out.message}")
        return EquivVerdict("equivalent", fuel, sigma=tuple(sorted(out.items())))
    return EquivVerdict("inconclusive", max_fuel, witness="fuel exhausted on at least one side at the budget")


# ---------------------------------------------------------------------------
# Manifests


@dataclass
class EquivManifest:
    table_a: str
    table_b: str
    own: str
    rep_a: str
    rep_b: str
    entry_class: str
    entry_method: str
    max_fuel: int = 1024
    loop_cap: int = 100000

    @staticmethod
    def from_json(data: dict, base_dir: str = "") -> "EquivManifest":
        import os

        entry = data["entry"]
        join = (lambda p: os.path.join(base_dir, p)) if base_dir else (lambda p: p)
        return EquivManifest(
            table_a=join(data["tableA"]),
            table_b=join(data["tableB"]),
            own=data["own"],
            rep_a=data["repA"],
            rep_b=data["repB"],
            entry_class=entry["class"],
            entry_method=entry["method"],
            max_fuel=data.get("maxFuel", 1024),
            loop_cap=data.get("loopCap", 100000),
        )

    def designations(self) -> Designations:
        rep2 = self.rep_b if self.rep_b != self.rep_a else None
        return Designations(self.own, self.rep_a, rep2)


def load_manifest(path: str) -> EquivManifest:
    import os

    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    return EquivManifest.from_json(data, base_dir=os.path.dirname(path))


def run_manifest(manifest: EquivManifest) -> EquivVerdict:
    from .classtable import build_class_table
    from .desugar import parse_and_desugar

    des = manifest.designations()
    with open(manifest.table_a, "r", encoding="utf-8") as f:
        decls_a = parse_and_desugar(f.read())
    with open(manifest.table_b, "r", encoding="utf-8") as f:
        decls_b = parse_and_desugar(f.read())
    ct_a = build_class_table(decls_a, des)
    ct_b = build_class_table(decls_b, des)
    return client_equiv(
        ct_a, ct_b, manifest.entry_class, manifest.entry_method,
        max_fuel=manifest.max_fuel, loop_cap=manifest.loop_cap,
    )
