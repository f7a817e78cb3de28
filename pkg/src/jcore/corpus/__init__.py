"""Built-in example corpus: programs, expected results, and manifests.

Each corpus program ships with an expectation record (well-formedness and
analysis verdicts, entry points with pinned outcomes and minimal sufficient
fuel, monitor expectations). The records are executable fixtures: the test
suite and `corpus run-all` replay them.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import List, Optional, Tuple

from ..classtable import ClassTable, Designations, build_class_table
from ..desugar import parse_and_desugar

CORPUS_DIR = os.path.dirname(os.path.abspath(__file__))


@dataclass(frozen=True)
class EntryExpectation:
    entry_class: str
    entry_method: str
    outcome: str  # 'ok' or a bottom reason
    min_fuel: int
    monitor: object  # 'clean' or list of required violation kinds
    finals: Tuple[Tuple[str, object], ...]  # (dotted path from a store var, value)


@dataclass(frozen=True)
class CorpusRecord:
    name: str
    path: str
    own: str
    rep: str
    rep2: Optional[str]
    check: str
    analyze: Tuple[str, ...]  # required diagnostic rules; empty means accepted
    entries: Tuple[EntryExpectation, ...]
    notes: str

    def designations(self) -> Designations:
        return Designations(self.own, self.rep, self.rep2)

    def source(self) -> str:
        with open(self.path, "r", encoding="utf-8") as f:
            return f.read()

    def build(self) -> ClassTable:
        return build_class_table(parse_and_desugar(self.source()), self.designations())


def _load_expectations() -> dict:
    with open(os.path.join(CORPUS_DIR, "expectations.json"), "r", encoding="utf-8") as f:
        return json.load(f)


def load_corpus() -> List[CorpusRecord]:
    data = _load_expectations()
    records = []
    for p in data["programs"]:
        entries = tuple(
            EntryExpectation(
                e["class"], e["method"], e["outcome"], e["minFuel"],
                e.get("monitor", "clean"),
                tuple((path, value) for path, value in e.get("final", [])),
            )
            for e in p.get("entries", [])
        )
        records.append(CorpusRecord(
            name=p["name"],
            path=os.path.join(CORPUS_DIR, p["file"]),
            own=p["own"],
            rep=p["rep"],
            rep2=p.get("rep2"),
            check=p.get("check", "ok"),
            analyze=tuple(p.get("analyze", [])),
            entries=entries,
            notes=p.get("notes", ""),
        ))
    return records


def corpus_record(name: str) -> CorpusRecord:
    for r in load_corpus():
        if r.name == name:
            return r
    raise KeyError(f"no corpus program named {name}")


def equiv_expectations() -> List[Tuple[str, str]]:
    """(manifest path, expected verdict) pairs."""
    data = _load_expectations()
    return [(os.path.join(CORPUS_DIR, e["manifest"]), e["verdict"]) for e in data["equiv"]]


def simtest_expectations() -> List[Tuple[str, bool]]:
    """(manifest path, expected pass/fail) pairs."""
    data = _load_expectations()
    return [(os.path.join(CORPUS_DIR, e["manifest"]), e["ok"]) for e in data["simtest"]]


def navigate(heap, store, path: str):
    """Follow a dotted path like `self.ob.count` through a final state."""
    parts = path.split(".")
    value = store[parts[0]]
    for f in parts[1:]:
        value = heap[value][f]
    return value
