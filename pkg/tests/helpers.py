"""Shared oracles and generators: brute-force partition search, typed
bijection enumeration, and random heap/state construction."""

from __future__ import annotations

import itertools
import random

from jcore import ast as A
from jcore.classtable import Designations, build_class_table
from jcore.confine import partition_clauses_hold
from jcore.equivalence import value_equiv
from jcore.interp import IT, Location


def _cls(name, sup, fields, methods=()):
    return A.ClassDecl(name, sup, tuple(fields), A.Skip(), tuple(methods))


def roles_table():
    """Synthetic table with owner/rep/client classes and enough class-typed
    fields to draw every kind of edge a random heap needs."""
    c = A.ClassType
    decls = [
        _cls("Own", "Object", [("po", c("Own")), ("pr", c("Rep")), ("pc", c("Cli"))]),
        _cls("SubOwn", "Own", [("sr", c("Rep")), ("sc", c("Cli"))]),
        _cls("Rep", "Object", [("ro", c("Own")), ("rr", c("Rep")), ("rc", c("Cli"))]),
        _cls("SubRep", "Rep", []),
        _cls("Cli", "Object", [("co", c("Own")), ("cr", c("Rep")), ("cc", c("Cli")), ("n", A.INT)]),
        _cls("Cli2", "Cli", []),
    ]
    return build_class_table(decls, Designations("Own", "Rep"))


def random_heap(ct, rng: random.Random, max_objects: int = 8):
    """Random well-typed closed heap over the roles table."""
    classes = list(ct.decls)
    n = rng.randint(0, max_objects)
    locs = []
    counters = {}
    for _ in range(n):
        cname = rng.choice(classes)
        idx = counters.get(cname, 0)
        counters[cname] = idx + 1
        locs.append(Location(cname, idx))
    h = {}
    for loc in locs:
        state = {}
        for f, t in ct.fields(loc.class_name):
            if isinstance(t, A.ClassType):
                candidates = [l for l in locs if ct.subtype_names(l.class_name, t.name)]
                state[f] = rng.choice(candidates) if candidates and rng.random() < 0.55 else None
            elif t == A.INT:
                state[f] = rng.randint(0, 3)
            elif t == A.BOOL:
                state[f] = rng.random() < 0.5
            else:
                state[f] = IT
        h[loc] = state
    return h


def brute_force_confining(ct, h):
    """Enumerate every admissible partition (reps -> owner islands); return a
    satisfying rep->island assignment, or None when no confining partition
    exists."""
    owners = sorted(l for l in h if ct.is_owner_class(l.class_name))
    reps = sorted(l for l in h if ct.is_rep_class(l.class_name))
    if reps and not owners:
        return None
    k = max(len(owners), 1)
    for assignment in itertools.product(range(k), repeat=len(reps)):
        amap = dict(zip(reps, assignment))
        if partition_clauses_hold(ct, h, amap, owners):
            return amap
    return None


def all_typed_bijections(locs_a, locs_b, forced=None):
    """Yield every type-preserving bijection between the two location sets,
    optionally constrained to contain the `forced` pairs."""
    forced = forced or {}
    by_class_a, by_class_b = {}, {}
    for l in locs_a:
        by_class_a.setdefault(l.class_name, []).append(l)
    for l in locs_b:
        by_class_b.setdefault(l.class_name, []).append(l)
    if set(by_class_a) != set(by_class_b):
        return
    classes = sorted(by_class_a)
    if any(len(by_class_a[c]) != len(by_class_b[c]) for c in classes):
        return
    per_class = []
    for c in classes:
        src = sorted(by_class_a[c])
        perms = []
        for perm in itertools.permutations(sorted(by_class_b[c])):
            mapping = dict(zip(src, perm))
            if all(mapping.get(a) == b for a, b in forced.items() if a in mapping):
                perms.append(mapping)
        per_class.append(perms)
    for combo in itertools.product(*per_class):
        sigma = {}
        for mapping in combo:
            sigma.update(mapping)
        if all(sigma.get(a) == b for a, b in forced.items()):
            yield sigma


def brute_force_state_bijection(ct, state_a, state_b):
    """Search all typed bijections equating two collected states."""
    h_a, eta_a = state_a
    h_b, eta_b = state_b
    if set(eta_a) != set(eta_b):
        return None
    for sigma in all_typed_bijections(h_a, h_b):
        if not all(value_equiv(sigma, eta_a[x], eta_b[x]) for x in eta_a):
            continue
        ok = True
        for l in h_a:
            for f, v in h_a[l].items():
                if not value_equiv(sigma, v, h_b[sigma[l]][f]):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return sigma
    return None


def client_table():
    """Small client-only table for random owner-free states."""
    c = A.ClassType
    decls = [
        _cls("P", "Object", [("a", c("P")), ("b", c("Q")), ("n", A.INT)]),
        _cls("Q", "P", [("flag", A.BOOL)]),
        _cls("Own", "Object", []),
        _cls("Rep", "Object", []),
    ]
    return build_class_table(decls, Designations("Own", "Rep"))


def random_client_state(ct, rng: random.Random, max_locs: int = 6):
    """Random collected owner-free state over the client table."""
    from jcore.interp import collect

    classes = ["P", "Q"]
    n = rng.randint(1, max_locs)
    locs = []
    counters = {}
    for _ in range(n):
        cname = rng.choice(classes)
        idx = counters.get(cname, 0)
        counters[cname] = idx + 1
        locs.append(Location(cname, idx))
    h = {}
    for loc in locs:
        state = {}
        for f, t in ct.fields(loc.class_name):
            if isinstance(t, A.ClassType):
                candidates = [l for l in locs if ct.subtype_names(l.class_name, t.name)]
                state[f] = rng.choice(candidates) if candidates and rng.random() < 0.6 else None
            elif t == A.INT:
                state[f] = rng.randint(0, 2)
            elif t == A.BOOL:
                state[f] = rng.random() < 0.5
            else:
                state[f] = IT
        h[loc] = state
    eta = {"self": rng.choice(locs)}
    for i in range(rng.randint(0, 2)):
        eta[f"x{i}"] = rng.choice(locs + [None])
    return collect(h, eta)


def rename_state(ct, state, rng: random.Random):
    """Apply a random per-class location renaming: an equivalent copy."""
    h, eta = state
    by_class = {}
    for l in h:
        by_class.setdefault(l.class_name, []).append(l)
    mapping = {}
    for cname, locs in by_class.items():
        shift = rng.randint(0, 3)
        indices = rng.sample(range(len(locs) + shift), len(locs))
        for l, idx in zip(sorted(locs), indices):
            mapping[l] = Location(cname, idx)

    def rn(v):
        return mapping[v] if isinstance(v, Location) else v

    h2 = {mapping[l]: {f: rn(v) for f, v in st.items()} for l, st in h.items()}
    eta2 = {x: rn(v) for x, v in eta.items()}
    return h2, eta2
