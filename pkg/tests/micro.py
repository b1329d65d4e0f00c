"""Tiny random datasets and a brute-force model enumerator used as an optimality oracle.

The oracle shares no code with the learner. It enumerates predicate selections
S, per-label arities and every signed effect and precondition set, then keeps
the lexicographically cheapest model that satisfies C1 and C2 on the marked
states. Only entries that change within some instance may take effects (the
dynamic part D of S). Given S the labels are independent, so each label is
minimised on its own.

Literals with a repeated variable are left out: their atoms never hold, so they
can only make a model more expensive or wrong.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter

import numpy as np

from o2dplan.grounding import Dataset
from o2dplan.o2d_core import GroundAtom, O2DSignature, O2DState
from o2dplan.predicate_pool import build_pool, detect_constants

SIG = O2DSignature((), ("u", "v"))
OBJECTS = ("a", "b", "c")


# ---------------------------------------------------------------- generator

def _state(iid, sid, objs, facts, static):
    atoms = {GroundAtom(p, (o,)) for p, o in facts} | set(static)
    return O2DState(frozenset(atoms), frozenset(objs), iid, str(sid), SIG)


def _hidden_schemas(rng, n_labels, n_obj):
    out = []
    for lab in range(n_labels):
        k = rng.randint(0, min(2, n_obj))
        lits = [(p, v) for p in ("u", "v") for v in range(k)]
        eff = rng.sample(lits, rng.randint(1, len(lits))) if lits else []
        if not eff:
            return None
        eff = [(p, v, rng.random() < 0.5) for p, v in eff]
        pre = [(p, v, not pos) for p, v, pos in eff if rng.random() < 0.7]
        out.append((f"A{lab}", k, pre, eff))
    return out


def _closure(schemas, objs, init, cap=6):
    states, edges, queue = [init], [], [init]
    while queue:
        s = queue.pop(0)
        for lab, k, pre, eff in schemas:
            for b in itertools.permutations(range(len(objs)), k):
                if all(((p, objs[b[v]]) in s) == pos for p, v, pos in pre):
                    t = set(s)
                    for p, v, pos in eff:
                        (t.add if pos else t.discard)((p, objs[b[v]]))
                    t = frozenset(t)
                    if t not in states:
                        if len(states) >= cap:
                            return None
                        states.append(t)
                        queue.append(t)
                    edges.append((states.index(s), lab, states.index(t)))
    return states, edges


def micro_dataset(seed: int) -> Dataset:
    """At most 6 states, 3 objects and 2 labels; some are unlearnable on purpose."""
    rng = random.Random(seed)
    while True:
        n_obj = rng.randint(1, 3)
        objs = OBJECTS[:n_obj]
        static = set()
        if n_obj > 1 and rng.random() < 0.5:
            static = {GroundAtom("left", (objs[i], objs[i + 1])) for i in range(n_obj - 1)}
        n_labels = rng.randint(1, 2)
        labels = [f"A{i}" for i in range(n_labels)]
        if rng.random() < 0.7:
            schemas = _hidden_schemas(rng, n_labels, n_obj)
            if schemas is None:
                continue
            init = frozenset((p, o) for p in ("u", "v") for o in objs if rng.random() < 0.5)
            res = _closure(schemas, objs, init)
            if res is None or len(res[0]) < 2 or not res[1]:
                continue
            facts, edges = res
        else:
            drawn = [frozenset((p, o) for p in ("u", "v") for o in objs if rng.random() < 0.5)
                     for _ in range(6)]
            pool = list(dict.fromkeys(drawn))
            facts = pool[: rng.randint(2, min(5, len(pool)))] if len(pool) >= 2 else None
            if facts is None:
                continue
            edges = [(rng.randrange(len(facts)), rng.choice(labels), rng.randrange(len(facts)))
                     for _ in range(rng.randint(1, 4))]
            edges = [e for e in edges if e[0] != e[2]]
            if not edges:
                continue
        iid = f"micro{seed}"
        states = {(iid, str(i)): _state(iid, i, objs, f, static) for i, f in enumerate(facts)}
        trans: dict = {}
        for a, lab, b in edges:
            trans.setdefault((iid, str(a)), {}).setdefault(lab, []).append((iid, str(b)))
        marked = set(states)
        if rng.random() < 0.3:
            # partial graph: keep successors of the marked states only
            keep = rng.sample(sorted(states), max(1, len(states) - 2))
            marked = set(keep)
        ds = Dataset(states, marked, labels, {k: v for k, v in trans.items() if k in marked}, [iid])
        return ds


def micro_pool(ds: Dataset, m: int = 2):
    return build_pool(list(ds.states.values()), SIG, m)


# ---------------------------------------------------------------- oracle

def _valuations(ds: Dataset, pool):
    """Per instance: objects and, per entry, a map state key -> set of true tuples."""
    out = {}
    for iid in ds.instances_present:
        t = pool.instances[iid]
        objs = t.objects
        vals = {}
        for e in pool.entries:
            per = {}
            for k in ds.instance_keys(iid):
                a = pool.values(e.index, iid)[t.row[k[1]]]
                if e.arity == 0:
                    per[k] = {()} if bool(a) else set()
                elif e.arity == 1:
                    per[k] = {(objs[i],) for i in np.flatnonzero(a)}
                else:
                    per[k] = {(objs[i], objs[j]) for i, j in zip(*np.nonzero(a)) if i != j}
            vals[e.index] = per
        out[iid] = (objs, vals)
    return out


def oracle_optimum(ds: Dataset, pool, max_arity: int, num_predicates: int, constants=None):
    """Least cost tuple over all models, or None when none satisfies C1 and C2."""
    consts = list(detect_constants(pool).names if constants is None else constants)
    vals = _valuations(ds, pool)
    entries = [(e.index, e.arity) for e in pool.entries]
    labels = [lab for lab in ds.labels if any(ds.successors(k, lab) for k in ds.marked)]
    marked = sorted(ds.marked)
    static = {e for e, _ in entries if pool.is_static(e, ds.instances_present)}

    def h(k, S):
        iid = k[0]
        return frozenset((e, t) for e in S for t in vals[iid][1][e][k])

    best = None
    cache: dict = {}
    for size in range(0, num_predicates + 1):
        for S in itertools.combinations(entries, size):
            Sidx = [e for e, _ in S]
            # C1 per instance over marked states
            ok = True
            for iid in ds.instances_present:
                hs = [h(k, Sidx) for k in marked if k[0] == iid]
                if len(set(hs)) != len(hs):
                    ok = False
                    break
            if not ok:
                continue
            Didx = {e for e in Sidx if e not in static}
            per_label = []
            for lab in labels:
                opts = []
                for k in range(max_arity + 1):
                    key = (lab, tuple(Sidx), k)
                    if key not in cache:
                        cache[key] = _label_min(ds, lab, S, Didx, k, consts, vals, marked, h)
                    if cache[key] is not None:
                        opts.append((1 + k,) + cache[key])
                if not opts:
                    break
                per_label.append(min(opts))
            else:
                c1 = sum(o[0] for o in per_label)
                c2 = sum(1 + a for e, a in S if e in Didx)
                c3 = sum(1 + a for e, a in S if e not in Didx)
                c4 = sum(o[1] for o in per_label)
                c5 = sum(o[2] for o in per_label)
                cost = (c1, c2, c3, c4, c5)
                if best is None or cost < best:
                    best = cost
    return best


def _label_min(ds, lab, S, D, k, consts, vals, marked, h):
    """Least (effects, preconditions) for one label, or None."""
    terms = list(range(1, k + 1)) + consts
    lits = []
    for e, ar in S:
        for t in itertools.permutations(terms, ar):
            lits.append((e, t))
    eff_lits = [i for i, (e, _) in enumerate(lits) if e in D]
    Sidx = [e for e, _ in S]
    # rows: (state, binding); truth matrix and successor targets
    rows, truth, base, targets = [], [], [], []
    for key in marked:
        iid = key[0]
        objs = vals[iid][0]
        free = [o for o in objs if o not in consts]
        hs = h(key, Sidx)
        want = Counter(h(s2, Sidx) for s2 in ds.successors(key, lab))
        targets.append(want)
        for b in itertools.permutations(free, k):
            g = [(e, tuple(b[a - 1] if isinstance(a, int) else a for a in t)) for e, t in lits]
            rows.append((len(targets) - 1, g))
            truth.append([atom in hs for atom in g])
            base.append(hs)
    T = np.array(truth, dtype=bool).reshape(len(rows), len(lits))
    L = len(lits)
    if any(sum(t.values()) > sum(1 for si, _ in rows if si == i) for i, t in enumerate(targets)):
        return None     # fewer bindings than successors
    if L > 10:
        raise ValueError(f"{L} literals is too many for exhaustive enumeration")
    # every precondition assignment at once: 0 absent, 1 positive, 2 negative
    P = np.array(list(itertools.product((0, 1, 2), repeat=L)), dtype=np.int8).reshape(3 ** L, L)
    psize = (P > 0).sum(axis=1)
    A = np.ones((len(P), len(rows)), dtype=bool)
    for j in range(L):
        col = T[:, j]
        A &= (P[:, j:j + 1] == 0) | ((P[:, j:j + 1] == 1) & col) | ((P[:, j:j + 1] == 2) & ~col)
    best = None
    for esize in range(1, len(eff_lits) + 1):
        if best is not None:
            break
        for E in itertools.combinations(eff_lits, esize):
            for signs in itertools.product((True, False), repeat=esize):
                # successor class of every row: index into that state's target list, or -1
                classes = []
                cols = {}
                for r, (si, g) in enumerate(rows):
                    succ = set(base[r])
                    for j, pos in zip(E, signs):
                        (succ.add if pos else succ.discard)(g[j])
                    succ = frozenset(succ)
                    c = (si, succ) if succ in targets[si] else (si, None)
                    classes.append(cols.setdefault(c, len(cols)))
                M = np.zeros((len(rows), len(cols)), dtype=np.int32)
                M[np.arange(len(rows)), classes] = 1
                want = np.zeros(len(cols), dtype=np.int32)
                for (si, succ), col in cols.items():
                    if succ is not None:
                        want[col] = targets[si][succ]
                # targets whose successor no row produces make the label infeasible
                covered = sum(want)
                if covered != sum(sum(t.values()) for t in targets):
                    continue
                counts = A.astype(np.int32) @ M
                good = (counts == want[None, :]).all(axis=1)
                if good.any():
                    c5 = int(psize[good].min())
                    if best is None or (esize, c5) < best:
                        best = (esize, c5)
    return best
