"""Description-logic predicate pool over O2D states.

Concepts ``C <- U | Top | Bottom | ER[R,C] | INTER[C,C']``, roles
``R <- R0 | INV[R] | COMP[R,R']`` and nullary ``SUBSET[C,C']``. Entries are
generated layer by layer in complexity and pruned by denotation over all
supplied states.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .o2d_core import BINARY_PREDICATES, DEFAULT_SHAPES, O2DSignature, O2DState

KIND_ORDER = ("prim", "top", "bottom", "exists", "inter", "inv", "comp", "subset")
_KIND_RANK = {k: i for i, k in enumerate(KIND_ORDER)}


@dataclass(frozen=True)
class DLExpr:
    kind: str
    name: str | None = None
    ops: tuple["DLExpr", ...] = ()
    prim_arity: int = 1

    @property
    def arity(self) -> int:
        if self.kind == "prim":
            return self.prim_arity
        if self.kind in ("top", "bottom", "exists", "inter"):
            return 1
        if self.kind in ("inv", "comp"):
            return 2
        return 0

    @property
    def complexity(self) -> int:
        return complexity(self)

    def __str__(self) -> str:
        k = self.kind
        if k == "prim":
            return self.name
        if k == "top":
            return "Top"
        if k == "bottom":
            return "Bottom"
        tag = {"exists": "ER", "inter": "INTER", "inv": "INV", "comp": "COMP", "subset": "SUBSET"}[k]
        return f"{tag}[{','.join(str(o) for o in self.ops)}]"


TOP = DLExpr("top")
BOTTOM = DLExpr("bottom")


def prim(name: str, arity: int | None = None) -> DLExpr:
    if arity is None:
        arity = 2 if name in BINARY_PREDICATES else 1
    return DLExpr("prim", name, (), arity)


def exists(r: DLExpr, c: DLExpr) -> DLExpr:
    return DLExpr("exists", None, (r, c))


def inter(c1: DLExpr, c2: DLExpr) -> DLExpr:
    return DLExpr("inter", None, (c1, c2))


def inv(r: DLExpr) -> DLExpr:
    return DLExpr("inv", None, (r,))


def comp(r1: DLExpr, r2: DLExpr) -> DLExpr:
    return DLExpr("comp", None, (r1, r2))


def subset(c1: DLExpr, c2: DLExpr) -> DLExpr:
    return DLExpr("subset", None, (c1, c2))


def complexity(expr: DLExpr) -> int:
    """Top/Bottom 0, primitives 1, every rule application 1 + sum over operands."""
    if expr.kind in ("top", "bottom"):
        return 0
    if expr.kind == "prim":
        return 1
    return 1 + sum(complexity(o) for o in expr.ops)


_TAGS = {"ER": ("exists", 2), "INTER": ("inter", 2), "INV": ("inv", 1),
         "COMP": ("comp", 2), "SUBSET": ("subset", 2)}


def parse_expr(text: str) -> DLExpr:
    """Parse the bracket notation, e.g. ``INTER[ER[below,Top],block]``."""
    toks = re.findall(r"[A-Za-z_][\w\-]*|\[|\]|,", text)
    if "".join(toks) != re.sub(r"\s+", "", text):
        raise ValueError(f"bad expression {text!r}")
    pos = 0

    def parse() -> DLExpr:
        nonlocal pos
        tok = toks[pos]
        pos += 1
        if pos < len(toks) and toks[pos] == "[" and tok in _TAGS:
            kind, n = _TAGS[tok]
            pos += 1
            ops = [parse()]
            while toks[pos] == ",":
                pos += 1
                ops.append(parse())
            if toks[pos] != "]" or len(ops) != n:
                raise ValueError(f"bad expression {text!r}")
            pos += 1
            return DLExpr(kind, None, tuple(ops))
        if tok == "Top":
            return TOP
        if tok == "Bottom":
            return BOTTOM
        return prim(tok)

    e = parse()
    if pos != len(toks):
        raise ValueError(f"trailing tokens in {text!r}")
    return e


# ---------------------------------------------------------------- set semantics

def denote(expr: DLExpr, state: O2DState, _cache: dict | None = None):
    """Reference set semantics on one state.

    Returns a frozenset of 1-tuples (concepts), 2-tuples (roles) or a bool (nullary).
    Concepts range over the state's objects only; roles may pair an object with a
    shape constant (``shape``).
    """
    if _cache is not None and expr in _cache:
        return _cache[expr]
    k = expr.kind
    objs = state.objects
    if k == "top":
        out = frozenset((o,) for o in objs)
    elif k == "bottom":
        out = frozenset()
    elif k == "prim":
        out = frozenset(a.args for a in state.atoms
                        if a.predicate == expr.name and len(a.args) == expr.prim_arity)
        if expr.prim_arity == 1:
            out = frozenset(t for t in out if t[0] in objs)
    elif k == "exists":
        r = denote(expr.ops[0], state, _cache)
        c = {t[0] for t in denote(expr.ops[1], state, _cache)}
        out = frozenset((x,) for (x, y) in r if y in c and x in objs)
    elif k == "inter":
        out = denote(expr.ops[0], state, _cache) & denote(expr.ops[1], state, _cache)
    elif k == "inv":
        out = frozenset((y, x) for (x, y) in denote(expr.ops[0], state, _cache))
    elif k == "comp":
        r1 = denote(expr.ops[0], state, _cache)
        r2 = denote(expr.ops[1], state, _cache)
        succ: dict[str, set[str]] = {}
        for (y, z) in r2:
            succ.setdefault(y, set()).add(z)
        out = frozenset((x, z) for (x, y) in r1 for z in succ.get(y, ()))
    elif k == "subset":
        out = denote(expr.ops[0], state, _cache) <= denote(expr.ops[1], state, _cache)
    else:
        raise ValueError(k)
    if _cache is not None:
        _cache[expr] = out
    return out


# ---------------------------------------------------------------- pool

@dataclass
class PoolEntry:
    index: int
    expr: DLExpr
    arity: int
    complexity: int

    def __str__(self):
        return f"{self.index} {self.complexity} {self.arity} {self.expr}"


@dataclass
class InstanceTable:
    """Per-instance universe and state rows."""

    instance_id: str
    objects: list[str]
    shapes: list[str]
    state_ids: list[str]
    row: dict[str, int] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.objects)

    @property
    def u(self) -> int:
        return len(self.objects) + len(self.shapes)


class PoolError(ValueError):
    pass


class PredicatePool:
    """Retained entries plus dense denotation tables.

    ``tables[i][inst]`` is a bool array: ``[S]`` (nullary), ``[S, n]`` (concept) or
    ``[S, u, u]`` (role) where ``u`` counts objects then shape constants.
    """

    def __init__(self, entries: list[PoolEntry], instances: list[InstanceTable],
                 tables: list[dict[str, np.ndarray]], bound_m: int):
        self.entries = entries
        self.instances = {t.instance_id: t for t in instances}
        self.instance_order = [t.instance_id for t in instances]
        self.tables = tables
        self.bound_m = bound_m
        self.per_instance_static: dict[tuple[str, int], bool] = {}
        for e in entries:
            for iid in self.instance_order:
                a = tables[e.index][iid]
                self.per_instance_static[(iid, e.index)] = bool((a == a[:1]).all()) if len(a) else True

    def __len__(self):
        return len(self.entries)

    def is_static(self, index: int, instances: Iterable[str] | None = None) -> bool:
        insts = self.instance_order if instances is None else instances
        return all(self.per_instance_static[(i, index)] for i in insts)

    def find(self, expr: DLExpr | str) -> PoolEntry | None:
        if isinstance(expr, str):
            expr = parse_expr(expr)
        for e in self.entries:
            if e.expr == expr:
                return e
        return None

    def values(self, index: int, instance_id: str, rows: Sequence[int] | None = None) -> np.ndarray:
        """Valuation over object tuples: ``[S]``, ``[S, n]`` or ``[S, n, n]``."""
        a = self.tables[index][instance_id]
        if rows is not None:
            a = a[list(rows)]
        if self.entries[index].arity == 2:
            n = self.instances[instance_id].n
            a = a[:, :n, :n]
        return a

    def denotation(self, index: int, state_key: tuple[str, str]):
        """Set-form denotation of an entry in a given state (for inspection)."""
        iid, sid = state_key
        t = self.instances[iid]
        a = self.tables[index][iid][t.row[sid]]
        names = t.objects + t.shapes
        ar = self.entries[index].arity
        if ar == 0:
            return bool(a)
        if ar == 1:
            return frozenset((t.objects[i],) for i in np.flatnonzero(a))
        return frozenset((names[i], names[j]) for i, j in zip(*np.nonzero(a)))

    def dump(self) -> str:
        return "".join(f"{e}\n" for e in self.entries)


def _instance_tables(states: Sequence[O2DState], shapes: set[str]) -> list[InstanceTable]:
    order: dict[str, InstanceTable] = {}
    for s in states:
        t = order.get(s.instance_id)
        if t is None:
            t = order[s.instance_id] = InstanceTable(s.instance_id, [], [], [])
        if s.state_id in t.row:
            raise PoolError(f"duplicate state id {s.instance_id}/{s.state_id}")
        t.row[s.state_id] = len(t.state_ids)
        t.state_ids.append(s.state_id)
    objs: dict[str, set] = {k: set() for k in order}
    shp: dict[str, set] = {k: set() for k in order}
    for s in states:
        objs[s.instance_id] |= s.objects
        shp[s.instance_id] |= {o for a in s.atoms for o in a.args if o in shapes}
    for k, t in order.items():
        t.objects = sorted(objs[k])
        t.shapes = sorted(shp[k])
    return list(order.values())


def _primitive_table(name: str, arity: int, states: Sequence[O2DState], t: InstanceTable) -> np.ndarray:
    idx = {o: i for i, o in enumerate(t.objects + t.shapes)}
    S = len(t.state_ids)
    if arity == 1:
        out = np.zeros((S, t.n), dtype=bool)
    else:
        out = np.zeros((S, t.u, t.u), dtype=bool)
    for s in states:
        r = t.row[s.state_id]
        for a in s.atoms:
            if a.predicate == name and len(a.args) == arity:
                if arity == 1:
                    if a.args[0] in idx and idx[a.args[0]] < t.n:
                        out[r, idx[a.args[0]]] = True
                else:
                    out[r, idx[a.args[0]], idx[a.args[1]]] = True
    return out


def build_pool(states: Sequence[O2DState], signature: O2DSignature, m: int, jobs: int = 1) -> PredicatePool:
    """Build P_m: every non-duplicate grammar derivation of complexity <= m."""
    if m < 1:
        raise PoolError("complexity bound m must be >= 1")
    if not states:
        raise PoolError("no states supplied")
    shapes = set(signature.shapes) | set(DEFAULT_SHAPES)
    insts = _instance_tables(states, shapes)
    by_inst: dict[str, list[O2DState]] = {}
    for s in states:
        by_inst.setdefault(s.instance_id, []).append(s)

    entries: list[PoolEntry] = []
    tables: list[dict[str, np.ndarray]] = []
    seen: set = set()

    def key(arity: int, tab: dict[str, np.ndarray]):
        if arity > 0 and not any(a.any() for a in tab.values()):
            # empty concepts and empty roles are all identified with Bottom
            return ("empty",)
        return (min(arity, 1) if arity else 0, arity,
                tuple(np.packbits(tab[t.instance_id]).tobytes() + bytes(str(tab[t.instance_id].shape), "ascii")
                      for t in insts))

    def offer(expr: DLExpr, tab: dict[str, np.ndarray]):
        k = key(expr.arity, tab)
        if k in seen:
            return
        seen.add(k)
        entries.append(PoolEntry(len(entries), expr, expr.arity, complexity(expr)))
        tables.append(tab)

    # layer 0
    offer(TOP, {t.instance_id: np.ones((len(t.state_ids), t.n), dtype=bool) for t in insts})
    offer(BOTTOM, {t.instance_id: np.zeros((len(t.state_ids), t.n), dtype=bool) for t in insts})
    # layer 1
    for name in signature.unary_predicates:
        offer(prim(name, 1), {t.instance_id: _primitive_table(name, 1, by_inst[t.instance_id], t) for t in insts})
    for name in BINARY_PREDICATES:
        offer(prim(name, 2), {t.instance_id: _primitive_table(name, 2, by_inst[t.instance_id], t) for t in insts})

    # compounds of complexity 1 exist too: operands of complexity 0 (Top, Bottom)
    for c in range(1, m + 1):
        layer = list(entries)
        concepts = [e for e in layer if e.arity == 1]
        roles = [e for e in layer if e.arity == 2]
        for r in roles:
            for cc in concepts:
                if r.complexity + cc.complexity == c - 1:
                    offer(exists(r.expr, cc.expr), {
                        t.instance_id: _exists(tables[r.index][t.instance_id], tables[cc.index][t.instance_id], t.n)
                        for t in insts})
        for c1 in concepts:
            for c2 in concepts:
                if c1.index <= c2.index and c1.complexity + c2.complexity == c - 1:
                    offer(inter(c1.expr, c2.expr), {
                        t.instance_id: tables[c1.index][t.instance_id] & tables[c2.index][t.instance_id]
                        for t in insts})
        for r in roles:
            if r.complexity == c - 1:
                offer(inv(r.expr), {t.instance_id: tables[r.index][t.instance_id].transpose(0, 2, 1).copy()
                                    for t in insts})
        for r1 in roles:
            for r2 in roles:
                if r1.complexity + r2.complexity == c - 1:
                    offer(comp(r1.expr, r2.expr), {
                        t.instance_id: _compose(tables[r1.index][t.instance_id], tables[r2.index][t.instance_id])
                        for t in insts})
        for c1 in concepts:
            for c2 in concepts:
                if c1.complexity + c2.complexity == c - 1:
                    offer(subset(c1.expr, c2.expr), {
                        t.instance_id: (~tables[c1.index][t.instance_id] | tables[c2.index][t.instance_id]).all(axis=1)
                        for t in insts})
    return PredicatePool(entries, insts, tables, m)


def _exists(r: np.ndarray, c: np.ndarray, n: int) -> np.ndarray:
    # concepts live on objects; shape columns of r never match
    return (r[:, :n, :n] & c[:, None, :]).any(axis=2)


def _compose(r1: np.ndarray, r2: np.ndarray) -> np.ndarray:
    return np.matmul(r1.astype(np.uint8), r2.astype(np.uint8)) > 0


# ---------------------------------------------------------------- constants

@dataclass
class ConstantSet:
    names: list[str]
    witnesses: dict[str, int]

    def __iter__(self):
        return iter(self.names)

    def __len__(self):
        return len(self.names)


def detect_constants(pool: PredicatePool, instances: Iterable[str] | None = None) -> ConstantSet:
    """Objects singled out by a static unary entry in every instance."""
    insts = list(pool.instance_order if instances is None else instances)
    if not insts:
        return ConstantSet([], {})
    common = set(pool.instances[insts[0]].objects)
    for i in insts[1:]:
        common &= set(pool.instances[i].objects)
    found: dict[str, int] = {}
    for e in pool.entries:
        if e.arity != 1 or not pool.is_static(e.index, insts):
            continue
        who = None
        for i in insts:
            t = pool.instances[i]
            a = pool.tables[e.index][i]
            if len(a) == 0:
                who = None
                break
            nz = np.flatnonzero(a[0])
            if len(nz) != 1:
                who = None
                break
            o = t.objects[nz[0]]
            if who is None:
                who = o
            elif who != o:
                who = None
                break
        if who is not None and who in common and who not in found:
            found[who] = e.index
    names = sorted(found)
    return ConstantSet(names, {n: found[n] for n in names})
