"""Hidden STRIPS domains and their rendering into O2D datasets.

Rendering follows a rule registry: hidden positive atoms, registry facts and
``object(X)`` facts are closed under the registry's Datalog rules, after which
only O2D relations, rule heads, registry facts and whitelisted type atoms are kept.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .grounding import Dataset, StateKey, sid_order
from .o2d_core import BINARY_PREDICATES, DEFAULT_SHAPES, GroundAtom, O2DSignature, O2DState, parse_state, serialize_state
from .strips_core import (Domain, Instance, LabeledGraph, Literal, PlanningState, Predicate, Schema,
                          enumerate_reachable)

TYPE_WHITELIST = ("robot", "block", "table", "sokoban", "crate", "key", "tile")

Pattern = tuple[str, tuple[str, ...]]


class RegistryError(ValueError):
    pass


class RenderError(ValueError):
    pass


# ---------------------------------------------------------------- registry

_PAT = re.compile(r"^\s*([A-Za-z_]\w*)\s*\(([^()]*)\)\s*$")


def parse_pattern(text: str) -> Pattern:
    m = _PAT.match(text)
    if not m:
        raise RegistryError(f"bad atom pattern {text!r}")
    return m.group(1), tuple(a.strip() for a in m.group(2).split(",") if a.strip())


def is_var(term: str) -> bool:
    return term[:1].isupper()


@dataclass(frozen=True)
class Rule:
    head: Pattern
    body: tuple[Pattern, ...]

    def __post_init__(self):
        bound = {t for _, args in self.body for t in args if is_var(t)}
        free = [t for t in self.head[1] if is_var(t) and t not in bound]
        if free:
            raise RegistryError(f"unsafe rule: head variable(s) {free} not bound in body")


@dataclass(frozen=True)
class RegistryEntry:
    name: str
    constants: tuple[str, ...]
    facts: tuple[tuple[str, tuple[str, ...]], ...]
    rules: tuple[Rule, ...]

    @property
    def head_predicates(self) -> set[str]:
        return {r.head[0] for r in self.rules}

    @property
    def object_constants(self) -> tuple[str, ...]:
        return tuple(c for c in self.constants if c not in DEFAULT_SHAPES)


def load_registry(path: str | Path | None = None) -> dict[str, RegistryEntry]:
    """Load the JSON registry; ``defer-to`` aliases resolve to their target's rules."""
    if path is None:
        text = resources.files("o2dplan").joinpath("data/registry.json").read_text()
    else:
        text = Path(path).read_text()
    raw = json.loads(text)
    out: dict[str, RegistryEntry] = {}

    def resolve(name: str, seen: tuple = ()) -> RegistryEntry:
        if name in out:
            return out[name]
        if name in seen:
            raise RegistryError(f"defer-to cycle through {name}")
        spec = raw.get(name)
        if spec is None:
            raise RegistryError(f"unknown registry entry {name}")
        if "defer-to" in spec:
            base = resolve(spec["defer-to"], seen + (name,))
            entry = RegistryEntry(name, base.constants, base.facts, base.rules)
        else:
            rules = []
            for group in spec.get("rules", {}).values():
                for head, body in group:
                    rules.append(Rule(parse_pattern(head), tuple(parse_pattern(b) for b in body)))
            facts = tuple((p, tuple(args)) for p, args in spec.get("facts", []))
            entry = RegistryEntry(name, tuple(spec.get("constants", [])), facts, tuple(rules))
        out[name] = entry
        return entry

    for name in raw:
        resolve(name)
    return out


# ---------------------------------------------------------------- datalog

def _match(pattern: Pattern, fact: tuple[str, tuple[str, ...]], env: dict) -> dict | None:
    pred, args = pattern
    if fact[0] != pred or len(fact[1]) != len(args):
        return None
    out = env
    for t, v in zip(args, fact[1]):
        if is_var(t):
            cur = out.get(t)
            if cur is None:
                if out is env:
                    out = dict(env)
                out[t] = v
            elif cur != v:
                return None
        elif t != v:
            return None
    return out


def fixpoint(facts: Iterable[tuple[str, tuple[str, ...]]], rules: Sequence[Rule]) -> set:
    """Semi-naive bottom-up closure of ``facts`` under ``rules``."""
    db: set = set(facts)
    by_pred: dict[str, set] = {}
    for f in db:
        by_pred.setdefault(f[0], set()).add(f)
    delta = set(db)
    while delta:
        delta_by: dict[str, set] = {}
        for f in delta:
            delta_by.setdefault(f[0], set()).add(f)
        new: set = set()
        for rule in rules:
            for i, pat in enumerate(rule.body):
                if pat[0] not in delta_by:
                    continue
                for f in delta_by[pat[0]]:
                    env = _match(pat, f, {})
                    if env is None:
                        continue
                    for env2 in _join(rule.body, i, 0, env, by_pred):
                        head = (rule.head[0], tuple(env2[t] if is_var(t) else t for t in rule.head[1]))
                        if head not in db:
                            new.add(head)
        for f in new:
            by_pred.setdefault(f[0], set()).add(f)
        db |= new
        delta = new
    return db


def _join(body, skip, j, env, by_pred):
    if j == len(body):
        yield env
        return
    if j == skip:
        yield from _join(body, skip, j + 1, env, by_pred)
        return
    for f in by_pred.get(body[j][0], ()):
        e = _match(body[j], f, env)
        if e is not None:
            yield from _join(body, skip, j + 1, e, by_pred)


def render(hidden: PlanningState, entry: RegistryEntry, instance_id: str = "", state_id: str = "",
           signature: O2DSignature | None = None) -> O2DState:
    """g(s̄): the O2D scene of a hidden planning state."""
    objects = {o for o in hidden.objects if o not in DEFAULT_SHAPES} | set(entry.object_constants)
    base = set(hidden.atoms) | set(entry.facts) | {("object", (o,)) for o in objects}
    closed = fixpoint(base, entry.rules)
    keep = entry.head_predicates | {f[0] for f in entry.facts} | set(BINARY_PREDICATES) | set(TYPE_WHITELIST)
    atoms = set()
    for p, args in closed:
        if p not in keep or p == "object":
            continue
        if p in BINARY_PREDICATES and len(args) != 2 or p not in BINARY_PREDICATES and len(args) != 1:
            raise RenderError(f"rendered atom {p}{args} does not fit the O2D signature")
        atoms.add(GroundAtom(p, tuple(args)))
    for a in atoms:
        for o in a.args:
            if o not in objects and o not in DEFAULT_SHAPES:
                raise RenderError(f"rendered atom {a} mentions unknown object {o}")
    return O2DState(frozenset(atoms), frozenset(objects), instance_id, state_id, signature)


# ---------------------------------------------------------------- hidden domains

def L(pred: str, *args, pos: bool = True) -> Literal:
    return Literal(pred, tuple(args), pos)


def N(pred: str, *args) -> Literal:
    return Literal(pred, tuple(args), False)


def _domain(name, preds, schemas, constants=()):
    return Domain(name, tuple(Predicate(n, a, s) for n, a, s in preds), tuple(schemas), tuple(constants))


def blocks3ops_domain() -> Domain:
    return _domain("blocks3ops", [("on", 2, False), ("ontable", 1, False), ("clear", 1, False)], [
        Schema("Stack", 2, (), (L("clear", 1), L("ontable", 1), L("clear", 2)),
               (L("on", 1, 2), N("ontable", 1), N("clear", 2))),
        Schema("Newtower", 2, (), (L("clear", 1), L("on", 1, 2)),
               (L("ontable", 1), N("on", 1, 2), L("clear", 2))),
        Schema("Move", 3, (), (L("clear", 1), L("on", 1, 2), L("clear", 3)),
               (L("on", 1, 3), N("on", 1, 2), L("clear", 2), N("clear", 3))),
    ])


def blocks4ops_domain() -> Domain:
    return _domain("blocks4ops", [("on", 2, False), ("ontable", 1, False), ("clear", 1, False),
                                  ("holding", 1, False), ("handempty", 0, False)], [
        Schema("Pickup", 1, (), (L("clear", 1), L("ontable", 1), L("handempty")),
               (L("holding", 1), N("ontable", 1), N("clear", 1), N("handempty"))),
        Schema("Putdown", 1, (), (L("holding", 1),),
               (L("ontable", 1), L("clear", 1), L("handempty"), N("holding", 1))),
        Schema("Unstack", 2, (), (L("on", 1, 2), L("clear", 1), L("handempty")),
               (L("holding", 1), L("clear", 2), N("on", 1, 2), N("clear", 1), N("handempty"))),
        Schema("Stack", 2, (), (L("holding", 1), L("clear", 2)),
               (L("on", 1, 2), L("clear", 1), L("handempty"), N("holding", 1), N("clear", 2))),
    ])


def blocks_instance(n: int, holding_domain: bool = False) -> Instance:
    blocks = [f"b{i}" for i in range(n)]
    atoms = {("ontable", (b,)) for b in blocks} | {("clear", (b,)) for b in blocks}
    if holding_domain:
        atoms.add(("handempty", ()))
    init = PlanningState(frozenset(blocks), frozenset(atoms))
    return Instance(frozenset(blocks), init, frozenset())


_HANOI_PREDS = [("on", 2, False), ("clear", 1, False), ("smaller", 2, True),
                ("disk", 1, True), ("peg", 1, True)]


def hanoi1op_domain() -> Domain:
    return _domain("hanoi1op", _HANOI_PREDS, [
        Schema("Move", 3, (L("smaller", 1, 3),), (L("on", 1, 2), L("clear", 1), L("clear", 3)),
               (L("on", 1, 3), N("on", 1, 2), L("clear", 2), N("clear", 3))),
    ])


def hanoi4ops_domain() -> Domain:
    def move(label, src, dst):
        return Schema(label, 3, (L("disk", 1), L(src, 2), L(dst, 3), L("smaller", 1, 3)),
                      (L("on", 1, 2), L("clear", 1), L("clear", 3)),
                      (L("on", 1, 3), N("on", 1, 2), L("clear", 2), N("clear", 3)))
    return _domain("hanoi4ops", _HANOI_PREDS, [
        move("MoveFromPegToPeg", "peg", "peg"), move("MoveFromPegToDisk", "peg", "disk"),
        move("MoveFromDiskToPeg", "disk", "peg"), move("MoveFromDiskToDisk", "disk", "disk")])


def hanoi_instance(n: int, pegs: int = 3) -> Instance:
    disks = [f"d{i}" for i in range(1, n + 1)]  # d1 smallest
    ps = [f"p{i}" for i in range(1, pegs + 1)]
    atoms = {("disk", (d,)) for d in disks} | {("peg", (p,)) for p in ps}
    for i, d in enumerate(disks):
        for bigger in disks[i + 1:] + ps:
            atoms.add(("smaller", (d, bigger)))
    for i, d in enumerate(disks):
        atoms.add(("on", (d, disks[i + 1] if i + 1 < n else ps[0])))
    atoms.add(("clear", (disks[0],)) if disks else ("clear", (ps[0],)))
    for p in ps[1:]:
        atoms.add(("clear", (p,)))
    objs = frozenset(disks + ps)
    return Instance(objs, PlanningState(objs, frozenset(atoms)), frozenset())


def slidingtile_domain() -> Domain:
    def move(label, adj):
        return Schema(label, 3, (adj,), (L("at", 1, 2), L("blank", 3)),
                      (L("at", 1, 3), N("at", 1, 2), L("blank", 2), N("blank", 3)))
    return _domain("slidingtile", [("at", 2, False), ("blank", 1, False), ("position", 1, True),
                                   ("tile", 1, True), ("left", 2, True), ("below", 2, True)], [
        move("MoveUp", L("below", 2, 3)), move("MoveRight", L("left", 2, 3)),
        move("MoveDown", L("below", 3, 2)), move("MoveLeft", L("left", 3, 2))])


def _grid_adjacency(rows: int, cols: int, name: Callable[[int, int], str]) -> set:
    """left(p,q): p immediately left of q; below(p,q): p immediately below q (row 1 on top)."""
    atoms = set()
    for r in range(1, rows + 1):
        for c in range(1, cols + 1):
            if c < cols:
                atoms.add(("left", (name(r, c), name(r, c + 1))))
            if r < rows:
                atoms.add(("below", (name(r + 1, c), name(r, c))))
    return atoms


def slidingtile_instance(rows: int, cols: int) -> Instance:
    pos = lambda r, c: f"p{r}_{c}"
    cells = [pos(r, c) for r in range(1, rows + 1) for c in range(1, cols + 1)]
    tiles = [f"t{i}" for i in range(1, len(cells))]
    atoms = {("position", (p,)) for p in cells} | {("tile", (t,)) for t in tiles}
    atoms |= _grid_adjacency(rows, cols, pos)
    for t, p in zip(tiles, cells):
        atoms.add(("at", (t, p)))
    atoms.add(("blank", (cells[-1],)))
    objs = frozenset(cells + tiles)
    return Instance(objs, PlanningState(objs, frozenset(atoms)), frozenset())


def grid_domain() -> Domain:
    def move(label, adj):
        return Schema(label, 2, (adj,), (L("at_robot", 1), L("open", 2)),
                      (L("at_robot", 2), N("at_robot", 1)))

    def unlock(label, adj):
        # 1 = robot place, 2 = lock place, 3 = key, 4 = shape
        return Schema(label, 4, (adj, L("key_shape", 3, 4), L("lock_shape", 2, 4)),
                      (L("at_robot", 1), L("locked", 2), L("holding", 3)),
                      (L("open", 2), N("locked", 2)))
    preds = [("place", 1, True), ("key", 1, True), ("shape_obj", 1, True), ("open", 1, False),
             ("locked", 1, False), ("at_robot", 1, False), ("at", 2, False), ("holding", 1, False),
             ("arm_empty", 0, False), ("lock_shape", 2, True), ("key_shape", 2, True),
             ("left", 2, True), ("below", 2, True)]
    return _domain("grid", preds, [
        move("MoveUp", L("below", 1, 2)), move("MoveRight", L("left", 1, 2)),
        move("MoveDown", L("below", 2, 1)), move("MoveLeft", L("left", 2, 1)),
        Schema("Pickup", 2, (L("key", 2),), (L("at_robot", 1), L("at", 2, 1), L("arm_empty")),
               (L("holding", 2), N("at", 2, 1), N("arm_empty"))),
        Schema("Putdown", 2, (L("place", 1),), (L("at_robot", 1), L("holding", 2)),
               (L("at", 2, 1), L("arm_empty"), N("holding", 2))),
        unlock("UnlockFromAbove", L("below", 2, 1)), unlock("UnlockFromRight", L("left", 2, 1)),
        unlock("UnlockFromBelow", L("below", 1, 2)), unlock("UnlockFromLeft", L("left", 1, 2)),
    ])


def grid_instance(rows: int, cols: int, keys: Sequence[tuple[str, tuple[int, int]]],
                  locks: Sequence[tuple[str, tuple[int, int]]], robot: tuple[int, int]) -> Instance:
    """``keys``/``locks`` are (shape, (row, col)) pairs; lock shapes must be pairwise distinct."""
    if len({s for s, _ in locks}) != len(locks):
        raise ValueError("two locks share a shape")
    place = lambda r, c: f"c{r}_{c}"
    places = [place(r, c) for r in range(1, rows + 1) for c in range(1, cols + 1)]
    shapes = sorted({s for s, _ in keys} | {s for s, _ in locks})
    knames = [f"k{i}" for i in range(len(keys))]
    locked = {place(*rc) for _, rc in locks}
    if place(*robot) in locked:
        raise ValueError("robot starts on a locked place")
    atoms = {("place", (p,)) for p in places} | {("key", (k,)) for k in knames}
    atoms |= {("shape_obj", (s,)) for s in shapes} | {("arm_empty", ())}
    atoms |= _grid_adjacency(rows, cols, place)
    atoms |= {("open", (p,)) for p in places if p not in locked} | {("locked", (p,)) for p in locked}
    atoms |= {("lock_shape", (place(*rc), s)) for s, rc in locks}
    for k, (s, rc) in zip(knames, keys):
        atoms |= {("key_shape", (k, s)), ("at", (k, place(*rc)))}
    atoms.add(("at_robot", (place(*robot),)))
    objs = frozenset(places + knames + shapes)
    return Instance(objs, PlanningState(objs, frozenset(atoms)), frozenset())


def sokoban_domain() -> Domain:
    S = "sokoban1"

    def move(label, adj):
        return Schema(label, 2, (adj,), (L("at", S, 1), L("clear", 2)),
                      (L("at", S, 2), N("at", S, 1), L("clear", 1), N("clear", 2)))

    def push(label, adj1, adj2):
        # 1 = sokoban cell, 2 = crate cell, 3 = target cell, 4 = crate
        return Schema(label, 4, (adj1, adj2, L("crate", 4)), (L("at", S, 1), L("at", 4, 2), L("clear", 3)),
                      (L("at", S, 2), N("at", S, 1), L("at", 4, 3), N("at", 4, 2), L("clear", 1), N("clear", 3)))
    preds = [("at", 2, False), ("clear", 1, False), ("leftof", 2, True), ("below", 2, True), ("crate", 1, True)]
    return _domain("sokoban", preds, [
        move("MoveUp", L("below", 1, 2)), move("MoveRight", L("leftof", 1, 2)),
        move("MoveDown", L("below", 2, 1)), move("MoveLeft", L("leftof", 2, 1)),
        push("PushUp", L("below", 1, 2), L("below", 2, 3)),
        push("PushRight", L("leftof", 1, 2), L("leftof", 2, 3)),
        push("PushDown", L("below", 2, 1), L("below", 3, 2)),
        push("PushLeft", L("leftof", 2, 1), L("leftof", 3, 2)),
    ], constants=(S,))


def sokoban_instance(rows: int, cols: int, crates: Sequence[tuple[int, int]], player: tuple[int, int]) -> Instance:
    cell = lambda r, c: f"c{r}_{c}"
    cells = [cell(r, c) for r in range(1, rows + 1) for c in range(1, cols + 1)]
    adj = _grid_adjacency(rows, cols, cell)
    atoms = {("leftof", a) if p == "left" else (p, a) for p, a in adj}
    cnames = [f"crate{i}" for i in range(len(crates))]
    occupied = {cell(*player)} | {cell(*rc) for rc in crates}
    if len(occupied) != 1 + len(crates):
        raise ValueError("overlapping crates or player")
    atoms |= {("crate", (c,)) for c in cnames} | {("at", ("sokoban1", cell(*player)))}
    atoms |= {("at", (c, cell(*rc))) for c, rc in zip(cnames, crates)}
    atoms |= {("clear", (c,)) for c in cells if c not in occupied}
    objs = frozenset(cells + cnames + ["sokoban1"])
    return Instance(objs, PlanningState(objs, frozenset(atoms)), frozenset())


# ---------------------------------------------------------------- catalogue

def _grid_instances(seed: int = 0) -> list[tuple[str, Instance]]:
    rng = random.Random(seed)
    out = []
    shapes = ["circle", "heart"]
    for rows, cols in [(1, 2), (2, 1), (1, 3), (2, 2)]:
        for k in (1, 2):
            cells = [(r, c) for r in range(1, rows + 1) for c in range(1, cols + 1)]
            if len(cells) < 2 + 0:
                continue
            lock = rng.choice(cells)
            rest = [c for c in cells if c != lock]
            robot = rng.choice(rest)
            key_cells = [rng.choice(rest) for _ in range(k)]
            keys = [(shapes[i % 2], kc) for i, kc in enumerate(key_cells)]
            out.append((f"grid-{rows}x{cols}-k{k}", grid_instance(rows, cols, keys, [("circle", lock)], robot)))
    return out


def _sokoban_instances(seed: int = 0) -> list[tuple[str, Instance]]:
    rng = random.Random(seed)
    out = []
    for rows, cols in [(1, 5), (2, 3), (3, 2), (5, 1)]:
        for b in (0, 1):
            cells = [(r, c) for r in range(1, rows + 1) for c in range(1, cols + 1)]
            picks = rng.sample(cells, 1 + b)
            out.append((f"sokoban-{rows}x{cols}-b{b}", sokoban_instance(rows, cols, picks[1:], picks[0])))
    return out


SLIDING_SHAPES = [(1, 2), (2, 1), (1, 3), (3, 1), (2, 2), (2, 3), (3, 2)]


@dataclass(frozen=True)
class HiddenSpec:
    name: str
    registry: str
    domain: Callable[[], Domain]
    instances: Callable[..., list[tuple[str, Instance]]]
    params: dict = field(default_factory=dict)


def _blocks3(sizes=(2, 3, 4, 5)):
    return [(f"blocks3ops-n{n}", blocks_instance(n)) for n in sizes]


def _blocks4(sizes=(1, 2, 3, 4, 5)):
    return [(f"blocks4ops-n{n}", blocks_instance(n, True)) for n in sizes]


def _hanoi(prefix):
    def make(sizes=(1, 2, 3, 4, 5)):
        return [(f"{prefix}-n{n}", hanoi_instance(n)) for n in sizes]
    return make


def _sliding(shapes=tuple(SLIDING_SHAPES)):
    return [(f"slidingtile-{r}x{c}", slidingtile_instance(r, c)) for r, c in shapes]


HIDDEN: dict[str, HiddenSpec] = {
    "blocks3ops": HiddenSpec("blocks3ops", "blocks3ops", blocks3ops_domain, _blocks3),
    "blocks4ops": HiddenSpec("blocks4ops", "blocks4ops", blocks4ops_domain, _blocks4),
    "hanoi1op": HiddenSpec("hanoi1op", "hanoi1op", hanoi1op_domain, _hanoi("hanoi1op")),
    "hanoi4ops": HiddenSpec("hanoi4ops", "hanoi4ops", hanoi4ops_domain, _hanoi("hanoi4ops")),
    "slidingtile": HiddenSpec("slidingtile", "slidingtile", slidingtile_domain, _sliding),
    "grid": HiddenSpec("grid", "grid", grid_domain, _grid_instances),
    "sokoban": HiddenSpec("sokoban", "sokoban1", sokoban_domain, _sokoban_instances),
}


# ---------------------------------------------------------------- datasets

@dataclass
class RenderedDataset:
    dataset: Dataset
    hidden: dict[StateKey, PlanningState]
    domain: Domain
    instances: dict[str, Instance]
    graphs: dict[str, LabeledGraph]
    registry: RegistryEntry
    signature: O2DSignature

    def render(self, state: PlanningState, instance_id: str = "", state_id: str = "") -> O2DState:
        return render(state, self.registry, instance_id, state_id, self.signature)

    @property
    def n_states(self) -> int:
        return len(self.dataset.states)

    @property
    def n_edges(self) -> int:
        return sum(len(g.edges) for g in self.graphs.values())


def build_dataset(domain: Domain, instances: Sequence[tuple[str, Instance]], entry: RegistryEntry,
                  cap: int = 200_000) -> RenderedDataset:
    """Enumerate, render and assemble the full data pool (T = S), instances ordered by size."""
    if not instances:
        raise RenderError("no instances given")
    graphs = {iid: enumerate_reachable(domain, inst, cap) for iid, inst in instances}
    order = sorted((iid for iid, _ in instances), key=lambda i: len(graphs[i].nodes))
    rendered: dict[StateKey, O2DState] = {}
    hidden: dict[StateKey, PlanningState] = {}
    for iid in order:
        seen: dict[O2DState, str] = {}
        for j, node in enumerate(graphs[iid].nodes):
            s = render(node, entry, iid, str(j))
            if s in seen:
                raise RenderError(f"rendering not injective in {iid}: states {seen[s]} and {j}")
            seen[s] = str(j)
            rendered[(iid, str(j))] = s
            hidden[(iid, str(j))] = node
    unary = sorted({a.predicate for s in rendered.values() for a in s.atoms if a.predicate not in BINARY_PREDICATES})
    sig = O2DSignature(entry.object_constants, tuple(unary))
    rendered = {k: O2DState(s.atoms, s.objects, s.instance_id, s.state_id, sig) for k, s in rendered.items()}
    ds = Dataset(rendered, set(rendered), list(domain.labels), {}, order)
    for iid in order:
        g = graphs[iid]
        for (a, lab, b) in g.edges:
            ds.transitions.setdefault((iid, str(a)), {}).setdefault(lab, []).append((iid, str(b)))
    return RenderedDataset(ds, hidden, domain, dict(instances), graphs, entry, sig)


def generate(name: str, registry: dict[str, RegistryEntry] | None = None, **params) -> RenderedDataset:
    """Data pool for a bundled hidden domain; ``params`` override the instance parameters."""
    spec = HIDDEN.get(name)
    if spec is None:
        raise RenderError(f"unknown domain {name}; known: {', '.join(HIDDEN)}")
    reg = registry if registry is not None else load_registry()
    return build_dataset(spec.domain(), spec.instances(**params), reg[spec.registry])


# ---------------------------------------------------------------- dump / load

def dump_dataset(ds: Dataset, outdir: str | Path, signature: O2DSignature | None = None) -> None:
    out = Path(outdir)
    (out / "states").mkdir(parents=True, exist_ok=True)
    for (iid, sid), s in sorted(ds.states.items(), key=lambda kv: (kv[0][0], sid_order(kv[0][1]))):
        d = out / "states" / iid
        d.mkdir(parents=True, exist_ok=True)
        (d / f"{sid}.o2d").write_text(serialize_state(s))
    with open(out / "edges.tsv", "w") as fh:
        fh.write("instance\tsrc\tlabel\tdst\n")
        for (a, lab, b) in ds.edges():
            fh.write(f"{a[0]}\t{a[1]}\t{lab}\t{b[1]}\n")
    with open(out / "marked.tsv", "w") as fh:
        fh.write("instance\tstate\n")
        for k in ds.marked_keys():
            fh.write(f"{k[0]}\t{k[1]}\n")
    meta = {"instances": ds.instance_order, "labels": ds.labels}
    if signature is not None:
        meta["constants"] = list(signature.constants)
        meta["unary"] = list(signature.unary_predicates)
    (out / "dataset.json").write_text(json.dumps(meta, indent=1) + "\n")


def load_dataset(indir: str | Path) -> tuple[Dataset, O2DSignature]:
    src = Path(indir)
    meta = json.loads((src / "dataset.json").read_text())
    sig = O2DSignature(tuple(meta.get("constants", [])), tuple(meta.get("unary", [])))
    states = {}
    for iid in meta["instances"]:
        for f in sorted((src / "states" / iid).glob("*.o2d")):
            s = parse_state(f.read_text(), sig, iid, f.stem)
            states[(iid, f.stem)] = s
    # objects without atoms are invisible in the file; the per-instance union restores them
    union: dict[str, set] = {}
    for (iid, _), s in states.items():
        union.setdefault(iid, set()).update(s.objects)
    states = {k: O2DState(s.atoms, frozenset(union[k[0]]), k[0], k[1], sig) for k, s in states.items()}
    ds = Dataset(states, set(), list(meta["labels"]), {}, list(meta["instances"]))
    with open(src / "marked.tsv") as fh:
        next(fh)
        for line in fh:
            iid, sid = line.rstrip("\n").split("\t")
            ds.marked.add((iid, sid))
    with open(src / "edges.tsv") as fh:
        next(fh)
        for line in fh:
            iid, a, lab, b = line.rstrip("\n").split("\t")
            ds.transitions.setdefault((iid, a), {}).setdefault(lab, []).append((iid, b))
    ds.validate()
    return ds, sig
