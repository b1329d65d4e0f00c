"""Grounded domains, the abstraction h, datasets and the data-graph isomorphism check."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .o2d_core import O2DState
from .predicate_pool import DLExpr, denote, parse_expr
from .strips_core import (CapExceeded, Domain, Instance, Literal, PlanningState, Predicate, Schema,
                          enumerate_reachable, ground_tuples, successors)

StateKey = tuple[str, str]


def sid_order(sid: str):
    return (0, int(sid), "") if sid.isdigit() else (1, 0, sid)


def key_order(key: StateKey, instance_rank: dict[str, int] | None = None):
    iid, sid = key
    r = instance_rank.get(iid, len(instance_rank)) if instance_rank else 0
    return (r, iid, sid_order(sid))


# ---------------------------------------------------------------- grounded domain

class GroundingError(ValueError):
    pass


@dataclass(frozen=True)
class GroundedDomain:
    domain: Domain
    sigma: dict[str, DLExpr]

    def __post_init__(self):
        seen: dict[DLExpr, str] = {}
        for p in self.domain.predicates:
            e = self.sigma.get(p.name)
            if e is None:
                raise GroundingError(f"predicate {p.name} has no grounding")
            if e.arity != p.arity:
                raise GroundingError(f"arity of {p.name} ({p.arity}) differs from {e} ({e.arity})")
            if e in seen:
                raise GroundingError(f"{p.name} and {seen[e]} map to the same pool predicate {e}")
            seen[e] = p.name

    def display(self, pred: str) -> str:
        return str(self.sigma[pred])

    def __hash__(self):
        return hash((self.domain, tuple(sorted((k, str(v)) for k, v in self.sigma.items()))))


def abstract(gd: GroundedDomain, s: O2DState, cache: dict | None = None) -> PlanningState:
    """h(s): the complete planning state induced by the selected denotations.

    ``cache`` memoizes sub-expression denotations and must belong to ``s`` alone.
    """
    cache = {} if cache is None else cache
    objs = s.objects
    atoms = set()
    for p in gd.domain.predicates:
        ext = denote(gd.sigma[p.name], s, cache)
        if p.arity == 0:
            if ext:
                atoms.add((p.name, ()))
            continue
        for t in ext:
            if len(set(t)) == len(t) and all(o in objs for o in t):
                atoms.add((p.name, tuple(t)))
    return PlanningState(frozenset(objs), frozenset(atoms))


def build_instance(gd: GroundedDomain, s0: O2DState, sg: O2DState) -> Instance:
    if s0.objects != sg.objects:
        raise GroundingError("initial and goal O2D states have different object sets")
    init = abstract(gd, s0)
    goal_state = abstract(gd, sg)
    goal = set()
    for p in gd.domain.predicates:
        for t in ground_tuples(s0.objects, p.arity):
            a = (p.name, t)
            goal.add((a, a in goal_state.atoms))
    return Instance(frozenset(s0.objects), init, frozenset(goal))


# ---------------------------------------------------------------- datasets

@dataclass
class Dataset:
    """Dataset ⟨T, S, L, F⟩ keyed by (instance id, state id)."""

    states: dict[StateKey, O2DState] = field(default_factory=dict)
    marked: set[StateKey] = field(default_factory=set)
    labels: list[str] = field(default_factory=list)
    transitions: dict[StateKey, dict[str, list[StateKey]]] = field(default_factory=dict)
    instance_order: list[str] = field(default_factory=list)

    def validate(self):
        for k in self.marked:
            if k not in self.states:
                raise GroundingError(f"marked state {k} not in S")
        for k, by in self.transitions.items():
            if k not in self.marked:
                raise GroundingError(f"transitions recorded for unmarked state {k}")
            for lab, succ in by.items():
                if lab not in self.labels:
                    raise GroundingError(f"unknown label {lab}")
                for t in succ:
                    if t not in self.states or t[0] != k[0]:
                        raise GroundingError(f"successor {t} of {k} missing or in another instance")

    @property
    def rank(self) -> dict[str, int]:
        return {iid: i for i, iid in enumerate(self.instance_order)}

    def instance_keys(self, iid: str) -> list[StateKey]:
        return sorted((k for k in self.states if k[0] == iid), key=lambda k: sid_order(k[1]))

    def marked_keys(self, iid: str | None = None) -> list[StateKey]:
        r = self.rank
        ks = [k for k in self.marked if iid is None or k[0] == iid]
        return sorted(ks, key=lambda k: key_order(k, r))

    def edges(self) -> Iterator[tuple[StateKey, str, StateKey]]:
        for k in self.marked_keys():
            for lab in self.labels:
                for t in self.transitions.get(k, {}).get(lab, []):
                    yield (k, lab, t)

    def successors(self, key: StateKey, label: str) -> list[StateKey]:
        return self.transitions.get(key, {}).get(label, [])

    def graph(self) -> "DataGraph":
        return DataGraph(sorted(self.states, key=lambda k: key_order(k, self.rank)), list(self.edges()))

    def restrict(self, instances: Iterable[str]) -> "Dataset":
        keep = set(instances)
        return Dataset({k: v for k, v in self.states.items() if k[0] in keep},
                       {k for k in self.marked if k[0] in keep},
                       list(self.labels),
                       {k: v for k, v in self.transitions.items() if k[0] in keep},
                       [i for i in self.instance_order if i in keep])

    def extend(self, delta: Iterable[StateKey], full: "Dataset") -> "Dataset":
        """T ∪ Δ, S ∪ Δ ∪ successors of Δ, F gains the Δ successor multisets (all labels)."""
        out = Dataset(dict(self.states), set(self.marked), list(full.labels),
                      {k: dict(v) for k, v in self.transitions.items()}, list(full.instance_order))
        for k in delta:
            out.states[k] = full.states[k]
            out.marked.add(k)
            out.transitions[k] = {lab: list(full.successors(k, lab)) for lab in full.labels
                                  if full.successors(k, lab)}
            for succ in out.transitions[k].values():
                for t in succ:
                    out.states[t] = full.states[t]
        return out

    @property
    def instances_present(self) -> list[str]:
        present = {k[0] for k in self.states}
        return [i for i in self.instance_order if i in present]


@dataclass
class DataGraph:
    vertices: list[StateKey]
    edges: list[tuple[StateKey, str, StateKey]]


# ---------------------------------------------------------------- Theorem 1 check

@dataclass
class IsoResult:
    isomorphic: bool
    mapping: dict[StateKey, PlanningState] = field(default_factory=dict)
    reason: str = ""
    witness: tuple = ()

    def __bool__(self):
        return self.isomorphic


def check_isomorphism(dataset: Dataset, gd: GroundedDomain, init_ids: dict[str, str] | None = None) -> IsoResult:
    """Compare the data graph with the reachable graph of the learned domain, per instance.

    Requires T = S. The initial state of each instance is the lowest state id unless
    ``init_ids`` says otherwise.
    """
    if set(dataset.marked) != set(dataset.states):
        raise GroundingError("isomorphism check needs T = S")
    mapping: dict[StateKey, PlanningState] = {}
    for iid in dataset.instances_present:
        keys = dataset.instance_keys(iid)
        h = {}
        inverse: dict[PlanningState, StateKey] = {}
        for k in keys:
            hs = abstract(gd, dataset.states[k])
            if hs in inverse:
                return IsoResult(False, {}, "h not injective", (inverse[hs], k))
            inverse[hs] = k
            h[k] = hs
        s0 = (iid, init_ids[iid]) if init_ids else keys[0]
        inst = Instance(h[s0].objects, h[s0], frozenset())
        try:
            g = enumerate_reachable(gd.domain, inst, cap=max(10 * len(keys), 1000))
        except CapExceeded:
            return IsoResult(False, {}, "model reaches more states than the data graph has", (iid,))
        if set(g.nodes) != set(h.values()):
            extra = [n for n in g.nodes if n not in inverse]
            if extra:
                return IsoResult(False, {}, "model reaches a state outside h(S)", (iid, g.nodes.index(extra[0])))
            missing = [k for k in keys if h[k] not in set(g.nodes)]
            return IsoResult(False, {}, "data state unreachable in model", (missing[0],))
        for k in keys:
            for lab in dataset.labels:
                data = Counter(h[t] for t in dataset.successors(k, lab))
                model = Counter(t for _, t in successors(gd.domain, h[k], lab)) if lab in gd.domain.labels else Counter()
                if data != model:
                    return IsoResult(False, {}, "labeled edge multisets differ", (k, lab))
        mapping.update(h)
    return IsoResult(True, mapping)


# ---------------------------------------------------------------- text format

NEG = "¬"


def _split_top(text: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur.strip())
            cur = ""
        else:
            cur += ch
    if cur.strip():
        out.append(cur.strip())
    return out


def format_literal(lit: Literal, gd: GroundedDomain) -> str:
    name = gd.display(lit.pred)
    args = "" if not lit.args else "(" + ",".join(str(a) for a in lit.args) + ")"
    return ("" if lit.positive else NEG) + name + args


def cost_of(domain: Domain) -> tuple[int, int, int, int, int]:
    c1 = sum(1 + s.arity for s in domain.schemas)
    c2 = sum(1 + p.arity for p in domain.predicates if not p.static)
    c3 = sum(1 + p.arity for p in domain.predicates if p.static)
    c4 = sum(len(s.effects) for s in domain.schemas)
    c5 = sum(len(s.static_atoms) + len(s.preconditions) for s in domain.schemas)
    return (c1, c2, c3, c4, c5)


def format_domain(gd: GroundedDomain, stats: str | None = None) -> str:
    d = gd.domain
    lines = [f"Optimization: ({','.join(str(c) for c in cost_of(d))})"]
    if d.constants:
        lines.append(f"{len(d.constants)} constant(s): {', '.join(d.constants)}")
    lines.append(f"{len(d.predicates)} predicate(s): "
                 + ", ".join(f"{gd.display(p.name)}/{p.arity}" for p in d.predicates))
    statics = [p for p in d.predicates if p.static]
    if statics:
        lines.append(f"{len(statics)} static predicate(s): "
                     + ", ".join(f"{gd.display(p.name)}/{p.arity}" for p in statics))
    lines.append("")
    for s in d.schemas:
        lines.append(f"{s.label}({','.join(str(i) for i in range(1, s.arity + 1))}):")
        if s.static_atoms:
            lines.append("  static: " + ", ".join(format_literal(l, gd) for l in s.static_atoms))
        if s.preconditions:
            lines.append("  pre: " + ", ".join(format_literal(l, gd) for l in s.preconditions))
        lines.append("  eff: " + ", ".join(format_literal(l, gd) for l in s.effects))
    if stats:
        lines += ["", stats]
    return "\n".join(lines) + "\n"


_HEADER = re.compile(r"^(\d+)\s+(constant|predicate|static predicate)\(s\):\s*(.*)$")
_SCHEMA = re.compile(r"^([A-Za-z_][\w\-]*)\(([\d,\s]*)\):\s*$")


def parse_domain(text: str, name: str = "learned") -> GroundedDomain:
    """Parse the learned-domain listing format (``¬``, ``-`` or ``not `` mark negation)."""
    constants: list[str] = []
    preds: list[tuple[DLExpr, int]] = []
    static_exprs: set[DLExpr] = set()
    schemas: list[dict] = []
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        raw = lines[i]
        line = raw.strip()
        i += 1
        if not line or line.startswith("Optimization:") or line.startswith("#"):
            continue
        # continuation lines of a wrapped literal or predicate list
        while i < len(lines) and lines[i].startswith("      ") and not lines[i].strip().endswith(":") \
                and not re.match(r"^\s*(static|pre|eff):", lines[i]):
            line += " " + lines[i].strip()
            i += 1
        m = _HEADER.match(line)
        if m:
            kind, body = m.group(2), m.group(3)
            items = _split_top(body)
            if kind == "constant":
                constants = items
            else:
                for it in items:
                    if "/" in it and it.rsplit("/", 1)[1].isdigit():
                        e, ar = it.rsplit("/", 1)
                        expr, arity = parse_expr(e), int(ar)
                    else:
                        expr = parse_expr(it)
                        arity = expr.arity
                    if kind == "predicate":
                        preds.append((expr, arity))
                    else:
                        static_exprs.add(expr)
            continue
        m = _SCHEMA.match(line)
        if m:
            args = [a for a in m.group(2).replace(" ", "").split(",") if a]
            schemas.append({"label": m.group(1), "arity": len(args), "static": [], "pre": [], "eff": []})
            continue
        m = re.match(r"^(static|pre|eff):\s*(.*)$", line)
        if m and schemas:
            schemas[-1][m.group(1)] += _split_top(m.group(2))
            continue
        raise GroundingError(f"line {i}: cannot parse {raw!r}")

    names = {}
    predicates = []
    sigma = {}
    for idx, (expr, arity) in enumerate(preds):
        pname = f"p{idx}"
        names[expr] = pname
        sigma[pname] = expr
        predicates.append(Predicate(pname, arity, expr in static_exprs))
    for e in static_exprs:
        if e not in names:
            raise GroundingError(f"static predicate {e} is not listed among predicates")

    def lit(text: str) -> Literal:
        t = text.strip()
        pos = True
        while True:
            if t.startswith(NEG):
                pos, t = not pos, t[len(NEG):].strip()
            elif t.startswith("-"):
                pos, t = not pos, t[1:].strip()
            elif t.startswith("not "):
                pos, t = not pos, t[4:].strip()
            else:
                break
        depth, cut = 0, len(t)
        for j, ch in enumerate(t):
            if ch == "[":
                depth += 1
            elif ch == "]":
                depth -= 1
            elif ch == "(" and depth == 0:
                cut = j
                break
        expr = parse_expr(t[:cut])
        if expr not in names:
            raise GroundingError(f"literal {text!r} uses an unlisted predicate")
        args: tuple = ()
        if cut < len(t):
            inner = t[cut + 1:-1] if t.endswith(")") else None
            if inner is None:
                raise GroundingError(f"bad literal {text!r}")
            args = tuple(int(a) if a.strip().isdigit() else a.strip() for a in inner.split(",") if a.strip())
        return Literal(names[expr], args, pos)

    out = []
    for s in schemas:
        out.append(Schema(s["label"], s["arity"], tuple(lit(x) for x in s["static"]),
                          tuple(lit(x) for x in s["pre"]), tuple(lit(x) for x in s["eff"])))
    return GroundedDomain(Domain(name, tuple(predicates), tuple(out), tuple(constants)), sigma)
