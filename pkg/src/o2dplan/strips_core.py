"""Lifted STRIPS with negative preconditions: schemas, grounding, successors, PDDL."""

from __future__ import annotations

import itertools
import re
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

Arg = int | str  # int: schema variable (1-based); str: constant
Atom = tuple[str, tuple[str, ...]]


class StripsError(ValueError):
    pass


class CapExceeded(RuntimeError):
    """A configured node or time cap was hit."""


@dataclass(frozen=True, order=True)
class Literal:
    pred: str
    args: tuple[Arg, ...] = ()
    positive: bool = True

    def variables(self) -> set[int]:
        return {a for a in self.args if isinstance(a, int)}

    def ground(self, binding: Sequence[str]) -> Atom:
        return (self.pred, tuple(binding[a - 1] if isinstance(a, int) else a for a in self.args))

    def negate(self) -> "Literal":
        return Literal(self.pred, self.args, not self.positive)

    def atom_key(self):
        return (self.pred, self.args)

    def __str__(self):
        s = f"{self.pred}({','.join(str(a) for a in self.args)})"
        return s if self.positive else "¬" + s


@dataclass(frozen=True)
class Predicate:
    name: str
    arity: int
    static: bool = False


@dataclass(frozen=True)
class Schema:
    label: str
    arity: int
    static_atoms: tuple[Literal, ...] = ()
    preconditions: tuple[Literal, ...] = ()
    effects: tuple[Literal, ...] = ()

    def __post_init__(self):
        for lit in self.static_atoms + self.preconditions + self.effects:
            for a in lit.args:
                if isinstance(a, int) and not 1 <= a <= self.arity:
                    raise StripsError(f"{self.label}: variable {a} outside 1..{self.arity}")
            if len(set(lit.args)) != len(lit.args):
                raise StripsError(f"{self.label}: repeated argument in {lit}")
        keys = Counter(lit.atom_key() for lit in self.effects)
        if any(v > 1 for v in keys.values()):
            raise StripsError(f"{self.label}: atom with both polarities in effects")
        if not self.effects:
            raise StripsError(f"{self.label}: effects must be non-empty")

    @property
    def all_conditions(self) -> tuple[Literal, ...]:
        return self.static_atoms + self.preconditions


@dataclass(frozen=True)
class Domain:
    name: str
    predicates: tuple[Predicate, ...]
    schemas: tuple[Schema, ...]
    constants: tuple[str, ...] = ()

    def __post_init__(self):
        labels = [s.label for s in self.schemas]
        if len(set(labels)) != len(labels):
            raise StripsError("one schema per action label")
        arity = {p.name: p.arity for p in self.predicates}
        static = {p.name for p in self.predicates if p.static}
        for s in self.schemas:
            for lit in s.all_conditions + s.effects:
                if lit.pred not in arity:
                    raise StripsError(f"{s.label}: unknown predicate {lit.pred}")
                if len(lit.args) != arity[lit.pred]:
                    raise StripsError(f"{s.label}: arity mismatch in {lit}")
                for a in lit.args:
                    if isinstance(a, str) and a not in self.constants:
                        raise StripsError(f"{s.label}: {a} is not a domain constant")
            for lit in s.effects:
                if lit.pred in static:
                    raise StripsError(f"{s.label}: effect on static predicate {lit.pred}")

    def schema(self, label: str) -> Schema:
        for s in self.schemas:
            if s.label == label:
                return s
        raise KeyError(label)

    @property
    def labels(self) -> list[str]:
        return [s.label for s in self.schemas]

    def predicate(self, name: str) -> Predicate:
        for p in self.predicates:
            if p.name == name:
                return p
        raise KeyError(name)


@dataclass(frozen=True)
class PlanningState:
    """Complete valuation: ``atoms`` are the true ground atoms, all others are false."""

    objects: frozenset[str]
    atoms: frozenset[Atom]

    def holds(self, atom: Atom, positive: bool = True) -> bool:
        return (atom in self.atoms) == positive


@dataclass(frozen=True)
class Instance:
    objects: frozenset[str]
    init: PlanningState
    goal: frozenset[tuple[Atom, bool]]

    def is_goal(self, state: PlanningState) -> bool:
        return all((a in state.atoms) == v for a, v in self.goal)


def ground_tuples(objects: Iterable[str], arity: int, constants: Iterable[str] = ()) -> list[tuple[str, ...]]:
    """Tuples of At(P): distinct objects (constants included) of the given arity."""
    objs = sorted(set(objects) | set(constants))
    if arity == 0:
        return [()]
    return list(itertools.permutations(objs, arity))


def complete_state(objects: Iterable[str], atoms: Iterable[Atom]) -> PlanningState:
    return PlanningState(frozenset(objects), frozenset(atoms))


# ---------------------------------------------------------------- applicability

def _literal_ok(lit: Literal, binding: Sequence[str], state: PlanningState) -> bool:
    return (lit.ground(binding) in state.atoms) == lit.positive


def applicable_bindings(schema: Schema, state: PlanningState, constants: Iterable[str] = ()) -> list[tuple[str, ...]]:
    """All bindings to distinct non-constant objects satisfying static atoms and preconditions.

    Conditions are split by the variables they mention; unary conditions filter
    domains, pairwise conditions are checked as soon as both variables are bound,
    so no full ``|O|^k`` product is built.
    """
    consts = set(constants)
    objs = sorted(o for o in state.objects if o not in consts)
    k = schema.arity
    ground_lits, unary, pairwise = [], {v: [] for v in range(1, k + 1)}, {}
    for lit in schema.all_conditions:
        vs = sorted(lit.variables())
        if not vs:
            ground_lits.append(lit)
        elif len(vs) == 1:
            unary[vs[0]].append(lit)
        else:
            pairwise.setdefault((vs[0], vs[1]), []).append(lit)
    if not all(_literal_ok(lit, (), state) for lit in ground_lits):
        return []
    if k == 0:
        return [()]
    dummy = [None] * k
    domains = []
    for v in range(1, k + 1):
        dom = []
        for o in objs:
            dummy[v - 1] = o
            if all(_literal_ok(lit, dummy, state) for lit in unary[v]):
                dom.append(o)
        dummy[v - 1] = None
        domains.append(dom)
    checks_at = {v: [(a, lits) for (a, b), lits in pairwise.items() if b == v] for v in range(1, k + 1)}
    out: list[tuple[str, ...]] = []
    cur: list[str] = [None] * k

    def rec(v: int):
        if v > k:
            out.append(tuple(cur))
            return
        for o in domains[v - 1]:
            if o in cur[: v - 1]:
                continue
            cur[v - 1] = o
            if all(_literal_ok(lit, cur, state) for _, lits in checks_at[v] for lit in lits):
                rec(v + 1)
        cur[v - 1] = None

    rec(1)
    return out


def naive_applicable_bindings(schema: Schema, state: PlanningState, constants: Iterable[str] = ()) -> list[tuple[str, ...]]:
    consts = set(constants)
    objs = sorted(o for o in state.objects if o not in consts)
    return [b for b in itertools.permutations(objs, schema.arity)
            if all(_literal_ok(lit, b, state) for lit in schema.all_conditions)]


def apply(schema: Schema, binding: Sequence[str], state: PlanningState,
          constants: Iterable[str] = (), check: bool = True) -> PlanningState:
    """Successor under frame semantics."""
    if check:
        consts = set(constants)
        if len(binding) != schema.arity or len(set(binding)) != len(binding) \
                or any(o in consts or o not in state.objects for o in binding) \
                or not all(_literal_ok(lit, binding, state) for lit in schema.all_conditions):
            raise StripsError(f"{schema.label}{tuple(binding)} not applicable")
    add = {lit.ground(binding) for lit in schema.effects if lit.positive}
    dele = {lit.ground(binding) for lit in schema.effects if not lit.positive}
    return PlanningState(state.objects, frozenset((state.atoms - dele) | add))


def successors(domain: Domain, state: PlanningState, label: str) -> list[tuple[tuple[str, ...], PlanningState]]:
    sch = domain.schema(label)
    return [(b, apply(sch, b, state, domain.constants, check=False))
            for b in applicable_bindings(sch, state, domain.constants)]


def successors_by_label(domain: Domain, state: PlanningState, label: str) -> Counter:
    """Multiset of successors over all applicable bindings."""
    if label not in domain.labels:
        return Counter()
    return Counter(s for _, s in successors(domain, state, label))


@dataclass
class LabeledGraph:
    nodes: list[PlanningState] = field(default_factory=list)
    edges: list[tuple[int, str, int]] = field(default_factory=list)
    bindings: list[tuple[str, ...]] = field(default_factory=list)

    def dump(self) -> str:
        lines = [f"node {i}" for i in range(len(self.nodes))]
        lines += [f"edge {a} {lab} {b}" for a, lab, b in self.edges]
        return "\n".join(lines) + "\n"


def enumerate_reachable(domain: Domain, instance: Instance, cap: int = 200_000) -> LabeledGraph:
    """BFS closure from Init under all labels; deterministic node numbering."""
    g = LabeledGraph()
    index = {instance.init: 0}
    g.nodes.append(instance.init)
    queue = deque([0])
    while queue:
        i = queue.popleft()
        s = g.nodes[i]
        for sch in domain.schemas:
            for b in applicable_bindings(sch, s, domain.constants):
                t = apply(sch, b, s, domain.constants, check=False)
                j = index.get(t)
                if j is None:
                    if len(g.nodes) >= cap:
                        raise CapExceeded(f"reachable space exceeds {cap} states")
                    j = index[t] = len(g.nodes)
                    g.nodes.append(t)
                    queue.append(j)
                g.edges.append((i, sch.label, j))
                g.bindings.append(b)
    return g


# ---------------------------------------------------------------- PDDL

_PDDL_NAME = re.compile(r"[^A-Za-z0-9_\-]")


def pddl_name(name: str) -> str:
    s = _PDDL_NAME.sub("_", name)
    return s if s[:1].isalpha() else "p_" + s


def _pddl_lit(lit: Literal, names: dict[str, str]) -> str:
    args = " ".join(f"?x{a}" if isinstance(a, int) else pddl_name(a) for a in lit.args)
    atom = f"({names[lit.pred]}{' ' + args if args else ''})"
    return atom if lit.positive else f"(not {atom})"


def export_pddl(domain: Domain, instance: Instance | None = None, problem_name: str = "instance",
                comments: dict[str, str] | None = None) -> str:
    """PDDL text with :negative-preconditions.

    Parameters of a schema are forced to be distinct non-constant objects with
    ``(not (= ...))`` conditions, which keeps off-the-shelf planners faithful to
    the binding semantics used here.
    """
    names = {p.name: pddl_name(p.name) for p in domain.predicates}
    dname = pddl_name(domain.name)
    out = [f"(define (domain {dname})",
           "  (:requirements :strips :negative-preconditions :equality)"]
    if domain.constants:
        out.append(f"  (:constants {' '.join(pddl_name(c) for c in domain.constants)})")
    out.append("  (:predicates")
    for p in domain.predicates:
        args = " ".join(f"?x{i}" for i in range(1, p.arity + 1))
        note = f"  ; {comments[p.name]}" if comments and p.name in comments else ""
        static = " static" if p.static else ""
        tail = f"{note}{';' if not note and static else ''}{static}" if static else note
        out.append(f"    ({names[p.name]}{' ' + args if args else ''}){tail}")
    out.append("  )")
    for s in domain.schemas:
        params = " ".join(f"?x{i}" for i in range(1, s.arity + 1))
        conds = [_pddl_lit(l, names) for l in s.static_atoms + s.preconditions]
        for i, j in itertools.combinations(range(1, s.arity + 1), 2):
            conds.append(f"(not (= ?x{i} ?x{j}))")
        for i in range(1, s.arity + 1):
            for c in domain.constants:
                conds.append(f"(not (= ?x{i} {pddl_name(c)}))")
        out.append(f"  (:action {pddl_name(s.label)}")
        out.append(f"    :parameters ({params})")
        out.append(f"    :precondition (and {' '.join(conds)})")
        out.append(f"    :effect (and {' '.join(_pddl_lit(l, names) for l in s.effects)}))")
    out.append(")")
    text = "\n".join(out) + "\n"
    if instance is None:
        return text
    objs = sorted(o for o in instance.objects if o not in domain.constants)
    prob = [f"(define (problem {pddl_name(problem_name)})",
            f"  (:domain {dname})",
            f"  (:objects {' '.join(pddl_name(o) for o in objs)})",
            "  (:init"]
    for (p, args) in sorted(instance.init.atoms):
        prob.append(f"    ({names[p]}{' ' + ' '.join(pddl_name(a) for a in args) if args else ''})")
    prob.append("  )")
    goal = []
    for (p, args), v in sorted(instance.goal):
        atom = f"({names[p]}{' ' + ' '.join(pddl_name(a) for a in args) if args else ''})"
        goal.append(atom if v else f"(not {atom})")
    prob.append(f"  (:goal (and {' '.join(goal)}))")
    prob.append(")")
    return text + "\n" + "\n".join(prob) + "\n"


def _sexprs(text: str):
    text = re.sub(r";[^\n]*", "", text)
    toks = re.findall(r"\(|\)|[^\s()]+", text)
    stack: list[list] = [[]]
    for t in toks:
        if t == "(":
            stack.append([])
        elif t == ")":
            if len(stack) < 2:
                raise StripsError("unbalanced parentheses")
            last = stack.pop()
            stack[-1].append(last)
        else:
            stack[-1].append(t.lower())
    if len(stack) != 1:
        raise StripsError("unbalanced parentheses")
    return stack[0]


def parse_pddl(text: str) -> tuple[Domain, Instance | None]:
    """Parse the subset of PDDL produced by :func:`export_pddl`."""
    forms = _sexprs(text)
    dom_form = next(f for f in forms if f[0] == "define" and f[1][0] == "domain")
    name = dom_form[1][1]
    constants: tuple[str, ...] = ()
    preds: list[Predicate] = []
    schemas: list[Schema] = []
    for sec in dom_form[2:]:
        head = sec[0]
        if head == ":constants":
            constants = tuple(sec[1:])
        elif head == ":predicates":
            for p in sec[1:]:
                preds.append(Predicate(p[0], len(p) - 1))
        elif head == ":action":
            label = sec[1]
            params = sec[sec.index(":parameters") + 1]
            var = {v: i + 1 for i, v in enumerate(params)}

            def lits(form):
                items = form[1:] if form and form[0] == "and" else ([form] if form else [])
                res = []
                for it in items:
                    pos = True
                    if it[0] == "not":
                        pos, it = False, it[1]
                    if it[0] == "=":
                        continue
                    res.append(Literal(it[0], tuple(var.get(a, a) for a in it[1:]), pos))
                return tuple(res)

            pre = lits(sec[sec.index(":precondition") + 1])
            eff = lits(sec[sec.index(":effect") + 1])
            schemas.append(Schema(label, len(params), (), pre, eff))
    effected = {l.pred for s in schemas for l in s.effects}
    preds = [Predicate(p.name, p.arity, p.name not in effected) for p in preds]
    domain = Domain(name, tuple(preds), tuple(schemas), constants)
    prob_form = next((f for f in forms if f[0] == "define" and f[1][0] == "problem"), None)
    if prob_form is None:
        return domain, None
    objs: set[str] = set(constants)
    init: set[Atom] = set()
    goal: set[tuple[Atom, bool]] = set()
    for sec in prob_form[2:]:
        if sec[0] == ":objects":
            objs |= set(sec[1:])
        elif sec[0] == ":init":
            init |= {(a[0], tuple(a[1:])) for a in sec[1:]}
        elif sec[0] == ":goal":
            g = sec[1]
            items = g[1:] if g and g[0] == "and" else [g]
            for it in items:
                pos = True
                if it[0] == "not":
                    pos, it = False, it[1]
                goal.add(((it[0], tuple(it[1:])), pos))
    return domain, Instance(frozenset(objs), PlanningState(frozenset(objs), frozenset(init)), frozenset(goal))
