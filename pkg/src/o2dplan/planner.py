"""Planning with learned domains and replaying plans back into O2D scenes.

``plan_bfs`` is breadth-first and optimal in plan length. ``plan_gbfs_hadd``
is greedy best-first search on the additive heuristic; negative preconditions
and negative goal literals cost nothing in the heuristic.
"""

from __future__ import annotations

import heapq
import itertools
import re
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable

from .grounding import GroundedDomain, abstract
from .o2d_core import O2DState
from .strips_core import (CapExceeded, Domain, Instance, PlanningState, StripsError, applicable_bindings,
                          apply, ground_tuples)


class PlanError(ValueError):
    pass


class ReplayMismatch(PlanError):
    def __init__(self, index: int, message: str):
        super().__init__(f"step {index}: {message}")
        self.index = index


class ReplayAmbiguity(ReplayMismatch):
    pass


@dataclass(frozen=True)
class Plan:
    steps: tuple[tuple[str, tuple[str, ...]], ...] = ()

    def __len__(self):
        return len(self.steps)

    @property
    def length(self) -> int:
        return len(self.steps)

    def to_text(self) -> str:
        return "".join(f"{lab}({','.join(args)})\n" for lab, args in self.steps)


_STEP = re.compile(r"^\s*([A-Za-z_][\w\-]*)\s*\(([^()]*)\)\s*$")


def parse_plan(text: str) -> Plan:
    steps = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split(";")[0].strip()
        if not line:
            continue
        m = _STEP.match(line)
        if not m:
            raise PlanError(f"line {n}: cannot parse {line!r}")
        args = tuple(a.strip() for a in m.group(2).split(",") if a.strip())
        steps.append((m.group(1), args))
    return Plan(tuple(steps))


def _next_states(domain: Domain, state: PlanningState):
    for sch in domain.schemas:
        for b in applicable_bindings(sch, state, domain.constants):
            yield (sch.label, b), apply(sch, b, state, domain.constants, check=False)


def _extract(parent: dict, s: PlanningState) -> Plan:
    steps = []
    while parent[s] is not None:
        prev, step = parent[s]
        steps.append(step)
        s = prev
    return Plan(tuple(reversed(steps)))


def plan_bfs(domain: Domain, instance: Instance, cap: int = 1_000_000) -> Plan | None:
    """Shortest plan, or None when the goal is unreachable."""
    s0 = instance.init
    parent: dict = {s0: None}
    if instance.is_goal(s0):
        return Plan()
    queue = deque([s0])
    while queue:
        s = queue.popleft()
        for step, t in _next_states(domain, s):
            if t in parent:
                continue
            parent[t] = (s, step)
            if instance.is_goal(t):
                return _extract(parent, t)
            if len(parent) > cap:
                raise CapExceeded(f"search space exceeds {cap} states")
            queue.append(t)
    return None


# ---------------------------------------------------------------- h_add

@dataclass
class _GroundAction:
    pre: tuple
    add: tuple


def _ground_actions(domain: Domain, instance: Instance) -> list[_GroundAction]:
    """Ground actions whose static atoms hold; fluent preconditions are left open."""
    consts = set(domain.constants)
    objs = sorted(o for o in instance.objects if o not in consts)
    init = instance.init
    out = []
    for sch in domain.schemas:
        for b in itertools.permutations(objs, sch.arity):
            if not all((l.ground(b) in init.atoms) == l.positive for l in sch.static_atoms):
                continue
            pre = tuple(l.ground(b) for l in sch.preconditions if l.positive)
            add = tuple(l.ground(b) for l in sch.effects if l.positive)
            out.append(_GroundAction(pre, add))
    return out


def h_add(actions: list[_GroundAction], state: PlanningState, goal: Iterable) -> float:
    cost = {a: 0.0 for a in state.atoms}
    changed = True
    while changed:
        changed = False
        for act in actions:
            c = 0.0
            for p in act.pre:
                v = cost.get(p)
                if v is None:
                    break
                c += v
            else:
                c += 1
                for q in act.add:
                    if c < cost.get(q, float("inf")):
                        cost[q] = c
                        changed = True
    total = 0.0
    for atom, positive in goal:
        if not positive:
            continue
        v = cost.get(atom)
        if v is None:
            return float("inf")
        total += v
    return total


def plan_gbfs_hadd(domain: Domain, instance: Instance, cap: int = 1_000_000) -> Plan | None:
    """Greedy best-first search on h_add; some plan, not necessarily a shortest one."""
    s0 = instance.init
    if instance.is_goal(s0):
        return Plan()
    actions = _ground_actions(domain, instance)
    goal = list(instance.goal)
    parent: dict = {s0: None}
    counter = itertools.count()
    heap = [(h_add(actions, s0, goal), next(counter), s0)]
    while heap:
        _, _, s = heapq.heappop(heap)
        for step, t in _next_states(domain, s):
            if t in parent:
                continue
            parent[t] = (s, step)
            if instance.is_goal(t):
                return _extract(parent, t)
            if len(parent) > cap:
                raise CapExceeded(f"search space exceeds {cap} states")
            h = h_add(actions, t, goal)
            if h != float("inf"):
                heapq.heappush(heap, (h, next(counter), t))
    return None


@dataclass
class Validation:
    ok: bool
    failed_step: int | None = None
    reason: str = ""
    final: PlanningState | None = None


def validate(domain: Domain, instance: Instance, plan: Plan) -> Validation:
    """Execute the plan from Init; every step must apply and the last state must satisfy Goal."""
    s = instance.init
    for i, (lab, b) in enumerate(plan.steps):
        try:
            s = apply(domain.schema(lab), b, s, domain.constants)
        except (StripsError, KeyError) as exc:
            return Validation(False, i, str(exc), s)
    if not instance.is_goal(s):
        return Validation(False, None, "goal not reached", s)
    return Validation(True, None, "", s)


# ---------------------------------------------------------------- simulator and replay

@dataclass
class Simulator:
    """Successor oracle over O2D states, backed by a hidden domain and a renderer."""

    domain: Domain
    render: object                         # callable PlanningState -> O2DState
    hidden: dict[O2DState, PlanningState] = field(default_factory=dict)

    @classmethod
    def from_rendered(cls, rd) -> "Simulator":
        hidden = {rd.dataset.states[k]: s for k, s in rd.hidden.items()}
        return cls(rd.domain, rd.render, hidden)

    def hidden_state(self, s: O2DState) -> PlanningState:
        try:
            return self.hidden[s]
        except KeyError:
            raise PlanError("state unknown to the simulator") from None

    def successors(self, s: O2DState, label: str) -> Counter:
        hs = self.hidden_state(s)
        if label not in self.domain.labels:
            return Counter()
        sch = self.domain.schema(label)
        out = Counter()
        for b in applicable_bindings(sch, hs, self.domain.constants):
            t = apply(sch, b, hs, self.domain.constants, check=False)
            o = self.render(t)
            self.hidden.setdefault(o, t)
            out[o] += 1
        return out

    def hidden_instance(self, s0: O2DState, sg: O2DState) -> Instance:
        """Instance of the hidden domain whose goal is the complete state behind ``sg``."""
        h0, hg = self.hidden_state(s0), self.hidden_state(sg)
        goal = set()
        for p in self.domain.predicates:
            for t in ground_tuples(h0.objects, p.arity):
                goal.add(((p.name, t), (p.name, t) in hg.atoms))
        return Instance(h0.objects, h0, frozenset(goal))


def replay(plan: Plan, gd: GroundedDomain, sim: Simulator, s0: O2DState) -> list[O2DState]:
    """O2D trajectory realizing the plan; each step picks the successor whose abstraction matches."""
    traj = [s0]
    cur = s0
    dom = gd.domain
    for i, (lab, b) in enumerate(plan.steps):
        try:
            want = apply(dom.schema(lab), b, abstract(gd, cur), dom.constants)
        except (StripsError, KeyError) as exc:
            raise ReplayMismatch(i, f"plan step not applicable in the abstraction: {exc}") from None
        hits = [t for t in sim.successors(cur, lab) if abstract(gd, t) == want]
        if not hits:
            raise ReplayMismatch(i, f"no {lab}-successor matches the planned state")
        if len(hits) > 1:
            raise ReplayAmbiguity(i, f"{len(hits)} {lab}-successors match the planned state")
        cur = hits[0]
        traj.append(cur)
    return traj
