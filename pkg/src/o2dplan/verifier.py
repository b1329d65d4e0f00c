"""Independent C1/C2 verification and the incremental learning loop.

Nothing here looks inside the learner: a candidate is judged only through its
grounded domain, the abstraction h and plain STRIPS successor generation.
"""

from __future__ import annotations

import io
import logging
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .grounding import Dataset, GroundedDomain, StateKey, abstract, sid_order
from .learner import Hyperparams, LearnerCap, NoSolution, learn_full
from .predicate_pool import PredicatePool
from .strips_core import successors_by_label

log = logging.getLogger(__name__)

OK, C1_VIOLATION, C2_VIOLATION = "ok", "c1_violation", "c2_violation"
DELTA_LIMIT = 10


@dataclass
class Verdict:
    status: str
    delta: list[StateKey] = field(default_factory=list)
    failing_instance: str | None = None
    detail: str = ""

    def __post_init__(self):
        if (self.status == OK) != (not self.delta):
            raise ValueError("a verdict is ok exactly when its delta is empty")

    @property
    def ok(self) -> bool:
        return self.status == OK


def _check_instance(gd: GroundedDomain, data: Dataset, iid: str, c1_all: bool) -> Verdict | None:
    keys = data.instance_keys(iid)
    h = {k: abstract(gd, data.states[k]) for k in keys}
    scope = keys if c1_all else [k for k in keys if k in data.marked]
    first: dict = {}
    for k in scope:
        other = first.setdefault(h[k].atoms, k)
        if other != k:
            return Verdict(C1_VIOLATION, [other, k], iid, f"{other[1]} and {k[1]} share an abstraction")
    bad = []
    labels = list(dict.fromkeys(list(data.labels) + gd.domain.labels))
    for k in keys:
        if k not in data.marked:
            continue
        for lab in labels:
            want = Counter(h[t].atoms if t in h else abstract(gd, data.states[t]).atoms
                           for t in data.successors(k, lab))
            if lab in gd.domain.labels:
                got = Counter({s.atoms: c for s, c in successors_by_label(gd.domain, h[k], lab).items()})
            else:
                got = Counter()
            if want != got:
                bad.append(k)
                break
    if bad:
        bad.sort(key=lambda k: sid_order(k[1]))
        return Verdict(C2_VIOLATION, bad[:DELTA_LIMIT], iid, f"{len(bad)} state(s) violate C2")
    return None


def verify(gd: GroundedDomain, data: Dataset, c1_all: bool = True) -> Verdict:
    """Scan instances in order; the first failing instance decides the verdict.

    With ``c1_all`` C1 is checked over every pair of states of an instance,
    not only the marked ones.
    """
    for iid in data.instances_present:
        v = _check_instance(gd, data, iid, c1_all)
        if v is not None:
            return v
    return Verdict(OK)


# ---------------------------------------------------------------- incremental loop

class BudgetExhausted(RuntimeError):
    pass


@dataclass
class TraceRecord:
    iteration: int
    marked: int
    states: int
    instances: int
    outcome: str
    cost: tuple | None
    learn_seconds: float
    verify_seconds: float


@dataclass
class IncrementalTrace:
    records: list[TraceRecord] = field(default_factory=list)

    def to_tsv(self) -> str:
        out = io.StringIO()
        out.write("iter\tinstances\tmarked\tstates\toutcome\tcost\tlearn_s\tverify_s\n")
        for r in self.records:
            cost = "" if r.cost is None else "(" + ",".join(map(str, r.cost)) + ")"
            out.write(f"{r.iteration}\t{r.instances}\t{r.marked}\t{r.states}\t{r.outcome}\t"
                      f"{cost}\t{r.learn_seconds:.3f}\t{r.verify_seconds:.3f}\n")
        return out.getvalue()


@dataclass
class IncrementalResult:
    grounded: GroundedDomain
    cost: tuple
    dataset: Dataset
    trace: IncrementalTrace
    constants: list[str]


def empty_like(data: Dataset) -> Dataset:
    return Dataset({}, set(), list(data.labels), {}, list(data.instance_order))


def incremental_learn(data: Dataset, pool: PredicatePool, beta: Hyperparams = Hyperparams(),
                      max_iterations: int = 100, constants: Iterable[str] | None = None,
                      start: Dataset | None = None, name: str = "learned") -> IncrementalResult:
    """Learn on a growing marked subset until the domain verifies on ``data``."""
    if not any(data.successors(k, lab) for k in data.marked for lab in data.labels):
        raise ValueError("the data pool has no transitions, so there is nothing to learn")
    cur = empty_like(data) if start is None else start
    trace = IncrementalTrace()
    consts = None if constants is None else list(constants)
    for it in range(1, max_iterations + 1):
        t0 = time.monotonic()
        rec = TraceRecord(it, len(cur.marked), len(cur.states),
                          len({k[0] for k in cur.marked}), "", None, 0.0, 0.0)
        trace.records.append(rec)
        try:
            res = learn_full(cur, pool, beta, consts, name)
        except NoSolution as exc:
            rec.outcome = "no_solution"
            rec.learn_seconds = time.monotonic() - t0
            raise NoSolution(f"{exc} (iteration {it}); a larger pool bound m may help") from exc
        except LearnerCap:
            rec.outcome = "cap"
            rec.learn_seconds = time.monotonic() - t0
            raise
        rec.learn_seconds = time.monotonic() - t0
        rec.cost = res.cost
        t1 = time.monotonic()
        v = verify(res.grounded, data)
        rec.verify_seconds = time.monotonic() - t1
        rec.outcome = v.status
        log.info("iter %d |T|=%d cost=%s %s", it, len(cur.marked), res.cost, v.status)
        if v.ok:
            return IncrementalResult(res.grounded, res.cost, cur, trace, res.constants)
        fresh = [k for k in v.delta if k not in cur.marked]
        if not fresh:
            raise RuntimeError(f"verifier returned only marked states {v.delta}; "
                               "the learned model contradicts its own training data")
        cur = cur.extend(fresh, data)
    raise BudgetExhausted(f"no verified domain after {max_iterations} iterations")
