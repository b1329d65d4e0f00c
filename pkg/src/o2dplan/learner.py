"""Learning grounded STRIPS domains from a dataset and a predicate pool.

The model is searched exactly for the lexicographic cost
``(c1, c2, c3, c4, c5)``:

* ``c1`` sum over schemas of ``1 + arity``
* ``c2`` sum of ``1 + arity`` over selected dynamic predicates
* ``c3`` same for selected static predicates
* ``c4`` number of effect literals
* ``c5`` number of precondition literals (static atoms included)

The search is exact. Every label first gets the set of arities at which it
has any model on its own; an infeasible label ends the search with
:class:`NoSolution`. Arity vectors are then visited in increasing ``c1``.
For each vector one 0/1 program covers all labels at once: selection
variables for pool entries, C1 as set-cover rows over marked state pairs,
frame conditions gated by selection, and a one-to-one matching between
applicable bindings and data successors (C2 counts multiplicities). HiGHS
minimises ``c2`` through ``c5`` in turn. Among equal costs, literals of lower
arity and with fewer constant arguments win, which is what lets a model
learned on small instances carry over to larger ones.
"""

from __future__ import annotations

import itertools
import logging
import time
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import coo_matrix

from .grounding import Dataset, GroundedDomain
from .predicate_pool import PredicatePool, detect_constants
from .strips_core import Domain, Literal, Predicate, Schema

log = logging.getLogger(__name__)

Cost = tuple[int, int, int, int, int]


@dataclass(frozen=True)
class Hyperparams:
    max_arity: int = 3
    num_predicates: int = 12
    time_limit: float | None = None
    node_cap: int | None = None
    symmetry: bool = True


class NoSolution(Exception):
    """No domain within the hyperparameters satisfies C1 and C2 on the dataset."""


class LearnerCap(RuntimeError):
    """The time limit or node cap ran out before optimality was settled."""


@dataclass
class LearnStats:
    nodes: int = 0
    evaluated: int = 0
    milps: int = 0
    seconds: float = 0.0


@dataclass
class LearnResult:
    grounded: GroundedDomain
    cost: Cost
    constants: list[str]
    stats: LearnStats = field(default_factory=LearnStats)


# ---------------------------------------------------------------- problem data

@dataclass
class _Inst:
    iid: str
    objects: list[str]
    consts: list[int]              # object indices of constants
    free: list[int]                # object indices of non-constants
    marked: list[int]              # pool rows of marked states
    trans: dict[int, dict[str, Counter]]   # row -> label -> Counter(successor rows)
    vals: dict[int, np.ndarray]    # entry -> valuation (diagonal of roles cleared)
    static: dict[int, bool]


class _Problem:
    def __init__(self, dataset: Dataset, pool: PredicatePool, constants: Sequence[str]):
        self.pool = pool
        self.constants = list(constants)
        self.labels = [lab for lab in dataset.labels
                       if any(dataset.successors(k, lab) for k in dataset.marked)]
        self.insts: list[_Inst] = []
        for iid in dataset.instances_present:
            t = pool.instances.get(iid)
            if t is None:
                raise ValueError(f"instance {iid} is not covered by the pool")
            marked = [k for k in dataset.marked_keys(iid)]
            if not marked:
                continue
            objs = t.objects
            consts = [objs.index(c) for c in self.constants if c in objs]
            free = [i for i in range(len(objs)) if i not in consts]
            rows, trans = [], {}
            for k in marked:
                r = t.row[k[1]]
                rows.append(r)
                trans[r] = {lab: Counter(t.row[s[1]] for s in dataset.successors(k, lab))
                            for lab in self.labels if dataset.successors(k, lab)}
            self.insts.append(_Inst(iid, objs, consts, free, rows, trans, {}, {}))
        n_ent = len(pool.entries)
        for inst in self.insts:
            n = len(inst.objects)
            off = ~np.eye(n, dtype=bool)
            for e in range(n_ent):
                v = pool.values(e, inst.iid)
                if pool.entries[e].arity == 2:
                    v = v & off
                inst.vals[e] = v
                inst.static[e] = pool.per_instance_static[(inst.iid, e)]
        self.candidates, self.dropped = self._reduce()
        # static: same denotation in every state of every instance; only others take effects
        self.instances = list(dataset.instances_present)
        self.dynamic = [e for e in self.candidates if not pool.is_static(e, self.instances)]
        self.statics = [e for e in self.candidates if pool.is_static(e, self.instances)]
        # a schema needs an effect even where the selected predicates do not change
        # (self-loops, or successors that are not marked); an entry that is constant on
        # the rows in use but not static gives a no-op one
        extra = self._noop_entry()
        if extra is not None:
            self.candidates = sorted(self.candidates + [extra])
            self.dynamic = sorted(self.dynamic + [extra])

    def _noop_entry(self) -> int | None:
        uniform = [e for e, why in self.dropped.items()
                   if why == "uniform" and not self.pool.is_static(e, self.instances)]
        return min(uniform, key=lambda e: (self.arity(e), e)) if uniform else None

    def arity(self, e: int) -> int:
        return self.pool.entries[e].arity

    def weight(self, e: int) -> int:
        return 1 + self.arity(e)

    def _rows(self, inst: _Inst) -> list[int]:
        rows = set(inst.marked)
        for by in inst.trans.values():
            for c in by.values():
                rows.update(c)
        return sorted(rows)

    def _reduce(self):
        """Drop uniform entries, duplicates under h and transposed roles."""
        seen: dict[bytes, int] = {}
        keep, dropped = [], {}
        rows = {inst.iid: self._rows(inst) for inst in self.insts}
        for ent in self.pool.entries:
            e = ent.index
            parts, tparts, uniform = [], [], set()
            for inst in self.insts:
                v = inst.vals[e][rows[inst.iid]]
                flag = b"s" if inst.static[e] else b"d"
                if ent.arity == 2:
                    n = len(inst.objects)
                    off = ~np.eye(n, dtype=bool)
                    flat = v[:, off]
                    tflat = np.transpose(v, (0, 2, 1))[:, off]
                    tparts.append(flag + np.packbits(tflat).tobytes())
                else:
                    flat = v.reshape(len(v), -1)
                parts.append(flag + np.packbits(flat).tobytes())
                if flat.size:
                    uniform.update(np.unique(flat).tolist())
            if len(uniform) <= 1:
                dropped[e] = "uniform"
                continue
            key = bytes([ent.arity]) + b"|".join(parts)
            if key in seen:
                dropped[e] = f"same as {seen[key]}"
                continue
            if ent.arity == 2:
                tkey = bytes([2]) + b"|".join(tparts)
                if tkey in seen:
                    dropped[e] = f"transpose of {seen[tkey]}"
                    continue
            seen[key] = e
            keep.append(e)
        return keep, dropped

    # ------------------------------------------------------------ selections

    def signature(self, inst: _Inst, sel: Sequence[int], rows: Sequence[int]) -> list[bytes]:
        if not sel:
            return [b""] * len(rows)
        blocks = []
        for e in sel:
            v = inst.vals[e][list(rows)]
            blocks.append(v.reshape(len(rows), -1))
        return [r.tobytes() for r in np.packbits(np.concatenate(blocks, axis=1), axis=1)]

    def c1_ok(self, dyn: Sequence[int]) -> bool:
        for inst in self.insts:
            sel = [e for e in dyn if not inst.static[e]]
            sig = self.signature(inst, sel, inst.marked)
            if len(set(sig)) != len(sig):
                return False
        return True

    def changes(self, inst: _Inst, dyn: Sequence[int], r: int, r2: int):
        """Atoms over ``dyn`` whose value differs between rows r and r2."""
        out = []
        for e in dyn:
            if inst.static[e]:
                continue
            a, b = inst.vals[e][r], inst.vals[e][r2]
            if self.arity(e) == 0:
                if a != b:
                    out.append((e, (), bool(b)))
                continue
            for idx in zip(*np.nonzero(a != b)):
                out.append((e, tuple(int(i) for i in idx), bool(b[idx])))
        return out




# ---------------------------------------------------------------- joint 0/1 model

def _arg_tuples(arity: int, k: int, nconst: int) -> list[tuple]:
    """Argument tuples: variables 1..k are ints, constants are ``-1-j``."""
    terms = list(range(1, k + 1)) + [-1 - j for j in range(nconst)]
    return list(itertools.permutations(terms, arity))


class _Rows:
    def __init__(self):
        self.idx: list[np.ndarray] = []
        self.val: list[np.ndarray] = []
        self.lo: list[float] = []
        self.hi: list[float] = []

    def add(self, idx, val, lo, hi):
        idx = np.asarray(idx, dtype=np.int64)
        val = np.broadcast_to(np.asarray(val, dtype=float), idx.shape)
        self.idx.append(idx)
        self.val.append(val)
        self.lo.append(lo)
        self.hi.append(hi)

    def __len__(self):
        return len(self.lo)

    def matrix(self, nv: int):
        lengths = [len(i) for i in self.idx]
        ri = np.repeat(np.arange(len(self.idx)), lengths)
        ci = np.concatenate(self.idx) if self.idx else np.zeros(0, dtype=np.int64)
        vv = np.concatenate(self.val) if self.val else np.zeros(0)
        A = coo_matrix((vv, (ri, ci)), shape=(len(self.idx), nv)).tocsr()
        return A, np.array(self.lo, dtype=float), np.array(self.hi, dtype=float)


@dataclass
class _Block:
    label: str
    k: int
    lits: list[tuple[int, tuple]]
    xp: np.ndarray
    xn: np.ndarray
    eff: np.ndarray        # literal indices allowed as effects
    ep: np.ndarray         # aligned with eff
    en: np.ndarray


@dataclass
class _Solution:
    cost: Cost
    tie: float
    selected: list[int]
    schemas: dict[str, tuple[int, list, list]]   # label -> (arity, effects, preconditions)
    static: set[int] = field(default_factory=set)


class _Model:
    """One 0/1 program for a fixed arity per label.

    Variables: ``y[e]`` selects pool entry e; per label, precondition and effect
    literal indicators; per (state, binding) an applicability indicator; per
    (state, binding, successor row) an indicator that the binding produces that
    successor and a matching indicator. Bindings and data successors are
    matched one to one, which is C2 with multiplicities.
    """

    def __init__(self, prob: _Problem, arities: dict[str, int], beta: Hyperparams, with_c1: bool = True):
        self.prob, self.beta, self.arities = prob, beta, dict(arities)
        self.nv = 0
        self.rows = _Rows()
        self.dyn_set = set(prob.dynamic)
        self.y = {e: self._new() for e in prob.candidates}
        ys = list(self.y.values())
        if ys:
            self.rows.add(ys, 1.0, -np.inf, beta.num_predicates)
        self.infeasible = False
        if with_c1:
            self._c1()
        self.blocks: dict[str, _Block] = {}
        for lab, k in arities.items():
            self.blocks[lab] = self._label(lab, k)

    def _new(self, n: int = 1):
        start = self.nv
        self.nv += n
        return start if n == 1 else np.arange(start, start + n)

    # -------------------------------------------------------------- C1

    def _c1(self):
        prob = self.prob
        seen = set()
        for inst in prob.insts:
            dyn = [e for e in prob.dynamic if not inst.static[e]]
            R = len(inst.marked)
            if R < 2:
                continue
            codes = np.zeros((len(dyn), R), dtype=np.int64)
            for i, e in enumerate(dyn):
                v = inst.vals[e][inst.marked].reshape(R, -1)
                _, inv = np.unique(v, axis=0, return_inverse=True)
                codes[i] = inv.reshape(-1)
            for a in range(R):
                diff = codes[:, a:a + 1] != codes[:, a + 1:]
                for col in range(diff.shape[1]):
                    who = tuple(np.flatnonzero(diff[:, col]).tolist())
                    if who in seen:
                        continue
                    seen.add(who)
                    if not who:
                        self.infeasible = True
                        continue
                    self.rows.add([self.y[dyn[i]] for i in who], 1.0, 1, np.inf)

    # -------------------------------------------------------------- labels

    def _label(self, label: str, k: int) -> _Block:
        prob = self.prob
        nconst = len(prob.constants)
        lits = [(e, t) for e in prob.candidates for t in _arg_tuples(prob.arity(e), k, nconst)]
        L = len(lits)
        lit_index = {l: i for i, l in enumerate(lits)}
        xp, xn = self._new(L), self._new(L)
        xp = np.atleast_1d(xp)
        xn = np.atleast_1d(xn)
        eff = np.array([i for i, (e, _) in enumerate(lits) if e in self.dyn_set], dtype=np.int64)
        E = len(eff)
        ep = np.atleast_1d(self._new(E)) if E else np.zeros(0, dtype=np.int64)
        en = np.atleast_1d(self._new(E)) if E else np.zeros(0, dtype=np.int64)
        if E == 1:
            ep, en = np.array([ep[0]]), np.array([en[0]])
        block = _Block(label, k, lits, xp, xn, eff, ep, en)
        rows = self.rows
        lit_y = np.array([self.y[e] for e, _ in lits], dtype=np.int64)
        for i in range(L):
            rows.add([xp[i], xn[i], lit_y[i]], [1, 1, -1], -np.inf, 0)
        eff_pos = {int(l): j for j, l in enumerate(eff)}
        for j, l in enumerate(eff):
            rows.add([ep[j], en[j], self.y[lits[l][0]]], [1, 1, -1], -np.inf, 0)
        if E == 0:
            self.infeasible = True
            return block
        rows.add(np.concatenate([ep, en]), 1.0, 1, np.inf)
        if self.beta.symmetry and k > 1:
            self._symmetry(block)

        dyn = prob.dynamic
        for inst in prob.insts:
            perms = list(itertools.permutations(inst.free, k))
            bindings = np.array(perms, dtype=np.int64).reshape(len(perms), k)
            B = len(bindings)
            gidx = []
            for (e, t) in lits:
                cols = []
                for term in t:
                    if term > 0:
                        cols.append(bindings[:, term - 1])
                    else:
                        cols.append(np.full(B, inst.objects.index(prob.constants[-1 - term])))
                gidx.append(cols)
            truth_cache: dict[int, np.ndarray] = {}

            def truth(row: int) -> np.ndarray:
                if row not in truth_cache:
                    out = np.zeros((B, L), dtype=bool)
                    for j, (e, t) in enumerate(lits):
                        v = inst.vals[e][0 if inst.static[e] else row]
                        cols = gidx[j]
                        if not t:
                            out[:, j] = bool(v)
                        elif len(t) == 1:
                            out[:, j] = v[cols[0]]
                        else:
                            out[:, j] = v[cols[0], cols[1]]
                    truth_cache[row] = out
                return truth_cache[row]

            cs = set(inst.consts)
            kills = set()
            for r in inst.marked:
                T = truth(r)
                FV = np.where(T, xn[None, :], xp[None, :])      # the false literal of each atom
                succ = inst.trans.get(r, {}).get(label)
                if not succ:
                    for b in range(B):
                        key = FV[b].tobytes()
                        if key not in kills:
                            kills.add(key)
                            rows.add(FV[b], 1.0, 1, np.inf)
                    continue
                groups = sorted(succ.items())
                if B == 0:
                    self.infeasible = True
                    continue
                changes = [prob.changes(inst, dyn, r, r2) for r2, _ in groups]
                w_of = [[] for _ in groups]
                for b in range(B):
                    a = self._new()
                    rows.add(np.append(FV[b], a), np.append(np.ones(L), L), -np.inf, L)
                    rows.add(np.append(FV[b], a), 1.0, 1, np.inf)
                    inv = {int(o): v + 1 for v, o in enumerate(bindings[b])}
                    ws = []
                    for j, (r2, mult) in enumerate(groups):
                        m, w = self._new(), self._new()
                        ws.append(w)
                        w_of[j].append(w)
                        rows.add([w, m], [1, -1], -np.inf, 0)
                        for e, tup, val in changes[j]:
                            args = []
                            for o in tup:
                                if o in inv:
                                    args.append(inv[o])
                                elif o in cs:
                                    args.append(-1 - prob.constants.index(inst.objects[o]))
                                else:
                                    args = None
                                    break
                            if args is None:
                                rows.add([m, self.y[e]], 1.0, -np.inf, 1)
                                continue
                            li = lit_index[(e, tuple(args))]
                            ev = ep[eff_pos[li]] if val else en[eff_pos[li]]
                            rows.add([m, ev, self.y[e]], [1, -1, 1], -np.inf, 1)
                        T2 = truth(r2)[b, eff]
                        bad = np.where(T2, en, ep)
                        rows.add(np.append(bad, m), np.append(np.ones(E), E), -np.inf, E)
                    rows.add(ws + [a], [1] * len(ws) + [-1], 0, 0)
                for j, (r2, mult) in enumerate(groups):
                    rows.add(w_of[j], 1.0, mult, mult)
        return block

    def _symmetry(self, block: _Block):
        """Binary-atom occurrences of variable v never fall below those of v+1."""
        k = block.k
        coef = {v: defaultdict(float) for v in range(1, k + 1)}
        eff_pos = {int(l): j for j, l in enumerate(block.eff)}
        for i, (e, t) in enumerate(block.lits):
            if len(t) != 2:
                continue
            for term in t:
                if term <= 0:
                    continue
                for var in (block.xp[i], block.xn[i]):
                    coef[term][int(var)] += 1
                if i in eff_pos:
                    for var in (block.ep[eff_pos[i]], block.en[eff_pos[i]]):
                        coef[term][int(var)] += 1
        for v in range(1, k):
            row = defaultdict(float)
            for var, x in coef[v].items():
                row[var] += x
            for var, x in coef[v + 1].items():
                row[var] -= x
            if row:
                self.rows.add(list(row), list(row.values()), 0, np.inf)

    # -------------------------------------------------------------- objectives

    def objectives(self):
        prob = self.prob
        nv = self.nv
        c2, c3, c4, c5, tie = (np.zeros(nv) for _ in range(5))
        for e, var in self.y.items():
            (c2 if e in self.dyn_set else c3)[var] = prob.weight(e)
        for blk in self.blocks.values():
            c4[blk.ep] = 1
            c4[blk.en] = 1
            c5[blk.xp] = 1
            c5[blk.xn] = 1
            # ties go to literals of lower arity and over variables, not constants
            pen = np.array([len(t) + sum(1 for a in t if a < 0) for _, t in blk.lits], dtype=float)
            tie[blk.xp] = pen
            tie[blk.xn] = pen
            tie[blk.ep] = pen[blk.eff]
            tie[blk.en] = pen[blk.eff]
        return [c2, c3, c4, c5], tie

    def _milp(self, c, A, lo, hi, deadline, stats):
        options = {"presolve": True}
        if deadline is not None:
            left = deadline - time.monotonic()
            if left <= 0:
                raise LearnerCap("time limit reached")
            options["time_limit"] = left
        stats.milps += 1
        res = milp(c, integrality=np.ones(self.nv), bounds=Bounds(0, 1),
                   constraints=LinearConstraint(A, lo, hi), options=options)
        if res.status == 0:
            return np.round(res.x).astype(int)
        if res.status == 2:
            return None
        if res.status == 1:
            raise LearnerCap("time limit reached inside the solver")
        raise RuntimeError(f"MILP failed: {res.message}")

    def feasible(self, deadline, stats) -> bool:
        if self.infeasible:
            return False
        if self.nv == 0:
            return True
        A, lo, hi = self.rows.matrix(self.nv)
        return self._milp(np.zeros(self.nv), A, lo, hi, deadline, stats) is not None

    def solve(self, deadline, stats, bound: tuple | None = None) -> _Solution | None:
        """Lexicographic minimum of (c2, c3, c4, c5) then the tie penalty.

        ``bound`` is a (c2, c3, c4, c5) tuple to beat or match; stages stop as
        soon as the incumbent cannot be reached.
        """
        if self.infeasible:
            return None
        if self.nv == 0:
            return _Solution((0, 0, 0, 0, 0), 0.0, [], {})
        A, lo, hi = self.rows.matrix(self.nv)
        objs, tie = self.objectives()
        extra_A, extra_lo, extra_hi = [], [], []
        values = []
        x = None
        for i, c in enumerate(objs):
            cur_A = A if not extra_A else _vstack(A, extra_A)
            x = self._milp(c, cur_A, np.concatenate([lo, extra_lo]), np.concatenate([hi, extra_hi]),
                           deadline, stats)
            if x is None:
                return None
            v = int(round(c @ x))
            values.append(v)
            if bound is not None and tuple(values) > tuple(bound[:len(values)]):
                return None
            extra_A.append(c)
            extra_lo.append(-np.inf)
            extra_hi.append(v)
        unit = float(tie.sum() + 1)
        cur_A = _vstack(A, extra_A[:3])
        x = self._milp(unit * objs[3] + tie, cur_A, np.concatenate([lo, extra_lo[:3]]),
                       np.concatenate([hi, extra_hi[:3]]), deadline, stats)
        c1 = sum(1 + k for k in self.arities.values())
        cost = (c1, *[int(round(c @ x)) for c in objs])
        selected = sorted(e for e, var in self.y.items() if x[var])
        static = {e for e in selected if e not in self.dyn_set}
        schemas = {}
        for lab, blk in self.blocks.items():
            effs = [(blk.lits[l][0], blk.lits[l][1], True) for j, l in enumerate(blk.eff) if x[blk.ep[j]]]
            effs += [(blk.lits[l][0], blk.lits[l][1], False) for j, l in enumerate(blk.eff) if x[blk.en[j]]]
            pres = [(e, t, True) for i, (e, t) in enumerate(blk.lits) if x[blk.xp[i]]]
            pres += [(e, t, False) for i, (e, t) in enumerate(blk.lits) if x[blk.xn[i]]]
            schemas[lab] = (blk.k, effs, pres)
        return _Solution(cost, float(tie @ x), selected, schemas, static)


def _vstack(A, extra):
    from scipy.sparse import csr_matrix, vstack
    return vstack([A, csr_matrix(np.array(extra))]).tocsr()


# ---------------------------------------------------------------- search over arities

def _arity_vectors(feasible: dict[str, list[int]]):
    """All arity assignments grouped by c1, cheapest first."""
    labels = list(feasible)
    combos = itertools.product(*(feasible[l] for l in labels))
    by_c1 = defaultdict(list)
    for combo in combos:
        by_c1[sum(1 + k for k in combo)].append(dict(zip(labels, combo)))
    for c1 in sorted(by_c1):
        yield c1, by_c1[c1]


def _solve(prob: _Problem, beta: Hyperparams, stats: LearnStats, deadline) -> _Solution | None:
    if not prob.labels:
        return _Model(prob, {}, beta).solve(deadline, stats)
    feasible: dict[str, list[int]] = {}
    for lab in prob.labels:
        ks = []
        for k in range(beta.max_arity + 1):
            stats.nodes += 1
            if _Model(prob, {lab: k}, beta, with_c1=False).feasible(deadline, stats):
                ks.append(k)
        if not ks:
            log.info("label %s has no model at arity <= %d", lab, beta.max_arity)
            return None
        feasible[lab] = ks
    for c1, vectors in _arity_vectors(feasible):
        best = None
        for ar in vectors:
            stats.evaluated += 1
            if beta.node_cap is not None and stats.evaluated > beta.node_cap:
                raise LearnerCap("node cap reached")
            bound = None if best is None else best.cost[1:]
            sol = _Model(prob, ar, beta).solve(deadline, stats, bound)
            if sol is not None and (best is None or (sol.cost, sol.tie) < (best.cost, best.tie)):
                best = sol
        if best is not None:
            return best
    return None


# ---------------------------------------------------------------- public API

def _build_domain(prob: _Problem, sol: _Solution, name: str) -> GroundedDomain:
    pool = prob.pool
    chosen = sol.selected
    pname = {e: f"p{i}" for i, e in enumerate(chosen)}
    static_set = sol.static
    preds = [Predicate(pname[e], prob.arity(e), e in static_set) for e in chosen]

    def lit(e, t, pos):
        args = tuple(a if a > 0 else prob.constants[-1 - a] for a in t)
        return Literal(pname[e], args, pos)

    schemas = []
    for lab in prob.labels:
        k, effs, pres = sol.schemas[lab]
        st = [lit(*x) for x in pres if x[0] in static_set]
        pre = [lit(*x) for x in pres if x[0] not in static_set]
        eff = [lit(*x) for x in effs]
        schemas.append(Schema(lab, k, tuple(st), tuple(pre), tuple(eff)))
    # every detected constant stays out of bindings, used in a schema or not
    domain = Domain(name, tuple(preds), tuple(schemas), tuple(prob.constants))
    return GroundedDomain(domain, {pname[e]: pool.entries[e].expr for e in chosen})


def learn_full(dataset: Dataset, pool: PredicatePool, beta: Hyperparams = Hyperparams(),
               constants: Iterable[str] | None = None, name: str = "learned") -> LearnResult:
    t0 = time.monotonic()
    consts = list(detect_constants(pool).names if constants is None else constants)
    prob = _Problem(dataset, pool, consts)
    stats = LearnStats()
    deadline = None if beta.time_limit is None else t0 + beta.time_limit
    sol = _solve(prob, beta, stats, deadline)
    stats.seconds = time.monotonic() - t0
    if sol is None:
        raise NoSolution(f"no model with at most {beta.num_predicates} predicates "
                         f"and action arity at most {beta.max_arity}")
    return LearnResult(_build_domain(prob, sol, name), sol.cost, consts, stats)


def learn(dataset: Dataset, pool: PredicatePool, beta: Hyperparams = Hyperparams(),
          constants: Iterable[str] | None = None, name: str = "learned") -> GroundedDomain:
    """Optimal grounded domain for the dataset; raises NoSolution or LearnerCap."""
    return learn_full(dataset, pool, beta, constants, name).grounded


def emit_asp(*args, **kwargs):
    """ASP program and facts for the same learning task (see :mod:`o2dplan.asp`)."""
    from .asp import emit_asp as _emit
    return _emit(*args, **kwargs)
