"""Acceptance criteria, one test per criterion.

Each test appends a PASS/FAIL/SKIP line that is printed in the pytest terminal
summary. Tolerances are pinned in the constants below.
"""

import dataclasses
import random
import time
from importlib import resources

import pytest

from conftest import (ACCEPTANCE_LINES, BLOCKS_TRAIN, HANOI_TRAIN, SLIDING_TRAIN, learned,
                      rendered)
from micro import micro_dataset, micro_pool, oracle_optimum
from o2dplan.grounding import GroundedDomain, build_instance, check_isomorphism, parse_domain
from o2dplan.learner import Hyperparams, LearnerCap, NoSolution, learn_full
from o2dplan.planner import Simulator, plan_bfs, replay
from o2dplan.predicate_pool import build_pool
from o2dplan.verifier import incremental_learn, verify

LEARN_SECONDS = 600
POOL_SECONDS = 30
ISO_SECONDS = 5
MICRO_SECONDS = 300
MICRO_SEEDS = 60
PLAN_PAIRS = 20

BLOCKS_COST = (10, 5, 0, 10, 8)
HANOI_COST = (4, 5, 3, 4, 4)
POOL_SIZES = {"blocks3ops": 13, "hanoi1op": 14}
TOTALS = {"blocks3ops": (590, 2414), "hanoi1op": (363, 1074), "slidingtile": (742, 1716)}


def report(criterion: int, ok: bool | None, detail: str) -> None:
    tag = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
    line = f"[{tag}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def _learn_and_verify(name, train, check_on, expected):
    t = time.time()
    res, _ = learned(name, train)
    secs = time.time() - t
    v = verify(res.grounded, rendered(name).dataset.restrict(check_on))
    ok = res.cost == expected and v.ok and secs <= LEARN_SECONDS
    return ok, f"{name} cost {res.cost} (want {expected}), verify {v.status} on {len(check_on)} instances, {secs:.1f}s"


def test_1_cost_reproduction():
    b_ok, b_msg = _learn_and_verify("blocks3ops", BLOCKS_TRAIN, BLOCKS_TRAIN + ("blocks3ops-n4",), BLOCKS_COST)
    h_ok, h_msg = _learn_and_verify("hanoi1op", HANOI_TRAIN, HANOI_TRAIN + ("hanoi1op-n4",), HANOI_COST)
    report(1, b_ok and h_ok, f"{b_msg}; {h_msg}")
    assert b_ok and h_ok


def test_2_pool_sizes():
    sizes, ok = {}, True
    for name, want in POOL_SIZES.items():
        rd = rendered(name)
        t = time.time()
        pool = build_pool(list(rd.dataset.states.values()), rd.signature, 2)
        secs = time.time() - t
        sizes[name] = (len(pool.entries), round(secs, 1))
        ok &= len(pool.entries) == want and secs <= POOL_SECONDS
    report(2, ok, f"|P| at m=2 (size, seconds): {sizes}, want {POOL_SIZES}")
    assert ok


def test_3_blocks4ops_infeasible_below_m4():
    rd = rendered("blocks4ops")
    ds = rd.dataset.restrict(["blocks4ops-n1", "blocks4ops-n2", "blocks4ops-n3"])
    states = list(ds.states.values())
    res = incremental_learn(ds, build_pool(states, rd.signature, 4), Hyperparams())
    outcome = {4: res.cost}
    for m in (1, 2, 3):
        try:
            outcome[m] = learn_full(res.dataset, build_pool(states, rd.signature, m),
                                    Hyperparams(time_limit=LEARN_SECONDS)).cost
        except NoSolution:
            outcome[m] = "NoSolution"
        except LearnerCap:
            outcome[m] = "cap"
    ok = all(outcome[m] == "NoSolution" for m in (1, 2, 3)) and isinstance(outcome[4], tuple)
    report(3, ok, f"final |T|={len(res.dataset.marked)}, outcome by m: {outcome}")
    assert ok


def _flip(gd: GroundedDomain, label: str, i: int) -> GroundedDomain:
    dom = gd.domain
    schemas = []
    for s in dom.schemas:
        if s.label == label:
            eff = list(s.effects)
            eff[i] = eff[i].negate()
            s = dataclasses.replace(s, effects=tuple(eff))
        schemas.append(s)
    return GroundedDomain(dataclasses.replace(dom, schemas=tuple(schemas)), gd.sigma)


def test_4_isomorphism(blocks3):
    res, _ = blocks3
    gd = res.grounded
    data = rendered("blocks3ops").dataset.restrict(["blocks3ops-n2"])
    t = time.time()
    iso = check_isomorphism(data, gd)
    bijective = iso.isomorphic and len(set(iso.mapping.values())) == len(iso.mapping) == len(data.states)
    corrupted = [(s.label, i) for s in gd.domain.schemas for i in range(len(s.effects))]
    survived = [c for c in corrupted if check_isomorphism(data, _flip(gd, *c))]
    secs = time.time() - t
    # schemas with more parameters than the instance has free objects never fire on this graph;
    # the same corruptions are checked against the 3-block graph for the record
    data3 = rendered("blocks3ops").dataset.restrict(["blocks3ops-n3"])
    caught3 = [c for c in survived if not check_isomorphism(data3, _flip(gd, *c))]
    ok = bijective and not survived and secs <= ISO_SECONDS
    report(4, ok, f"bijection over {len(iso.mapping)} states, {len(corrupted)} corruptions, "
                  f"{len(survived)} still isomorphic on 2 blocks {survived} "
                  f"({len(caught3)} of them caught on 3 blocks), {secs:.2f}s")
    assert ok


def test_5_micro_optimality():
    beta = Hyperparams(max_arity=2, num_predicates=2)
    t = time.time()
    agree, learnable, bad = 0, 0, []
    for seed in range(MICRO_SEEDS):
        ds = micro_dataset(seed)
        pool = micro_pool(ds)
        try:
            cost = learn_full(ds, pool, beta, constants=[]).cost
            learnable += 1
        except NoSolution:
            cost = None
        best = oracle_optimum(ds, pool, beta.max_arity, beta.num_predicates, constants=[])
        if best == cost:
            agree += 1
        else:
            bad.append((seed, cost, best))
    secs = time.time() - t
    ok = not bad and agree >= 50 and secs <= MICRO_SECONDS
    report(5, ok, f"{agree}/{MICRO_SEEDS} datasets agree with the oracle ({learnable} learnable), "
                  f"mismatches {bad[:3]}, {secs:.1f}s")
    assert ok


def _planning_pairs(name, res, test_instances, seed=0):
    rd = rendered(name)
    gd = res.grounded
    sim = Simulator.from_rendered(rd)
    rng = random.Random(seed)
    failures = []
    for _ in range(PLAN_PAIRS):
        iid = rng.choice(test_instances)
        keys = rd.dataset.instance_keys(iid)
        s0, sg = (rd.dataset.states[rng.choice(keys)] for _ in range(2))
        p = plan_bfs(gd.domain, build_instance(gd, s0, sg))
        q = plan_bfs(rd.domain, sim.hidden_instance(s0, sg))
        if p is None or q is None or len(p) != len(q):
            failures.append((iid, p and len(p), q and len(q)))
            continue
        if replay(p, gd, sim, s0)[-1] != sg:
            failures.append((iid, "replay"))
    return failures


def test_6_planning_equivalence(blocks3, hanoi1, sliding):
    cases = {
        "blocks3ops": (blocks3[0], ["blocks3ops-n2", "blocks3ops-n3", "blocks3ops-n4"]),
        "hanoi1op": (hanoi1[0], list(HANOI_TRAIN)),
        "slidingtile": (sliding[0], list(SLIDING_TRAIN) + ["slidingtile-2x3", "slidingtile-3x2"]),
    }
    fails = {name: _planning_pairs(name, res, inst) for name, (res, inst) in cases.items()}
    ok = not any(fails.values())
    report(6, ok, f"{PLAN_PAIRS} pairs per domain, failures {fails}")
    assert ok


def test_7_data_totals():
    got = {name: (rendered(name).n_states, rendered(name).n_edges) for name in TOTALS}
    ok = got == TOTALS
    report(7, ok, f"(states, edges) {got}")
    assert ok


def test_8_asp_cross_check(blocks3):
    try:
        import clingo  # noqa: F401
    except ImportError:
        report(8, None, "clingo not installed")
        pytest.skip("clingo not installed")
    from o2dplan.asp import emit_asp, solve_asp
    res, pool = blocks3
    t = time.time()
    out = solve_asp(emit_asp(res.dataset, pool), pool)
    ok = out.cost == BLOCKS_COST
    report(8, ok, f"clingo cost {out.cost} (want {BLOCKS_COST}), proven {out.optimality_proven}, "
                  f"{time.time() - t:.1f}s")
    assert ok


def test_9_golden_domains_verify():
    verdicts = {}
    for name in ("grid", "sokoban"):
        gd = parse_domain(resources.files("o2dplan").joinpath(f"data/golden/{name}.txt").read_text())
        rd = rendered(name)
        verdicts[name] = (verify(gd, rd.dataset).status, rd.n_states)
    ok = all(v == "ok" for v, _ in verdicts.values())
    report(9, ok, f"golden verify (status, states): {verdicts}")
    assert ok
