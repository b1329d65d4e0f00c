import random
from importlib import resources

import pytest
from hypothesis import given, strategies as st

from conftest import rendered
from o2dplan.grounding import build_instance, parse_domain
from o2dplan.planner import (Plan, PlanError, ReplayMismatch, Simulator, _ground_actions, h_add, parse_plan,
                             plan_bfs, plan_gbfs_hadd, replay, validate)
from o2dplan.strips_core import CapExceeded, Instance, enumerate_reachable


def golden(name):
    return parse_domain(resources.files("o2dplan").joinpath(f"data/golden/{name}.txt").read_text())


ident = st.from_regex(r"[A-Za-z][A-Za-z0-9_]{0,5}", fullmatch=True)


@given(st.lists(st.tuples(ident, st.lists(ident, max_size=3).map(tuple)), max_size=6))
def test_plan_text_roundtrip(steps):
    p = Plan(tuple(steps))
    assert parse_plan(p.to_text()) == p


def test_parse_plan_comments_and_errors():
    assert parse_plan("; header\nMove(a,b,c) ; first\n\n").steps == (("Move", ("a", "b", "c")),)
    with pytest.raises(PlanError, match="line 1"):
        parse_plan("Move a b")


def _pair(name, iid, seed):
    ds = rendered(name).dataset
    keys = ds.instance_keys(iid)
    rng = random.Random(seed)
    return ds.states[rng.choice(keys)], ds.states[rng.choice(keys)]


@pytest.mark.parametrize("seed", range(5))
def test_bfs_is_optimal_against_full_graph(seed):
    gd = golden("blocks3ops")
    s0, sg = _pair("blocks3ops", "blocks3ops-n3", seed)
    inst = build_instance(gd, s0, sg)
    g = enumerate_reachable(gd.domain, Instance(inst.objects, inst.init, frozenset()))
    # distance by plain BFS over the enumerated graph
    dist, frontier = {0: 0}, [0]
    while frontier:
        nxt = []
        for a, _, b in g.edges:
            if a in frontier and b not in dist:
                dist[b] = dist[a] + 1
                nxt.append(b)
        frontier = nxt
    want = min(d for i, d in dist.items() if inst.is_goal(g.nodes[i]))
    p = plan_bfs(gd.domain, inst)
    assert len(p) == want
    assert validate(gd.domain, inst, p).ok


@pytest.mark.parametrize("seed", range(5))
def test_gbfs_plans_validate(seed):
    gd = golden("hanoi1op")
    s0, sg = _pair("hanoi1op", "hanoi1op-n3", seed)
    inst = build_instance(gd, s0, sg)
    p = plan_gbfs_hadd(gd.domain, inst)
    assert p is not None and validate(gd.domain, inst, p).ok
    assert len(p) >= len(plan_bfs(gd.domain, inst))


def test_h_add_zero_at_goal_and_infinite_when_unreachable():
    gd = golden("hanoi1op")
    s0, _ = _pair("hanoi1op", "hanoi1op-n2", 0)
    inst = build_instance(gd, s0, s0)
    acts = _ground_actions(gd.domain, inst)
    assert h_add(acts, inst.init, inst.goal) == 0
    assert h_add(acts, inst.init, [(("zz", ("nowhere",)), True)]) == float("inf")


def test_unreachable_goal_and_cap():
    gd = golden("blocks3ops")
    s0, sg = _pair("blocks3ops", "blocks3ops-n3", 1)
    inst = build_instance(gd, s0, sg)
    impossible = Instance(inst.objects, inst.init, inst.goal | {(("p0", ("zz", "yy")), True)})
    assert plan_bfs(gd.domain, impossible) is None
    assert plan_gbfs_hadd(gd.domain, impossible) is None
    with pytest.raises(CapExceeded):
        plan_bfs(gd.domain, build_instance(gd, *_pair("blocks3ops", "blocks3ops-n5", 2)), cap=5)


def test_validate_reports_failing_step():
    gd = golden("blocks3ops")
    s0, sg = _pair("blocks3ops", "blocks3ops-n3", 3)
    inst = build_instance(gd, s0, sg)
    p = plan_bfs(gd.domain, inst)
    bad = Plan(p.steps + (("Nope", ()),))
    v = validate(gd.domain, inst, bad)
    assert not v.ok and v.failed_step == len(p)


def test_replay_ends_at_goal_and_detects_mismatch():
    rd = rendered("hanoi1op")
    gd = golden("hanoi1op")
    sim = Simulator.from_rendered(rd)
    s0, sg = _pair("hanoi1op", "hanoi1op-n3", 4)
    p = plan_bfs(gd.domain, build_instance(gd, s0, sg))
    traj = replay(p, gd, sim, s0)
    assert traj[-1] == sg and len(traj) == len(p) + 1
    if len(p):
        lab, b = p.steps[0]
        with pytest.raises(ReplayMismatch) as exc:
            replay(Plan(((lab, tuple(reversed(b))),)), gd, sim, s0)
        assert exc.value.index == 0


def test_simulator_rejects_unknown_state():
    rd = rendered("hanoi1op")
    sim = Simulator.from_rendered(rd)
    other = rendered("blocks3ops").dataset.states[("blocks3ops-n2", "0")]
    with pytest.raises(PlanError):
        sim.successors(other, "Move")
