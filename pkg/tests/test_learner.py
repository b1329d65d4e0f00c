import pytest
from hypothesis import given, settings, strategies as st

from conftest import rendered
from micro import micro_dataset, micro_pool
from o2dplan.grounding import Dataset, check_isomorphism
from o2dplan.learner import Hyperparams, LearnerCap, NoSolution, learn, learn_full
from o2dplan.o2d_core import GroundAtom, O2DState
from o2dplan.predicate_pool import build_pool
from o2dplan.verifier import verify

MICRO = Hyperparams(max_arity=2, num_predicates=2)


def _learn_micro(ds):
    try:
        return learn_full(ds, micro_pool(ds), MICRO, constants=[])
    except NoSolution:
        return None


def _rename(ds: Dataset, perm: dict) -> Dataset:
    def st_(s):
        atoms = frozenset(GroundAtom(a.predicate, tuple(perm.get(o, o) for o in a.args)) for a in s.atoms)
        return O2DState(atoms, frozenset(perm.get(o, o) for o in s.objects), s.instance_id, s.state_id, s.signature)
    return Dataset({k: st_(s) for k, s in ds.states.items()}, set(ds.marked), list(ds.labels),
                   ds.transitions, list(ds.instance_order))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_learned_model_satisfies_c1_c2_on_marked(seed):
    ds = micro_dataset(seed)
    res = _learn_micro(ds)
    if res is not None:
        assert verify(res.grounded, ds, c1_all=False).ok


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.permutations(["a", "b", "c"]))
def test_cost_invariant_under_object_renaming(seed, perm):
    ds = micro_dataset(seed)
    a = _learn_micro(ds)
    b = _learn_micro(_rename(ds, dict(zip(["a", "b", "c"], perm))))
    assert (a and a.cost) == (b and b.cost)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_fewer_marked_states_never_cost_more(seed):
    ds = micro_dataset(seed)
    full = _learn_micro(ds)
    if full is None or len(ds.marked) < 2:
        return
    drop = sorted(ds.marked)[0]
    sub = Dataset(ds.states, ds.marked - {drop}, ds.labels,
                  {k: v for k, v in ds.transitions.items() if k != drop}, ds.instance_order)
    part = _learn_micro(sub)
    assert part is not None and part.cost <= full.cost


def test_hanoi_small_full_graph():
    rd = rendered("hanoi1op")
    ds = rd.dataset.restrict(["hanoi1op-n1", "hanoi1op-n2"])
    pool = build_pool(list(ds.states.values()), rd.signature, 2)
    res = learn_full(ds, pool)
    assert res.cost[0] == 4                      # one label with three parameters
    assert check_isomorphism(ds, res.grounded)
    assert res.stats.milps > 0


def test_budget_too_small_is_no_solution():
    rd = rendered("hanoi1op")
    ds = rd.dataset.restrict(["hanoi1op-n2"])
    pool = build_pool(list(ds.states.values()), rd.signature, 2)
    with pytest.raises(NoSolution):
        learn(ds, pool, Hyperparams(num_predicates=1))
    with pytest.raises(NoSolution):
        learn(ds, pool, Hyperparams(max_arity=1))


def test_node_cap_is_a_cap_not_no_solution():
    rd = rendered("blocks3ops")
    ds = rd.dataset.restrict(["blocks3ops-n3"])
    pool = build_pool(list(ds.states.values()), rd.signature, 2)
    with pytest.raises(LearnerCap):
        learn(ds, pool, Hyperparams(node_cap=0))


def test_empty_dataset_learns_nothing():
    ds = micro_dataset(3)
    empty = Dataset({}, set(), list(ds.labels), {}, list(ds.instance_order))
    res = learn_full(empty, micro_pool(ds), MICRO, constants=[])
    assert res.cost == (0, 0, 0, 0, 0)
