import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import rendered
from o2dplan.o2d_core import GroundAtom, O2DSignature, make_state
from o2dplan.predicate_pool import (PoolError, build_pool, complexity, denote, detect_constants, exists, inter, inv,
                                    parse_expr, prim, subset)

SIG = O2DSignature((), ("block", "red"))
OBJS = ["a", "b", "c"]

state_atoms = st.frozensets(st.one_of(
    st.builds(lambda p, o: GroundAtom(p, (o,)), st.sampled_from(SIG.unary_predicates), st.sampled_from(OBJS)),
    st.builds(lambda p, x, y: GroundAtom(p, (x, y)), st.sampled_from(["left", "below"]),
              st.sampled_from(OBJS), st.sampled_from(OBJS)),
), max_size=8)


def _states(atom_sets):
    return [make_state(a, OBJS, SIG, "i", str(j)) for j, a in enumerate(atom_sets)]


def test_complexity_rule():
    assert complexity(parse_expr("Top")) == 0
    assert complexity(prim("block")) == 1
    assert complexity(exists(prim("below"), parse_expr("Top"))) == 2
    assert complexity(parse_expr("ER[below,block]")) == 3
    assert complexity(inter(prim("block"), prim("red"))) == 3


@pytest.mark.parametrize("text", ["Top", "ER[below,Top]", "INTER[ER[INV[below],block],red]",
                                  "SUBSET[Top,Bottom]", "COMP[left,INV[below]]"])
def test_parse_print_roundtrip(text):
    assert str(parse_expr(text)) == text


def test_parse_rejects_garbage():
    for bad in ["ER[below]", "ER[below,Top", "INV[below,left]", "Top]"]:
        with pytest.raises((ValueError, IndexError)):
            parse_expr(bad)


def test_denote_reference_semantics():
    s = make_state([("below", ("a", "b")), ("block", ("b",)), ("left", ("a", "c"))], OBJS, SIG)
    assert denote(exists(prim("below"), prim("block")), s) == {("a",)}
    assert denote(inv(prim("below")), s) == {("b", "a")}
    assert denote(subset(prim("block"), parse_expr("Top")), s) is True


@settings(max_examples=40, deadline=None)
@given(st.lists(state_atoms, min_size=1, max_size=4, unique=True), st.integers(1, 3))
def test_tables_match_set_semantics(atom_sets, m):
    states = _states(atom_sets)
    pool = build_pool(states, SIG, m)
    for e in pool.entries:
        assert e.complexity <= m
        for s in states:
            got = pool.denotation(e.index, ("i", s.state_id))
            assert got == denote(e.expr, s), str(e.expr)


@settings(max_examples=40, deadline=None)
@given(st.lists(state_atoms, min_size=1, max_size=4, unique=True), st.integers(1, 3))
def test_no_two_entries_share_a_denotation(atom_sets, m):
    pool = build_pool(_states(atom_sets), SIG, m)
    seen = set()
    for e in pool.entries:
        key = (e.arity, pool.tables[e.index]["i"].tobytes())
        assert key not in seen, str(e.expr)
        seen.add(key)


def test_pool_grows_with_m():
    rd = rendered("blocks3ops")
    states = list(rd.dataset.restrict(["blocks3ops-n2", "blocks3ops-n3"]).states.values())
    sizes = [len(build_pool(states, rd.signature, m)) for m in (1, 2, 3)]
    assert sizes == sorted(sizes)


def test_blocks_table_is_a_constant():
    rd = rendered("blocks3ops")
    pool = build_pool(list(rd.dataset.states.values()), rd.signature, 2)
    assert detect_constants(pool).names == ["t"]
    assert pool.find("ER[below,Top]") is not None


def test_values_shapes():
    rd = rendered("blocks3ops")
    ds = rd.dataset.restrict(["blocks3ops-n2"])
    pool = build_pool(list(ds.states.values()), rd.signature, 2)
    t = pool.instances["blocks3ops-n2"]
    for e in pool.entries:
        v = pool.values(e.index, "blocks3ops-n2")
        assert v.shape == (len(t.state_ids),) + (t.n,) * e.arity
        assert v.dtype == np.bool_


def test_build_pool_input_errors():
    with pytest.raises(PoolError):
        build_pool([], SIG, 2)
    with pytest.raises(PoolError):
        build_pool(_states([frozenset()]), SIG, 0)
