import sys
from functools import lru_cache
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from o2dplan.datagen import generate  # noqa: E402
from o2dplan.learner import Hyperparams  # noqa: E402
from o2dplan.predicate_pool import build_pool  # noqa: E402
from o2dplan.verifier import incremental_learn  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@lru_cache(maxsize=None)
def rendered(name: str):
    return generate(name)


@lru_cache(maxsize=None)
def learned(name: str, train: tuple[str, ...], m: int = 2):
    """Incremental learning result on a subset of a bundled data pool (cached per session)."""
    rd = rendered(name)
    ds = rd.dataset.restrict(train)
    pool = build_pool(list(ds.states.values()), rd.signature, m)
    return incremental_learn(ds, pool, Hyperparams()), pool


BLOCKS_TRAIN = ("blocks3ops-n2", "blocks3ops-n3")
HANOI_TRAIN = ("hanoi1op-n1", "hanoi1op-n2", "hanoi1op-n3")
SLIDING_TRAIN = ("slidingtile-1x2", "slidingtile-2x1", "slidingtile-1x3", "slidingtile-3x1", "slidingtile-2x2")


@pytest.fixture(scope="session")
def blocks3():
    return learned("blocks3ops", BLOCKS_TRAIN)


@pytest.fixture(scope="session")
def hanoi1():
    return learned("hanoi1op", HANOI_TRAIN)


@pytest.fixture(scope="session")
def sliding():
    return learned("slidingtile", SLIDING_TRAIN)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
