import json
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from gmethod import io
from gmethod.matrix import RMatrix
from gmethod.partitions import Partition

TESTS = Path(__file__).parent
TESTDATA = TESTS.parent / "testdata"
sys.path.insert(0, str(TESTS))


def F(*args):
    return Fraction(*args)


def part(*blocks):
    return Partition.from_blocks(blocks)


def load_matrix(rel):
    return io.parse_matrix(io.load_json(TESTDATA / rel))


def load_model(rel):
    return io.parse_model(io.load_json(TESTDATA / rel))


def load_partitions(rel, n):
    return [io.parse_partition(p, size=n) for p in io.load_json(TESTDATA / rel)]


def load_chain(rel):
    return io.parse_chain(io.load_json(TESTDATA / rel))


@pytest.fixture
def mixed():
    return load_matrix("grouping/mixed_4x5.json")


@pytest.fixture
def nonneg():
    return load_matrix("grouping/nonnegative_4x3.json")


@pytest.fixture
def signed():
    return load_matrix("grouping/signed_2x4.json")


@pytest.fixture
def stable22():
    return load_matrix("grouping/stable_2x2.json")


@pytest.fixture
def three_factors():
    return load_chain("product/three_factors.json")[0]


@pytest.fixture
def four_agents():
    return load_model("degroot/four_agents_total.json")


@pytest.fixture
def four_agents_partial():
    return load_model("degroot/four_agents_partial.json")


@pytest.fixture
def six_subgroup():
    return load_model("degroot/six_agents_subgroup.json")


@pytest.fixture
def six_subgroup_chain():
    return load_partitions("degroot/six_agents_subgroup_chain.json", 6)


@pytest.fixture
def six_swaps():
    raw = io.load_json(TESTDATA / "degroot/six_agents_subgroup_swaps.json")
    return {k: io.parse_matrix(v) for k, v in raw.items()}
