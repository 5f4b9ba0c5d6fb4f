from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracle
from gmethod import io, sampling
from gmethod.degroot import DeGrootModel, find_chain, simulate
from gmethod.distributed import (
    Graph, VertexLabeling, WeightSchedule, complete_graph, degroot_on_complete_graph,
    hybrid_graph, hybrid_leader_scenario, hybrid_schedule, hypercube_graph,
    hypercube_partitions, hypercube_schedule, hypercube_schedule_on, run_schedule,
    s3_swapping_schedule, support_violations, verify_embedding,
)
from gmethod.errors import InvalidInputError
from gmethod.matrix import RMatrix
from gmethod.partitions import singletons
from conftest import F, TESTDATA, load_model

seeds = st.integers(0, 2**32 - 1)
HALF = F(1, 2)


def cycle(n):
    return Graph(n, [(i, i % n + 1) for i in range(1, n + 1)])


def test_graph_validation():
    g = Graph(3, [(1, 2), (3, 2)])
    assert g.neighbors(2) == [1, 3] and g.has_edge(2, 1)
    for edges in ([(1, 1)], [(1, 2), (2, 1)], [(1, 4)]):
        with pytest.raises(InvalidInputError):
            Graph(3, edges)
    with pytest.raises(InvalidInputError):
        Graph(3, [(1, 2)])
    loose = Graph(3, [(1, 2)], require_connected=False)
    assert not loose.is_connected() and loose.components() == [[1, 2], [3]]


def test_labeling_validation():
    with pytest.raises(InvalidInputError):
        VertexLabeling(1, ("0", "0"))
    with pytest.raises(InvalidInputError):
        VertexLabeling(2, ("00", "01", "10"))
    with pytest.raises(InvalidInputError):
        VertexLabeling(1, ("0", "2"))
    assert VertexLabeling.canonical(2).bits == ("00", "01", "10", "11")


def test_cube3_weights_as_displayed():
    W1, W2, W3 = (W.to_fractions() for W in hypercube_schedule(3).steps)
    for W, dist in ((W1, 1), (W2, 2), (W3, 4)):
        for x in range(8):
            expected = [HALF if y in (x, x ^ dist) else 0 for y in range(8)]
            assert W[x] == expected


def test_cube_examples():
    (W,) = hypercube_schedule(1).steps
    assert W.to_fractions() == [[HALF, HALF], [HALF, HALF]]
    assert hypercube_schedule(3).product() == RMatrix.constant(8, 8, F(1, 8))
    assert len(hypercube_graph(3).edges) == 12
    with pytest.raises(InvalidInputError):
        hypercube_schedule(0)


def test_verify_embedding():
    lab = VertexLabeling.canonical(3)
    assert verify_embedding(hypercube_graph(3), lab)
    shuffled = VertexLabeling(3, tuple(reversed(lab.bits)))
    assert verify_embedding(complete_graph(8), shuffled)
    assert not verify_embedding(cycle(8), lab)
    with pytest.raises(InvalidInputError):
        verify_embedding(complete_graph(4), lab)


def test_embedding_fixtures():
    lab = io.parse_labeling(io.load_json(TESTDATA / "averaging/cube3_shuffled_labels.json"))
    cube = io.parse_graph(io.load_json(TESTDATA / "averaging/cube3.json"))
    c8 = io.parse_graph(io.load_json(TESTDATA / "averaging/cycle8.json"))
    k8 = io.parse_graph(io.load_json(TESTDATA / "averaging/complete8.json"))
    assert verify_embedding(k8, lab)
    assert not verify_embedding(c8, VertexLabeling.canonical(3))
    assert verify_embedding(cube, VertexLabeling.canonical(3))


def test_run_schedule_examples():
    run = run_schedule(hypercube_schedule(3), [0, 8, 0, 0, 0, 0, 0, 0])
    assert run.achieved_averaging and run.steps_used == 3
    assert run.final.row_values(1) == [1] * 8
    run = run_schedule(hypercube_schedule(2), ["5/3"] * 4)
    assert all(q.row_values(1) == [F(5, 3)] * 4 for q in run.trajectory)
    run = run_schedule(s3_swapping_schedule(), [1, 2, 3, 4, 5, 6])
    assert run.achieved_averaging and run.final.row_values(1) == [F(7, 2)] * 6
    with pytest.raises(InvalidInputError):
        run_schedule(hypercube_schedule(2), [1, 2, 3])


def test_neighbor_constraint_enforced():
    W = hypercube_schedule(3).steps
    with pytest.raises(InvalidInputError):
        WeightSchedule(W, cycle(8))
    loose = WeightSchedule(W, cycle(8), strict=False)
    assert loose.violations()
    with pytest.raises(InvalidInputError):
        run_schedule(loose, [1] * 8)


def test_s3_schedule():
    sched = s3_swapping_schedule()
    W1, W2 = sched.steps
    assert W1.row_sums() == [1] * 6 and W2.row_sums() == [1] * 6
    assert sched.product() == RMatrix.constant(6, 6, F(1, 6))
    assert sched.graph.is_connected()
    chain = find_chain(sched.steps, singletons(6))
    assert len(chain) == 3


def test_hybrid_scenario():
    assert hybrid_leader_scenario([8, 0, 0, 0, 0, 0, 0, 0]).final.row_values(1) == [1] * 8
    assert hybrid_leader_scenario(["2/3"] * 8).final.row_values(1) == [F(2, 3)] * 8
    run = hybrid_leader_scenario([1, 2, 3, 4, 5, 6, 7, 8])
    assert run.achieved_averaging
    assert run.violations == ((1, 1, 7), (1, 2, 6), (1, 6, 2), (1, 7, 1))
    assert hybrid_graph().has_edge(1, 2) and hybrid_graph().has_edge(3, 5)
    assert hybrid_schedule().product().rows_identical()
    with pytest.raises(InvalidInputError):
        hybrid_leader_scenario([1, 2, 3])


def test_degroot_as_graph_model(four_agents):
    on = degroot_on_complete_graph(four_agents)
    assert on.support_connected and on.graph.n == 4
    run = run_schedule(on.schedule, four_agents.p0)
    assert run.trajectory == simulate(four_agents, 4).states

    identity = load_model("degroot/identity_only.json")
    on = degroot_on_complete_graph(identity)
    assert not on.support_connected
    assert len(on.graph.edges) == 3

    on = degroot_on_complete_graph(load_model("degroot/three_agents_reducible.json"))
    assert not on.support_connected
    assert on.support_components == ((1, 2), (3,))


@given(seeds, st.integers(1, 8))
def test_hypercube_weights_doubly_stochastic_and_conserve_mass(seed, m):
    m = min(m, 6)
    rng = np.random.default_rng(seed)
    sched = hypercube_schedule(m)
    for W in sched.steps:
        assert W == W.T
        assert W.row_sums() == [1] * 2**m
    q0 = sampling.random_rational_vector(rng, 2**m)
    total = sum(q0.row_values(1))
    assert all(sum(q.row_values(1)) == total for q in run_schedule(sched, q0).trajectory)


@pytest.mark.parametrize("m", range(1, 7))
def test_hypercube_chain_recovery(m):
    assert find_chain(hypercube_schedule(m).steps, singletons(2**m)) == hypercube_partitions(m)


@settings(max_examples=50)
@given(seeds, st.integers(1, 4))
def test_embedding_transports_averaging(seed, m):
    rng = np.random.default_rng(seed)
    n = 2**m
    perm = rng.permutation(n)
    lab = VertexLabeling(m, tuple(format(int(x), f"0{m}b") for x in perm))
    cube = hypercube_graph(m)
    # relabel the cube's edges through the permutation, then add a few chords
    where = {int(x): v for v, x in enumerate(perm, start=1)}
    edges = {tuple(sorted((where[a - 1], where[b - 1]))) for a, b in cube.edges}
    for _ in range(int(rng.integers(0, 4))):
        a, b = rng.choice(n, 2, replace=False) + 1
        edges.add((int(min(a, b)), int(max(a, b))))
    g = Graph(n, sorted(edges))
    assert verify_embedding(g, lab)
    run = run_schedule(hypercube_schedule_on(g, lab), sampling.random_rational_vector(rng, n))
    assert run.achieved_averaging and run.steps_used == m


@given(seeds, st.integers(2, 8))
def test_support_violations_detected(seed, n):
    rng = np.random.default_rng(seed)
    W = sampling.random_stochastic(rng, n, n)
    path = Graph(n, [(i, i + 1) for i in range(1, n)])
    expected = [(1, i, j) for i in range(1, n + 1) for j in range(1, n + 1)
                if abs(i - j) > 1 and W.entry(i, j) != 0]
    assert support_violations([W], path) == expected
    if expected:
        with pytest.raises(InvalidInputError):
            WeightSchedule([W], path)
