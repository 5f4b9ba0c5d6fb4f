from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracle
from gmethod import sampling
from gmethod.chains import (
    are_similar, block_expansion, consensus_value, grouped_product, similarity_key,
    stable_rows, structural_preconditions, swap_similar, validate_chain,
)
from gmethod.distributed import hypercube_partitions, hypercube_schedule
from gmethod.errors import InvalidInputError, NotBlockStableError, SimilarityError
from gmethod.matrix import RMatrix
from gmethod.partitions import singletons, split_around, trivial
from gmethod.stable import grouped
from conftest import F, load_chain, load_matrix, part

seeds = st.integers(0, 2**32 - 1)
sizes = st.lists(st.integers(1, 6), min_size=2, max_size=5)
EIGHTH = F("1/8")


def test_validate_chain(three_factors):
    assert three_factors.length == 3
    assert three_factors.sizes == [4, 4, 4, 4]
    P1 = three_factors.matrices[0]
    assert validate_chain([RMatrix([["1/3", "2/3"], [1, 0]])], [singletons(2), singletons(2)])
    with pytest.raises(NotBlockStableError) as exc:
        validate_chain([P1], [trivial(4), part([1, 2], [3, 4])])
    assert exc.value.position == 1
    with pytest.raises(InvalidInputError):
        validate_chain([P1], [trivial(4)])
    with pytest.raises(InvalidInputError):
        validate_chain([P1], [trivial(3), trivial(4)])


def test_unstable_fixture_is_rejected():
    with pytest.raises(NotBlockStableError):
        load_chain("product/unstable_first_factor.json")


def test_grouped_product_examples(three_factors):
    g = grouped_product(three_factors)
    assert g.matrix.to_fractions() == [[F("2/16"), F("2/16"), F("10/16"), F("2/16")]]
    P = RMatrix([["1/2", "1/2"], ["1/4", "3/4"]])
    single = validate_chain([P], [singletons(2), singletons(2)])
    assert grouped_product(single) == grouped(P, singletons(2), singletons(2))


def test_grouped_product_of_cube_schedule():
    W = hypercube_schedule(3).steps
    chain = validate_chain(W[::-1], hypercube_partitions(3)[::-1])
    assert grouped_product(chain).matrix.to_fractions() == [[EIGHTH] * 8]


def test_stable_rows_examples(three_factors):
    cert = stable_rows(three_factors, range(1, 5))
    assert cert.stable_row.to_fractions() == [[EIGHTH, EIGHTH, F("5/8"), EIGHTH]]
    assert cert.verified
    assert cert.full_product_block.rows_identical()
    assert cert.full_product_block.row_values(1) == cert.stable_row.row_values(1)
    assert cert.to_json()["stable_row"] == ["1/8", "1/8", "5/8", "1/8"]

    partial, kept = load_chain("product/three_factors_partial.json")
    cert = stable_rows(partial, kept)
    assert kept == [1, 2]
    assert cert.stable_row.to_fractions() == [[EIGHTH, EIGHTH]]
    assert cert.verified


def test_stable_rows_single_stable_factor():
    P = RMatrix([["1/6", "1/3", "1/2"]] * 3)
    cert = stable_rows(validate_chain([P], [trivial(3), singletons(3)]), [1, 2, 3])
    assert cert.stable_row.row_values(1) == P.row_values(1)


def test_stable_rows_skips_brute_force_above_bound(three_factors):
    cert = stable_rows(three_factors, [1, 2, 3, 4], work_bound=0)
    assert not cert.verified and cert.full_product_block is None
    assert cert.stable_row.to_fractions() == [[EIGHTH, EIGHTH, F("5/8"), EIGHTH]]


def test_stable_rows_boundary_checks(three_factors):
    with pytest.raises(InvalidInputError):
        stable_rows(three_factors, [1, 2])
    P = RMatrix.identity(2)
    with pytest.raises(InvalidInputError):
        stable_rows(validate_chain([P], [singletons(2), singletons(2)]), [1, 2])
    with pytest.raises(InvalidInputError):
        stable_rows(three_factors, [])


def test_structural_report(three_factors):
    rep = structural_preconditions(three_factors)
    assert rep.u == 2
    assert (rep.w, rep.w_scope, rep.w_holds) == (3, "kept", True)
    assert rep.w_blocks == ((1, 2), (3, 4))
    P = RMatrix([["1/6", "1/3", "1/2"]] * 3)
    rep = structural_preconditions(validate_chain([P], [trivial(3), singletons(3)]))
    assert (rep.u, rep.w) == (1, 1)


def test_structural_not_applicable():
    P = RMatrix([[1]])
    rep = structural_preconditions(validate_chain([P], [trivial(1), trivial(1)]))
    assert rep.to_json()["u"] == "not applicable"
    assert rep.to_json()["w"] == "not applicable"


def test_similarity_examples(six_swaps, six_subgroup, six_subgroup_chain):
    P, Q, T = (load_matrix(f"similarity/{name}_4x4.json") for name in ("first", "second", "third"))
    D = part([1, 2], [3, 4])
    keys = [similarity_key(M, D, D) for M in (P, Q, T)]
    assert keys[0] == keys[1] == keys[2]
    assert keys[0].matrix == RMatrix([["1/4", "3/4"], ["1/2", "1/2"]])
    assert are_similar(P, P, D, D)
    P2 = six_subgroup.weights[1]
    D2, D3 = six_subgroup_chain[1], six_subgroup_chain[2]
    assert are_similar(P2, six_swaps["second_sparse"], D3, D2)
    assert are_similar(P2, six_swaps["second_uniform_rows"], D3, D2)
    assert not are_similar(P, RMatrix.identity(4), D, D)


def _forward(model, parts):
    # application-order model and partitions as a forward chain
    return validate_chain(list(model.weights)[::-1], list(parts)[::-1])


def test_swap_similar_examples(six_subgroup, six_subgroup_chain, six_swaps):
    chain = _forward(six_subgroup, six_subgroup_chain)
    base = stable_rows(chain, range(1, 7)).stable_row
    # application-order P_2 sits at forward position 3, P_4 at position 1
    for position, key in ((3, "second_uniform_rows"), (3, "second_sparse"), (1, "fourth_reducible")):
        swapped = swap_similar(chain, position, six_swaps[key])
        assert stable_rows(swapped, range(1, 7)).stable_row == base
    same = swap_similar(chain, 2, chain.matrices[1])
    assert same == chain


def test_swap_similar_rejects(six_subgroup, six_subgroup_chain):
    chain = _forward(six_subgroup, six_subgroup_chain)
    with pytest.raises(SimilarityError):
        swap_similar(chain, 3, RMatrix.identity(6))
    with pytest.raises(SimilarityError):
        swap_similar(chain, 3, RMatrix.identity(5))
    with pytest.raises(InvalidInputError):
        swap_similar(chain, 9, RMatrix.identity(6))


def test_consensus_value():
    assert consensus_value(RMatrix.row(["1/2", "1/2"]), [F(2), F(4)]) == 3


@given(seeds, sizes, st.sampled_from(["stochastic", "nonnegative", "real"]))
def test_homomorphism(seed, ns, kind):
    rng = np.random.default_rng(seed)
    mats, parts = sampling.random_forward_chain(rng, ns, kind)
    chain = validate_chain(mats, parts)
    product = mats[0]
    for M in mats[1:]:
        product = product @ M
    assert grouped(product, parts[0], parts[-1]) == grouped_product(chain)


@given(seeds, sizes, st.data())
def test_stable_row_equals_brute_force(seed, ns, data):
    rng = np.random.default_rng(seed)
    K = data.draw(st.sets(st.integers(1, ns[-1]), min_size=1))
    mats, parts = sampling.random_forward_chain(rng, ns)
    parts[0], parts[-1] = trivial(ns[0]), split_around(ns[-1], K)
    mats = [sampling.random_block_stable(rng, parts[b], parts[b + 1]) for b in range(len(mats))]
    cert = stable_rows(validate_chain(mats, parts), K)
    brute = oracle.cols(oracle.chain([M.to_fractions() for M in mats]), sorted(K))
    assert cert.verified
    assert all(r == cert.stable_row.row_values(1) for r in brute)


@given(seeds, st.integers(1, 8), st.integers(1, 8), st.integers(1, 8))
def test_block_expansion(seed, m, k, n):
    rng = np.random.default_rng(seed)
    A = sampling.random_block_stable(rng, singletons(m), singletons(k), "real")
    B = sampling.random_block_stable(rng, singletons(k), singletons(n), "real")
    inner = sampling.random_partition(rng, k)
    U = sorted(set(sampling.random_partition(rng, m).blocks[0]))
    V = sorted(set(sampling.random_partition(rng, n).blocks[-1]))
    expected = oracle.cols(oracle.rows(oracle.matmul(A.to_fractions(), B.to_fractions()), U), V)
    assert block_expansion(A, B, inner, U, V).to_fractions() == expected


@given(seeds, st.integers(1, 8), st.integers(1, 8))
def test_similarity_is_equivalence(seed, m, n):
    rng = np.random.default_rng(seed)
    rows, cols = sampling.random_partition(rng, m), sampling.random_partition(rng, n)
    P = sampling.random_block_stable(rng, rows, cols)
    Q = sampling.random_similar(rng, P, rows, cols)
    R = sampling.random_similar(rng, Q, rows, cols)
    assert are_similar(P, P, rows, cols)
    assert are_similar(P, Q, rows, cols) and are_similar(Q, P, rows, cols)
    assert are_similar(Q, R, rows, cols) and are_similar(P, R, rows, cols)


@given(seeds, sizes, st.data())
def test_swap_preserves_stable_row(seed, ns, data):
    rng = np.random.default_rng(seed)
    mats, parts = sampling.random_forward_chain(rng, ns)
    parts[0], parts[-1] = trivial(ns[0]), singletons(ns[-1])
    mats = [sampling.random_block_stable(rng, parts[b], parts[b + 1]) for b in range(len(mats))]
    chain = validate_chain(mats, parts)
    b = data.draw(st.integers(1, chain.length))
    other = sampling.random_similar(rng, mats[b - 1], parts[b - 1], parts[b])
    kept = range(1, ns[-1] + 1)
    assert stable_rows(swap_similar(chain, b, other), kept).stable_row == stable_rows(chain, kept).stable_row
