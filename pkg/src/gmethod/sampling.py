"""Random generators for exact test data.

Block-stable matrices are built by first drawing the grouped matrix and then
splitting every block constant across the columns of its block, so
membership holds by construction.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

from .matrix import RMatrix
from .partitions import Partition, trivial

__all__ = [
    "random_partition",
    "random_coarsening",
    "random_refinement_chain",
    "random_probability_vector",
    "random_rational_vector",
    "random_stochastic",
    "random_stable",
    "random_block_stable",
    "random_similar",
    "random_forward_chain",
    "random_degroot_chain",
]


def random_partition(rng: np.random.Generator, n: int, max_blocks: int | None = None) -> Partition:
    k = int(rng.integers(1, (max_blocks or n) + 1))
    labels = rng.integers(0, k, size=n)
    groups: dict[int, list[int]] = {}
    for i, lab in enumerate(labels, start=1):
        groups.setdefault(int(lab), []).append(i)
    return Partition(n, groups.values())


def random_coarsening(rng: np.random.Generator, p: Partition) -> Partition:
    """Merge the blocks of ``p`` according to a random partition of its blocks."""
    merge = random_partition(rng, len(p))
    return Partition(p.ground_size, [[i for k in grp for i in p.blocks[k - 1]] for grp in merge.blocks])


def random_refinement_chain(rng: np.random.Generator, first: Partition, length: int,
                            end_trivial: bool = True) -> list[Partition]:
    """``length`` partitions starting at ``first``, each coarser than the last."""
    out = [first]
    while len(out) < length:
        out.append(random_coarsening(rng, out[-1]))
    if end_trivial:
        out[-1] = trivial(first.ground_size)
    return out


def _composition(rng: np.random.Generator, total: Fraction, parts: int, max_den: int,
                 signed: bool = False) -> list[Fraction]:
    # ``parts`` rationals summing to ``total``; nonnegative when total >= 0 and not signed
    if parts == 1:
        return [total]
    if signed:
        head = [Fraction(int(rng.integers(-max_den, max_den + 1)), int(rng.integers(1, max_den + 1)))
                for _ in range(parts - 1)]
        return head + [total - sum(head, Fraction(0))]
    w = rng.integers(0, max_den + 1, size=parts)
    if w.sum() == 0:
        w[int(rng.integers(parts))] = 1
    s = int(w.sum())
    return [total * Fraction(int(x), s) for x in w]


def random_probability_vector(rng: np.random.Generator, n: int, max_den: int = 6) -> list[Fraction]:
    return _composition(rng, Fraction(1), n, max_den)


def random_rational_vector(rng: np.random.Generator, n: int, max_num: int = 100,
                           max_den: int = 12) -> RMatrix:
    """Row of ``n`` rationals ``a/b`` with ``|a| <= max_num`` and ``1 <= b <= max_den``."""
    nums = rng.integers(-max_num, max_num + 1, size=n)
    dens = rng.integers(1, max_den + 1, size=n)
    return RMatrix.row([Fraction(int(a), int(b)) for a, b in zip(nums, dens)])


def random_stochastic(rng: np.random.Generator, m: int, n: int, max_den: int = 6) -> RMatrix:
    return RMatrix([random_probability_vector(rng, n, max_den) for _ in range(m)])


def random_stable(rng: np.random.Generator, m: int, n: int, max_den: int = 6) -> RMatrix:
    """Stochastic matrix with ``m`` copies of one random row."""
    row = random_probability_vector(rng, n, max_den)
    return RMatrix([row] * m)


def random_block_stable(rng: np.random.Generator, rows: Partition, cols: Partition,
                        kind: str = "stochastic", max_den: int = 6) -> RMatrix:
    """Random matrix that is block stable for ``(rows, cols)``.

    ``kind`` is ``"stochastic"``, ``"nonnegative"`` or ``"real"``.
    """
    kr, kc = len(rows), len(cols)
    if kind == "stochastic":
        grouped = [random_probability_vector(rng, kc, max_den) for _ in range(kr)]
    elif kind == "nonnegative":
        grouped = [[Fraction(int(rng.integers(0, 2 * max_den)), int(rng.integers(1, max_den + 1)))
                    for _ in range(kc)] for _ in range(kr)]
    elif kind == "real":
        grouped = [[Fraction(int(rng.integers(-2 * max_den, 2 * max_den)), int(rng.integers(1, max_den + 1)))
                    for _ in range(kc)] for _ in range(kr)]
    else:
        raise ValueError(f"unknown kind {kind!r}")
    signed = kind == "real"
    M = [[Fraction(0)] * cols.ground_size for _ in range(rows.ground_size)]
    for a, K in enumerate(rows.blocks):
        for b, L in enumerate(cols.blocks):
            for i in K:
                for j, v in zip(L, _composition(rng, grouped[a][b], len(L), max_den, signed)):
                    M[i - 1][j - 1] = v
    return RMatrix(M)


def random_similar(rng: np.random.Generator, P: RMatrix, rows: Partition, cols: Partition,
                   max_den: int = 6) -> RMatrix:
    """Redistribute each row's block sums of ``P`` across the block.

    The grouped matrix is unchanged; nonnegativity is kept when the block
    sums are nonnegative.
    """
    M = [[Fraction(0)] * P.cols for _ in range(P.rows)]
    for K in rows.blocks:
        for L in cols.blocks:
            total = sum((P.entry(K[0], j) for j in L), Fraction(0))
            for i in K:
                for j, v in zip(L, _composition(rng, total, len(L), max_den, signed=total < 0)):
                    M[i - 1][j - 1] = v
    return RMatrix(M)


def random_forward_chain(rng: np.random.Generator, sizes: Sequence[int], kind: str = "stochastic",
                         max_den: int = 6) -> tuple[list[RMatrix], list[Partition]]:
    """Random partitions over ``sizes`` and block-stable matrices between them."""
    parts = [random_partition(rng, n) for n in sizes]
    mats = [random_block_stable(rng, parts[b], parts[b + 1], kind, max_den)
            for b in range(len(sizes) - 1)]
    return mats, parts


def random_degroot_chain(rng: np.random.Generator, first: Partition, t: int,
                         max_den: int = 6) -> tuple[list[RMatrix], list[Partition]]:
    """Stochastic ``P_1..P_t`` with ``P_b`` block stable for rows ``D_{b+1}``
    and columns ``D_b``, where ``D_1 = first`` and ``D_{t+1}`` is one block."""
    parts = [first] + [random_partition(rng, first.ground_size) for _ in range(t - 1)]
    parts.append(trivial(first.ground_size))
    mats = [random_block_stable(rng, parts[b + 1], parts[b], "stochastic", max_den) for b in range(t)]
    return mats, parts
