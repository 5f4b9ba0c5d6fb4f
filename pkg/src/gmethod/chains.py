"""Products of block-stable matrices computed through their grouped matrices.

A chain pairs matrices ``P_1 .. P_t`` with partitions ``D_1 .. D_{t+1}``
such that ``P_b`` is block stable for rows ``D_b`` and columns ``D_{b+1}``.
Grouping then commutes with multiplication, so the grouped matrix of the
product is the product of the grouped factors. When ``D_1`` is the one-block
partition and ``D_{t+1}`` isolates a kept set ``K``, the ``K`` columns of the
product all share one row, which can be read off the grouped product.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import ConsistencyError, InvalidInputError, NotBlockStableError, SimilarityError
from .matrix import RMatrix, format_rational
from .partitions import Partition, split_around, trivial
from .stable import GroupedMatrix, grouped, is_block_stable

__all__ = [
    "PartitionChain",
    "ChainCertificate",
    "StructuralReport",
    "DEFAULT_WORK_BOUND",
    "validate_chain",
    "grouped_product",
    "stable_rows",
    "structural_preconditions",
    "similarity_key",
    "are_similar",
    "swap_similar",
]

DEFAULT_WORK_BOUND = 10**6


@dataclass(frozen=True)
class PartitionChain:
    """Validated matrices ``P_1..P_t`` with partitions ``D_1..D_{t+1}``.

    Build through :func:`validate_chain`; the constructor does not check
    stability itself.
    """

    matrices: tuple[RMatrix, ...]
    partitions: tuple[Partition, ...]

    @property
    def length(self) -> int:
        return len(self.matrices)

    @property
    def sizes(self) -> list[int]:
        """``n_1, ..., n_{t+1}``."""
        return [p.ground_size for p in self.partitions]

    def factor_grouped(self) -> list[GroupedMatrix]:
        return [grouped(P, self.partitions[b], self.partitions[b + 1])
                for b, P in enumerate(self.matrices)]


@dataclass(frozen=True)
class ChainCertificate:
    """Result of extracting the common row of ``(P_1 ... P_t)^K``.

    ``full_product_block`` is the directly multiplied ``K`` block and is
    ``None`` when the brute-force path was skipped for exceeding the work
    bound (``verified`` is then False).
    """

    chain: PartitionChain
    kept_set: tuple[int, ...]
    grouped_factors: tuple[GroupedMatrix, ...]
    stable_row: RMatrix
    full_product_block: Optional[RMatrix]
    verified: bool

    def to_json(self, decimal: bool = False) -> dict:
        return {
            "kept": list(self.kept_set),
            "stable_row": [format_rational(v, decimal) for v in self.stable_row.row_values(1)],
            "grouped_factors": [g.to_json(decimal) for g in self.grouped_factors],
            "verified": self.verified,
        }


@dataclass(frozen=True)
class StructuralReport:
    """Necessary structure of a chain satisfying the stable-row hypotheses.

    ``u`` is the first factor whose row partition is one block while its
    column partition is not. ``w`` is a factor with identical rows inside
    every non-singleton row block: either the last factor restricted to the
    kept columns (``w_scope == "kept"``) or an earlier factor on all columns
    (``w_scope == "all"``). Either index is ``None`` when the size
    hypotheses behind it fail; ``u_applicable``/``w_applicable`` say so.
    """

    u_applicable: bool
    u: Optional[int]
    w_applicable: bool
    w: Optional[int]
    w_scope: Optional[str]
    w_blocks: tuple[tuple[int, ...], ...] = field(default=())
    w_holds: bool = False

    def to_json(self) -> dict:
        return {
            "u": self.u if self.u_applicable else "not applicable",
            "w": self.w if self.w_applicable else "not applicable",
            "w_scope": self.w_scope,
            "w_blocks": [list(b) for b in self.w_blocks],
            "w_holds": self.w_holds,
        }


def validate_chain(matrices: Sequence[RMatrix], partitions: Sequence[Partition]) -> PartitionChain:
    """Check shapes and per-factor block stability.

    Raises
    ------
    InvalidInputError
        Wrong number of partitions or a size mismatch.
    NotBlockStableError
        The first factor that is not block stable, with its 1-based position.
    """
    matrices = tuple(matrices)
    partitions = tuple(partitions)
    if not matrices:
        raise InvalidInputError("a chain needs at least one matrix")
    if len(partitions) != len(matrices) + 1:
        raise InvalidInputError(
            f"{len(matrices)} matrices need {len(matrices) + 1} partitions, got {len(partitions)}")
    for b, P in enumerate(matrices, start=1):
        rows, cols = partitions[b - 1], partitions[b]
        if P.shape != (rows.ground_size, cols.ground_size):
            raise InvalidInputError(
                f"factor {b} has shape {P.shape}, partitions expect "
                f"({rows.ground_size}, {cols.ground_size})")
    for b, P in enumerate(matrices, start=1):
        report = is_block_stable(P, partitions[b - 1], partitions[b])
        if not report.holds:
            raise NotBlockStableError(report, position=b)
    return PartitionChain(matrices, partitions)


def grouped_product(chain: PartitionChain) -> GroupedMatrix:
    """Product of the factors' grouped matrices."""
    factors = chain.factor_grouped()
    out = factors[0]
    for g in factors[1:]:
        out = out @ g
    return out


def _kept(K: Iterable[int], n: int) -> tuple[int, ...]:
    kept = tuple(sorted(set(K)))
    if not kept:
        raise InvalidInputError("kept set must be nonempty")
    if kept[0] < 1 or kept[-1] > n:
        raise InvalidInputError(f"kept set {list(kept)} not inside 1..{n}")
    return kept


def _kept_block_product(matrices: Sequence[RMatrix], kept: Sequence[int]) -> RMatrix:
    # multiply right to left so only |K| columns are ever carried
    acc = matrices[-1].select(cols=kept)
    for P in reversed(matrices[:-1]):
        acc = P @ acc
    return acc


def _work(chain: PartitionChain, k: int) -> int:
    n = chain.sizes
    return sum(n[b] * n[b + 1] * k for b in range(chain.length))


def stable_rows(chain: PartitionChain, K: Iterable[int],
                work_bound: int = DEFAULT_WORK_BOUND) -> ChainCertificate:
    """The common row of ``(P_1 ... P_t)^K`` via grouped factors.

    Requires ``D_1 = trivial(n_1)`` and ``D_{t+1} = split_around(n_{t+1}, K)``.
    When the brute-force product costs at most ``work_bound`` scalar
    multiplications it is computed too and compared.

    Raises
    ------
    InvalidInputError
        The boundary partitions do not have the required form.
    ConsistencyError
        The grouped and brute-force results disagree.
    """
    n_last = chain.sizes[-1]
    kept = _kept(K, n_last)
    if chain.partitions[0] != trivial(chain.sizes[0]):
        raise InvalidInputError(f"first partition must be one block, got {chain.partitions[0]!r}")
    expected = split_around(n_last, kept)
    if chain.partitions[-1] != expected:
        raise InvalidInputError(
            f"last partition must be {expected!r} for kept set {list(kept)}, "
            f"got {chain.partitions[-1]!r}")
    factors = tuple(chain.factor_grouped())
    prod = factors[0]
    for g in factors[1:]:
        prod = prod @ g
    row = prod.restrict_columns([(j,) for j in kept])

    full = None
    verified = False
    if _work(chain, len(kept)) <= work_bound:
        full = _kept_block_product(chain.matrices, kept)
        expected_block = RMatrix.constant(full.rows, 1, 1) @ row
        if full != expected_block:
            raise ConsistencyError(
                f"grouped row {row!r} disagrees with the direct product block {full!r}")
        verified = True
    return ChainCertificate(chain, kept, factors, row, full, verified)


def _identical_rows(M: RMatrix, rows: Sequence[int]) -> bool:
    return M.select(rows=rows).rows_identical()


def structural_preconditions(chain: PartitionChain, K: Optional[Iterable[int]] = None) -> StructuralReport:
    """Locate the factors whose structure any stable-row chain must have.

    ``K`` defaults to the kept set read off the last partition (its
    singleton blocks, or everything when it is all singletons).
    """
    parts = chain.partitions
    sizes = chain.sizes
    t = chain.length
    if K is None:
        last = parts[-1]
        if last.is_singletons:
            kept = tuple(range(1, sizes[-1] + 1))
        else:
            kept = tuple(b[0] for b in last.blocks if len(b) == 1)
    else:
        kept = _kept(K, sizes[-1])

    u_ok = all(n >= 2 for n in sizes[1:])
    u = None
    if u_ok:
        for b in range(1, t + 1):
            if parts[b - 1].is_trivial and not parts[b].is_trivial:
                u = b
                break

    w_ok = all(n >= 2 for n in sizes[:-1])
    w = scope = None
    blocks: tuple = ()
    holds = False
    if w_ok:
        if not parts[t - 1].is_singletons:
            w, scope = t, "kept"
            blocks = tuple(U for U in parts[t - 1].blocks if len(U) >= 2)
            M = chain.matrices[t - 1].select(cols=kept)
            holds = all(_identical_rows(M, U) for U in blocks)
        else:
            for b in range(t - 1, 0, -1):
                if not parts[b - 1].is_singletons:
                    w, scope = b, "all"
                    blocks = tuple(U for U in parts[b - 1].blocks if len(U) >= 2)
                    holds = all(_identical_rows(chain.matrices[b - 1], U) for U in blocks)
                    break
    return StructuralReport(u_ok, u, w_ok, w, scope, blocks, holds)


def similarity_key(P: RMatrix, rows: Partition, cols: Partition) -> GroupedMatrix:
    """Grouped matrix of ``P``; equal keys mean similar matrices."""
    return grouped(P, rows, cols)


def are_similar(P: RMatrix, Q: RMatrix, rows: Partition, cols: Partition) -> bool:
    """True iff both are block stable on ``(rows, cols)`` with equal grouped matrices."""
    if not (is_block_stable(P, rows, cols).holds and is_block_stable(Q, rows, cols).holds):
        return False
    return similarity_key(P, rows, cols) == similarity_key(Q, rows, cols)


def swap_similar(chain: PartitionChain, position: int, replacement: RMatrix) -> PartitionChain:
    """Replace factor ``position`` (1-based) by a similar matrix.

    Raises
    ------
    SimilarityError
        The replacement is not block stable for the slot or its grouped
        matrix differs from the original's.
    """
    if not 1 <= position <= chain.length:
        raise InvalidInputError(f"position {position} outside 1..{chain.length}")
    rows, cols = chain.partitions[position - 1], chain.partitions[position]
    original = chain.matrices[position - 1]
    if replacement.shape != original.shape:
        raise SimilarityError(
            f"replacement shape {replacement.shape} differs from {original.shape}")
    report = is_block_stable(replacement, rows, cols)
    if not report.holds:
        raise SimilarityError(f"replacement is not block stable: {report.describe()}")
    if similarity_key(replacement, rows, cols) != similarity_key(original, rows, cols):
        raise SimilarityError(f"replacement at position {position} has a different grouped matrix")
    mats = list(chain.matrices)
    mats[position - 1] = replacement
    return PartitionChain(tuple(mats), chain.partitions)


def block_expansion(P1: RMatrix, P2: RMatrix, inner: Partition,
                    rows: Iterable[int], cols: Iterable[int]) -> RMatrix:
    """``sum over W in inner of P1[rows, W] @ P2[W, cols]``.

    Equals ``(P1 @ P2)[rows, cols]`` for any partition ``inner`` of the
    shared dimension.
    """
    rows, cols = list(rows), list(cols)
    total = RMatrix.zeros(len(rows), len(cols))
    for W in inner.blocks:
        total = total + P1.select(rows=rows, cols=W) @ P2.select(rows=W, cols=cols)
    return total


def consensus_value(row: RMatrix, values: Sequence[Fraction]) -> Fraction:
    """``sum_j row_j * values_j``."""
    return sum((a * b for a, b in zip(row.row_values(1), values)), Fraction(0))
