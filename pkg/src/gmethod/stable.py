"""Block stability of rational matrices and the grouped-matrix operator.

A matrix ``P`` is block stable for a row partition ``rows`` and a column
partition ``cols`` when every block ``P[K, L]`` (``K`` in ``rows``, ``L`` in
``cols``) has equal row sums. The common sums form the grouped matrix,
a ``len(rows) x len(cols)`` matrix labelled by the blocks themselves.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from .errors import InvalidInputError, NotBlockStableError
from .matrix import RMatrix, format_rational
from .partitions import Partition, singletons, trivial

__all__ = [
    "MatrixClass",
    "StabilityReport",
    "GroupedMatrix",
    "submatrix_rows",
    "submatrix_cols",
    "submatrix_block",
    "is_generalized_stochastic",
    "classify",
    "is_stochastic",
    "in_stable_class",
    "is_block_stable",
    "coarsest_stable_partition",
    "grouped",
    "is_stable",
]


class MatrixClass(enum.Enum):
    STOCHASTIC = "stochastic"
    NONNEGATIVE = "nonnegative"
    REAL = "real"

    def includes(self, other: "MatrixClass") -> bool:
        """True if every matrix of class ``other`` also belongs to ``self``."""
        order = [MatrixClass.STOCHASTIC, MatrixClass.NONNEGATIVE, MatrixClass.REAL]
        return order.index(other) <= order.index(self)


@dataclass(frozen=True)
class StabilityReport:
    """Outcome of a block-stability check.

    On failure, ``rows`` holds two 1-based row indices from the same row
    block whose sums over the column block ``col_block`` differ
    (``sums`` gives the two values).
    """

    holds: bool
    rows: Optional[tuple[int, int]] = None
    row_block: Optional[tuple[int, ...]] = None
    col_block: Optional[tuple[int, ...]] = None
    sums: Optional[tuple[Fraction, Fraction]] = None

    def __bool__(self) -> bool:
        return self.holds

    def describe(self) -> str:
        if self.holds:
            return "block stable"
        i, j = self.rows
        return (f"rows {i} and {j} (block {list(self.row_block)}) have sums "
                f"{self.sums[0]} and {self.sums[1]} over columns {list(self.col_block)}")

    def to_json(self) -> dict:
        if self.holds:
            return {"holds": True}
        return {
            "holds": False,
            "witness": {
                "rows": list(self.rows),
                "row_block": list(self.row_block),
                "col_block": list(self.col_block),
                "sums": [format_rational(s) for s in self.sums],
            },
        }


@dataclass(frozen=True)
class GroupedMatrix:
    """Matrix of block row-sum constants, labelled by partition blocks.

    Row ``k`` corresponds to ``row_labels.blocks[k]`` and column ``l`` to
    ``col_labels.blocks[l]``. Products check that the inner labels agree.
    """

    row_labels: Partition
    col_labels: Partition
    matrix: RMatrix

    def __post_init__(self):
        if self.matrix.shape != (len(self.row_labels), len(self.col_labels)):
            raise InvalidInputError(
                f"grouped entries {self.matrix.shape} do not match "
                f"{len(self.row_labels)}x{len(self.col_labels)} labels")

    def __matmul__(self, other: "GroupedMatrix") -> "GroupedMatrix":
        if not isinstance(other, GroupedMatrix):
            return NotImplemented
        if self.col_labels != other.row_labels:
            raise InvalidInputError(
                f"inner labels differ: {self.col_labels!r} vs {other.row_labels!r}")
        return GroupedMatrix(self.row_labels, other.col_labels, self.matrix @ other.matrix)

    def entry(self, row_block: Iterable[int], col_block: Iterable[int]) -> Fraction:
        """Entry addressed by its row and column blocks."""
        k = self.row_labels.blocks.index(tuple(sorted(row_block)))
        l = self.col_labels.blocks.index(tuple(sorted(col_block)))
        return self.matrix.entry(k + 1, l + 1)

    def restrict_columns(self, col_blocks: Iterable[Iterable[int]]) -> RMatrix:
        """Columns labelled by the given blocks, in the order given."""
        idx = [self.col_labels.blocks.index(tuple(sorted(b))) + 1 for b in col_blocks]
        return RMatrix([[self.matrix.entry(i, j) for j in idx]
                        for i in range(1, self.matrix.rows + 1)])

    def to_json(self, decimal: bool = False) -> dict:
        out = self.matrix.to_json(decimal)
        out["row_labels"] = self.row_labels.to_json()
        out["col_labels"] = self.col_labels.to_json()
        return out


def submatrix_rows(P: RMatrix, rows: Iterable[int]) -> RMatrix:
    """Rows of ``P`` in the 1-based set ``rows``, ascending."""
    return P.select(rows=rows)


def submatrix_cols(P: RMatrix, cols: Iterable[int]) -> RMatrix:
    """Columns of ``P`` in the 1-based set ``cols``, ascending."""
    return P.select(cols=cols)


def submatrix_block(P: RMatrix, rows: Iterable[int], cols: Iterable[int]) -> RMatrix:
    return P.select(rows=rows, cols=cols)


def is_generalized_stochastic(P: RMatrix) -> Optional[Fraction]:
    """Common row sum of ``P`` if all row sums agree, else ``None``.

    A zero common sum is a valid answer (``Fraction(0)``), so test the
    result with ``is not None``.
    """
    sums = P.row_sums()
    return sums[0] if all(s == sums[0] for s in sums) else None


def is_stochastic(P: RMatrix) -> bool:
    return P.is_nonnegative() and all(s == 1 for s in P.row_sums())


def classify(P: RMatrix) -> MatrixClass:
    """Finest of stochastic / nonnegative / real that applies to ``P``."""
    if is_stochastic(P):
        return MatrixClass.STOCHASTIC
    if P.is_nonnegative():
        return MatrixClass.NONNEGATIVE
    return MatrixClass.REAL


def _check_dims(P: RMatrix, rows: Optional[Partition], cols: Partition) -> None:
    if rows is not None and rows.ground_size != P.rows:
        raise InvalidInputError(
            f"row partition is over {rows.ground_size} indices, matrix has {P.rows} rows")
    if cols.ground_size != P.cols:
        raise InvalidInputError(
            f"column partition is over {cols.ground_size} indices, matrix has {P.cols} columns")


def _signatures(P: RMatrix, cols: Partition) -> np.ndarray:
    return P.grouped_column_sums(cols.labels(), len(cols))


def is_block_stable(P: RMatrix, rows: Partition, cols: Partition) -> StabilityReport:
    """Check that every block ``P[K, L]`` is generalized stochastic."""
    _check_dims(P, rows, cols)
    sig = _signatures(P, cols)
    for K in rows.blocks:
        base = K[0] - 1
        for i in K[1:]:
            diff = np.nonzero(sig[i - 1] != sig[base])[0]
            if diff.size:
                l = int(diff[0])
                d = P.denominator
                return StabilityReport(
                    holds=False,
                    rows=(K[0], i),
                    row_block=K,
                    col_block=cols.blocks[l],
                    sums=(Fraction(int(sig[base, l]), d), Fraction(int(sig[i - 1, l]), d)),
                )
    return StabilityReport(holds=True)


def in_stable_class(P: RMatrix, rows: Partition, cols: Partition,
                    kind: MatrixClass = MatrixClass.STOCHASTIC) -> bool:
    """Membership in the block-stable class of the given scalar kind."""
    return kind.includes(classify(P)) and is_block_stable(P, rows, cols).holds


def coarsest_stable_partition(P: RMatrix, cols: Partition) -> Partition:
    """Coarsest row partition making ``P`` block stable on ``cols``.

    Rows are grouped by their vector of sums over the column blocks.
    """
    _check_dims(P, None, cols)
    sig = _signatures(P, cols)
    groups: dict[tuple, list[int]] = {}
    for i, row in enumerate(sig.tolist(), start=1):
        groups.setdefault(tuple(row), []).append(i)
    return Partition(P.rows, groups.values())


def grouped(P: RMatrix, rows: Partition, cols: Partition) -> GroupedMatrix:
    """The grouped matrix of ``P`` with respect to ``(rows, cols)``.

    Raises
    ------
    NotBlockStableError
        If some block ``P[K, L]`` has unequal row sums.
    """
    report = is_block_stable(P, rows, cols)
    if not report.holds:
        raise NotBlockStableError(report)
    sig = _signatures(P, cols)
    first = [K[0] - 1 for K in rows.blocks]
    entries = RMatrix._from_parts(np.array(sig[first, :]), P.denominator)
    return GroupedMatrix(rows, cols, entries)


def is_stable(P: RMatrix) -> bool:
    """True iff all rows of ``P`` are identical."""
    return P.rows_identical()


def stable_on(P: RMatrix, cols: Partition) -> bool:
    """True iff ``P`` is block stable for the one-block row partition."""
    return is_block_stable(P, trivial(P.rows), cols).holds


def always_stable_rows(P: RMatrix) -> Partition:
    """The singleton row partition, for which any ``P`` is block stable."""
    return singletons(P.rows)
