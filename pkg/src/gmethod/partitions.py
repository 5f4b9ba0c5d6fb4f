"""Partitions of ``{1, ..., n}`` and the refinement order.

All indices are 1-based. A :class:`Partition` is stored in canonical form:
indices inside a block ascending, blocks ordered by their smallest element.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvalidInputError

__all__ = [
    "Partition",
    "is_finer",
    "singletons",
    "trivial",
    "split_around",
    "meet_refines_chain",
]


def _canonical(blocks: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    out = []
    for block in blocks:
        b = tuple(sorted(block))
        if len(b) != len(set(b)):
            raise InvalidInputError(f"block {list(b)} repeats an index")
        out.append(b)
    out.sort(key=lambda b: b[0] if b else 0)
    return tuple(out)


@dataclass(frozen=True)
class Partition:
    """An ordered set partition of ``{1, ..., ground_size}``.

    Parameters
    ----------
    ground_size : int
        Size ``n`` of the ground set.
    blocks : sequence of sequences of int
        Nonempty, pairwise disjoint blocks covering ``1..n``. Any order is
        accepted; the stored form is canonical.
    """

    ground_size: int
    blocks: tuple[tuple[int, ...], ...]

    def __init__(self, ground_size: int, blocks: Iterable[Iterable[int]]):
        if not isinstance(ground_size, int) or isinstance(ground_size, bool) or ground_size < 1:
            raise InvalidInputError(f"ground size must be a positive integer, got {ground_size!r}")
        canon = _canonical(blocks)
        seen: set[int] = set()
        for b in canon:
            if not b:
                raise InvalidInputError("partitions may not contain an empty block")
            for i in b:
                if not isinstance(i, int) or isinstance(i, bool):
                    raise InvalidInputError(f"index {i!r} is not an integer")
                if i < 1 or i > ground_size:
                    raise InvalidInputError(f"index {i} outside 1..{ground_size}")
                if i in seen:
                    raise InvalidInputError(f"index {i} appears in two blocks")
                seen.add(i)
        if len(seen) != ground_size:
            missing = sorted(set(range(1, ground_size + 1)) - seen)
            raise InvalidInputError(f"blocks do not cover indices {missing}")
        object.__setattr__(self, "ground_size", ground_size)
        object.__setattr__(self, "blocks", canon)

    @classmethod
    def from_blocks(cls, blocks: Sequence[Iterable[int]]) -> "Partition":
        """Build a partition whose ground size is the largest index present."""
        blocks = [list(b) for b in blocks]
        if not blocks or not any(blocks):
            raise InvalidInputError("a partition needs at least one nonempty block")
        flat = [i for b in blocks for i in b]
        if not all(isinstance(i, int) and not isinstance(i, bool) for i in flat):
            raise InvalidInputError("partition indices must be integers")
        return cls(max(flat), blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __repr__(self) -> str:
        inner = ",".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)
        return f"Partition({inner})"

    def labels(self) -> list[int]:
        """0-based block number of every index, as a list of length ``n``."""
        lab = [0] * self.ground_size
        for k, b in enumerate(self.blocks):
            for i in b:
                lab[i - 1] = k
        return lab

    def block_of(self, i: int) -> tuple[int, ...]:
        for b in self.blocks:
            if i in b:
                return b
        raise InvalidInputError(f"index {i} outside 1..{self.ground_size}")

    @property
    def is_trivial(self) -> bool:
        """True for the one-block partition."""
        return len(self.blocks) == 1

    @property
    def is_singletons(self) -> bool:
        """True for the finest partition."""
        return len(self.blocks) == self.ground_size

    def to_json(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]


def _check_size(n) -> None:
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InvalidInputError(f"n must be a positive integer, got {n!r}")


def is_finer(a: Partition, b: Partition) -> bool:
    """Return True iff every block of ``a`` lies inside some block of ``b``."""
    if a.ground_size != b.ground_size:
        raise InvalidInputError(
            f"ground sizes differ: {a.ground_size} vs {b.ground_size}")
    lab = b.labels()
    return all(len({lab[i - 1] for i in block}) == 1 for block in a.blocks)


def singletons(n: int) -> Partition:
    """The finest partition ``({1}, {2}, ..., {n})``."""
    _check_size(n)
    return Partition(n, [[i] for i in range(1, n + 1)])


def trivial(n: int) -> Partition:
    """The one-block partition ``({1, ..., n})``."""
    _check_size(n)
    return Partition(n, [range(1, n + 1)])


def split_around(n: int, kept: Iterable[int]) -> Partition:
    """Singletons for every kept index plus one block holding the rest.

    Equals ``singletons(n)`` when at most one index is left out.
    """
    _check_size(n)
    kept = set(kept)
    if not kept:
        raise InvalidInputError("kept set must be nonempty")
    bad = [k for k in kept if not isinstance(k, int) or isinstance(k, bool) or not 1 <= k <= n]
    if bad:
        raise InvalidInputError(f"kept indices {sorted(map(str, bad))} outside 1..{n}")
    rest = [i for i in range(1, n + 1) if i not in kept]
    blocks = [[j] for j in sorted(kept)]
    if rest:
        blocks.append(rest)
    return Partition(n, blocks)


def meet_refines_chain(parts: Sequence[Partition]) -> bool:
    """True iff ``parts[0] <= parts[1] <= ...`` in the refinement order."""
    parts = list(parts)
    if parts:
        n = parts[0].ground_size
        for p in parts:
            if p.ground_size != n:
                raise InvalidInputError("partitions in a chain must share a ground size")
    return all(is_finer(a, b) for a, b in zip(parts, parts[1:]))
