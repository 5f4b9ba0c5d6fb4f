"""Exact rational dense matrices.

An :class:`RMatrix` is an integer numerator array over one shared positive
denominator, kept in lowest terms. Numerators live in an ``int64`` array when
every intermediate result provably fits, and fall back to Python integers
(``dtype=object``) otherwise, so arithmetic never overflows and never rounds.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInputError

__all__ = ["RMatrix", "to_rational", "format_rational"]

# int64 headroom: results are checked against this before using int64 kernels.
_I64_SAFE = 2**62
_F64_EXACT = 2**53


def to_rational(x) -> Fraction:
    """Convert ``x`` to an exact :class:`~fractions.Fraction`.

    Accepts integers, fractions, decimal strings (``"0.2"``), ratio strings
    (``"-3/4"``) and finite floats. Floats are read through their shortest
    decimal representation, so ``0.2`` becomes ``1/5``.
    """
    if isinstance(x, bool):
        raise InvalidInputError("booleans are not numbers here")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise InvalidInputError(f"non-finite value {x!r}")
        return Fraction(repr(float(x)))
    if isinstance(x, str):
        s = x.strip()
        try:
            value = Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInputError(f"cannot parse {x!r} as a rational") from exc
        return value
    raise InvalidInputError(f"cannot interpret {type(x).__name__} {x!r} as a rational")


def format_rational(q: Fraction, decimal: bool = False):
    """Render ``q`` for JSON output: an int when integral, else ``"a/b"``.

    With ``decimal=True`` the value is rendered as a string with 12
    significant digits instead (lossy, display only).
    """
    if decimal:
        return format(float(q), ".12g") if q.denominator != 1 else int(q)
    if q.denominator == 1:
        return int(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _maxabs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    return int(np.abs(a).max())


def _fit(a: np.ndarray) -> np.ndarray:
    """Return ``a`` as int64 if its values allow, else as an object array."""
    if a.dtype == np.int64:
        return a
    if _maxabs(a) < _I64_SAFE:
        return a.astype(np.int64)
    return a.astype(object)


def _obj(a: np.ndarray) -> np.ndarray:
    if a.dtype == object:
        return a
    return np.array(a.tolist(), dtype=object).reshape(a.shape)


def _gcd_all(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == np.int64:
        return int(np.gcd.reduce(a, axis=None))
    return reduce(math.gcd, (int(v) for v in a.flat), 0)


def _int_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.dtype == np.int64 and b.dtype == np.int64:
        bound = _maxabs(a) * _maxabs(b) * max(a.shape[1], 1)
        if bound < _F64_EXACT:
            # every partial sum is an integer below 2**53, so BLAS is exact
            return np.rint(a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64)
        if bound < _I64_SAFE:
            return a @ b
    return _fit(_obj(a) @ _obj(b))


def _int_scale(a: np.ndarray, k: int) -> np.ndarray:
    if k == 1:
        return a
    if a.dtype == np.int64 and _maxabs(a) * abs(k) < _I64_SAFE:
        return a * k
    return _fit(_obj(a) * k)


def _int_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.dtype == np.int64 and b.dtype == np.int64 and _maxabs(a) + _maxabs(b) < _I64_SAFE:
        return a + b
    return _fit(_obj(a) + _obj(b))


class RMatrix:
    """Immutable ``m x n`` matrix of exact rationals (``m, n >= 1``).

    Parameters
    ----------
    entries : nested sequence
        Row-major entries; anything :func:`to_rational` accepts.

    Notes
    -----
    Index-set arguments (``rows``, ``cols``, block selections) are 1-based.
    """

    __slots__ = ("_num", "_den", "_hash")

    def __init__(self, entries: Sequence[Sequence]):
        try:
            rows = [list(r) for r in entries]
        except TypeError as exc:
            raise InvalidInputError("matrix entries must be a list of rows") from exc
        if not rows or not rows[0]:
            raise InvalidInputError("matrices must have at least one row and one column")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise InvalidInputError("matrix rows have different lengths")
        fr = [[to_rational(x) for x in r] for r in rows]
        den = reduce(math.lcm, (q.denominator for r in fr for q in r), 1)
        num = np.array([[q.numerator * (den // q.denominator) for q in r] for r in fr], dtype=object)
        self._set(num, den)

    @classmethod
    def _from_parts(cls, num: np.ndarray, den: int) -> "RMatrix":
        obj = cls.__new__(cls)
        obj._set(num, den)
        return obj

    def _set(self, num: np.ndarray, den: int) -> None:
        if num.ndim != 2 or num.shape[0] < 1 or num.shape[1] < 1:
            raise InvalidInputError("matrices must have at least one row and one column")
        den = int(den)
        if den == 0:
            raise InvalidInputError("zero denominator")
        if den < 0:
            num, den = -num, -den
        g = math.gcd(_gcd_all(num), den)
        if g > 1:
            num = num // g
            den //= g
        num = _fit(np.asarray(num))
        num.setflags(write=False)
        self._num = num
        self._den = den
        self._hash = None

    # constructors -----------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "RMatrix":
        return cls._from_parts(np.eye(n, dtype=np.int64), 1)

    @classmethod
    def zeros(cls, m: int, n: int) -> "RMatrix":
        return cls._from_parts(np.zeros((m, n), dtype=np.int64), 1)

    @classmethod
    def constant(cls, m: int, n: int, value) -> "RMatrix":
        q = to_rational(value)
        return cls._from_parts(np.full((m, n), q.numerator, dtype=object), q.denominator)

    @classmethod
    def row(cls, values: Iterable) -> "RMatrix":
        """A ``1 x n`` matrix (row vector)."""
        return cls([list(values)])

    @classmethod
    def column(cls, values: Iterable) -> "RMatrix":
        return cls([[v] for v in values])

    # basic accessors --------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self._num.shape

    @property
    def rows(self) -> int:
        return self._num.shape[0]

    @property
    def cols(self) -> int:
        return self._num.shape[1]

    @property
    def numerators(self) -> np.ndarray:
        """Read-only integer numerator array (shared denominator applies)."""
        return self._num

    @property
    def denominator(self) -> int:
        return self._den

    def entry(self, i: int, j: int) -> Fraction:
        """Entry ``(i, j)`` with 1-based indices."""
        if not (1 <= i <= self.rows and 1 <= j <= self.cols):
            raise InvalidInputError(f"entry ({i},{j}) outside a {self.rows}x{self.cols} matrix")
        return Fraction(int(self._num[i - 1, j - 1]), self._den)

    def to_fractions(self) -> list[list[Fraction]]:
        d = self._den
        return [[Fraction(int(v), d) for v in r] for r in self._num]

    def row_values(self, i: int) -> list[Fraction]:
        """Row ``i`` (1-based) as a list of fractions."""
        if not 1 <= i <= self.rows:
            raise InvalidInputError(f"row {i} outside 1..{self.rows}")
        return [Fraction(int(v), self._den) for v in self._num[i - 1]]

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(q) for q in r) for r in self.to_fractions())
        return f"RMatrix[{self.rows}x{self.cols}]({body})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, RMatrix):
            return NotImplemented
        return (self.shape == other.shape and self._den == other._den
                and bool(np.array_equal(self._num, other._num)))

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.shape, self._den, tuple(int(v) for v in self._num.flat)))
        return self._hash

    # arithmetic -------------------------------------------------------

    def __matmul__(self, other: "RMatrix") -> "RMatrix":
        if not isinstance(other, RMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise InvalidInputError(f"cannot multiply {self.shape} by {other.shape}")
        return RMatrix._from_parts(_int_matmul(self._num, other._num), self._den * other._den)

    def __add__(self, other: "RMatrix") -> "RMatrix":
        if not isinstance(other, RMatrix):
            return NotImplemented
        if self.shape != other.shape:
            raise InvalidInputError(f"cannot add {self.shape} and {other.shape}")
        l = math.lcm(self._den, other._den)
        a = _int_scale(self._num, l // self._den)
        b = _int_scale(other._num, l // other._den)
        return RMatrix._from_parts(_int_add(a, b), l)

    def __neg__(self) -> "RMatrix":
        return RMatrix._from_parts(-self._num, self._den)

    def __sub__(self, other: "RMatrix") -> "RMatrix":
        if not isinstance(other, RMatrix):
            return NotImplemented
        return self + (-other)

    def scale(self, factor) -> "RMatrix":
        q = to_rational(factor)
        return RMatrix._from_parts(_int_scale(self._num, q.numerator), self._den * q.denominator)

    @property
    def T(self) -> "RMatrix":
        return RMatrix._from_parts(self._num.T.copy(), self._den)

    # block operators --------------------------------------------------

    def _index(self, idx: Iterable[int], size: int, what: str) -> list[int]:
        try:
            idx = sorted(set(idx))
        except TypeError as exc:
            raise InvalidInputError(f"{what} index set must be iterable integers") from exc
        if not idx:
            raise InvalidInputError(f"{what} index set is empty")
        for i in idx:
            if not isinstance(i, (int, np.integer)) or isinstance(i, bool) or not 1 <= i <= size:
                raise InvalidInputError(f"{what} index {i!r} outside 1..{size}")
        return [int(i) - 1 for i in idx]

    def select(self, rows: Iterable[int] | None = None, cols: Iterable[int] | None = None) -> "RMatrix":
        """Submatrix on the given 1-based row/column sets (ascending order).

        ``None`` keeps every row (or column).
        """
        r = self._index(rows, self.rows, "row") if rows is not None else slice(None)
        c = self._index(cols, self.cols, "column") if cols is not None else slice(None)
        sub = self._num[r, :][:, c]
        return RMatrix._from_parts(np.array(sub), self._den)

    def row_sums(self) -> list[Fraction]:
        num = self._num
        if num.dtype == np.int64 and _maxabs(num) * self.cols >= _I64_SAFE:
            num = _obj(num)
        s = num.sum(axis=1)
        return [Fraction(int(v), self._den) for v in s]

    def grouped_column_sums(self, col_labels: Sequence[int], n_groups: int) -> np.ndarray:
        """Integer numerator sums per column group (shared denominator).

        ``col_labels[j]`` is the 0-based group of column ``j + 1``. Returns
        an ``m x n_groups`` integer array; divide by :attr:`denominator`.
        """
        ind = np.zeros((self.cols, n_groups), dtype=np.int64)
        ind[np.arange(self.cols), np.asarray(col_labels, dtype=np.int64)] = 1
        return _int_matmul(self._num, ind)

    # predicates -------------------------------------------------------

    def is_nonnegative(self) -> bool:
        return bool((self._num >= 0).all())

    def is_square(self) -> bool:
        return self.rows == self.cols

    def rows_identical(self) -> bool:
        return bool((self._num == self._num[0:1, :]).all())

    def is_constant(self) -> bool:
        return bool((self._num == self._num.flat[0]).all())

    def is_zero(self) -> bool:
        return not bool(self._num.any())

    def to_json(self, decimal: bool = False) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[format_rational(q, decimal) for q in r] for r in self.to_fractions()],
        }


def matmul_chain(mats: Sequence[RMatrix]) -> RMatrix:
    """Left-to-right product ``M1 @ M2 @ ... @ Mt``."""
    if not mats:
        raise InvalidInputError("empty product")
    return reduce(lambda a, b: a @ b, mats)
