"""DeGroot opinion dynamics with finite-time consensus certificates.

Opinions evolve as column vectors, ``p_n' = P_n p_{n-1}'``, so the state at
time ``n`` is ``P_n ... P_1 p_0'``. A certificate for a kept set ``K`` is a
chain of partitions showing that the ``K`` columns of ``P_t ... P_1`` share
one row ``pi``; then ``sum_{j in K} pi_j p_0j`` is frozen from time ``t`` on.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .chains import ChainCertificate, stable_rows, validate_chain
from .errors import InvalidInputError, NotCertifiedError
from .matrix import RMatrix, format_rational
from .partitions import Partition, is_finer, meet_refines_chain, singletons, split_around, trivial
from .stable import coarsest_stable_partition, is_stochastic

__all__ = [
    "DeGrootModel",
    "Trajectory",
    "ConsensusCertificate",
    "step",
    "simulate",
    "find_chain",
    "certify",
    "check_submodel",
    "freeze_check",
    "kept_part",
    "residuals",
]


@dataclass(frozen=True)
class DeGrootModel:
    """Initial opinions and a finite list of stochastic weight matrices.

    With ``homogeneous=True`` the last matrix repeats forever, so any
    horizon is available.
    """

    p0: RMatrix
    weights: tuple[RMatrix, ...]
    homogeneous: bool = False

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        if self.p0.rows != 1:
            raise InvalidInputError(f"p0 must be a single row, got shape {self.p0.shape}")
        r = self.p0.cols
        if r < 2:
            raise InvalidInputError("a model needs at least two individuals")
        if not self.weights:
            raise InvalidInputError("a model needs at least one weight matrix")
        for n, P in enumerate(self.weights, start=1):
            if P.shape != (r, r):
                raise InvalidInputError(f"weight {n} has shape {P.shape}, expected ({r}, {r})")
            if not is_stochastic(P):
                raise InvalidInputError(f"weight {n} is not stochastic")

    @property
    def r(self) -> int:
        return self.p0.cols

    @property
    def horizon(self) -> Optional[int]:
        """Number of usable steps, ``None`` if unbounded."""
        return None if self.homogeneous else len(self.weights)

    def weight(self, n: int) -> RMatrix:
        """``P_n`` for ``n >= 1``."""
        if n < 1:
            raise InvalidInputError(f"weights are indexed from 1, got {n}")
        if n <= len(self.weights):
            return self.weights[n - 1]
        if self.homogeneous:
            return self.weights[-1]
        raise InvalidInputError(f"time {n} is past the horizon {len(self.weights)}")

    def prefix(self, n: int) -> list[RMatrix]:
        return [self.weight(k) for k in range(1, n + 1)]

    def backward_product(self, n: int, cols: Optional[Sequence[int]] = None) -> RMatrix:
        """``P_n ... P_1``, optionally only the given columns."""
        acc = RMatrix.identity(self.r)
        if cols is not None:
            acc = acc.select(cols=cols)
        for k in range(1, n + 1):
            acc = self.weight(k) @ acc
        return acc


@dataclass(frozen=True)
class Trajectory:
    states: tuple[RMatrix, ...]

    @property
    def final(self) -> RMatrix:
        return self.states[-1]

    def to_json(self, decimal: bool = False) -> dict:
        return {"states": [[format_rational(v, decimal) for v in s.row_values(1)]
                           for s in self.states]}


@dataclass(frozen=True)
class ConsensusCertificate:
    """A finite-time consensus found for the kept set.

    ``method`` is ``"structural"`` when a partition chain proves the freeze
    for every initial vector, and ``"trajectory"`` when only this model's
    trajectory was seen to become constant (then ``weights_pi`` is None).
    ``partitions`` lists the chain in application order, first partition
    ``split_around(r, K)`` and last the one-block partition.
    """

    time: int
    kept_set: tuple[int, ...]
    weights_pi: Optional[RMatrix]
    value: Fraction
    total: bool
    method: str
    full_weights: Optional[RMatrix] = None
    partitions: tuple[Partition, ...] = ()
    chain_certificate: Optional[ChainCertificate] = None

    def to_json(self, decimal: bool = False) -> dict:
        fmt = lambda m: None if m is None else [format_rational(v, decimal) for v in m.row_values(1)]
        return {
            "time": self.time,
            "kept": list(self.kept_set),
            "pi": fmt(self.weights_pi),
            "full_pi": fmt(self.full_weights),
            "value": format_rational(self.value, decimal),
            "total": self.total,
            "method": self.method,
            "partitions": [p.to_json() for p in self.partitions],
        }


def step(p: RMatrix, P: RMatrix) -> RMatrix:
    """One update ``(P p')'`` of the row vector ``p``."""
    if p.rows != 1 or P.shape != (p.cols, p.cols):
        raise InvalidInputError(f"cannot apply a {P.shape} matrix to a {p.shape} state")
    if not is_stochastic(P):
        raise InvalidInputError("weight matrix is not stochastic")
    return (P @ p.T).T


def simulate(model: DeGrootModel, steps: int) -> Trajectory:
    if steps < 0:
        raise InvalidInputError("steps must be nonnegative")
    if model.horizon is not None and steps > model.horizon:
        raise InvalidInputError(f"{steps} steps requested but only {model.horizon} weights given")
    states = [model.p0]
    for n in range(1, steps + 1):
        states.append((model.weight(n) @ states[-1].T).T)
    return Trajectory(tuple(states))


def find_chain(matrices: Sequence[RMatrix], first: Partition) -> Optional[list[Partition]]:
    """Greedy partition chain for matrices in application order.

    Each next partition is the coarsest row partition on which the current
    matrix is block stable given the previous partition as columns. Returns
    ``[D_1, ..., D_{t+1}]`` for the first ``t`` reaching the one-block
    partition, or ``None`` if no prefix does. No other chain can reach it
    sooner.
    """
    chain = [first]
    for P in matrices:
        if P.shape != (first.ground_size, first.ground_size):
            raise InvalidInputError(f"matrix shape {P.shape} does not fit partition of {first.ground_size}")
        chain.append(coarsest_stable_partition(P, chain[-1]))
        if chain[-1].is_trivial:
            return chain
    return None


def _kept(K: Iterable[int], r: int) -> tuple[int, ...]:
    kept = tuple(sorted(set(K)))
    if not kept:
        raise InvalidInputError("kept set must be nonempty")
    if kept[0] < 1 or kept[-1] > r:
        raise InvalidInputError(f"kept set {list(kept)} not inside 1..{r}")
    return kept


def _greedy(model: DeGrootModel, first: Partition, max_steps: Optional[int]) -> Optional[list[Partition]]:
    explicit = len(model.weights)
    if max_steps is None and not model.homogeneous:
        max_steps = explicit
    chain = [first]
    n = 0
    while max_steps is None or n < max_steps:
        n += 1
        chain.append(coarsest_stable_partition(model.weight(n), chain[-1]))
        if chain[-1].is_trivial:
            return chain
        # past the explicit list the same matrix repeats, so a revisit is a cycle
        if n > explicit and chain[-1] in chain[explicit - 1:-1]:
            return None
    return None


def certify(model: DeGrootModel, K: Iterable[int], max_steps: Optional[int] = None) -> ConsensusCertificate:
    """Smallest-time consensus certificate for the kept set ``K``.

    The structural search runs first. If it fails and ``K`` is everyone,
    the trajectory itself is checked for becoming constant, which also
    freezes it for good.

    Raises
    ------
    NotCertifiedError
        Neither route succeeds within the horizon.
    """
    r = model.r
    kept = _kept(K, r)
    total = r - len(kept) <= 1
    chain = _greedy(model, split_around(r, kept), max_steps)
    if chain is not None:
        t = len(chain) - 1
        forward = validate_chain(model.prefix(t)[::-1], chain[::-1])
        cert = stable_rows(forward, kept)
        values = model.p0.row_values(1)
        pi = cert.stable_row
        full = None
        if total:
            full = stable_rows(forward, range(1, r + 1)).stable_row if len(kept) < r else pi
            value = sum((w * v for w, v in zip(full.row_values(1), values)), Fraction(0))
        else:
            value = sum((w * values[j - 1] for w, j in zip(pi.row_values(1), kept)), Fraction(0))
        return ConsensusCertificate(t, kept, pi, value, total, "structural", full,
                                    tuple(chain), cert)
    if len(kept) == r:
        limit = max_steps if max_steps is not None else len(model.weights)
        p = model.p0
        for n in range(1, limit + 1):
            p = (model.weight(n) @ p.T).T
            if p.is_constant():
                return ConsensusCertificate(n, kept, None, p.entry(1, 1), True, "trajectory")
    raise NotCertifiedError(f"no consensus certificate for kept set {list(kept)} within the horizon")


def check_submodel(model: DeGrootModel, partitions: Sequence[Partition]) -> bool:
    """Block-diagonal condition of the growing-subgroups submodel.

    ``partitions`` is ``D_1 <= ... <= D_{t+1}`` with ``D_1`` all singletons
    and ``D_{t+1}`` one block. True iff ``P_l`` has no weight between
    different blocks of ``D_{l+1}`` for every ``l < t``.
    """
    parts = list(partitions)
    r = model.r
    if len(parts) < 2:
        raise InvalidInputError("a submodel chain needs at least two partitions")
    if any(p.ground_size != r for p in parts):
        raise InvalidInputError(f"every partition must be over 1..{r}")
    if parts[0] != singletons(r) or parts[-1] != trivial(r):
        raise InvalidInputError("chain must start at singletons and end at one block")
    if not meet_refines_chain(parts):
        bad = next(b for b in range(len(parts) - 1) if not is_finer(parts[b], parts[b + 1]))
        raise InvalidInputError(f"partition {bad + 1} is not finer than partition {bad + 2}")
    t = len(parts) - 1
    if model.horizon is not None and t - 1 > model.horizon:
        raise InvalidInputError(f"chain needs {t - 1} weights, model has {model.horizon}")
    for l in range(1, t):
        lab = np.array(parts[l].labels())
        off = lab[:, None] != lab[None, :]
        if np.any((model.weight(l).numerators != 0) & off):
            return False
    return True


def freeze_check(model: DeGrootModel, t: int, K: Iterable[int]) -> bool:
    """True iff the kept-column block of ``P_n ... P_1`` is stable at ``t``
    and unchanged for every later provided ``n``.

    For ``K`` equal to everyone, a constant state ``p_t`` also counts.
    """
    r = model.r
    kept = _kept(K, r)
    last = len(model.weights)
    if t < 0 or t > last:
        raise InvalidInputError(f"time {t} outside 0..{last}")
    block = model.backward_product(t, kept)
    if block.rows_identical():
        acc = block
        for n in range(t + 1, last + 1):
            acc = model.weight(n) @ acc
            if acc != block:
                break
        else:
            return True
    if len(kept) == r:
        return simulate(model, t).final.is_constant()
    return False


def kept_part(model: DeGrootModel, K: Iterable[int], n: int) -> list[Fraction]:
    """Per individual ``l``: ``sum_{j in K} (P_n ... P_1)_{lj} p_0j``."""
    kept = _kept(K, model.r)
    block = model.backward_product(n, kept)
    vals = [model.p0.entry(1, j) for j in kept]
    return [sum((a * v for a, v in zip(block.row_values(l), vals)), Fraction(0))
            for l in range(1, model.r + 1)]


def residuals(model: DeGrootModel, K: Iterable[int], n: int) -> list[Fraction]:
    """Per individual ``l``: the contribution of the individuals outside ``K``.

    Reported as computed; whether it varies with ``n`` or ``l`` is left to
    the caller.
    """
    kept = set(_kept(K, model.r))
    rest = [u for u in range(1, model.r + 1) if u not in kept]
    if not rest:
        return [Fraction(0)] * model.r
    block = model.backward_product(n, rest)
    vals = [model.p0.entry(1, u) for u in rest]
    return [sum((a * v for a, v in zip(block.row_values(l), vals)), Fraction(0))
            for l in range(1, model.r + 1)]
