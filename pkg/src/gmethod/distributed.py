"""Finite-time distributed averaging on graphs.

Every vertex repeatedly replaces its value by a weighted average of its own
and its neighbours' values, ``q_n' = W_n q_{n-1}'``. A schedule performs
distributed averaging when ``W_t ... W_1`` is the uniform matrix, which
leaves every vertex holding the mean of the initial values.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .degroot import DeGrootModel
from .errors import InvalidInputError
from .matrix import RMatrix, format_rational
from .partitions import Partition

__all__ = [
    "Graph",
    "VertexLabeling",
    "WeightSchedule",
    "AveragingRun",
    "hypercube_graph",
    "hypercube_schedule",
    "hypercube_schedule_on",
    "hypercube_partitions",
    "verify_embedding",
    "run_schedule",
    "s3_swapping_schedule",
    "hybrid_leader_scenario",
    "hybrid_graph",
    "degroot_on_complete_graph",
    "complete_graph",
]


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``1..n``.

    Construction rejects loops, repeated edges and out-of-range vertices,
    and by default also disconnected graphs.
    """

    n: int
    edges: frozenset

    def __init__(self, n: int, edges: Iterable[Sequence[int]], require_connected: bool = True):
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise InvalidInputError(f"vertex count must be a positive integer, got {n!r}")
        seen = set()
        for k, e in enumerate(edges):
            e = tuple(e)
            if len(e) != 2 or not all(isinstance(v, int) and not isinstance(v, bool) for v in e):
                raise InvalidInputError(f"edge {k} must be a pair of integers, got {list(e)}")
            i, j = e
            if i == j:
                raise InvalidInputError(f"edge {k} is a loop at vertex {i}")
            if not (1 <= i <= n and 1 <= j <= n):
                raise InvalidInputError(f"edge {k} = {{{i},{j}}} leaves 1..{n}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise InvalidInputError(f"edge {k} = {{{i},{j}}} is repeated")
            seen.add(key)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", frozenset(seen))
        if require_connected and not self.is_connected():
            comps = self.components()
            raise InvalidInputError(f"graph is disconnected: components {comps}")

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def neighbors(self, i: int) -> list[int]:
        return sorted(b if a == i else a for a, b in self.edges if i in (a, b))

    def components(self) -> list[list[int]]:
        rows = [a - 1 for a, _ in self.edges]
        cols = [b - 1 for _, b in self.edges]
        adj = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(self.n, self.n))
        _, labels = connected_components(adj, directed=False)
        groups: dict[int, list[int]] = {}
        for v, c in enumerate(labels, start=1):
            groups.setdefault(int(c), []).append(v)
        return sorted(groups.values())

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in sorted(self.edges)]}


def complete_graph(n: int) -> Graph:
    return Graph(n, itertools.combinations(range(1, n + 1), 2))


@dataclass(frozen=True)
class VertexLabeling:
    """Bijection from vertices ``1..2**m`` to ``m``-bit strings.

    ``bits[v - 1]`` is the label of vertex ``v``.
    """

    m: int
    bits: tuple[str, ...]

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 1:
            raise InvalidInputError(f"cube dimension must be a positive integer, got {self.m!r}")
        bits = tuple(self.bits)
        object.__setattr__(self, "bits", bits)
        if len(bits) != 2**self.m:
            raise InvalidInputError(f"need {2**self.m} labels, got {len(bits)}")
        for v, b in enumerate(bits, start=1):
            if not isinstance(b, str) or len(b) != self.m or set(b) - {"0", "1"}:
                raise InvalidInputError(f"label of vertex {v} must be {self.m} binary digits, got {b!r}")
        if len(set(bits)) != len(bits):
            dup = next(b for b in bits if bits.count(b) > 1)
            raise InvalidInputError(f"label {dup} is used twice")

    @classmethod
    def canonical(cls, m: int) -> "VertexLabeling":
        """Vertex ``v`` gets the binary digits of ``v - 1`` (lexicographic order)."""
        return cls(m, tuple(format(v, f"0{m}b") for v in range(2**m)))

    def vertex_of(self) -> dict[str, int]:
        return {b: v for v, b in enumerate(self.bits, start=1)}

    def to_json(self) -> dict:
        return {"m": self.m, "bits": list(self.bits)}


def support_violations(steps: Sequence[RMatrix], graph: Graph) -> list[tuple[int, int, int]]:
    """``(step, i, j)`` for every nonzero off-diagonal weight on a non-edge."""
    allowed = np.eye(graph.n, dtype=bool)
    for a, b in graph.edges:
        allowed[a - 1, b - 1] = allowed[b - 1, a - 1] = True
    out = []
    for s, W in enumerate(steps, start=1):
        bad = np.argwhere((W.numerators != 0) & ~allowed)
        out.extend((s, int(i) + 1, int(j) + 1) for i, j in bad)
    return out


@dataclass(frozen=True)
class WeightSchedule:
    """Weight matrices ``W_1..W_t`` applied in that order on ``graph``.

    Vertex ``i`` may only weight itself and its neighbours. Pass
    ``strict=False`` to keep a schedule that breaks this, e.g. to inspect
    it with :func:`support_violations`.
    """

    steps: tuple[RMatrix, ...]
    graph: Graph

    def __init__(self, steps: Iterable[RMatrix], graph: Graph, strict: bool = True):
        steps = tuple(steps)
        if not steps:
            raise InvalidInputError("a schedule needs at least one step")
        for s, W in enumerate(steps, start=1):
            if W.shape != (graph.n, graph.n):
                raise InvalidInputError(f"step {s} has shape {W.shape}, graph has {graph.n} vertices")
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "graph", graph)
        if strict:
            bad = self.violations()
            if bad:
                s, i, j = bad[0]
                raise InvalidInputError(
                    f"step {s} puts weight on ({i},{j}) but {{{i},{j}}} is not an edge")

    def violations(self) -> list[tuple[int, int, int]]:
        return support_violations(self.steps, self.graph)

    def product(self) -> RMatrix:
        """``W_t ... W_1``."""
        acc = self.steps[0]
        for W in self.steps[1:]:
            acc = W @ acc
        return acc

    def to_json(self, decimal: bool = False) -> dict:
        return {"graph": self.graph.to_json(), "steps": [W.to_json(decimal) for W in self.steps]}


@dataclass(frozen=True)
class AveragingRun:
    trajectory: tuple[RMatrix, ...]
    achieved_averaging: bool
    steps_used: int
    violations: tuple[tuple[int, int, int], ...] = ()

    @property
    def final(self) -> RMatrix:
        return self.trajectory[-1]

    def to_json(self, decimal: bool = False) -> dict:
        out = {
            "achieved_averaging": self.achieved_averaging,
            "steps_used": self.steps_used,
            "trajectory": [[format_rational(v, decimal) for v in q.row_values(1)]
                           for q in self.trajectory],
        }
        if self.violations:
            out["violations"] = [list(v) for v in self.violations]
        return out


def _mean(q: RMatrix) -> Fraction:
    return sum(q.row_values(1), Fraction(0)) / q.cols


def _run(steps: Sequence[RMatrix], q0: RMatrix, violations=()) -> AveragingRun:
    traj = [q0]
    for W in steps:
        traj.append((W @ traj[-1].T).T)
    final = traj[-1]
    ok = final.is_constant() and final.entry(1, 1) == _mean(q0)
    return AveragingRun(tuple(traj), ok, len(steps), tuple(violations))


def _as_row(q0, n: int) -> RMatrix:
    if not isinstance(q0, RMatrix):
        q0 = RMatrix.row(q0)
    if q0.shape != (1, n):
        raise InvalidInputError(f"initial values have shape {q0.shape}, expected (1, {n})")
    return q0


def run_schedule(schedule: WeightSchedule, q0) -> AveragingRun:
    """Apply the schedule to ``q0`` exactly and test for the mean.

    Raises
    ------
    InvalidInputError
        Wrong length of ``q0`` or a weight on a non-edge.
    """
    q0 = _as_row(q0, schedule.graph.n)
    bad = schedule.violations()
    if bad:
        s, i, j = bad[0]
        raise InvalidInputError(f"step {s} puts weight on ({i},{j}) but {{{i},{j}}} is not an edge")
    return _run(schedule.steps, q0)


# hypercube -------------------------------------------------------------

def _check_dim(m) -> None:
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise InvalidInputError(f"cube dimension must be a positive integer, got {m!r}")


def hypercube_graph(m: int) -> Graph:
    """``m``-cube on vertices ``1..2**m``, vertex ``v`` labelled by ``v - 1`` in binary."""
    _check_dim(m)
    n = 2**m
    edges = [(x + 1, (x ^ (1 << k)) + 1) for x in range(n) for k in range(m) if x < x ^ (1 << k)]
    return Graph(n, edges)


def _pairing_matrix(partner: Sequence[int]) -> RMatrix:
    # 1/2 on the diagonal and on each vertex's partner
    n = len(partner)
    num = np.zeros((n, n), dtype=np.int64)
    idx = np.arange(n)
    num[idx, idx] = 1
    num[idx, np.asarray(partner)] = 1
    return RMatrix._from_parts(num, 2)


def hypercube_schedule(m: int) -> WeightSchedule:
    """Weights ``W_1..W_m`` on the canonically labelled ``m``-cube.

    ``W_l`` averages each vertex with the one differing in the ``l``-th bit
    from the right, so ``W_1`` pairs consecutive vertices.
    """
    _check_dim(m)
    n = 2**m
    steps = [_pairing_matrix([x ^ (1 << (l - 1)) for x in range(n)]) for l in range(1, m + 1)]
    return WeightSchedule(steps, hypercube_graph(m))


def hypercube_schedule_on(graph: Graph, labeling: VertexLabeling) -> WeightSchedule:
    """The hypercube schedule moved onto ``graph`` through ``labeling``.

    Raises InvalidInputError if some cube edge is missing from ``graph``.
    """
    if graph.n != 2**labeling.m:
        raise InvalidInputError(f"graph has {graph.n} vertices, labeling covers {2**labeling.m}")
    where = labeling.vertex_of()
    m = labeling.m
    steps = []
    for l in range(1, m + 1):
        pos = m - l
        partner = []
        for b in labeling.bits:
            flipped = b[:pos] + ("1" if b[pos] == "0" else "0") + b[pos + 1:]
            partner.append(where[flipped] - 1)
        steps.append(_pairing_matrix(partner))
    return WeightSchedule(steps, graph)


def hypercube_partitions(m: int) -> list[Partition]:
    """``D_1..D_{m+1}``: ``D_t`` groups vertices by their first ``m - t + 1`` bits."""
    _check_dim(m)
    n = 2**m
    out = []
    for t in range(1, m + 2):
        shift = t - 1
        groups: dict[int, list[int]] = {}
        for x in range(n):
            groups.setdefault(x >> shift, []).append(x + 1)
        out.append(Partition(n, groups.values()))
    return out


def verify_embedding(graph: Graph, labeling: VertexLabeling) -> bool:
    """True iff labels at Hamming distance one always sit on an edge of ``graph``."""
    if graph.n != 2**labeling.m:
        raise InvalidInputError(f"graph has {graph.n} vertices, labeling covers {2**labeling.m}")
    where = labeling.vertex_of()
    for v, b in enumerate(labeling.bits, start=1):
        for pos in range(labeling.m):
            u = where[b[:pos] + ("1" if b[pos] == "0" else "0") + b[pos + 1:]]
            if not graph.has_edge(u, v):
                return False
    return True


# small fixed scenarios ---------------------------------------------------

S3_ORDER = ("123", "132", "213", "231", "321", "312")


def s3_swapping_schedule() -> WeightSchedule:
    """Two-step averaging on the six permutations of three symbols.

    Vertex order is :data:`S3_ORDER`; the graph is the union of the two
    matrices' off-diagonal supports.
    """
    h = Fraction(1, 2)
    W1 = RMatrix([[h if i // 2 == j // 2 else 0 for j in range(6)] for i in range(6)])
    pattern = [
        [1, 0, 1, 0, 1, 0],
        [0, 1, 0, 1, 0, 1],
        [1, 0, 1, 0, 0, 1],
        [0, 1, 0, 1, 1, 0],
        [1, 0, 0, 1, 1, 0],
        [0, 1, 1, 0, 0, 1],
    ]
    W2 = RMatrix(pattern).scale(Fraction(1, 3))
    return WeightSchedule([W1, W2], _support_graph([W1, W2], require_connected=True))


_WHEEL_EDGES = [(1, 2), (2, 7), (6, 7), (1, 6), (1, 8), (2, 8), (6, 8), (7, 8)]
_WHEEL = (1, 2, 6, 7, 8)
_CLIQUE = (1, 2, 3, 4, 5)


def hybrid_graph() -> Graph:
    """Wheel on ``{1,2,6,7,8}`` (hub 8) glued to a 5-clique on ``{1..5}`` along ``{1,2}``."""
    edges = set(_WHEEL_EDGES) | set(itertools.combinations(_CLIQUE, 2))
    return Graph(8, sorted(edges))


def _embed(n: int, block: Sequence[int], rows: Sequence[Sequence[Fraction]]) -> RMatrix:
    # identity outside ``block``; ``rows`` on it
    M = [[Fraction(int(i == j)) for j in range(1, n + 1)] for i in range(1, n + 1)]
    for a, i in enumerate(block):
        for b, j in enumerate(block):
            M[i - 1][j - 1] = rows[a][b]
    return RMatrix(M)


def _copy_rows(n: int, copies: dict[int, int]) -> RMatrix:
    # vertex v takes the value of copies[v]; everyone else keeps theirs
    M = [[Fraction(0)] * n for _ in range(n)]
    for v in range(1, n + 1):
        M[v - 1][copies.get(v, v) - 1] = Fraction(1)
    return RMatrix(M)


def hybrid_schedule() -> WeightSchedule:
    """Four steps: average the wheel, mix into the clique, then broadcast.

    The first step weights the pairs ``(1,7)`` and ``(2,6)``, which are not
    wheel edges, so the schedule is built non-strict.
    """
    fifth = Fraction(1, 5)
    phase1 = _embed(8, _WHEEL, [[fifth] * 5] * 5)
    lead = [Fraction(5, 8)] + [Fraction(1, 8)] * 3
    phase2 = _embed(8, (1, 3, 4, 5), [lead] * 4)
    broadcast1 = _copy_rows(8, {2: 1, 6: 1, 8: 1})
    broadcast2 = _copy_rows(8, {7: 2})
    return WeightSchedule([phase1, phase2, broadcast1, broadcast2], hybrid_graph(), strict=False)


def hybrid_leader_scenario(q0) -> AveragingRun:
    """Run :func:`hybrid_schedule`; the run lists its off-graph weights."""
    q0 = _as_row(q0, 8)
    sched = hybrid_schedule()
    return _run(sched.steps, q0, sched.violations())


# DeGroot models as graph schedules ----------------------------------------

def _support_graph(weights: Sequence[RMatrix], require_connected: bool) -> Graph:
    n = weights[0].rows
    edges = set()
    for W in weights:
        for i, j in np.argwhere(W.numerators != 0):
            if i != j:
                edges.add((min(i, j) + 1, max(i, j) + 1))
    return Graph(n, sorted((int(a), int(b)) for a, b in edges), require_connected=require_connected)


@dataclass(frozen=True)
class ModelOnGraph:
    """A DeGroot model recast as a schedule.

    ``support_connected`` tells whether the weights' own support graph was
    connected; if not, ``schedule.graph`` is the complete graph and
    ``support_components`` lists the pieces.
    """

    schedule: WeightSchedule
    support_connected: bool
    support_components: tuple[tuple[int, ...], ...]

    @property
    def graph(self) -> Graph:
        return self.schedule.graph


def degroot_on_complete_graph(model: DeGrootModel, steps: Optional[int] = None) -> ModelOnGraph:
    """Schedule ``P_1..P_t`` on the support graph, or on the complete graph
    when the support is disconnected."""
    weights = list(model.prefix(steps if steps is not None else len(model.weights)))
    support = _support_graph(weights, require_connected=False)
    comps = tuple(tuple(c) for c in support.components())
    if len(comps) == 1:
        return ModelOnGraph(WeightSchedule(weights, support), True, comps)
    return ModelOnGraph(WeightSchedule(weights, complete_graph(model.r)), False, comps)
