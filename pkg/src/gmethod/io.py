"""JSON encoding of every value type, with located error messages.

Decoders take a ``where`` string (file name plus JSON path, e.g.
``model.json:$.weights[1].entries[0][2]``) so a malformed value can be
pinpointed. Encoders emit canonical JSON: sorted keys, rationals as
integers or ``"a/b"`` strings.
"""
from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Any, Optional

from .chains import PartitionChain, validate_chain
from .degroot import DeGrootModel
from .distributed import Graph, VertexLabeling, WeightSchedule
from .errors import InvalidInputError, ParseError
from .matrix import RMatrix, format_rational, to_rational
from .partitions import Partition
from .stable import GroupedMatrix

__all__ = [
    "load_json",
    "dumps",
    "parse_rational",
    "parse_matrix",
    "parse_partition",
    "parse_index_set",
    "parse_grouped",
    "parse_chain",
    "parse_model",
    "parse_graph",
    "parse_labeling",
    "parse_schedule",
]


def _reject_constant(name: str):
    raise ValueError(f"{name} is not allowed")


def load_json(path: str | Path) -> Any:
    """Read a JSON file; syntax errors become :class:`ParseError` at ``file:line:col``."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(str(path), f"cannot read file ({exc.strerror or exc})") from exc
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}:byte {exc.start}", "file is not UTF-8") from exc
    return loads(text, str(path))


def loads(text: str, source: str = "<input>") -> Any:
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}", exc.msg) from exc
    except ValueError as exc:
        # the decoder does not report where a constant sits, so look it up
        m = re.search(r"-?\b(NaN|Infinity)\b", text)
        if m is None:
            raise ParseError(source, str(exc)) from exc
        line = text.count("\n", 0, m.start()) + 1
        col = m.start() - (text.rfind("\n", 0, m.start()) + 1) + 1
        raise ParseError(f"{source}:{line}:{col}", f"{m.group(0)} is not a number here") from exc


def dumps(obj: Any) -> str:
    """Canonical JSON text with a trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def _expect(cond: bool, where: str, message: str) -> None:
    if not cond:
        raise ParseError(where, message)


def _int(value: Any, where: str, minimum: Optional[int] = None) -> int:
    _expect(isinstance(value, int) and not isinstance(value, bool), where,
            f"expected an integer, got {json.dumps(value)}")
    if minimum is not None:
        _expect(value >= minimum, where, f"must be at least {minimum}, got {value}")
    return value


def _field(obj: Any, key: str, where: str) -> Any:
    _expect(isinstance(obj, dict), where, f"expected an object, got {type(obj).__name__}")
    _expect(key in obj, where, f"missing field {key!r}")
    return obj[key]


def parse_rational(value: Any, where: str):
    _expect(not isinstance(value, (bool, list, dict)) and value is not None, where,
            f"expected a number or \"a/b\" string, got {json.dumps(value)}")
    try:
        return to_rational(value)
    except InvalidInputError as exc:
        raise ParseError(where, str(exc)) from exc


def parse_matrix(obj: Any, where: str = "$") -> RMatrix:
    """``{"rows": m, "cols": n, "entries": [[...], ...]}``; a bare list of rows is also accepted."""
    if isinstance(obj, list):
        entries = obj
        rows = cols = None
    else:
        entries = _field(obj, "entries", where)
        rows = _int(_field(obj, "rows", where), f"{where}.rows", 1)
        cols = _int(_field(obj, "cols", where), f"{where}.cols", 1)
        where = f"{where}.entries"
    _expect(isinstance(entries, list) and entries, where, "expected a nonempty list of rows")
    if rows is not None:
        _expect(len(entries) == rows, where, f"declared {rows} rows, found {len(entries)}")
    width = None
    parsed = []
    for i, row in enumerate(entries):
        w = f"{where}[{i}]"
        _expect(isinstance(row, list) and row, w, "expected a nonempty list of entries")
        if width is None:
            width = cols if cols is not None else len(row)
        _expect(len(row) == width, w, f"expected {width} entries, found {len(row)}")
        parsed.append([parse_rational(v, f"{w}[{j}]") for j, v in enumerate(row)])
    return RMatrix(parsed)


def parse_index_set(obj: Any, where: str = "$") -> list[int]:
    _expect(isinstance(obj, list) and obj, where, "expected a nonempty list of indices")
    out = [_int(v, f"{where}[{k}]", 1) for k, v in enumerate(obj)]
    _expect(len(set(out)) == len(out), where, "indices repeat")
    return out


def parse_partition(obj: Any, where: str = "$", size: Optional[int] = None) -> Partition:
    """Array of blocks; the ground size is the largest index unless ``size`` is given."""
    _expect(isinstance(obj, list) and obj, where, "expected a nonempty list of blocks")
    blocks = []
    for k, b in enumerate(obj):
        w = f"{where}[{k}]"
        _expect(isinstance(b, list) and b, w, "expected a nonempty block")
        blocks.append([_int(v, f"{w}[{j}]", 1) for j, v in enumerate(b)])
    n = max(i for b in blocks for i in b)
    if size is not None:
        _expect(n <= size, where, f"index {n} exceeds size {size}")
        n = size
    try:
        return Partition(n, blocks)
    except InvalidInputError as exc:
        raise ParseError(where, str(exc)) from exc


def parse_grouped(obj: Any, where: str = "$") -> GroupedMatrix:
    M = parse_matrix(obj, where)
    rows = parse_partition(_field(obj, "row_labels", where), f"{where}.row_labels")
    cols = parse_partition(_field(obj, "col_labels", where), f"{where}.col_labels")
    try:
        return GroupedMatrix(rows, cols, M)
    except InvalidInputError as exc:
        raise ParseError(where, str(exc)) from exc


def _matrix_or_ref(obj: Any, where: str, base: Optional[Path]) -> RMatrix:
    if isinstance(obj, str):
        path = (base / obj) if base is not None else Path(obj)
        return parse_matrix(load_json(path), f"{path}:$")
    return parse_matrix(obj, where)


def parse_chain(obj: Any, where: str = "$", base: Optional[Path] = None) -> tuple[PartitionChain, Optional[list[int]]]:
    """``{"matrices": [...], "partitions": [...], "kept": [...]}``.

    Matrices may be inline or file names relative to ``base``. Returns the
    validated chain and the kept set (``None`` if absent). Stability
    failures propagate as :class:`~gmethod.errors.NotBlockStableError`.
    """
    mats_raw = _field(obj, "matrices", where)
    parts_raw = _field(obj, "partitions", where)
    _expect(isinstance(mats_raw, list) and mats_raw, f"{where}.matrices", "expected a nonempty list")
    _expect(isinstance(parts_raw, list), f"{where}.partitions", "expected a list")
    mats = [_matrix_or_ref(m, f"{where}.matrices[{k}]", base) for k, m in enumerate(mats_raw)]
    _expect(len(parts_raw) == len(mats) + 1, f"{where}.partitions",
            f"{len(mats)} matrices need {len(mats) + 1} partitions, found {len(parts_raw)}")
    parts = []
    for k, p in enumerate(parts_raw):
        size = mats[k].rows if k < len(mats) else mats[-1].cols
        parts.append(parse_partition(p, f"{where}.partitions[{k}]", size))
    kept = None
    if "kept" in obj:
        kept = parse_index_set(obj["kept"], f"{where}.kept")
    try:
        chain = validate_chain(mats, parts)
    except InvalidInputError as exc:
        raise ParseError(where, str(exc)) from exc
    return chain, kept


def parse_model(obj: Any, where: str = "$", base: Optional[Path] = None) -> DeGrootModel:
    """``{"r": int, "p0": [...], "weights": [...], "homogeneous": bool}``."""
    r = _int(_field(obj, "r", where), f"{where}.r", 2)
    p0_raw = _field(obj, "p0", where)
    _expect(isinstance(p0_raw, list), f"{where}.p0", "expected a list of values")
    _expect(len(p0_raw) == r, f"{where}.p0", f"expected {r} values, found {len(p0_raw)}")
    p0 = RMatrix.row([parse_rational(v, f"{where}.p0[{k}]") for k, v in enumerate(p0_raw)])
    w_raw = _field(obj, "weights", where)
    _expect(isinstance(w_raw, list) and w_raw, f"{where}.weights", "expected a nonempty list")
    weights = [_matrix_or_ref(m, f"{where}.weights[{k}]", base) for k, m in enumerate(w_raw)]
    homogeneous = obj.get("homogeneous", False)
    _expect(isinstance(homogeneous, bool), f"{where}.homogeneous", "expected true or false")
    for k, P in enumerate(weights):
        w = f"{where}.weights[{k}]"
        _expect(P.shape == (r, r), w, f"expected a {r}x{r} matrix, got {P.shape}")
        _expect(P.is_nonnegative(), w, "weights must be nonnegative")
        sums = P.row_sums()
        bad = next((i for i, v in enumerate(sums) if v != 1), None)
        _expect(bad is None, f"{w}.entries[{bad}]", f"row sums to {sums[bad] if bad is not None else 1}, not 1")
    try:
        return DeGrootModel(p0, weights, homogeneous)
    except InvalidInputError as exc:
        raise ParseError(where, str(exc)) from exc


def parse_graph(obj: Any, where: str = "$", require_connected: bool = True) -> Graph:
    n = _int(_field(obj, "n", where), f"{where}.n", 1)
    edges = _field(obj, "edges", where)
    _expect(isinstance(edges, list), f"{where}.edges", "expected a list of pairs")
    pairs = []
    for k, e in enumerate(edges):
        w = f"{where}.edges[{k}]"
        _expect(isinstance(e, list) and len(e) == 2, w, "expected a pair [i, j]")
        pairs.append((_int(e[0], f"{w}[0]", 1), _int(e[1], f"{w}[1]", 1)))
    try:
        return Graph(n, pairs, require_connected=require_connected)
    except InvalidInputError as exc:
        raise ParseError(f"{where}.edges", str(exc)) from exc


def parse_labeling(obj: Any, where: str = "$") -> VertexLabeling:
    m = _int(_field(obj, "m", where), f"{where}.m", 1)
    bits = _field(obj, "bits", where)
    _expect(isinstance(bits, list), f"{where}.bits", "expected a list of bit strings")
    for k, b in enumerate(bits):
        _expect(isinstance(b, str), f"{where}.bits[{k}]", "expected a string of 0/1 digits")
    try:
        return VertexLabeling(m, tuple(bits))
    except InvalidInputError as exc:
        raise ParseError(f"{where}.bits", str(exc)) from exc


def parse_schedule(obj: Any, where: str = "$", graph: Optional[Graph] = None,
                   base: Optional[Path] = None) -> WeightSchedule:
    """``{"graph": {...}, "steps": [matrix, ...]}``; ``graph`` overrides the embedded one.

    The neighbour constraint is checked when the schedule is run, not here.
    """
    steps_raw = _field(obj, "steps", where)
    _expect(isinstance(steps_raw, list) and steps_raw, f"{where}.steps", "expected a nonempty list")
    steps = [_matrix_or_ref(m, f"{where}.steps[{k}]", base) for k, m in enumerate(steps_raw)]
    if graph is None:
        graph = parse_graph(_field(obj, "graph", where), f"{where}.graph")
    try:
        return WeightSchedule(steps, graph, strict=False)
    except InvalidInputError as exc:
        raise ParseError(f"{where}.steps", str(exc)) from exc


def model_to_json(model: DeGrootModel) -> dict:
    return {
        "r": model.r,
        "p0": [format_rational(v) for v in model.p0.row_values(1)],
        "weights": [W.to_json() for W in model.weights],
        "homogeneous": model.homogeneous,
    }


def chain_to_json(chain: PartitionChain, kept=None) -> dict:
    out = {
        "matrices": [P.to_json() for P in chain.matrices],
        "partitions": [p.to_json() for p in chain.partitions],
    }
    if kept is not None:
        out["kept"] = list(kept)
    return out
