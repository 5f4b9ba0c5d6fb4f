"""Command-line front end.

Exit status: 0 for success or a true answer, 1 for a well-formed negative
answer (not stable, not certified, not similar, ...), 2 for bad input.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from . import chains, degroot, distributed, io, stable
from .errors import InvalidInputError, NotBlockStableError, NotCertifiedError, ParseError
from .matrix import RMatrix, format_rational

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2


class _Result:
    def __init__(self, payload: Any, status: int = EXIT_OK):
        self.payload = payload
        self.status = status


# argument helpers -----------------------------------------------------------

def _json_arg(text: str, what: str) -> Any:
    """Inline JSON when the text starts with ``[`` or ``{``, else a file path."""
    stripped = text.lstrip()
    if stripped[:1] in "[{":
        return io.loads(stripped, f"--{what}")
    return io.load_json(text)


def _source(text: str, what: str) -> str:
    return f"--{what}" if text.lstrip()[:1] in "[{" else f"{text}:$"


def _partition(text: str, what: str, size: int):
    return io.parse_partition(_json_arg(text, what), _source(text, what), size)


def _index_set(text: str, what: str) -> list[int]:
    stripped = text.strip()
    if stripped[:1] != "[" and not Path(stripped).exists():
        stripped = "[" + stripped + "]"
    return io.parse_index_set(_json_arg(stripped, what), _source(stripped, what))


def _values(text: str, what: str) -> RMatrix:
    stripped = text.strip()
    if stripped[:1] != "[" and not Path(stripped).exists():
        stripped = "[" + stripped + "]"
    raw = _json_arg(stripped, what)
    where = _source(stripped, what)
    if not isinstance(raw, list) or not raw:
        raise ParseError(where, "expected a nonempty list of values")
    return RMatrix.row([io.parse_rational(v, f"{where}[{k}]") for k, v in enumerate(raw)])


def _matrix(path: str) -> RMatrix:
    return io.parse_matrix(io.load_json(path), f"{path}:$")


# commands -------------------------------------------------------------------

def cmd_stable_check(a) -> _Result:
    P = _matrix(a.matrix)
    rows = _partition(a.rows, "rows", P.rows)
    cols = _partition(a.cols, "cols", P.cols)
    report = stable.is_block_stable(P, rows, cols)
    return _Result(report.to_json(), EXIT_OK if report.holds else EXIT_NEGATIVE)


def cmd_stable_coarsest(a) -> _Result:
    P = _matrix(a.matrix)
    cols = _partition(a.cols, "cols", P.cols)
    return _Result({"partition": stable.coarsest_stable_partition(P, cols).to_json()})


def cmd_grouped(a) -> _Result:
    P = _matrix(a.matrix)
    rows = _partition(a.rows, "rows", P.rows)
    cols = _partition(a.cols, "cols", P.cols)
    try:
        return _Result(stable.grouped(P, rows, cols).to_json(a.decimal))
    except NotBlockStableError as exc:
        return _Result(exc.report.to_json(), EXIT_NEGATIVE)


def _load_chain(path: str):
    try:
        return io.parse_chain(io.load_json(path), f"{path}:$", Path(path).parent)
    except NotBlockStableError as exc:
        return exc


def cmd_chain_certify(a) -> _Result:
    loaded = _load_chain(a.chain)
    if isinstance(loaded, NotBlockStableError):
        return _Result({"error": str(loaded), "position": loaded.position,
                        "witness": loaded.report.to_json()}, EXIT_NEGATIVE)
    chain, kept = loaded
    if a.kept is not None:
        kept = _index_set(a.kept, "kept")
    if kept is None:
        raise ParseError(f"{a.chain}:$", "no kept set in the file and no --kept given")
    cert = chains.stable_rows(chain, kept)
    out = cert.to_json(a.decimal)
    out["grouped_product"] = chains.grouped_product(chain).to_json(a.decimal)
    return _Result(out)


def cmd_chain_structural(a) -> _Result:
    loaded = _load_chain(a.chain)
    if isinstance(loaded, NotBlockStableError):
        return _Result({"error": str(loaded), "position": loaded.position,
                        "witness": loaded.report.to_json()}, EXIT_NEGATIVE)
    chain, kept = loaded
    if a.kept is not None:
        kept = _index_set(a.kept, "kept")
    return _Result(chains.structural_preconditions(chain, kept).to_json())


def cmd_similar(a) -> _Result:
    P, Q = _matrix(a.first), _matrix(a.second)
    if P.shape != Q.shape:
        raise InvalidInputError(f"shapes differ: {P.shape} vs {Q.shape}")
    rows = _partition(a.rows, "rows", P.rows)
    cols = _partition(a.cols, "cols", P.cols)
    out: dict[str, Any] = {}
    keys = []
    for name, M in (("first", P), ("second", Q)):
        try:
            key = chains.similarity_key(M, rows, cols)
            out[name] = key.to_json(a.decimal)
            keys.append(key)
        except NotBlockStableError as exc:
            out[name] = exc.report.to_json()
    similar = len(keys) == 2 and keys[0] == keys[1]
    out["similar"] = similar
    return _Result(out, EXIT_OK if similar else EXIT_NEGATIVE)


def _model(path: str) -> degroot.DeGrootModel:
    return io.parse_model(io.load_json(path), f"{path}:$", Path(path).parent)


def cmd_degroot_run(a) -> _Result:
    model = _model(a.model)
    steps = a.steps if a.steps is not None else len(model.weights)
    return _Result(degroot.simulate(model, steps).to_json(a.decimal))


def cmd_degroot_certify(a) -> _Result:
    model = _model(a.model)
    kept = _index_set(a.kept, "kept") if a.kept is not None else list(range(1, model.r + 1))
    try:
        cert = degroot.certify(model, kept)
    except NotCertifiedError as exc:
        return _Result({"certified": False, "reason": str(exc)}, EXIT_NEGATIVE)
    out = cert.to_json(a.decimal)
    out["certified"] = True
    return _Result(out)


def cmd_degroot_submodel(a) -> _Result:
    model = _model(a.model)
    raw = _json_arg(a.partitions, "partitions")
    where = _source(a.partitions, "partitions")
    if not isinstance(raw, list):
        raise ParseError(where, "expected a list of partitions")
    parts = [io.parse_partition(p, f"{where}[{k}]", model.r) for k, p in enumerate(raw)]
    ok = degroot.check_submodel(model, parts)
    return _Result({"submodel": ok}, EXIT_OK if ok else EXIT_NEGATIVE)


def cmd_avg_hypercube(a) -> _Result:
    return _Result(distributed.hypercube_schedule(a.m).to_json(a.decimal))


def cmd_avg_s3(a) -> _Result:
    return _Result(distributed.s3_swapping_schedule().to_json(a.decimal))


def cmd_avg_run(a) -> _Result:
    graph = None
    if a.graph is not None:
        graph = io.parse_graph(io.load_json(a.graph), f"{a.graph}:$")
    sched = io.parse_schedule(io.load_json(a.schedule), f"{a.schedule}:$", graph, Path(a.schedule).parent)
    bad = sched.violations()
    if bad:
        s, i, j = bad[0]
        raise ParseError(f"{a.schedule}:$.steps[{s - 1}].entries[{i - 1}][{j - 1}]",
                         f"weight between {i} and {j}, which are not neighbours")
    run = distributed.run_schedule(sched, _values(a.q0, "q0"))
    out = run.to_json(a.decimal)
    out["mean"] = format_rational(sum(run.trajectory[0].row_values(1)) / run.trajectory[0].cols, a.decimal)
    return _Result(out, EXIT_OK if run.achieved_averaging else EXIT_NEGATIVE)


def cmd_avg_verify(a) -> _Result:
    graph = io.parse_graph(io.load_json(a.graph), f"{a.graph}:$")
    lab = io.parse_labeling(io.load_json(a.labeling), f"{a.labeling}:$")
    ok = distributed.verify_embedding(graph, lab)
    return _Result({"embedding": ok}, EXIT_OK if ok else EXIT_NEGATIVE)


def cmd_avg_hybrid(a) -> _Result:
    run = distributed.hybrid_leader_scenario(_values(a.q0, "q0"))
    return _Result(run.to_json(a.decimal), EXIT_OK if run.achieved_averaging else EXIT_NEGATIVE)


# output ---------------------------------------------------------------------

def _plain(obj: Any, indent: int = 0) -> list[str]:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.extend(_plain(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
        return lines
    if isinstance(obj, list):
        if _flat(obj):
            return [pad + _scalar(obj)]
        lines = []
        for v in obj:
            if isinstance(v, dict):
                lines.append(f"{pad}-")
                lines.extend(_plain(v, indent + 1))
            else:
                lines.extend(_plain(v, indent))
        return lines
    return [pad + _scalar(obj)]


def _flat(v: Any) -> bool:
    if isinstance(v, dict):
        return False
    if isinstance(v, list):
        return all(not isinstance(x, (dict, list)) for x in v)
    return True


def _scalar(v: Any) -> str:
    if isinstance(v, list):
        return " ".join(_scalar(x) for x in v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "-"
    return str(v)


def render(payload: Any, fmt: str) -> str:
    if fmt == "plain":
        return "\n".join(_plain(payload)) + "\n"
    return io.dumps(payload)


# parser ---------------------------------------------------------------------

def _globals(p: argparse.ArgumentParser, top: bool) -> None:
    default = (lambda v: v) if top else (lambda v: argparse.SUPPRESS)
    p.add_argument("--output", "-o", default=default(None), help="write the result here instead of stdout")
    p.add_argument("--format", choices=["json", "plain"], default=default("json"))
    p.add_argument("--decimal", action="store_true", default=default(False),
                   help="render rationals as 12-significant-digit decimals")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gmethod", description=__doc__.splitlines()[0])
    _globals(parser, True)
    sub = parser.add_subparsers(dest="command", required=True)

    def leaf(group, name, func, help_):
        p = group.add_parser(name, help=help_)
        _globals(p, False)
        p.set_defaults(func=func)
        return p

    st = sub.add_parser("stable", help="block-stability checks").add_subparsers(dest="action", required=True)
    p = leaf(st, "check", cmd_stable_check, "is the matrix block stable for the partitions?")
    p.add_argument("--matrix", required=True)
    p.add_argument("--rows", required=True, help="row partition: inline JSON or file")
    p.add_argument("--cols", required=True, help="column partition: inline JSON or file")
    p = leaf(st, "coarsest", cmd_stable_coarsest, "coarsest row partition for a column partition")
    p.add_argument("--matrix", required=True)
    p.add_argument("--cols", required=True)

    p = leaf(sub, "grouped", cmd_grouped, "grouped matrix of block row sums")
    p.add_argument("--matrix", required=True)
    p.add_argument("--rows", required=True)
    p.add_argument("--cols", required=True)

    ch = sub.add_parser("chain", help="products through partition chains").add_subparsers(dest="action", required=True)
    p = leaf(ch, "certify", cmd_chain_certify, "stable row of the kept columns of a chain product")
    p.add_argument("--chain", required=True)
    p.add_argument("--kept")
    p = leaf(ch, "structural", cmd_chain_structural, "locate the breakable and identical-row factors")
    p.add_argument("--chain", required=True)
    p.add_argument("--kept")

    p = leaf(sub, "similar", cmd_similar, "compare grouped matrices of two matrices")
    p.add_argument("--first", required=True)
    p.add_argument("--second", required=True)
    p.add_argument("--rows", required=True)
    p.add_argument("--cols", required=True)

    dg = sub.add_parser("degroot", help="opinion dynamics").add_subparsers(dest="action", required=True)
    p = leaf(dg, "run", cmd_degroot_run, "simulate the model")
    p.add_argument("--model", required=True)
    p.add_argument("--steps", type=int)
    p = leaf(dg, "certify", cmd_degroot_certify, "find a finite-time consensus certificate")
    p.add_argument("--model", required=True)
    p.add_argument("--kept", help="kept set, e.g. 1,2 (default: everyone)")
    p = leaf(dg, "submodel", cmd_degroot_submodel, "check the block-diagonal submodel condition")
    p.add_argument("--model", required=True)
    p.add_argument("--partitions", required=True, help="list of partitions: inline JSON or file")

    av = sub.add_parser("avg", help="distributed averaging").add_subparsers(dest="action", required=True)
    p = leaf(av, "hypercube", cmd_avg_hypercube, "emit the m-cube schedule")
    p.add_argument("--m", type=int, required=True)
    p = leaf(av, "run", cmd_avg_run, "run a schedule on initial values")
    p.add_argument("--schedule", required=True)
    p.add_argument("--graph", help="graph file overriding the one inside the schedule")
    p.add_argument("--q0", required=True, help="initial values, e.g. 0,8,0 or a JSON file")
    p = leaf(av, "verify-embedding", cmd_avg_verify, "does the labeled cube sit inside the graph?")
    p.add_argument("--graph", required=True)
    p.add_argument("--labeling", required=True)
    leaf(av, "s3", cmd_avg_s3, "emit the two-step schedule on the six permutations of 3")
    p = leaf(av, "hybrid", cmd_avg_hybrid, "wheel plus clique with leader broadcast")
    p.add_argument("--q0", required=True)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.func(args)
    except (InvalidInputError, NotBlockStableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = render(result.payload, args.format)
    if args.output:
        try:
            Path(args.output).write_text(text, encoding="utf-8")
        except OSError as exc:
            print(f"error: {args.output}: {exc.strerror or exc}", file=sys.stderr)
            return EXIT_INPUT
    else:
        sys.stdout.write(text)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
