"""JSON graph documents and CSV sweep tables.

Graph document layout::

    {"rho": 0.25,
     "nodes":  [{"id": 0, "x": 0.1, "y": 0.2, "kernel": true}, ...],
     "edges":  [{"i": 0, "j": 3, "kind": "regular", "d": 0.12},
                {"i": 3, "j": 7, "kind": "shadow"}, ...],
     "states": [{"id": 3, "status": "ambiguous", "points": [[x, y], [x, y]]}, ...]}

Floats are written with ``repr`` precision, which reads back bit-identical.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import IO, Any, Iterable, Union

from .errors import SchemaViolation
from .experiment import CellSummary, RunMetrics, SkippedRun
from .geometry import Point2
from .graph import LocalizationState, NetworkGraph, NodeRecord, Status, edge_key

PathLike = Union[str, Path]

SWEEP_COLUMNS = ("rho", "n", "run", "pct_tnc", "pct_shadow", "shadow_edges", "regular_edges")
SUMMARY_COLUMNS = (
    "rho", "n", "runs", "pct_tnc", "pct_shadow", "difference", "ratio",
    "shadow_edges", "regular_edges", "shadow_fraction",
)
_N_POINTS = {Status.UNKNOWN: 0, Status.AMBIGUOUS: 2, Status.LOCALIZED: 1}


def graph_to_dict(g: NetworkGraph) -> dict[str, Any]:
    edges = [
        {"i": i, "j": j, "kind": "regular", "d": d} for (i, j), d in sorted(g.regular_edges.items())
    ]
    edges += [{"i": i, "j": j, "kind": "shadow"} for i, j in sorted(g.shadow_edges)]
    return {
        "rho": g.rho,
        "nodes": [
            {"id": nd.id, "x": nd.true_pos.x, "y": nd.true_pos.y, "kernel": nd.is_kernel}
            for nd in g.nodes
        ],
        "edges": edges,
        "states": [
            {"id": i, "status": g.state(i).status.value, "points": [[p.x, p.y] for p in g.state(i).points]}
            for i in range(g.n)
        ],
    }


def _get(obj: Any, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaViolation(f"{where}: missing field {key!r}")
    return obj[key]


def _num(v: Any, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SchemaViolation(f"{where}: expected a finite number, got {v!r}")
    return float(v)


def _int(v: Any, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaViolation(f"{where}: expected an integer, got {v!r}")
    return v


def graph_from_dict(doc: Any) -> NetworkGraph:
    rho = _num(_get(doc, "rho", "document"), "rho")
    if rho <= 0:
        raise SchemaViolation("rho must be positive")

    raw_nodes = _get(doc, "nodes", "document")
    if not isinstance(raw_nodes, list):
        raise SchemaViolation("nodes must be a list")
    nodes = []
    for k, nd in enumerate(raw_nodes):
        where = f"nodes[{k}]"
        kernel = _get(nd, "kernel", where)
        if not isinstance(kernel, bool):
            raise SchemaViolation(f"{where}: kernel must be a boolean")
        nodes.append(
            NodeRecord(
                _int(_get(nd, "id", where), where),
                Point2(_num(_get(nd, "x", where), where), _num(_get(nd, "y", where), where)),
                kernel,
            )
        )
    nodes.sort(key=lambda nd: nd.id)
    if [nd.id for nd in nodes] != list(range(len(nodes))):
        raise SchemaViolation("node ids must be unique and dense 0..n-1")
    n = len(nodes)

    g = NetworkGraph(nodes=nodes, rho=rho)
    raw_edges = _get(doc, "edges", "document")
    if not isinstance(raw_edges, list):
        raise SchemaViolation("edges must be a list")
    for k, e in enumerate(raw_edges):
        where = f"edges[{k}]"
        i = _int(_get(e, "i", where), where)
        j = _int(_get(e, "j", where), where)
        if not (0 <= i < n and 0 <= j < n):
            raise SchemaViolation(f"{where}: references unknown node id")
        if i == j:
            raise SchemaViolation(f"{where}: self-loop")
        key = edge_key(i, j)
        kind = _get(e, "kind", where)
        if kind == "regular":
            g.regular_edges[key] = _num(_get(e, "d", where), where)
        elif kind == "shadow":
            g.shadow_edges.add(key)
        else:
            raise SchemaViolation(f"{where}: unknown edge kind {kind!r}")
    if g.shadow_edges & set(g.regular_edges):
        raise SchemaViolation("a node pair carries both a regular and a shadow edge")

    raw_states = _get(doc, "states", "document")
    if not isinstance(raw_states, list):
        raise SchemaViolation("states must be a list")
    g.states = {nd.id: LocalizationState.unknown() for nd in nodes}
    for k, st in enumerate(raw_states):
        where = f"states[{k}]"
        i = _int(_get(st, "id", where), where)
        if not 0 <= i < n:
            raise SchemaViolation(f"{where}: references unknown node id")
        try:
            status = Status(_get(st, "status", where))
        except ValueError:
            raise SchemaViolation(f"{where}: unknown status {st['status']!r}") from None
        pts = _get(st, "points", where)
        if not isinstance(pts, list) or len(pts) != _N_POINTS[status]:
            raise SchemaViolation(f"{where}: {status.value} state needs {_N_POINTS[status]} point(s)")
        points = []
        for p in pts:
            if not isinstance(p, list) or len(p) != 2:
                raise SchemaViolation(f"{where}: points must be [x, y] pairs")
            points.append(Point2(_num(p[0], where), _num(p[1], where)))
        g.states[i] = LocalizationState(status, tuple(points))
    for nd in nodes:
        if nd.is_kernel and g.states[nd.id].is_localized:
            g.via[nd.id] = "kernel"
    return g


def dumps_graph(g: NetworkGraph) -> str:
    return json.dumps(graph_to_dict(g), indent=1) + "\n"


def write_graph(g: NetworkGraph, path: PathLike) -> None:
    Path(path).write_text(dumps_graph(g))


def read_graph(path: PathLike) -> NetworkGraph:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"{path}: not valid JSON ({exc})") from None
    return graph_from_dict(doc)


def _fmt(v: float) -> str:
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf"
    return repr(float(v))


def write_sweep_csv(rows: Iterable[RunMetrics], fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in sorted(rows, key=lambda r: (r.rho, r.n, r.run_index)):
        w.writerow([_fmt(r.rho), r.n, r.run_index, _fmt(r.pct_tnc), _fmt(r.pct_shadow),
                    r.shadow_edge_count, r.regular_edge_count])


def read_sweep_csv(fh: IO[str]) -> list[RunMetrics]:
    rd = csv.DictReader(fh)
    if tuple(rd.fieldnames or ()) != SWEEP_COLUMNS:
        raise SchemaViolation(f"unexpected sweep columns {rd.fieldnames}")
    return [
        RunMetrics(float(r["rho"]), int(r["n"]), int(r["run"]), float(r["pct_tnc"]),
                   float(r["pct_shadow"]), int(r["shadow_edges"]), int(r["regular_edges"]))
        for r in rd
    ]


def write_summary_csv(cells: Iterable[CellSummary], fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    for c in sorted(cells, key=lambda c: (c.rho, c.n)):
        w.writerow([_fmt(c.rho), c.n, c.runs, _fmt(c.pct_tnc), _fmt(c.pct_shadow), _fmt(c.difference),
                    _fmt(c.ratio), _fmt(c.shadow_edges), _fmt(c.regular_edges), _fmt(c.shadow_fraction)])


def write_skipped_csv(skipped: Iterable[SkippedRun], fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(("rho", "n", "run", "reason"))
    for s in skipped:
        w.writerow([_fmt(s.rho), s.n, s.run_index, s.reason])
