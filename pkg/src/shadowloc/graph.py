"""Network data model: nodes, unit-disk edges, shadow edges and per-node knowledge."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .errors import (
    CoincidentNodes,
    DuplicateId,
    NonPositiveRadius,
    NotYetConstrained,
    UnknownId,
)
from .geometry import EPS_GEOM, Circle, Point2, distance

Edge = tuple[int, int]


def edge_key(i: int, j: int) -> Edge:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class NodeRecord:
    id: int
    true_pos: Point2
    is_kernel: bool = False


class EdgeKind(str, enum.Enum):
    REGULAR = "regular"
    SHADOW = "shadow"


class Status(str, enum.Enum):
    UNKNOWN = "unknown"
    AMBIGUOUS = "ambiguous"
    LOCALIZED = "localized"


@dataclass(frozen=True)
class LocalizationState:
    """What a node knows about its own position.

    ``points`` holds the localization options: empty when unconstrained,
    two hypotheses when ambiguous, a single point when localized.
    """

    status: Status = Status.UNKNOWN
    points: tuple[Point2, ...] = ()

    @classmethod
    def unknown(cls) -> "LocalizationState":
        return _UNKNOWN

    @classmethod
    def ambiguous(cls, h1: Point2, h2: Point2) -> "LocalizationState":
        return cls(Status.AMBIGUOUS, (Point2(*h1), Point2(*h2)))

    @classmethod
    def localized(cls, p: Point2) -> "LocalizationState":
        return cls(Status.LOCALIZED, (Point2(*p),))

    @property
    def is_localized(self) -> bool:
        return self.status is Status.LOCALIZED

    @property
    def is_ambiguous(self) -> bool:
        return self.status is Status.AMBIGUOUS

    @property
    def position(self) -> Point2:
        if self.status is not Status.LOCALIZED:
            raise ValueError(f"state is {self.status.value}, not localized")
        return self.points[0]


_UNKNOWN = LocalizationState()


@dataclass
class NetworkGraph:
    """Extended shadow graph: regular (sensed) edges plus shadow edges.

    Regular edges carry the measured distance; keys are ``(min_id, max_id)``.
    Equality compares the persisted content only (nodes, radius, edges and
    states); the bookkeeping fields are scratch data filled by the engine.
    """

    nodes: list[NodeRecord]
    rho: float
    regular_edges: dict[Edge, float] = field(default_factory=dict)
    shadow_edges: set[Edge] = field(default_factory=set)
    states: dict[int, LocalizationState] = field(default_factory=dict)
    # how each node got localized: "kernel", "trilateration", "tangent", "shadow"
    via: dict[int, str] = field(default_factory=dict, compare=False, repr=False)
    shadow_log: list = field(default_factory=list, compare=False, repr=False)
    _adj: Optional[list[dict[int, float]]] = field(default=None, compare=False, repr=False)

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def kernel_ids(self) -> list[int]:
        return [nd.id for nd in self.nodes if nd.is_kernel]

    def _check_id(self, i: int) -> None:
        if not 0 <= i < len(self.nodes):
            raise UnknownId(i)

    def adjacency(self) -> list[dict[int, float]]:
        """Per-node map of regular neighbor id to measured distance."""
        if self._adj is None:
            adj: list[dict[int, float]] = [{} for _ in self.nodes]
            for (i, j), d in self.regular_edges.items():
                adj[i][j] = d
                adj[j][i] = d
            self._adj = adj
        return self._adj

    def add_regular_edge(self, i: int, j: int, d: float) -> None:
        self.regular_edges[edge_key(i, j)] = d
        if self._adj is not None:
            self._adj[i][j] = d
            self._adj[j][i] = d

    def add_node(self, node: NodeRecord) -> None:
        if node.id != len(self.nodes):
            raise DuplicateId(f"expected id {len(self.nodes)}, got {node.id}")
        self.nodes.append(node)
        self.states[node.id] = LocalizationState.unknown()
        if self._adj is not None:
            self._adj.append({})

    def state(self, i: int) -> LocalizationState:
        self._check_id(i)
        return self.states.get(i, _UNKNOWN)

    def localized_ids(self) -> list[int]:
        return [i for i in range(self.n) if self.state(i).is_localized]

    def localized_fraction(self) -> float:
        return len(self.localized_ids()) / self.n

    def copy(self) -> "NetworkGraph":
        return NetworkGraph(
            nodes=list(self.nodes),
            rho=self.rho,
            regular_edges=dict(self.regular_edges),
            shadow_edges=set(self.shadow_edges),
            states=dict(self.states),
            via=dict(self.via),
            shadow_log=list(self.shadow_log),
        )

    def reset_states(self) -> "NetworkGraph":
        """Copy with shadow edges dropped and only kernel nodes localized."""
        g = self.copy()
        g.shadow_edges = set()
        g.shadow_log = []
        g.states = {nd.id: LocalizationState.unknown() for nd in g.nodes}
        g.via = {}
        for nd in g.nodes:
            if nd.is_kernel:
                g.states[nd.id] = LocalizationState.localized(nd.true_pos)
                g.via[nd.id] = "kernel"
        return g


def _validate_nodes(nodes: list[NodeRecord]) -> None:
    ids = [nd.id for nd in nodes]
    if len(set(ids)) != len(ids):
        raise DuplicateId("node ids are not unique")
    if sorted(ids) != list(range(len(ids))):
        raise DuplicateId("node ids must be dense 0..n-1")


def pairwise_distances(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def build_unit_disk_graph(nodes: Iterable[NodeRecord], rho: float) -> NetworkGraph:
    """Connect every pair of distinct nodes closer than ``rho`` (inclusive).

    Kernel nodes start localized at their true positions, all others unknown.
    """
    if not rho > 0:
        raise NonPositiveRadius(f"rho must be positive, got {rho}")
    nodes = sorted(nodes, key=lambda nd: nd.id)
    _validate_nodes(nodes)

    g = NetworkGraph(nodes=nodes, rho=float(rho))
    if nodes:
        pts = np.array([nd.true_pos for nd in nodes], dtype=float)
        dist = pairwise_distances(pts)
        iu, ju = np.triu_indices(len(nodes), k=1)
        dd = dist[iu, ju]
        if np.any(dd <= EPS_GEOM):
            k = int(np.argmax(dd <= EPS_GEOM))
            raise CoincidentNodes(f"nodes {iu[k]} and {ju[k]} coincide")
        # vectorized prefilter, then the scalar distance decides and is stored
        sel = dd <= rho + 1e-12
        for i, j in zip(iu[sel].tolist(), ju[sel].tolist()):
            d = distance(nodes[i].true_pos, nodes[j].true_pos)
            if d <= rho:
                g.regular_edges[(i, j)] = d
    return g.reset_states()


def neighbors(g: NetworkGraph, i: int, kind: EdgeKind = EdgeKind.REGULAR) -> list[tuple[int, Optional[float]]]:
    """Ids adjacent to ``i`` by the given edge kind, sorted by id.

    Regular neighbors come with their measured distance, shadow neighbors
    with ``None``.
    """
    g._check_id(i)
    if EdgeKind(kind) is EdgeKind.REGULAR:
        return sorted(g.adjacency()[i].items())
    out = [(b if a == i else a) for a, b in g.shadow_edges if i in (a, b)]
    return [(j, None) for j in sorted(out)]


def admissible_sensing_region(g: NetworkGraph, i: int) -> list[Circle]:
    """One sensing disk of radius rho per localization option of ``i``."""
    st = g.state(i)
    if st.status is Status.UNKNOWN:
        raise NotYetConstrained(f"node {i} has no finite set of localization options")
    return [Circle(p, g.rho) for p in st.points]
