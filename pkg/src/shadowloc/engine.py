"""Localization from regular edges plus shadow edges.

A node hearing three non-collinear localized nodes is pinned by trilateration.
A node hearing only two is left with two mirror-image hypotheses; if some
localized node it does *not* hear sits inside the sensing disk of exactly one
hypothesis, that hypothesis is impossible and a shadow edge records the
elimination.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    CollinearAnchors,
    ConstructionStalled,
    InconsistentDistances,
    NoSolution,
    NotAmbiguous,
    SeedDegenerate,
    ShadowLocError,
)
from .geometry import (
    EPS_COLLINEAR,
    EPS_GEOM,
    Circle,
    Point2,
    circle_intersection,
    cross,
    distance,
    in_disk,
    is_collinear,
)
from .graph import (
    LocalizationState,
    NetworkGraph,
    NodeRecord,
    Status,
    build_unit_disk_graph,
    edge_key,
)

log = logging.getLogger(__name__)

TOL_TRILAT = 1e-6


class Mode(str, enum.Enum):
    TNC = "tnc"
    SHADOW = "shadow"


@dataclass(frozen=True)
class ShadowRecord:
    node: int
    anchor: int
    kept: Point2
    eliminated: Point2


# ---------------------------------------------------------------------------
# lateration
# ---------------------------------------------------------------------------

def _chord(c1: Circle, c2: Circle) -> tuple[Point2, ...]:
    """Circle intersection that keeps a genuine pair inside the tangency band.

    ``circle_intersection`` reports tangency whenever the center distance is
    within ``EPS_GEOM`` of ``r1 + r2`` or ``|r1 - r2|``; on overlapping circles
    that band still hides two real points up to ~sqrt(2 r EPS_GEOM) apart, far
    more than the localization tolerance allows to merge.
    """
    options = circle_intersection(c1, c2)
    if len(options) != 1:
        return options
    (x1, y1), r1 = c1
    (x2, y2), r2 = c2
    dx, dy = x2 - x1, y2 - y1
    d = math.hypot(dx, dy)
    a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d)
    h2 = r1 * r1 - a * a
    if h2 <= 0.0 or 2.0 * math.sqrt(h2) <= EPS_GEOM:
        return options
    h = math.sqrt(h2)
    ux, uy = dx / d, dy / d
    mx, my = x1 + a * ux, y1 + a * uy
    return (Point2(mx - h * uy, my + h * ux), Point2(mx + h * uy, my - h * ux))


def trilaterate(anchors: Sequence[Point2], dists: Sequence[float]) -> Point2:
    """Position from exact ranges to three non-collinear anchors.

    Two anchors are intersected as circles and the remaining one picks the
    matching hypothesis.  The pair with the widest chord is used, so a node
    sitting close to one anchor line does not degrade the answer.  Extra
    anchors, if given, only take part in the residual check.
    """
    if len(anchors) < 3 or len(anchors) != len(dists):
        raise ValueError("need at least three anchors with one distance each")
    a, b, c = anchors[0], anchors[1], anchors[2]
    if is_collinear(a, b, c):
        raise CollinearAnchors(f"anchors {a}, {b}, {c} are collinear")

    best_options: tuple[Point2, ...] = ()
    best_width = -1.0
    for u, v in ((0, 1), (0, 2), (1, 2)):
        options = _chord(Circle(anchors[u], dists[u]), Circle(anchors[v], dists[v]))
        width = distance(*options) if len(options) == 2 else 0.0 if options else -1.0
        if width > best_width:
            best_options, best_width = options, width
    if not best_options:
        raise InconsistentDistances("range circles do not meet")

    def misfit(p: Point2) -> float:
        return sum(abs(distance(p, q) - r) for q, r in zip(anchors, dists))

    best = min(best_options, key=misfit)
    worst = max(abs(distance(best, q) - r) for q, r in zip(anchors, dists))
    if worst > TOL_TRILAT:
        raise InconsistentDistances(f"residual {worst:.3g} exceeds {TOL_TRILAT}")
    return best


def bilaterate(a1: Point2, a2: Point2, d1: float, d2: float) -> LocalizationState:
    """Localization options from ranges to two localized nodes.

    Transversal circles give an ambiguous state whose two hypotheses mirror
    each other across the anchor line; tangent circles pin the node.
    """
    options = _chord(Circle(a1, d1), Circle(a2, d2))
    if not options:
        raise NoSolution(f"circles around {a1} (r={d1}) and {a2} (r={d2}) do not meet")
    if len(options) == 1:
        return LocalizationState.localized(options[0])
    return LocalizationState.ambiguous(*options)


def _pick_anchors(ids: Sequence[int], pos) -> tuple[int, ...]:
    """Choose a well-spread anchor set among localized neighbors.

    Returns three ids when a non-collinear triple exists, otherwise the two
    most distant ids (all candidates then share one line, so every pair yields
    the same mirror hypotheses).  Only depends on the id set, never on visit
    order.
    """
    a = ids[0]
    pa = pos[a]
    b = max(ids[1:], key=lambda j: (distance(pa, pos[j]), -j))
    if len(ids) == 2:
        return a, b
    pb = pos[b]
    c = max((j for j in ids if j != a and j != b), key=lambda j: (abs(cross(pa, pb, pos[j])), -j))
    if abs(cross(pa, pb, pos[c])) > EPS_COLLINEAR:
        return a, b, c
    return a, b


# ---------------------------------------------------------------------------
# shadow edges
# ---------------------------------------------------------------------------

def shadow_anchors_among(h1, h2, rho: float, ids: np.ndarray, positions: np.ndarray) -> list[tuple[int, int]]:
    """All ``(anchor_id, eliminated_index)`` among candidate nodes, by ascending id.

    A candidate qualifies when it lies in exactly one of the closed disks of
    radius ``rho`` around ``h1`` (index 0) and ``h2`` (index 1).
    """
    if len(ids) == 0:
        return []
    lim = rho + EPS_GEOM
    in1 = np.hypot(positions[:, 0] - h1[0], positions[:, 1] - h1[1]) <= lim
    in2 = np.hypot(positions[:, 0] - h2[0], positions[:, 1] - h2[1]) <= lim
    hits = np.flatnonzero(in1 ^ in2)
    order = np.argsort(ids[hits], kind="stable")
    return [(int(ids[k]), 0 if in1[k] else 1) for k in hits[order]]


def _first_shadow_anchor(h1, h2, rho, ids, positions) -> Optional[tuple[int, int]]:
    hits = shadow_anchors_among(h1, h2, rho, ids, positions)
    return hits[0] if hits else None


def _shadow_candidates(g: NetworkGraph, i: int) -> tuple[np.ndarray, np.ndarray]:
    adj = g.adjacency()[i]
    ids = [j for j in g.localized_ids() if j != i and j not in adj]
    pos = np.array([g.states[j].points[0] for j in ids], dtype=float).reshape(-1, 2)
    return np.array(ids, dtype=int), pos


def find_shadow_anchor(g: NetworkGraph, i: int) -> Optional[tuple[int, int]]:
    """Smallest-id localized non-neighbor inside exactly one sensing disk of ``i``.

    Returns ``(anchor_id, eliminated_index)`` where the index points into the
    hypotheses of the ambiguous state, or ``None``.
    """
    st = g.state(i)
    if not st.is_ambiguous:
        raise NotAmbiguous(f"node {i} is {st.status.value}")
    ids, pos = _shadow_candidates(g, i)
    return _first_shadow_anchor(st.points[0], st.points[1], g.rho, ids, pos)


def all_shadow_anchors(g: NetworkGraph, i: int) -> list[tuple[int, int]]:
    st = g.state(i)
    if not st.is_ambiguous:
        raise NotAmbiguous(f"node {i} is {st.status.value}")
    ids, pos = _shadow_candidates(g, i)
    return shadow_anchors_among(st.points[0], st.points[1], g.rho, ids, pos)


def apply_shadow_edge(g: NetworkGraph, i: int, anchor: int, eliminated: int) -> ShadowRecord:
    """Insert shadow edge ``(i, anchor)`` and localize ``i`` at the surviving hypothesis."""
    st = g.state(i)
    if not st.is_ambiguous:
        raise NotAmbiguous(f"node {i} is {st.status.value}")
    ast = g.state(anchor)
    if not ast.is_localized:
        raise ValueError(f"shadow anchor {anchor} is not localized")
    if edge_key(i, anchor) in g.regular_edges:
        raise ValueError(f"node {i} senses {anchor}; a shadow edge needs d > rho")
    if eliminated not in (0, 1):
        raise ValueError("eliminated must be 0 or 1")
    gone, kept = st.points[eliminated], st.points[1 - eliminated]
    p = ast.position
    if not in_disk(p, Circle(gone, g.rho)) or in_disk(p, Circle(kept, g.rho)):
        raise ValueError(f"anchor {anchor} does not separate the hypotheses of node {i}")

    g.shadow_edges.add(edge_key(i, anchor))
    g.states[i] = LocalizationState.localized(kept)
    g.via[i] = "shadow"
    rec = ShadowRecord(node=i, anchor=anchor, kept=kept, eliminated=gone)
    g.shadow_log.append(rec)
    return rec


# ---------------------------------------------------------------------------
# propagation closure
# ---------------------------------------------------------------------------

def _localize_from(ids, pos, dist_of, rho, shadow_pool) -> tuple[Optional[LocalizationState], str, Optional[tuple[int, int]]]:
    """Decide what a node learns from its localized regular neighbors ``ids``.

    ``shadow_pool`` is ``(ids, positions)`` of localized non-neighbors, or
    ``None`` to disable the shadow step.  Returns ``(state, via, shadow)``
    where ``shadow`` is ``(anchor, eliminated_index)`` for an ambiguous state
    resolved by a shadow edge.
    """
    picked = _pick_anchors(ids, pos)
    if len(picked) == 3:
        p = trilaterate([pos[j] for j in picked], [dist_of[j] for j in picked])
        return LocalizationState.localized(p), "trilateration", None
    a, b = picked
    st = bilaterate(pos[a], pos[b], dist_of[a], dist_of[b])
    if st.is_localized:
        return st, "tangent", None
    if shadow_pool is None:
        return st, "", None
    hit = _first_shadow_anchor(st.points[0], st.points[1], rho, *shadow_pool)
    return st, "", hit


def propagate(
    g: NetworkGraph,
    mode: Mode | str = Mode.SHADOW,
    order: Optional[Sequence[int]] = None,
    all_anchors: Optional[dict[int, list[int]]] = None,
) -> NetworkGraph:
    """Close ``g`` under trilateration (and shadow elimination in shadow mode).

    Works in rounds: every decision of a round reads the state at the start
    of the round and all updates are applied together, so the fixed point,
    positions included, does not depend on ``order``.  Mutates and returns
    ``g``.  When ``all_anchors`` is given it receives, for each shadow-localized
    node, every anchor that qualified at the time.
    """
    mode = Mode(mode)
    n = g.n
    adj = g.adjacency()
    visit = list(range(n)) if order is None else list(order)

    loc = np.zeros(n, dtype=bool)
    est = np.zeros((n, 2), dtype=float)
    pos: dict[int, Point2] = {}
    for i in range(n):
        st = g.state(i)
        if st.is_localized:
            loc[i] = True
            est[i] = st.points[0]
            pos[i] = st.points[0]

    nbr_mask = None
    if mode is Mode.SHADOW:
        nbr_mask = np.zeros((n, n), dtype=bool)
        if g.regular_edges:
            e = np.array(list(g.regular_edges), dtype=int)
            nbr_mask[e[:, 0], e[:, 1]] = True
            nbr_mask[e[:, 1], e[:, 0]] = True
        np.fill_diagonal(nbr_mask, True)

    pending = {i for i in range(n) if not loc[i]}
    while pending:
        updates = {}
        for i in visit:
            if i not in pending:
                continue
            ids = sorted(j for j in adj[i] if loc[j])
            if len(ids) < 2:
                continue
            pool = None
            if nbr_mask is not None:
                cand = np.flatnonzero(loc & ~nbr_mask[i])
                pool = (cand, est[cand])
            try:
                st, via, hit = _localize_from(ids, pos, adj[i], g.rho, pool)
            except ShadowLocError as exc:
                log.warning("node %d left as is: %s", i, exc)
                continue
            if st != g.states[i] or hit is not None:
                updates[i] = (st, via, hit)
                if hit is not None and all_anchors is not None:
                    all_anchors[i] = [a for a, _ in shadow_anchors_among(st.points[0], st.points[1], g.rho, *pool)]

        newly = []
        for i in sorted(updates):
            st, via, hit = updates[i]
            g.states[i] = st
            if hit is not None:
                try:
                    apply_shadow_edge(g, i, *hit)
                except ValueError as exc:
                    # vectorized and scalar disk tests disagree only at the rounding level
                    log.warning("shadow edge for node %d dropped: %s", i, exc)
            elif st.is_localized:
                g.via[i] = via
            if g.states[i].is_localized:
                p = g.states[i].points[0]
                loc[i] = True
                est[i] = p
                pos[i] = p
                newly.append(i)

        pending = set()
        for j in newly:
            pending.update(k for k in adj[j] if not loc[k])
        if newly and mode is Mode.SHADOW:
            pending.update(i for i in range(n) if g.states[i].is_ambiguous)
    return g


# ---------------------------------------------------------------------------
# localization check
# ---------------------------------------------------------------------------

@dataclass
class CheckResult:
    success: bool
    failed_node: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.success


def check_localizable(g: NetworkGraph) -> CheckResult:
    """Graph localization check over the extended shadow graph.

    The graph is closed from its kernel nodes first so that "localized
    neighbor" is well defined; then every node must either be pinned by
    trilateration, or have two localized regular neighbors plus a localized
    node it does not hear lying in exactly one of its two sensing disks.
    """
    h = propagate(g.reset_states(), Mode.SHADOW)
    adj = h.adjacency()
    loc_ids = h.localized_ids()
    pos = {j: h.states[j].points[0] for j in loc_ids}
    kernel = set(h.kernel_ids)

    for i in range(h.n):
        if i in kernel:
            continue
        ids = sorted(j for j in adj[i] if j in pos)
        if len(ids) < 2:
            return CheckResult(False, i, f"node {i} has {len(ids)} localized neighbor(s); infinitely many options")
        picked = _pick_anchors(ids, pos)
        if len(picked) == 3:
            continue
        a, b = picked
        try:
            st = bilaterate(pos[a], pos[b], adj[i][a], adj[i][b])
        except NoSolution:
            return CheckResult(False, i, f"node {i}: ranges to {a} and {b} are inconsistent")
        if st.is_localized:
            continue
        cand = [j for j in loc_ids if j != i and j not in adj[i]]
        pool = (np.array(cand, dtype=int), np.array([pos[j] for j in cand], dtype=float).reshape(-1, 2))
        if _first_shadow_anchor(st.points[0], st.points[1], h.rho, *pool) is None:
            return CheckResult(False, i, f"node {i} has two options and no shadow edge")
    return CheckResult(True)


# ---------------------------------------------------------------------------
# incremental construction
# ---------------------------------------------------------------------------

@dataclass
class ConstructionResult:
    graph: NetworkGraph
    accepted: int = 0
    rejected: int = 0
    outcomes: dict[int, str] = field(default_factory=dict)

    @property
    def all_localized(self) -> bool:
        return all(st.is_localized for st in self.graph.states.values())


def seed_graph(seed_triangle: Sequence[NodeRecord], rho: float) -> NetworkGraph:
    if len(seed_triangle) != 3:
        raise SeedDegenerate("seed must have exactly three nodes")
    pts = [Point2(*nd.true_pos) for nd in seed_triangle]
    if is_collinear(*pts):
        raise SeedDegenerate("seed triangle is collinear")
    for k in range(3):
        if distance(pts[k], pts[(k + 1) % 3]) > rho:
            raise SeedDegenerate("seed nodes must be pairwise within rho")
    kernel = [NodeRecord(k, pts[k], True) for k in range(3)]
    return build_unit_disk_graph(kernel, rho)


def admit_candidate(g: NetworkGraph, p: Point2) -> Optional[str]:
    """Try to add a node at true position ``p`` to a network under construction.

    The true position is used only to decide what the newcomer senses (which
    nodes are in range and at what distance); its position is then assessed
    from those ranges and from shadow edges.  Returns ``None`` when the
    candidate hears fewer than two localized nodes (rejected, graph
    untouched), else how it was localized: "trilateration", "tangent",
    "shadow" or "ambiguous".
    """
    p = Point2(float(p[0]), float(p[1]))
    rho = g.rho
    ranges = {nd.id: distance(p, nd.true_pos) for nd in g.nodes}
    if min(ranges.values(), default=1.0) <= EPS_GEOM:
        return None
    heard = {j: d for j, d in ranges.items() if d <= rho}
    pos = {j: g.states[j].points[0] for j in heard if g.states[j].is_localized}
    if len(pos) < 2:
        return None

    i = g.n
    g.add_node(NodeRecord(i, p, False))
    for j, d in heard.items():
        g.add_regular_edge(i, j, d)

    cand = [j for j in g.localized_ids() if j not in heard and j != i]
    pool = (np.array(cand, dtype=int), np.array([g.states[j].points[0] for j in cand], dtype=float).reshape(-1, 2))
    st, via, hit = _localize_from(sorted(pos), pos, heard, rho, pool)
    g.states[i] = st
    if hit is not None:
        apply_shadow_edge(g, i, *hit)
        via = "shadow"
    elif st.is_localized:
        g.via[i] = via
    else:
        via = "ambiguous"

    if g.states[i].is_localized:
        err = distance(g.states[i].points[0], p)
        if err > TOL_TRILAT:
            raise AssertionError(f"node {i} assessed {err:.3g} away from its true position")
    return via


def construct_incremental(
    seed_triangle: Sequence[NodeRecord],
    target_n: int,
    rho: float,
    rng: np.random.Generator,
    max_candidates: Optional[int] = None,
) -> ConstructionResult:
    """Grow a network from a localized seed triangle up to ``target_n`` nodes.

    Candidates are drawn uniformly in the unit square; those hearing fewer
    than two localized nodes are rejected and counted.  Admitted nodes are
    localized by trilateration or by a shadow edge, or stay ambiguous when no
    shadow anchor exists.
    """
    if target_n <= 3:
        raise ValueError("target_n must exceed 3")
    g = seed_graph(seed_triangle, rho)
    res = ConstructionResult(graph=g)
    limit = max_candidates if max_candidates is not None else 10_000 * target_n
    while g.n < target_n:
        if res.accepted + res.rejected >= limit:
            raise ConstructionStalled(f"{limit} candidates drawn, only {g.n} nodes admitted")
        x, y = rng.random(2)
        outcome = admit_candidate(g, Point2(float(x), float(y)))
        if outcome is None:
            res.rejected += 1
        else:
            res.accepted += 1
            res.outcomes[g.n - 1] = outcome
    return res


def position_errors(g: NetworkGraph) -> dict[int, float]:
    """Distance between assessed and true position for every localized node."""
    return {
        i: math.dist(g.states[i].points[0], g.nodes[i].true_pos)
        for i in range(g.n)
        if g.states[i].is_localized
    }
