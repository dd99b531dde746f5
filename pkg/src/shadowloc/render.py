"""SVG drawing of a localized network.

Regular edges are solid, shadow edges dashed.  Nodes fall in three classes:
localized by plain trilateration (``tnc``), localized only thanks to shadow
edges (``shadow``) and not localized (``unlocalized``).  Every element carries
those words in its ``class`` attribute so drawings can be inspected by tools.
"""
from __future__ import annotations

from xml.sax.saxutils import escape

from .engine import Mode, propagate
from .graph import NetworkGraph, edge_key

SIZE = 600
MARGIN = 24

COLORS = {
    "tnc": "#1f5fbf",
    "shadow": "#8e3fbf",
    "unlocalized": "#2e9e3e",
    "shadow_edge": "#d62728",
}
_RANK = {"tnc": 0, "shadow": 1, "unlocalized": 2}


def node_classes(g: NetworkGraph) -> dict[int, str]:
    """Class of every node, with TNC recomputed from the kernel for reference."""
    tnc = set(propagate(g.reset_states(), Mode.TNC).localized_ids())
    out = {}
    for i in range(g.n):
        if not g.state(i).is_localized:
            out[i] = "unlocalized"
        elif i in tnc:
            out[i] = "tnc"
        else:
            out[i] = "shadow"
    return out


def _xy(p) -> tuple[float, float]:
    return MARGIN + p[0] * SIZE, MARGIN + (1.0 - p[1]) * SIZE


def render_svg(g: NetworkGraph, all_shadow_edges: bool = False) -> str:
    classes = node_classes(g)
    shadow = set(g.shadow_edges)
    if all_shadow_edges:
        found: dict[int, list[int]] = {}
        propagate(g.reset_states(), Mode.SHADOW, all_anchors=found)
        for i, anchors in found.items():
            if g.state(i).is_localized:
                shadow.update(edge_key(i, a) for a in anchors)
        shadow -= set(g.regular_edges)

    full = SIZE + 2 * MARGIN
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{full}" height="{full + 40}" '
        f'viewBox="0 0 {full} {full + 40}">',
        f'<rect class="frame" x="{MARGIN}" y="{MARGIN}" width="{SIZE}" height="{SIZE}" '
        'fill="white" stroke="#999" stroke-width="1"/>',
        f"<title>rho={g.rho!r} nodes={g.n} localized={len(g.localized_ids())}</title>",
    ]

    for (i, j) in sorted(g.regular_edges):
        cls = max(classes[i], classes[j], key=_RANK.__getitem__)
        (x1, y1), (x2, y2) = _xy(g.nodes[i].true_pos), _xy(g.nodes[j].true_pos)
        out.append(
            f'<line class="edge regular {cls}" x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{COLORS[cls]}" stroke-width="1.2" stroke-opacity="0.7"/>'
        )
    for (i, j) in sorted(shadow):
        (x1, y1), (x2, y2) = _xy(g.nodes[i].true_pos), _xy(g.nodes[j].true_pos)
        out.append(
            f'<line class="edge shadow" x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{COLORS["shadow_edge"]}" stroke-width="1.4" stroke-dasharray="5,4"/>'
        )
    for nd in g.nodes:
        cls = classes[nd.id]
        x, y = _xy(nd.true_pos)
        extra = " kernel" if nd.is_kernel else ""
        r = 6 if nd.is_kernel else 4.5
        stroke = "black" if nd.is_kernel else "white"
        out.append(
            f'<circle class="node {cls}{extra}" cx="{x:.2f}" cy="{y:.2f}" r="{r}" '
            f'fill="{COLORS[cls]}" stroke="{stroke}" stroke-width="1">'
            f"<title>{escape(f'node {nd.id}: {cls}')}</title></circle>"
        )

    ly = full + 20
    legend = [("tnc", "localized (TNC)"), ("shadow", "localized via shadow edge"), ("unlocalized", "not localized")]
    for k, (cls, label) in enumerate(legend):
        lx = MARGIN + k * 200
        out.append(f'<circle class="legend" cx="{lx + 6}" cy="{ly}" r="5" fill="{COLORS[cls]}"/>')
        out.append(f'<text class="legend" x="{lx + 16}" y="{ly + 4}" font-size="12" font-family="sans-serif">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
