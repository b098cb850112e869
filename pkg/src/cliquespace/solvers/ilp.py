"""LP-format export of the maximum-clique integer program.

One binary variable per vertex, objective maximizing their sum, and one
``x_i + x_j <= 1`` constraint per non-edge.  Non-edges are emitted in
ascending (i, j) order so the output is byte-stable for a given graph.
"""

from __future__ import annotations

from ..graph import Graph

_TERMS_PER_LINE = 12


def export_ilp(g: Graph) -> str:
    """Serialize the clique ILP of ``g`` in LP format."""
    names = [f"x{v}" for v in range(g.node_count)]
    lines = [f"\\ maximum clique integer program: {g.node_count} nodes, {g.edge_count} edges"]
    if g.name:
        lines[0] += f" ({g.name})"
    lines.append("Maximize")
    for i in range(0, len(names), _TERMS_PER_LINE):
        chunk = " + ".join(names[i : i + _TERMS_PER_LINE])
        lines.append(f" obj: {chunk}" if i == 0 else f"      + {chunk}")
    lines.append("Subject To")
    idx = 0
    for u in range(g.node_count):
        for v in range(u + 1, g.node_count):
            if not g.has_edge(u, v):
                lines.append(f" c{idx}: x{u} + x{v} <= 1")
                idx += 1
    lines.append("Binary")
    for i in range(0, len(names), _TERMS_PER_LINE):
        lines.append(" " + " ".join(names[i : i + _TERMS_PER_LINE]))
    lines.append("End")
    return "\n".join(lines) + "\n"
