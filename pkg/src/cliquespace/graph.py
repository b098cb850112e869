"""Graph representation, file ingestion, and synthetic generators.

The :class:`Graph` type is the universe every other module computes on:
an immutable, undirected, simple graph with dense 0-based node ids.
Parsers canonicalize real-world benchmark files (DIMACS ``.clq``,
whitespace edge lists, Matrix Market symmetric patterns), dropping
self-loops and duplicate edges with warnings instead of failing, because
published benchmark files do contain them.
"""

from __future__ import annotations

import random
import re
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import GraphFormatError

__all__ = [
    "Graph",
    "GraphFormat",
    "IngestReport",
    "parse_graph",
    "parse_path",
    "detect_format",
    "serialize",
    "generate",
    "validate_connected",
]


class GraphFormat(Enum):
    DIMACS_CLQ = "dimacs"
    EDGE_LIST = "edgelist"
    MATRIX_MARKET = "matrixmarket"


_EXTENSION_FORMATS = {
    ".clq": GraphFormat.DIMACS_CLQ,
    ".dimacs": GraphFormat.DIMACS_CLQ,
    ".col": GraphFormat.DIMACS_CLQ,
    ".mtx": GraphFormat.MATRIX_MARKET,
    ".mm": GraphFormat.MATRIX_MARKET,
}


class Graph:
    """Immutable undirected simple graph.

    Node ids are dense in ``[0, node_count)``.  Every edge is stored once
    in canonical ``u < v`` order.  Adjacency is exposed three ways, all
    built at construction time so instances are safe to share across
    threads: sorted neighbor tuples, neighbor bitmasks (one int per
    node), and the canonical edge set.
    """

    __slots__ = ("node_count", "name", "edges", "adjacency", "adj_bits", "degrees")

    def __init__(self, node_count: int, edges, name: str = "") -> None:
        if node_count < 1:
            raise GraphFormatError("a graph needs at least one node")
        canonical: set[tuple[int, int]] = set()
        bits = [0] * node_count
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise ValueError(f"edge ({u}, {v}) outside [0, {node_count})")
            if u > v:
                u, v = v, u
            if (u, v) in canonical:
                raise ValueError(f"duplicate edge ({u}, {v})")
            canonical.add((u, v))
            bits[u] |= 1 << v
            bits[v] |= 1 << u
        self.node_count = node_count
        self.name = name
        self.edges = frozenset(canonical)
        self.adj_bits = tuple(bits)
        adjacency = []
        for u in range(node_count):
            mask = bits[u]
            nbrs = []
            while mask:
                lsb = mask & -mask
                nbrs.append(lsb.bit_length() - 1)
                mask ^= lsb
            adjacency.append(tuple(nbrs))
        self.adjacency = tuple(adjacency)
        self.degrees = tuple(len(a) for a in self.adjacency)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return self.degrees[v]

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.adj_bits[u] >> v) & 1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.node_count == other.node_count and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.node_count, self.edges))

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"<Graph{label} n={self.node_count} m={self.edge_count}>"


@dataclass(frozen=True)
class IngestReport:
    """Outcome of parsing one graph file.

    ``connected`` is the result of a full traversal from node 0;
    disconnected graphs parse fine but distance-based features refuse
    them later, mirroring the benchmark-exclusion policy.
    """

    graph: Graph
    format: GraphFormat
    warnings: tuple[str, ...] = field(default=())
    connected: bool = True


def validate_connected(g: Graph) -> bool:
    """True iff a breadth-first traversal from node 0 reaches every node."""
    seen = bytearray(g.node_count)
    seen[0] = 1
    queue = deque([0])
    count = 1
    while queue:
        u = queue.popleft()
        for v in g.adjacency[u]:
            if not seen[v]:
                seen[v] = 1
                count += 1
                queue.append(v)
    return count == g.node_count


def _canonicalize(
    node_count: int, raw_edges: list[tuple[int, int]], warnings: list[str]
) -> set[tuple[int, int]]:
    edges: set[tuple[int, int]] = set()
    loops = dupes = 0
    for u, v in raw_edges:
        if u == v:
            loops += 1
            continue
        if u > v:
            u, v = v, u
        if (u, v) in edges:
            dupes += 1
            continue
        edges.add((u, v))
    if loops:
        warnings.append(f"dropped {loops} self-loop(s)")
    if dupes:
        warnings.append(f"dropped {dupes} duplicate edge(s)")
    return edges


def _parse_dimacs(text: str, warnings: list[str]) -> tuple[int, list[tuple[int, int]]]:
    node_count = None
    declared_edges = None
    raw: list[tuple[int, int]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        fields = line.split()
        if fields[0] == "p":
            if node_count is not None:
                raise GraphFormatError(f"line {lineno}: repeated problem line")
            if len(fields) < 4 or fields[1] not in ("edge", "col"):
                raise GraphFormatError(f"line {lineno}: malformed problem line {line!r}")
            try:
                node_count = int(fields[2])
                declared_edges = int(fields[3])
            except ValueError:
                raise GraphFormatError(f"line {lineno}: non-integer counts in {line!r}") from None
            if node_count < 1:
                raise GraphFormatError(f"line {lineno}: graph declares {node_count} nodes")
        elif fields[0] == "e":
            if node_count is None:
                raise GraphFormatError(f"line {lineno}: edge before problem line")
            if len(fields) < 3:
                raise GraphFormatError(f"line {lineno}: malformed edge line {line!r}")
            try:
                u, v = int(fields[1]), int(fields[2])
            except ValueError:
                raise GraphFormatError(f"line {lineno}: non-integer endpoint in {line!r}") from None
            if not (1 <= u <= node_count and 1 <= v <= node_count):
                raise GraphFormatError(
                    f"line {lineno}: edge ({u}, {v}) references a node outside 1..{node_count}"
                )
            raw.append((u - 1, v - 1))
        # other directives (n, d, x, ...) are ignored
    if node_count is None:
        raise GraphFormatError("missing DIMACS problem line")
    if declared_edges is not None and declared_edges != len(raw):
        warnings.append(f"header declares {declared_edges} edges, file has {len(raw)}")
    return node_count, raw


def _parse_edge_list(text: str) -> tuple[int, list[tuple[int, int]]]:
    raw: list[tuple[int, int]] = []
    max_id = -1
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) < 2:
            raise GraphFormatError(f"line {lineno}: expected 'u v', got {line!r}")
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer endpoint in {line!r}") from None
        if u < 0 or v < 0:
            raise GraphFormatError(f"line {lineno}: negative node id in {line!r}")
        raw.append((u, v))
        max_id = max(max_id, u, v)
    if max_id < 0:
        raise GraphFormatError("edge list contains no edges; empty graph")
    return max_id + 1, raw


_MM_HEADER = re.compile(r"^%%MatrixMarket\s+matrix\s+coordinate\s+(\w+)\s+(\w+)\s*$", re.I)


def _parse_matrix_market(text: str, warnings: list[str]) -> tuple[int, list[tuple[int, int]]]:
    lines = iter(enumerate(text.splitlines(), start=1))
    try:
        _, header = next(lines)
    except StopIteration:
        raise GraphFormatError("empty Matrix Market file") from None
    m = _MM_HEADER.match(header.strip())
    if not m:
        raise GraphFormatError(f"malformed Matrix Market header {header!r}")
    value_field, symmetry = m.group(1).lower(), m.group(2).lower()
    if symmetry != "symmetric":
        raise GraphFormatError(f"only symmetric matrices describe undirected graphs, got {symmetry!r}")
    if value_field not in ("pattern", "integer", "real"):
        raise GraphFormatError(f"unsupported Matrix Market field {value_field!r}")
    if value_field != "pattern":
        warnings.append(f"ignoring {value_field} values; graph treated as unweighted pattern")

    size_line = None
    for lineno, line in lines:
        line = line.strip()
        if not line or line.startswith("%"):
            continue
        size_line = (lineno, line)
        break
    if size_line is None:
        raise GraphFormatError("missing Matrix Market size line")
    lineno, line = size_line
    fields = line.split()
    if len(fields) != 3:
        raise GraphFormatError(f"line {lineno}: malformed size line {line!r}")
    try:
        rows, cols, nnz = (int(f) for f in fields)
    except ValueError:
        raise GraphFormatError(f"line {lineno}: non-integer size in {line!r}") from None
    if rows != cols:
        raise GraphFormatError(f"adjacency matrix must be square, got {rows}x{cols}")
    if rows < 1:
        raise GraphFormatError("empty graph: zero-dimensional matrix")

    raw: list[tuple[int, int]] = []
    entries = 0
    for lineno, line in lines:
        line = line.strip()
        if not line or line.startswith("%"):
            continue
        fields = line.split()
        if len(fields) < 2:
            raise GraphFormatError(f"line {lineno}: malformed entry {line!r}")
        try:
            i, j = int(fields[0]), int(fields[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer entry in {line!r}") from None
        if not (1 <= i <= rows and 1 <= j <= rows):
            raise GraphFormatError(f"line {lineno}: entry ({i}, {j}) outside 1..{rows}")
        entries += 1
        raw.append((i - 1, j - 1))
    if entries != nnz:
        warnings.append(f"size line declares {nnz} entries, file has {entries}")
    return rows, raw


def parse_graph(data: bytes | str, fmt: GraphFormat, name: str = "") -> IngestReport:
    """Parse one graph from ``data`` in the given format.

    Self-loops and duplicate edges are dropped and recorded as warnings.
    Raises :class:`GraphFormatError` for malformed headers, out-of-range
    node ids, or empty graphs.
    """
    text = data.decode("utf-8", errors="replace") if isinstance(data, bytes) else data
    warnings: list[str] = []
    if fmt is GraphFormat.DIMACS_CLQ:
        node_count, raw = _parse_dimacs(text, warnings)
    elif fmt is GraphFormat.EDGE_LIST:
        node_count, raw = _parse_edge_list(text)
    elif fmt is GraphFormat.MATRIX_MARKET:
        node_count, raw = _parse_matrix_market(text, warnings)
    else:
        raise GraphFormatError(f"unsupported format {fmt!r}")
    edges = _canonicalize(node_count, raw, warnings)
    graph = Graph(node_count, edges, name=name)
    return IngestReport(
        graph=graph,
        format=fmt,
        warnings=tuple(warnings),
        connected=validate_connected(graph),
    )


def detect_format(path: str | Path) -> GraphFormat:
    """Map a file extension to a format; anything unknown is an edge list."""
    return _EXTENSION_FORMATS.get(Path(path).suffix.lower(), GraphFormat.EDGE_LIST)


def parse_path(path: str | Path, fmt: GraphFormat | None = None) -> IngestReport:
    """Parse a graph file, detecting the format from the extension unless given."""
    path = Path(path)
    if fmt is None:
        fmt = detect_format(path)
    return parse_graph(path.read_bytes(), fmt, name=path.stem)


def serialize(g: Graph, fmt: GraphFormat) -> str:
    """Render a graph in any supported format with byte-stable edge order."""
    ordered = sorted(g.edges)
    if fmt is GraphFormat.DIMACS_CLQ:
        lines = [f"p edge {g.node_count} {g.edge_count}"]
        lines.extend(f"e {u + 1} {v + 1}" for u, v in ordered)
    elif fmt is GraphFormat.EDGE_LIST:
        lines = [f"{u} {v}" for u, v in ordered]
        if not lines:
            raise GraphFormatError("edge lists cannot represent edgeless graphs")
    elif fmt is GraphFormat.MATRIX_MARKET:
        lines = ["%%MatrixMarket matrix coordinate pattern symmetric"]
        lines.append(f"{g.node_count} {g.node_count} {g.edge_count}")
        # symmetric storage keeps the lower triangle: row > column
        lines.extend(f"{v + 1} {u + 1}" for u, v in ordered)
    else:
        raise GraphFormatError(f"unsupported format {fmt!r}")
    return "\n".join(lines) + "\n"


def generate(kind: str, n: int, p: float = 0.0, seed: int = 0, name: str = "") -> Graph:
    """Deterministic synthetic graphs for fixtures and tests.

    ``kind`` is one of ``complete``, ``cycle``, ``path``, ``star``, ``gnp``.
    For ``gnp``, node pairs are visited in lexicographic order and each is
    kept when ``random.Random(seed).random() < p``; the Mersenne Twister
    stream makes identical (n, p, seed) reproduce identical edge sets on
    every platform.  ``star`` places the hub at node 0 with ``n - 1`` leaves.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    edges: list[tuple[int, int]] = []
    if kind == "complete":
        edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    elif kind == "cycle":
        if n < 3:
            raise ValueError("a cycle needs at least 3 nodes")
        edges = [(i, (i + 1) % n) for i in range(n)]
    elif kind == "path":
        edges = [(i, i + 1) for i in range(n - 1)]
    elif kind == "star":
        edges = [(0, i) for i in range(1, n)]
    elif kind == "gnp":
        if not 0.0 <= p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        rng = random.Random(seed)
        edges = [
            (u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p
        ]
    else:
        raise ValueError(f"unknown graph kind {kind!r}")
    if not name:
        name = f"{kind}_{n}" if kind != "gnp" else f"gnp_{n}_{p:g}_s{seed}"
    return Graph(n, edges, name=name)
