"""Instance-space analysis toolkit for the maximum clique problem."""

from .graph import Graph, GraphFormat, IngestReport, generate, parse_graph, parse_path

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "GraphFormat",
    "IngestReport",
    "generate",
    "parse_graph",
    "parse_path",
    "__version__",
]
