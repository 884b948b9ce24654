"""Undirected graphs, blanket families, neighborhood moves, and edge metrics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable

Edge = tuple[int, int]


def canonical_edge(i: int, j: int) -> Edge:
    if i == j:
        raise ValueError(f"self-loop on node {i}")
    return (i, j) if i < j else (j, i)


class UGraph:
    """Undirected graph over nodes 0..d-1 stored as a canonical edge set.

    Edges are (min, max) pairs; iteration orders are lexicographic so every
    search and output is reproducible.  Instances are immutable; edits return
    new graphs.
    """

    __slots__ = ("d", "edges", "_adj")

    def __init__(self, d: int, edges: Iterable[Edge] = ()):
        if d < 1:
            raise ValueError("graph needs at least one node")
        es = set()
        for i, j in edges:
            e = canonical_edge(int(i), int(j))
            if not 0 <= e[0] < d or not e[1] < d:
                raise ValueError(f"edge {e} out of range for {d} nodes")
            es.add(e)
        adj: list[list[int]] = [[] for _ in range(d)]
        for i, j in sorted(es):
            adj[i].append(j)
            adj[j].append(i)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "edges", frozenset(es))
        object.__setattr__(self, "_adj", tuple(tuple(sorted(a)) for a in adj))

    def __setattr__(self, name, value):
        raise AttributeError("UGraph is immutable")

    def neighbors(self, j: int) -> tuple[int, ...]:
        """The Markov blanket of node j."""
        return self._adj[j]

    def degree(self, j: int) -> int:
        return len(self._adj[j])

    def has_edge(self, i: int, j: int) -> bool:
        return canonical_edge(i, j) in self.edges

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def with_edge(self, i: int, j: int) -> "UGraph":
        return UGraph(self.d, self.edges | {canonical_edge(i, j)})

    def without_edge(self, i: int, j: int) -> "UGraph":
        return UGraph(self.d, self.edges - {canonical_edge(i, j)})

    def toggled(self, edge: Edge) -> "UGraph":
        e = canonical_edge(*edge)
        return self.without_edge(*e) if e in self.edges else self.with_edge(*e)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, UGraph) and self.d == other.d and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.d, self.edges))

    def __repr__(self) -> str:
        return f"UGraph(d={self.d}, edges={sorted(self.edges)})"


class BlanketFamily:
    """Per-node neighbor sets that need not be mutually consistent.

    The per-node relaxation of the structure learning problem legitimately
    produces families where i lists j but not vice versa, so this is a
    distinct type from UGraph.
    """

    __slots__ = ("d", "blankets")

    def __init__(self, blankets: Iterable[Iterable[int]]):
        bl = tuple(frozenset(int(v) for v in b) for b in blankets)
        d = len(bl)
        if d < 1:
            raise ValueError("family needs at least one node")
        for j, b in enumerate(bl):
            if j in b:
                raise ValueError(f"node {j} lists itself in its own blanket")
            for v in b:
                if not 0 <= v < d:
                    raise ValueError(f"blanket member {v} out of range for {d} nodes")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "blankets", bl)

    def __setattr__(self, name, value):
        raise AttributeError("BlanketFamily is immutable")

    def __getitem__(self, j: int) -> frozenset:
        return self.blankets[j]

    def __eq__(self, other) -> bool:
        return isinstance(other, BlanketFamily) and self.blankets == other.blankets

    def __hash__(self) -> int:
        return hash(self.blankets)

    def __repr__(self) -> str:
        return f"BlanketFamily({[sorted(b) for b in self.blankets]})"


def combine(family: BlanketFamily, mode: str) -> UGraph:
    """Resolve an inconsistent family into a graph.

    mode 'and': keep {i,j} only when each lists the other; mode 'or': keep it
    when either does.
    """
    mode = mode.lower()
    if mode not in ("and", "or"):
        raise ValueError(f"mode must be 'and' or 'or', got {mode!r}")
    edges = set()
    for j in range(family.d):
        for i in family.blankets[j]:
            if mode == "or" or j in family.blankets[i]:
                edges.add(canonical_edge(i, j))
    return UGraph(family.d, edges)


def is_symmetric(family: BlanketFamily) -> bool:
    return all(
        j in family.blankets[i]
        for j in range(family.d)
        for i in family.blankets[j]
    )


def restricted_neighbors(g: UGraph, space: UGraph) -> list[tuple[Edge, str]]:
    """Single-edge moves from g inside `space`, in lexicographic edge order."""
    if g.d != space.d:
        raise ValueError("graph and space have different node counts")
    if not g.edges <= space.edges:
        raise ValueError("graph has edges outside the restricted space")
    return [
        (e, "remove" if e in g.edges else "add") for e in sorted(space.edges)
    ]


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def hamming(self) -> int:
        return self.fp + self.fn


def confusion(learned: UGraph, truth: UGraph) -> ConfusionCounts:
    """Edge-set confusion counts of a learned graph against the truth."""
    if learned.d != truth.d:
        raise ValueError("graphs have different node counts")
    tp = len(learned.edges & truth.edges)
    fp = len(learned.edges - truth.edges)
    fn = len(truth.edges - learned.edges)
    total = learned.d * (learned.d - 1) // 2
    return ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=total - tp - fp - fn)


def write_graph(g: UGraph, sink: IO[str]) -> None:
    sink.write(f"d {g.d}\n")
    for i, j in g.sorted_edges():
        sink.write(f"{i} {j}\n")


def read_graph(source: IO[str] | Iterable[str]) -> UGraph:
    """Read the `d <count>` + one-edge-per-line format ('#' comments allowed)."""
    d = None
    edges = []
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if d is None:
            if len(parts) != 2 or parts[0] != "d":
                raise ValueError(f"line {lineno}: expected 'd <count>' header")
            d = int(parts[1])
            continue
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'i j' edge line")
        edges.append((int(parts[0]), int(parts[1])))
    if d is None:
        raise ValueError("missing 'd <count>' header line")
    return UGraph(d, edges)
