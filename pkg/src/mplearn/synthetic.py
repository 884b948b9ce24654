"""Synthetic generating models: fixed benchmark components, clique-factor
models with exact per-component joints, directed models, and sampling.

Component graphs are disjoint unions of fixed 16-node building blocks, so a
joint distribution never has to be normalized over more than one block at a
time: each connected component's joint is materialized exactly (up to a state
cap), normalized, and sampled by inverse CDF.  Randomness uses the PCG64
generator; a model- or data-level seed is split into one child stream per
connected component (in ascending order of smallest node), which makes the
output independent of any parallel fan-out over components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from .dataset import Dataset
from .graph import UGraph, canonical_edge

COMPONENT_KINDS = ("grid", "hub", "loop", "clique")

# Largest exact joint materialized per connected component.
MAX_COMPONENT_STATES = 2**20


def gen_component(kind: str) -> UGraph:
    """One of the fixed 16-node benchmark blocks.

    grid: 4x4 lattice (24 edges, max blanket 4, not chordal).
    hub: a center adjacent to 8 spokes with 7 leaves on distinct spokes
         (a 15-edge tree, max blanket 8).
    loop: a 16-cycle plus chords {0,4}, {0,8}, {2,12} (19 edges, max
          blanket 4, not chordal).
    clique: two disjoint 5-cliques plus 6 isolated nodes (20 edges, max
            blanket 4, chordal).
    """
    kind = kind.lower()
    edges: list[tuple[int, int]] = []
    if kind == "grid":
        for r in range(4):
            for c in range(4):
                v = 4 * r + c
                if c < 3:
                    edges.append((v, v + 1))
                if r < 3:
                    edges.append((v, v + 4))
    elif kind == "hub":
        for spoke in range(1, 9):
            edges.append((0, spoke))
        for t, leaf in enumerate(range(9, 16)):
            edges.append((t + 1, leaf))
    elif kind == "loop":
        for v in range(16):
            edges.append(canonical_edge(v, (v + 1) % 16))
        edges += [(0, 4), (0, 8), (2, 12)]
    elif kind == "clique":
        for block in (range(0, 5), range(5, 10)):
            nodes = list(block)
            for a in range(len(nodes)):
                for b in range(a + 1, len(nodes)):
                    edges.append((nodes[a], nodes[b]))
    else:
        raise ValueError(f"unknown component kind {kind!r}")
    return UGraph(16, edges)


def replicate(kinds: Sequence[str], replicas: int) -> UGraph:
    """Disjoint union of component blocks.

    Blocks are laid out replica by replica, each replica containing the kinds
    in the given order, so node block t covers nodes 16*t .. 16*t + 15.
    """
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    if not kinds:
        raise ValueError("at least one component kind required")
    edges = []
    offset = 0
    for _ in range(replicas):
        for kind in kinds:
            block = gen_component(kind)
            edges.extend((i + offset, j + offset) for i, j in block.edges)
            offset += 16
    return UGraph(offset, edges)


def connected_components(g: UGraph) -> list[tuple[int, ...]]:
    """Connected components as sorted node tuples, ordered by smallest node."""
    seen = [False] * g.d
    comps = []
    for start in range(g.d):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        nodes = []
        while stack:
            v = stack.pop()
            nodes.append(v)
            for u in g.neighbors(v):
                if not seen[u]:
                    seen[u] = True
                    stack.append(u)
        comps.append(tuple(sorted(nodes)))
    return comps


def maximal_cliques(g: UGraph) -> list[tuple[int, ...]]:
    """All maximal cliques (isolated nodes yield singletons), sorted."""
    adj = [set(g.neighbors(v)) for v in range(g.d)]
    out: list[tuple[int, ...]] = []

    def expand(r: set, p: set, x: set) -> None:
        if not p and not x:
            out.append(tuple(sorted(r)))
            return
        pivot = max(sorted(p | x), key=lambda v: len(adj[v] & p))
        for v in sorted(p - adj[pivot]):
            expand(r | {v}, p & adj[v], x & adj[v])
            p = p - {v}
            x = x | {v}

    expand(set(), set(range(g.d)), set())
    return sorted(out)


@dataclass(frozen=True)
class Component:
    nodes: tuple[int, ...]
    joint: np.ndarray  # normalized, one axis per node in `nodes` order
    z: float  # normalizing constant of the raw factor product


class FactorModel:
    """A graph with positive per-maximal-clique factor tables.

    Factor tables are indexed by the clique's nodes in ascending order (C
    order).  Each connected component's exact joint and normalizing constant
    are materialized at construction.
    """

    def __init__(self, graph: UGraph, cards: Sequence[int], factors: dict):
        cards = tuple(int(c) for c in cards)
        if len(cards) != graph.d:
            raise ValueError("cards length must match node count")
        cliques = maximal_cliques(graph)
        if sorted(factors.keys()) != cliques:
            raise ValueError("factors must cover exactly the maximal cliques")
        tables = {}
        for clique in cliques:
            shape = tuple(cards[v] for v in clique)
            table = np.asarray(factors[clique], dtype=float).reshape(shape)
            if not (table > 0).all():
                raise ValueError(f"factor for clique {clique} has non-positive entries")
            tables[clique] = table
        self.graph = graph
        self.cards = cards
        self.factors = tables
        self.components = self._build_components()

    def _build_components(self) -> list[Component]:
        comps = []
        for nodes in connected_components(self.graph):
            states = 1
            for v in nodes:
                states *= self.cards[v]
            if states > MAX_COMPONENT_STATES:
                raise ValueError(
                    f"component {nodes[0]}.. has {states} states, "
                    f"exceeding the exact-joint cap of {MAX_COMPONENT_STATES}"
                )
            axis_of = {v: t for t, v in enumerate(nodes)}
            joint = np.ones(tuple(self.cards[v] for v in nodes))
            for clique, table in self.factors.items():
                if clique[0] not in axis_of:
                    continue
                shape = [1] * len(nodes)
                for v in clique:
                    shape[axis_of[v]] = self.cards[v]
                joint = joint * table.reshape(shape)
            z = float(joint.sum())
            comps.append(Component(nodes=nodes, joint=joint / z, z=z))
        return comps


def draw_factors(g: UGraph, cards: Sequence[int], seed: int) -> FactorModel:
    """Fill every maximal-clique factor with independent uniform (0, 1) draws.

    One child stream of the seed per connected component; within a component
    the cliques are filled in sorted clique order, each table in C order.
    """
    cards = tuple(int(c) for c in cards)
    comps = connected_components(g)
    cliques = maximal_cliques(g)
    streams = np.random.SeedSequence(seed).spawn(len(comps))
    factors = {}
    for nodes, stream in zip(comps, streams):
        rng = np.random.Generator(np.random.PCG64(stream))
        in_comp = set(nodes)
        for clique in cliques:
            if clique[0] not in in_comp:
                continue
            size = 1
            for v in clique:
                size *= cards[v]
            values = rng.random(size)
            while (values == 0.0).any():  # open interval; zero has measure zero
                redo = values == 0.0
                values[redo] = rng.random(int(redo.sum()))
            factors[clique] = values.reshape(tuple(cards[v] for v in clique))
    return FactorModel(g, cards, factors)


def sample(model: FactorModel, n: int, seed: int) -> Dataset:
    """Draw n joint observations by exact inverse-CDF sampling per component."""
    if n < 0:
        raise ValueError("n must be >= 0")
    values = np.zeros((n, model.graph.d), dtype=np.int64)
    streams = np.random.SeedSequence(seed).spawn(len(model.components))
    for comp, stream in zip(model.components, streams):
        rng = np.random.Generator(np.random.PCG64(stream))
        flat = comp.joint.reshape(-1)
        cdf = np.cumsum(flat)
        cdf[-1] = 1.0
        u = rng.random(n)
        idx = np.searchsorted(cdf, u, side="right")
        coords = np.unravel_index(idx, comp.joint.shape)
        for t, v in enumerate(comp.nodes):
            values[:, v] = coords[t]
    return Dataset(values, model.cards)


class DagModel:
    """A directed acyclic model with per-node conditional probability tables.

    cpts[j] has one row per configuration of node j's parents (sorted
    ascending, first parent most significant) and cards[j] columns; every row
    sums to one.
    """

    def __init__(self, cards: Sequence[int], parents: Sequence[Iterable[int]], cpts):
        self.cards = tuple(int(c) for c in cards)
        self.d = len(self.cards)
        self.parents = tuple(tuple(sorted(int(v) for v in ps)) for ps in parents)
        if len(self.parents) != self.d:
            raise ValueError("parents length must match cards length")
        for j, ps in enumerate(self.parents):
            for v in ps:
                if not 0 <= v < self.d or v == j:
                    raise ValueError(f"node {j}: invalid parent {v}")
        self.order = _topological_order(self.parents)
        self.cpts = []
        for j in range(self.d):
            q = 1
            for v in self.parents[j]:
                q *= self.cards[v]
            table = np.asarray(cpts[j], dtype=float).reshape(q, self.cards[j])
            sums = table.sum(axis=1)
            if not np.allclose(sums, 1.0, atol=1e-9):
                raise ValueError(f"node {j}: conditional table rows must sum to 1")
            if (table < 0).any():
                raise ValueError(f"node {j}: negative probabilities")
            self.cpts.append(table)


def _topological_order(parents: Sequence[tuple[int, ...]]) -> tuple[int, ...]:
    d = len(parents)
    remaining = dict(enumerate(len(ps) for ps in parents))
    children: list[list[int]] = [[] for _ in range(d)]
    for j, ps in enumerate(parents):
        for v in ps:
            children[v].append(j)
    ready = sorted(j for j, c in remaining.items() if c == 0)
    order = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        del remaining[v]
        for c in children[v]:
            if c in remaining:
                new = remaining[c] - 1
                remaining[c] = new
                if new == 0:
                    ready.append(c)
        ready.sort()
    if remaining:
        raise ValueError("cycle detected in parent sets")
    return tuple(order)


def moralize(dag) -> UGraph:
    """Undirected counterpart of a directed model: marry all co-parents of a
    common child, then drop directions.

    Accepts a DagModel or a plain sequence of per-node parent collections.
    """
    parents = dag.parents if isinstance(dag, DagModel) else tuple(
        tuple(sorted(int(v) for v in ps)) for ps in dag
    )
    _topological_order(parents)
    d = len(parents)
    edges = set()
    for child, ps in enumerate(parents):
        for p in ps:
            edges.add(canonical_edge(p, child))
        for a in range(len(ps)):
            for b in range(a + 1, len(ps)):
                edges.add(canonical_edge(ps[a], ps[b]))
    return UGraph(d, edges)


def sample_dag(model: DagModel, n: int, seed: int) -> Dataset:
    """Draw n observations in ancestral order from a directed model."""
    if n < 0:
        raise ValueError("n must be >= 0")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    values = np.zeros((n, model.d), dtype=np.int64)
    for j in model.order:
        ps = model.parents[j]
        if ps:
            idx = np.zeros(n, dtype=np.int64)
            for v in ps:
                idx = idx * model.cards[v] + values[:, v]
        else:
            idx = np.zeros(n, dtype=np.int64)
        rows = model.cpts[j][idx]  # (n, r_j)
        cdf = np.cumsum(rows, axis=1)
        cdf[:, -1] = 1.0
        u = rng.random(n)
        values[:, j] = (u[:, None] >= cdf).sum(axis=1)
    return Dataset(values, model.cards)


def write_model(model: FactorModel, sink: IO[str]) -> None:
    """Structured plain-text factor model (NODES/CARDS/EDGES/FACTOR blocks)."""
    sink.write(f"NODES {model.graph.d}\n")
    sink.write("CARDS " + " ".join(str(c) for c in model.cards) + "\n")
    sink.write("EDGES\n")
    for i, j in model.graph.sorted_edges():
        sink.write(f"{i} {j}\n")
    for clique in sorted(model.factors):
        sink.write("FACTOR " + " ".join(str(v) for v in clique) + "\n")
        for value in model.factors[clique].reshape(-1):
            sink.write(f"{float(value)!r}\n")


def read_model(source: IO[str] | Iterable[str]) -> FactorModel:
    lines = _content_lines(source)
    pos = 0

    def expect(keyword: str) -> list[str]:
        nonlocal pos
        if pos >= len(lines) or not lines[pos][1].startswith(keyword):
            lineno = lines[pos][0] if pos < len(lines) else "eof"
            raise ValueError(f"line {lineno}: expected {keyword} block")
        parts = lines[pos][1].split()
        pos += 1
        return parts

    d = int(expect("NODES")[1])
    cards = [int(c) for c in expect("CARDS")[1:]]
    if len(cards) != d:
        raise ValueError(f"CARDS lists {len(cards)} values for {d} nodes")
    expect("EDGES")
    edges = []
    while pos < len(lines) and not lines[pos][1].startswith("FACTOR"):
        i, j = lines[pos][1].split()
        edges.append((int(i), int(j)))
        pos += 1
    graph = UGraph(d, edges)
    factors = {}
    while pos < len(lines):
        parts = expect("FACTOR")
        clique = tuple(int(v) for v in parts[1:])
        size = 1
        for v in clique:
            size *= cards[v]
        values = []
        for _ in range(size):
            if pos >= len(lines):
                raise ValueError(f"factor {clique}: expected {size} values")
            values.append(float(lines[pos][1]))
            pos += 1
        factors[clique] = np.asarray(values)
    return FactorModel(graph, cards, factors)


def write_dag(model: DagModel, sink: IO[str]) -> None:
    """Structured plain-text directed model (NODES/CARDS/PARENTS/CPT blocks)."""
    sink.write(f"NODES {model.d}\n")
    sink.write("CARDS " + " ".join(str(c) for c in model.cards) + "\n")
    sink.write("PARENTS\n")
    for j in range(model.d):
        sink.write(" ".join(str(v) for v in (j, *model.parents[j])) + "\n")
    for j in range(model.d):
        sink.write(f"CPT {j}\n")
        for row in model.cpts[j]:
            sink.write(" ".join(f"{float(p)!r}" for p in row) + "\n")


def read_dag(source: IO[str] | Iterable[str], require_cpts: bool = True):
    """Read a directed model file.

    With `require_cpts=False`, files without CPT blocks load too and the
    result is a bare (cards, parents) pair suitable for moralization only.
    """
    lines = _content_lines(source)
    pos = 0
    if pos >= len(lines) or not lines[pos][1].startswith("NODES"):
        raise ValueError("expected NODES header")
    d = int(lines[pos][1].split()[1])
    pos += 1
    if pos >= len(lines) or not lines[pos][1].startswith("CARDS"):
        raise ValueError("expected CARDS line")
    cards = [int(c) for c in lines[pos][1].split()[1:]]
    pos += 1
    if len(cards) != d:
        raise ValueError(f"CARDS lists {len(cards)} values for {d} nodes")
    if pos >= len(lines) or lines[pos][1] != "PARENTS":
        raise ValueError("expected PARENTS block")
    pos += 1
    parents: list[tuple[int, ...]] = [()] * d
    while pos < len(lines) and not lines[pos][1].startswith("CPT"):
        parts = [int(v) for v in lines[pos][1].split()]
        parents[parts[0]] = tuple(parts[1:])
        pos += 1
    cpts: dict[int, list[list[float]]] = {}
    while pos < len(lines):
        parts = lines[pos][1].split()
        if parts[0] != "CPT":
            raise ValueError(f"line {lines[pos][0]}: expected CPT block")
        j = int(parts[1])
        pos += 1
        q = 1
        for v in parents[j]:
            q *= cards[v]
        rows = []
        for _ in range(q):
            if pos >= len(lines):
                raise ValueError(f"CPT {j}: expected {q} rows")
            rows.append([float(x) for x in lines[pos][1].split()])
            pos += 1
        cpts[j] = rows
    if len(cpts) == d:
        return DagModel(cards, parents, [cpts[j] for j in range(d)])
    if require_cpts:
        raise ValueError("file is missing CPT blocks")
    return tuple(cards), tuple(parents)


def _content_lines(source) -> list[tuple[int, str]]:
    out = []
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            out.append((lineno, line))
    return out
