"""Chordal graphs: maximum cardinality search, perfect-elimination
orientation, and the marginal likelihood of the oriented model.

A chordal undirected graph can be oriented into an acyclic directed graph
whose score-equivalent marginal likelihood has the same closed form as the
local blanket scores, with parent sets in the conditioning role.  All such
orientations score identically, so the orientation choice is immaterial.
"""

from __future__ import annotations

from typing import Sequence

from .dataset import Dataset
from .graph import UGraph
from .scores import ScoreParams, mpl_local
from .synthetic import _topological_order


def mcs_order(g: UGraph) -> tuple[list[int], bool]:
    """Maximum cardinality search visit order and a chordality flag.

    At each step the unvisited node with the most visited neighbors is
    visited (ties to the lowest index).  The graph is chordal exactly when,
    for every node, its visited-earlier neighbors form a clique, which is the
    standard check that the reversed visit order eliminates perfectly.
    """
    weights = [0] * g.d
    visited = [False] * g.d
    order: list[int] = []
    for _ in range(g.d):
        v = max(
            (j for j in range(g.d) if not visited[j]),
            key=lambda j: (weights[j], -j),
        )
        visited[v] = True
        order.append(v)
        for u in g.neighbors(v):
            if not visited[u]:
                weights[u] += 1
    position = {v: t for t, v in enumerate(order)}
    chordal = True
    for v in order:
        earlier = [u for u in g.neighbors(v) if position[u] < position[v]]
        for a in range(len(earlier)):
            for b in range(a + 1, len(earlier)):
                if not g.has_edge(earlier[a], earlier[b]):
                    chordal = False
                    break
            if not chordal:
                break
        if not chordal:
            break
    return order, chordal


def is_chordal(g: UGraph) -> bool:
    return mcs_order(g)[1]


def orient(g: UGraph, order: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    """Orient each edge from earlier to later in `order`; returns parent sets.

    Requires a chordal graph with an order produced by mcs_order, so the
    result is acyclic and each node's parents are mutually adjacent (the
    moral graph of the result is the input graph).
    """
    if sorted(order) != list(range(g.d)):
        raise ValueError("order must be a permutation of the nodes")
    if not is_chordal(g):
        raise ValueError("graph is not chordal")
    position = {v: t for t, v in enumerate(order)}
    parents: list[list[int]] = [[] for _ in range(g.d)]
    for i, j in g.sorted_edges():
        if position[i] < position[j]:
            parents[j].append(i)
        else:
            parents[i].append(j)
    return tuple(tuple(sorted(ps)) for ps in parents)


def bdeu_score(data: Dataset, parents: Sequence[Sequence[int]], ess: float) -> float:
    """Marginal likelihood of a directed model under the matching prior rule.

    Identical term structure to the local blanket score with parent sets as
    the conditioning sets; the prior strength `ess` spreads over the parent
    configuration space exactly as it does over blanket configurations, so
    for an empty parent collection this coincides with the sum of local
    scores under empty blankets.
    """
    parent_sets = tuple(tuple(sorted(int(v) for v in ps)) for ps in parents)
    _topological_order(parent_sets)  # rejects cyclic parent structures
    params = ScoreParams(ess=ess)
    return sum(
        mpl_local(data, j, ps, params) for j, ps in enumerate(parent_sets)
    )
