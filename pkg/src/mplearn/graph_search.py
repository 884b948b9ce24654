"""Greedy graph hill climbing over a restricted edge space, plus a brute-force
reference optimizer for tiny spaces.

The hill climb starts from the empty graph and repeatedly applies the best
strictly improving single-edge toggle among the edges of the restricted
space.  A toggle's gain is the sum of the two endpoint local-score changes
(the log score ratio of the neighboring graphs), so after accepting a toggle
on {k, l} only the gains of edges sharing a node with {k, l} can change; all
other cached gains stay valid and are not re-evaluated.
"""

from __future__ import annotations

from .dataset import Dataset
from .graph import UGraph, canonical_edge
from .scores import LocalScoreCache, ScoreParams, mpl_global, node_score

Move = tuple[tuple[int, int], str]


def hill_climb(
    data: Dataset,
    space: UGraph,
    params: ScoreParams,
    *,
    start: UGraph | None = None,
    incremental: bool = True,
    cache: LocalScoreCache | None = None,
) -> tuple[UGraph, float, list[Move]]:
    """Maximize the graph score over subgraphs of `space` by edge toggles.

    Tie rule among improving toggles: largest gain, then additions before
    removals, then the lexicographically smallest edge.  `incremental=False`
    re-evaluates every candidate gain each iteration; the result and the move
    trace are identical either way.  `start` (a subgraph of `space`) replaces
    the empty initial graph when given.

    Returns the final graph, its score recomputed from scratch, and the list
    of accepted (edge, 'add' | 'remove') moves in order.
    """
    if space.d != data.d:
        raise ValueError("space and dataset have different variable counts")
    if cache is None:
        cache = LocalScoreCache()
    edges = space.sorted_edges()
    if start is None:
        adj = [set() for _ in range(data.d)]
    else:
        if not start.edges <= space.edges:
            raise ValueError("start graph has edges outside the space")
        adj = [set(start.neighbors(j)) for j in range(start.d)]
    current_edges = set() if start is None else set(start.edges)
    local = [node_score(data, j, adj[j], params, cache) for j in range(data.d)]

    def gain(edge) -> float:
        i, j = edge
        if edge in current_edges:
            new_i, new_j = adj[i] - {j}, adj[j] - {i}
        else:
            new_i, new_j = adj[i] | {j}, adj[j] | {i}
        return (
            node_score(data, i, new_i, params, cache)
            + node_score(data, j, new_j, params, cache)
            - local[i]
            - local[j]
        )

    gains = {e: gain(e) for e in edges}
    trace: list[Move] = []
    while True:
        best_edge = None
        best_gain = 0.0
        best_op = None
        for e in edges:
            g = gains[e]
            if g <= 0.0:
                continue
            op = "remove" if e in current_edges else "add"
            if (
                best_edge is None
                or g > best_gain
                or (g == best_gain and op == "add" and best_op == "remove")
            ):
                best_edge, best_gain, best_op = e, g, op
        if best_edge is None:
            break
        k, l = best_edge
        if best_op == "remove":
            current_edges.discard(best_edge)
            adj[k].discard(l)
            adj[l].discard(k)
        else:
            current_edges.add(best_edge)
            adj[k].add(l)
            adj[l].add(k)
        local[k] = node_score(data, k, adj[k], params, cache)
        local[l] = node_score(data, l, adj[l], params, cache)
        trace.append((best_edge, best_op))
        for e in edges:
            if not incremental or k in e or l in e:
                gains[e] = gain(e)
    result = UGraph(data.d, current_edges)
    return result, mpl_global(data, result, params, cache), trace


def brute_force_optimum(
    data: Dataset, space: UGraph, params: ScoreParams
) -> tuple[UGraph, float]:
    """Exhaustive score maximum over all subgraphs of `space`.

    Ties resolve to the lexicographically smallest edge set.  Refuses spaces
    with more than 25 edges (2^25 subgraphs is the practical ceiling for a
    reference oracle).
    """
    edges = space.sorted_edges()
    if len(edges) > 25:
        raise ValueError(f"space has {len(edges)} edges; brute force handles at most 25")
    cache = LocalScoreCache()
    best_edges: tuple = ()
    best_score = -float("inf")
    for mask in range(1 << len(edges)):
        subset = tuple(e for t, e in enumerate(edges) if mask >> t & 1)
        g = UGraph(space.d, subset)
        s = mpl_global(data, g, params, cache)
        if s > best_score or (s == best_score and subset < best_edges):
            best_score = s
            best_edges = subset
    return UGraph(space.d, best_edges), best_score
