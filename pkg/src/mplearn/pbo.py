"""Exact restricted-space optimization as pseudo-Boolean optimization.

The subgraph-selection problem over a candidate edge space is encoded with
one Boolean variable per candidate edge and, for every node, one Boolean
variable per subset of its candidate neighborhood.  A product constraint ties
each subset variable to the conjunction of its member edge variables and the
negations of the non-member ones, an exactly-one constraint per node requires
one subset to be selected, and the objective minimizes integer weights

    w(node, subset) = -floor(scale * local score of the subset)

so that, for a large integer scale, the optimal assignment decodes to the
score-optimal subgraph.  Problems can be solved internally by branch and
bound over the edge variables or exported in OPB format for external solvers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Iterable

from .dataset import Dataset
from .graph import UGraph
from .scores import LocalScoreCache, ScoreParams, node_score

DEFAULT_SCALE = 10**6
DEFAULT_CANDIDATE_LIMIT = 15000


class CapacityError(RuntimeError):
    """The candidate-blanket budget for exact optimization is exceeded."""


@dataclass(frozen=True)
class PboProblem:
    """A pseudo-Boolean encoding of subgraph selection over an edge space.

    Variable numbering is 1-based: edge variables first, in lexicographic
    edge order, then subset variables grouped by node with subsets in bitmask
    order (bit t of the subset index selects the t-th smallest candidate
    neighbor).  weights[j][k] is the objective weight of node j's subset k.
    """

    d: int
    edges: tuple[tuple[int, int], ...]
    members: tuple[tuple[int, ...], ...]
    weights: tuple[tuple[int, ...], ...]
    scale: int

    @property
    def n_edge_vars(self) -> int:
        return len(self.edges)

    @property
    def n_blanket_vars(self) -> int:
        return sum(len(w) for w in self.weights)

    @property
    def n_variables(self) -> int:
        return self.n_edge_vars + self.n_blanket_vars

    @property
    def n_constraints(self) -> int:
        return self.d + self.n_blanket_vars

    def edge_var(self, edge: tuple[int, int]) -> int:
        return self.edges.index(edge) + 1

    def blanket_var(self, j: int, k: int) -> int:
        offset = self.n_edge_vars + sum(len(self.weights[v]) for v in range(j))
        return offset + k + 1

    def subset_members(self, j: int, k: int) -> tuple[int, ...]:
        return tuple(v for t, v in enumerate(self.members[j]) if k >> t & 1)


def blanket_weight(
    data: Dataset,
    j: int,
    blanket: Iterable[int],
    params: ScoreParams,
    scale: int,
    cache: LocalScoreCache | None = None,
) -> int:
    """Integer objective weight of one candidate blanket."""
    return -math.floor(scale * node_score(data, j, blanket, params, cache))


def encode(
    data: Dataset,
    space: UGraph,
    params: ScoreParams,
    scale: int = DEFAULT_SCALE,
    limit: int = DEFAULT_CANDIDATE_LIMIT,
) -> PboProblem:
    """Build the optimization problem for subgraphs of `space`.

    Refuses to encode when the total number of candidate blankets (the sum
    over nodes of 2^neighborhood-size) exceeds `limit`.
    """
    if space.d != data.d:
        raise ValueError("space and dataset have different variable counts")
    if scale < 1:
        raise ValueError("scale must be a positive integer")
    members = tuple(space.neighbors(j) for j in range(space.d))
    n_candidates = sum(1 << len(m) for m in members)
    if n_candidates > limit:
        raise CapacityError(
            f"{n_candidates} candidate blankets exceed the limit of {limit}; "
            "use the approximate search instead"
        )
    cache = LocalScoreCache()
    weights = []
    for j, mvec in enumerate(members):
        row = []
        for k in range(1 << len(mvec)):
            subset = tuple(v for t, v in enumerate(mvec) if k >> t & 1)
            row.append(blanket_weight(data, j, subset, params, scale, cache))
        weights.append(tuple(row))
    return PboProblem(
        d=space.d,
        edges=tuple(space.sorted_edges()),
        members=members,
        weights=tuple(weights),
        scale=scale,
    )


def _subset_index(members: tuple[int, ...], chosen: set) -> int:
    k = 0
    for t, v in enumerate(members):
        if v in chosen:
            k |= 1 << t
    return k


def assignment_for_graph(problem: PboProblem, g: UGraph) -> list[int]:
    """The feasible assignment induced by a subgraph of the encoded space."""
    if not g.edges <= set(problem.edges):
        raise ValueError("graph has edges outside the encoded space")
    bits = [0] * problem.n_variables
    for idx, e in enumerate(problem.edges):
        bits[idx] = 1 if e in g.edges else 0
    for j in range(problem.d):
        chosen = set(g.neighbors(j))
        k = _subset_index(problem.members[j], chosen)
        bits[problem.blanket_var(j, k) - 1] = 1
    return bits


def objective_value(problem: PboProblem, assignment: list[int]) -> int:
    total = 0
    for j in range(problem.d):
        for k in range(len(problem.weights[j])):
            if assignment[problem.blanket_var(j, k) - 1]:
                total += problem.weights[j][k]
    return total


def decode(problem: PboProblem, assignment: list[int]) -> UGraph:
    """Recover the graph from a feasible assignment, verifying consistency."""
    if len(assignment) != problem.n_variables:
        raise ValueError(
            f"assignment has {len(assignment)} values, expected {problem.n_variables}"
        )
    edges = {e for idx, e in enumerate(problem.edges) if assignment[idx]}
    g = UGraph(problem.d, edges)
    for j in range(problem.d):
        selected = [
            k
            for k in range(len(problem.weights[j]))
            if assignment[problem.blanket_var(j, k) - 1]
        ]
        if len(selected) != 1:
            raise ValueError(f"node {j}: {len(selected)} blanket candidates selected")
        if problem.subset_members(j, selected[0]) != g.neighbors(j):
            raise ValueError(
                f"node {j}: selected blanket candidate disagrees with edge variables"
            )
    return g


def solve_internal(
    problem: PboProblem, upper_bound: int | None = None
) -> list[int]:
    """Provably optimal assignment by branch and bound over edge variables.

    Edges are decided in lexicographic order, branching on 0 before 1, and a
    partial assignment is bounded below by summing each node's best weight
    among the candidates still compatible with the decided incident edges.
    The first optimum found in this order is kept, so ties resolve to the
    lexicographically smallest assignment.  `upper_bound`, when given, must
    be the objective value of some feasible assignment; it tightens pruning
    without affecting the result.
    """
    d = problem.d
    edges = problem.edges
    n_edges = len(edges)
    # Per node: positions of its incident edges among its sorted neighbors.
    incident: list[list[tuple[int, int]]] = [[] for _ in range(d)]  # (edge idx, bit)
    for idx, (i, j) in enumerate(edges):
        incident[i].append((idx, problem.members[i].index(j)))
        incident[j].append((idx, problem.members[j].index(i)))

    masks = [0] * d  # decided member bits per node
    bits = [0] * d  # decided member values per node
    mins = [0.0] * d

    def node_min(j: int) -> int:
        mask, want = masks[j], bits[j]
        return min(
            w
            for k, w in enumerate(problem.weights[j])
            if k & mask == want
        )

    for j in range(d):
        mins[j] = node_min(j)
    bound = sum(mins)

    best_value = math.inf if upper_bound is None else upper_bound + 1
    best_edges: list[int] | None = None
    chosen = [0] * n_edges

    def recurse(depth: int, bound: float) -> None:
        nonlocal best_value, best_edges
        if bound >= best_value:
            return
        if depth == n_edges:
            best_value = bound
            best_edges = chosen[:]
            return
        i, j = edges[depth]
        for value in (0, 1):
            chosen[depth] = value
            saved = []
            new_bound = bound
            for v in (i, j):
                bit = next(b for e, b in incident[v] if e == depth)
                saved.append((v, masks[v], bits[v], mins[v]))
                masks[v] |= 1 << bit
                if value:
                    bits[v] |= 1 << bit
                new_min = node_min(v)
                new_bound += new_min - mins[v]
                mins[v] = new_min
            recurse(depth + 1, new_bound)
            for v, m, b, mn in reversed(saved):
                masks[v], bits[v], mins[v] = m, b, mn

    recurse(0, bound)
    if best_edges is None:
        # Every completion was pruned by the caller-supplied bound being
        # wrong; fall back to an unbounded search.
        return solve_internal(problem)
    graph = UGraph(d, [e for t, e in enumerate(edges) if best_edges[t]])
    return assignment_for_graph(problem, graph)


def write_opb(problem: PboProblem, sink: IO[str]) -> None:
    """Emit the problem in nonlinear OPB format.

    Header, then the minimization objective over the subset variables, then
    per node its product constraints (one per candidate subset) followed by
    its exactly-one constraint.
    """
    sink.write(
        f"* #variable= {problem.n_variables} #constraint= {problem.n_constraints}\n"
    )
    terms = []
    for j in range(problem.d):
        for k, w in enumerate(problem.weights[j]):
            terms.append(f"{w:+d} x{problem.blanket_var(j, k)}")
    sink.write("min: " + " ".join(terms) + " ;\n")
    for j in range(problem.d):
        mvec = problem.members[j]
        for k in range(len(problem.weights[j])):
            var = problem.blanket_var(j, k)
            if not mvec:
                sink.write(f"+1 x{var} = 1 ;\n")
                continue
            lits = []
            for t, v in enumerate(mvec):
                evar = problem.edge_var((min(j, v), max(j, v)))
                lits.append(f"x{evar}" if k >> t & 1 else f"~x{evar}")
            sink.write(f"+1 x{var} -1 " + " ".join(lits) + " = 0 ;\n")
        ones = " ".join(
            f"+1 x{problem.blanket_var(j, k)}" for k in range(len(problem.weights[j]))
        )
        sink.write(ones + " = 1 ;\n")


def read_assignment(source: IO[str] | Iterable[str], problem: PboProblem) -> list[int]:
    """Parse a solver value line ('v x1 -x2 ...') into an assignment."""
    values: dict[int, int] = {}
    for raw in source:
        line = raw.strip()
        if not line.startswith("v"):
            continue
        for token in line.split()[1:]:
            negated = token.startswith("-")
            name = token[1:] if negated else token
            if not name.startswith("x"):
                raise ValueError(f"unexpected literal {token!r} in value line")
            values[int(name[1:])] = 0 if negated else 1
    assignment = [0] * problem.n_variables
    for var, bit in values.items():
        if not 1 <= var <= problem.n_variables:
            raise ValueError(f"variable x{var} out of range")
        assignment[var - 1] = bit
    return assignment
