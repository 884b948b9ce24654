"""Closed-form structure scores for blanket-conditional categorical models.

The central quantity is the log marginal probability of one variable's column
given the observed configurations of its blanket, with the conditional
distributions integrated out under a symmetric Dirichlet prior.  For a target
with cardinality r, blanket configuration space of size q, and prior strength
`ess`, the prior places mass ess / (r * q) on each (category, configuration)
cell, and the score is

    sum over observed configurations l of
        lnG(a_row) - lnG(n_l + a_row)
        + sum over categories i of [lnG(n_il + a_cell) - lnG(a_cell)]

with a_cell = ess / (r * q), a_row = ess / q, and lnG the log-gamma function.
Configurations absent from the data contribute exactly zero, so only observed
configurations are ever touched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .dataset import Dataset, blanket_space_size, grouped_counts
from .graph import UGraph

UNIFORM = "uniform"
SPARSITY = "sparsity"

# Largest blanket space still converted to float for direct hyperparameter
# arithmetic; beyond it the small-alpha limit of the score is used.
_FLOAT_SPACE_LIMIT = 2**1020

LN2 = math.log(2.0)


@dataclass(frozen=True)
class ScoreParams:
    """Prior strength (equivalent sample size) and graph prior choice."""

    ess: float = 1.0
    prior: str = UNIFORM

    def __post_init__(self):
        if not self.ess > 0:
            raise ValueError(f"ess must be positive, got {self.ess}")
        if self.prior not in (UNIFORM, SPARSITY):
            raise ValueError(f"prior must be {UNIFORM!r} or {SPARSITY!r}")


class LocalScoreCache:
    """Map from (node, sorted blanket tuple) to a local log score.

    Values are deterministic functions of the key for a fixed dataset and
    parameter setting, so the cache may be shared between threads: concurrent
    writes are last-writer-wins races that always write identical values.  A
    cache must not be reused across datasets or parameter settings.
    """

    __slots__ = ("_table", "max_size", "hits", "misses")

    def __init__(self, max_size: int | None = None):
        self._table: dict[tuple[int, tuple[int, ...]], float] = {}
        self.max_size = max_size
        self.hits = 0
        self.misses = 0

    def get(self, key):
        value = self._table.get(key)
        if value is None:
            self.misses += 1
        else:
            self.hits += 1
        return value

    def put(self, key, value: float) -> None:
        if self.max_size is not None and len(self._table) >= self.max_size:
            return
        self._table[key] = value

    def __len__(self) -> int:
        return len(self._table)


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for positive arguments."""
    if not x > 0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def _score_from_counts(counts: np.ndarray, card: int, space: int, ess: float) -> float:
    """Evaluate the Dirichlet-multinomial family score from a count matrix.

    counts has one row per observed blanket configuration and `card` columns;
    `space` is the exact (unbounded-int) size of the configuration space.
    """
    if counts.shape[0] == 0:
        return 0.0
    row_totals = counts.sum(axis=1)
    m = counts.shape[0]
    if space <= _FLOAT_SPACE_LIMIT:
        a_row = ess / float(space)
        try:
            a_cell = a_row / card
        except OverflowError:
            a_cell = 0.0
        if a_cell > 0.0:  # a huge card can still underflow the cell mass
            total = m * math.lgamma(a_row) - float(gammaln(row_totals + a_row).sum())
            # zero cells cancel exactly, so only materialized columns count
            total += float(gammaln(counts + a_cell).sum()) - counts.size * math.lgamma(
                a_cell
            )
            return total
    # Small-alpha limit: with alpha -> 0, lnG(alpha) -> -ln(alpha) and
    # lnG(n + alpha) - lnG(alpha) -> lnG(n) + ln(alpha) for n >= 1.
    log_space = _log_space_size(space)
    log_a_row = math.log(ess) - log_space
    log_a_cell = log_a_row - math.log(card)
    total = m * (-log_a_row) - float(gammaln(row_totals).sum())
    nz = counts[counts > 0]
    total += float(gammaln(nz).sum()) + nz.size * log_a_cell
    return total


def _log_space_size(space: int) -> float:
    # Exact ints of this size overflow float(); go through the bit length.
    bits = space.bit_length()
    if bits <= 1000:
        return math.log(float(space))
    shift = bits - 64
    return math.log(float(space >> shift)) + shift * LN2


def mpl_local(data: Dataset, j: int, blanket, params: ScoreParams) -> float:
    """Log marginal probability of column j given its blanket configurations."""
    counts, space = grouped_counts(data, j, blanket)
    return _score_from_counts(counts, data.cards[j], space, params.ess)


def _cached_local(data, j, blanket, params, cache: LocalScoreCache | None) -> float:
    mb = tuple(sorted(int(v) for v in blanket))
    if cache is None:
        return mpl_local(data, j, mb, params)
    key = (j, mb)
    value = cache.get(key)
    if value is None:
        value = mpl_local(data, j, mb, params)
        cache.put(key, value)
    return value


def node_prior_term(cards, j: int, blanket, params: ScoreParams) -> float:
    """Per-node share of the log graph prior (0 under the uniform prior)."""
    if params.prior == UNIFORM:
        return 0.0
    space = blanket_space_size(cards, blanket)
    try:
        q = float(space)
    except OverflowError:
        q = math.inf
    return -LN2 * q * (cards[j] - 1)


def graph_log_prior(g: UGraph, cards, params: ScoreParams) -> float:
    """Unnormalized log prior of a graph; only differences ever matter."""
    if params.prior == UNIFORM:
        return 0.0
    return sum(node_prior_term(cards, j, g.neighbors(j), params) for j in range(g.d))


def mpl_global(
    data: Dataset,
    g: UGraph,
    params: ScoreParams,
    cache: LocalScoreCache | None = None,
) -> float:
    """Sum of the d local scores of a graph plus its log prior."""
    if g.d != data.d:
        raise ValueError("graph and dataset have different variable counts")
    total = sum(
        _cached_local(data, j, g.neighbors(j), params, cache) for j in range(data.d)
    )
    return total + graph_log_prior(g, data.cards, params)


def log_pseudo_bayes_factor(
    data: Dataset,
    g1: UGraph,
    g2: UGraph,
    params: ScoreParams,
    cache: LocalScoreCache | None = None,
) -> float:
    """Score difference between graphs that disagree on exactly one edge.

    Only the two local terms at the endpoints of the differing edge change,
    so the full sums never need to be formed.  Under the uniform graph prior
    this equals mpl_global(g1) - mpl_global(g2).
    """
    if g1.d != g2.d:
        raise ValueError("graphs have different node counts")
    diff = g1.edges ^ g2.edges
    if len(diff) != 1:
        raise ValueError(f"graphs must differ in exactly one edge, differ in {len(diff)}")
    i, j = next(iter(diff))
    value = 0.0
    for v in (i, j):
        value += _cached_local(data, v, g1.neighbors(v), params, cache)
        value -= _cached_local(data, v, g2.neighbors(v), params, cache)
    return value


def pic_local(data: Dataset, j: int, blanket) -> float:
    """Plug-in information criterion for one node (smaller is better).

    Negative maximized conditional log-likelihood of column j given the
    blanket plus a penalty of (full configuration-space size) * ln n, with the
    0 * log 0 = 0 convention.  Callers maximizing a score negate this.
    """
    if data.n < 1:
        raise ValueError("pic_local requires at least one observation")
    counts, space = grouped_counts(data, j, blanket)
    fit = -_max_conditional_loglik(counts)
    try:
        penalty = float(space) * math.log(data.n)
    except OverflowError:
        penalty = math.inf
    if data.n == 1:
        penalty = 0.0  # q * ln 1, kept finite even for huge spaces
    return fit + penalty


def _max_conditional_loglik(counts: np.ndarray) -> float:
    """sum of n_cell * ln(n_cell / n_row) over nonzero cells."""
    if counts.shape[0] == 0:
        return 0.0
    row_totals = counts.sum(axis=1, keepdims=True)
    nz = counts > 0
    ratio = np.divide(counts, row_totals, out=np.ones_like(counts, dtype=float), where=nz)
    return float((counts[nz] * np.log(ratio[nz])).sum())


def max_pseudo_loglik_local(data: Dataset, j: int, blanket) -> float:
    """Maximized conditional log-likelihood of column j given a blanket."""
    counts, _ = grouped_counts(data, j, blanket)
    return _max_conditional_loglik(counts)


def node_score(
    data: Dataset,
    j: int,
    blanket,
    params: ScoreParams,
    cache: LocalScoreCache | None = None,
) -> float:
    """Local score plus the node's share of the graph prior.

    The graph prior factorizes over nodes, so searches that optimize the full
    posterior score can work with these per-node terms exactly as they do with
    the plain local scores; under the uniform prior the two coincide.
    """
    value = _cached_local(data, j, blanket, params, cache)
    if params.prior != UNIFORM:
        value += node_prior_term(data.cards, j, blanket, params)
    return value
