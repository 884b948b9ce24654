"""Shared fixtures and independent reference oracles.

The oracles here deliberately avoid the package's vectorized code paths:
they enumerate full configuration spaces with plain Python loops and
math.lgamma, so agreement between package and oracle is evidence, not
tautology.
"""

from __future__ import annotations

import math
from itertools import product

import numpy as np
import pytest

from mplearn import Dataset, FactorModel, UGraph


def dense_local_oracle(rows, cards, j, blanket, ess=1.0) -> float:
    """Dense Dirichlet-multinomial local score over the full blanket space."""
    mb = sorted(blanket)
    r = cards[j]
    q = 1
    for v in mb:
        q *= cards[v]
    a_cell = ess / (r * q)
    a_row = ess / q
    total = 0.0
    for cfg in product(*[range(cards[v]) for v in mb]):
        counts = [0] * r
        for row in rows:
            if all(row[v] == cfg[t] for t, v in enumerate(mb)):
                counts[row[j]] += 1
        n_here = sum(counts)
        if n_here == 0:
            continue
        total += math.lgamma(a_row) - math.lgamma(n_here + a_row)
        for c in counts:
            total += math.lgamma(c + a_cell) - math.lgamma(a_cell)
    return total


def dense_pic_oracle(rows, cards, j, blanket) -> float:
    """PIC by direct tally: empirical-entropy term plus full-space penalty."""
    mb = sorted(blanket)
    q = 1
    for v in mb:
        q *= cards[v]
    fit = 0.0
    for cfg in product(*[range(cards[v]) for v in mb]):
        counts = [0] * cards[j]
        for row in rows:
            if all(row[v] == cfg[t] for t, v in enumerate(mb)):
                counts[row[j]] += 1
        n_here = sum(counts)
        for c in counts:
            if c > 0:
                fit -= c * math.log(c / n_here)
    return fit + q * math.log(len(rows))


def chordal_oracle(g: UGraph) -> bool:
    """Chordality by repeated simplicial-vertex elimination."""
    adj = {v: set(g.neighbors(v)) for v in range(g.d)}
    remaining = set(range(g.d))
    while remaining:
        simplicial = None
        for v in sorted(remaining):
            nb = adj[v] & remaining
            if all(
                b in adj[a] for a in nb for b in nb if a < b
            ):
                simplicial = v
                break
        if simplicial is None:
            return False
        remaining.discard(simplicial)
    return True


def pairwise_model(d: int, edges, strength: float = 0.45) -> FactorModel:
    """Binary model with identical strong pairwise couplings on `edges`."""
    g = UGraph(d, edges)
    from mplearn.synthetic import maximal_cliques

    factors = {}
    for clique in maximal_cliques(g):
        if len(clique) == 1:
            factors[clique] = np.asarray([0.5, 0.5])
        elif len(clique) == 2:
            w = strength
            factors[clique] = np.asarray([[w, 0.5 - w + 0.05], [0.5 - w + 0.05, w]])
        else:
            raise ValueError("pairwise_model only supports edges and singletons")
    return FactorModel(g, [2] * d, factors)


def random_dataset(rng: np.random.Generator, n: int, cards) -> Dataset:
    values = np.column_stack([rng.integers(0, c, size=n) for c in cards])
    return Dataset(values.reshape(n, len(cards)), cards)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
