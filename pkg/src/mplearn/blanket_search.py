"""Per-node Markov blanket discovery by interleaved add/delete hill climbing.

Each node's blanket is grown from the empty set.  Every pass over the
non-members adopts the single best strictly improving addition; after a
successful addition, while the blanket has more than two members, passes over
the members adopt the single best strictly improving deletion.  The search
stops when no addition improves the local score.  Strict improvement at every
accepted move both matches the acceptance rule and guarantees termination.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

from .dataset import Dataset
from .graph import BlanketFamily
from .scores import ScoreParams, mpl_local


def find_markov_blanket(
    data: Dataset,
    j: int,
    params: ScoreParams,
    max_blanket: int | None = None,
    *,
    skip_latest: bool = True,
) -> tuple[frozenset, float]:
    """Greedy local-score maximization of one node's blanket.

    Ties are broken toward the lowest node index.  `max_blanket`, when set,
    skips additions that would exceed the bound (a cost guard; the unguarded
    search is the default behavior).  `skip_latest` omits the just-added node
    from the first deletion pass, which cannot change the result because
    removing it would recreate a blanket already known to score strictly
    lower; switching it off reproduces the same answer more slowly.

    Returns the blanket and its local score.
    """
    if not 0 <= j < data.d:
        raise ValueError(f"node {j} out of range for {data.d} variables")
    memo: dict[tuple[int, ...], float] = {}

    def score(members: set) -> float:
        key = tuple(sorted(members))
        value = memo.get(key)
        if value is None:
            value = mpl_local(data, j, key, params)
            memo[key] = value
        return value

    current: set = set()
    cur_score = score(current)
    while True:
        best_add = None
        best_score = cur_score
        if max_blanket is None or len(current) < max_blanket:
            for i in range(data.d):
                if i == j or i in current:
                    continue
                s = score(current | {i})
                if s > best_score:
                    best_score = s
                    best_add = i
        if best_add is None:
            break
        current.add(best_add)
        cur_score = best_score
        latest = best_add
        first_pass = True
        while len(current) > 2:
            best_rm = None
            best_score = cur_score
            for i in sorted(current):
                if first_pass and skip_latest and i == latest:
                    continue
                s = score(current - {i})
                if s > best_score:
                    best_score = s
                    best_rm = i
            if best_rm is None:
                break
            current.remove(best_rm)
            cur_score = best_score
            first_pass = False
    return frozenset(current), cur_score


def find_all_blankets(
    data: Dataset,
    params: ScoreParams,
    workers: int = 1,
    max_blanket: int | None = None,
) -> BlanketFamily:
    """Run the blanket search independently for every node.

    The per-node searches share nothing but the immutable dataset, so they
    can fan out across threads; results are joined by node index and are
    identical for any worker count.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")

    def solve(j: int) -> frozenset:
        return find_markov_blanket(data, j, params, max_blanket)[0]

    if workers == 1 or data.d == 1:
        blankets = [solve(j) for j in range(data.d)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blankets = list(pool.map(solve, range(data.d)))
    return BlanketFamily(blankets)
