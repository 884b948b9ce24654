"""Categorical datasets and blanket-configuration counting.

A dataset is an immutable n-by-d matrix of 0-based category indices together
with one cardinality per variable.  The only sufficient statistics the rest of
the package ever needs are, for a target variable and a conditioning set of
variables, the per-category counts grouped by the observed configurations of
the conditioning set.  Configurations that never occur in the data are never
stored; every score term they would produce is identically zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

# Mixed-radix row keys are packed into int64; beyond this the grouping falls
# back to row-wise uniqueness, which never overflows.
_KEY_LIMIT = 2**62

# Largest target cardinality materialized as dense count-vector columns; for
# larger cardinalities counts are compressed to the observed categories
# (absent categories contribute exactly zero to every score term).
_DENSE_CARD_LIMIT = 2**22


class DataFormatError(ValueError):
    """A data file could not be parsed into a valid dataset."""


class Dataset:
    """Immutable collection of complete joint observations.

    Parameters
    ----------
    values:
        Array-like of shape (n, d) holding 0-based category indices.
    cards:
        Sequence of d positive cardinalities; values[k][j] must lie in
        range(cards[j]).
    """

    __slots__ = ("values", "cards", "n", "d")

    def __init__(self, values, cards):
        cards = tuple(int(c) for c in cards)
        if len(cards) == 0:
            raise ValueError("dataset needs at least one variable")
        if any(c < 1 for c in cards):
            raise ValueError("cardinalities must be positive")
        arr = np.asarray(values, dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, len(cards))
        if arr.ndim != 2 or arr.shape[1] != len(cards):
            raise ValueError(
                f"values must be 2-d with {len(cards)} columns, got shape {arr.shape}"
            )
        if arr.shape[0] > 0:
            if arr.min() < 0:
                raise ValueError("category indices must be >= 0")
            maxima = arr.max(axis=0)
            for j, (m, c) in enumerate(zip(maxima, cards)):
                if m >= c:
                    raise ValueError(
                        f"variable {j}: value {m} out of range for cardinality {c}"
                    )
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "cards", cards)
        object.__setattr__(self, "n", int(arr.shape[0]))
        object.__setattr__(self, "d", len(cards))

    def __setattr__(self, name, value):
        raise AttributeError("Dataset is immutable")

    def column(self, j: int) -> np.ndarray:
        return self.values[:, j]

    def __repr__(self) -> str:
        return f"Dataset(n={self.n}, d={self.d}, cards={list(self.cards)})"


@dataclass(frozen=True)
class CountTable:
    """Sparse counts for one (target, blanket) pair.

    entries maps each blanket configuration observed in the data (a tuple of
    category indices over the blanket nodes in ascending node order) to a
    vector of per-category counts of the target variable.
    """

    j: int
    blanket: tuple[int, ...]
    entries: dict[tuple[int, ...], np.ndarray]

    def total(self) -> int:
        return int(sum(int(v.sum()) for v in self.entries.values()))


def _check_target_blanket(d: int, j: int, blanket: Iterable[int]) -> tuple[int, ...]:
    mb = tuple(sorted(int(v) for v in blanket))
    if not 0 <= j < d:
        raise ValueError(f"target {j} out of range for {d} variables")
    if len(set(mb)) != len(mb):
        raise ValueError("blanket contains duplicate nodes")
    for v in mb:
        if not 0 <= v < d:
            raise ValueError(f"blanket node {v} out of range for {d} variables")
    if j in mb:
        raise ValueError(f"target {j} may not be a member of its own blanket")
    return mb


def blanket_space_size(cards: Sequence[int], blanket: Iterable[int]) -> int:
    """Exact number of joint configurations of the blanket (unbounded int)."""
    size = 1
    for v in blanket:
        size *= int(cards[v])
    return size


def grouped_counts(
    data: Dataset, j: int, blanket: Iterable[int]
) -> tuple[np.ndarray, int]:
    """Count matrix over observed blanket configurations.

    Returns (counts, space) where counts has one row per blanket configuration
    present in the data and one column per target category (observed
    categories only when cards[j] is too large for a dense layout), and space
    is the exact size of the full blanket configuration space.  Rows are
    ordered by configuration (ascending mixed-radix key, last blanket node
    fastest).
    """
    mb = _check_target_blanket(data.d, j, blanket)
    r = data.cards[j]
    space = blanket_space_size(data.cards, mb)
    if data.n == 0:
        return np.zeros((0, r if r <= _DENSE_CARD_LIMIT else 1), dtype=np.int64), space
    target = data.values[:, j]
    if r > _DENSE_CARD_LIMIT:
        _, target = np.unique(target, return_inverse=True)
        r = int(target.max()) + 1
    if not mb:
        counts = np.bincount(target, minlength=r).reshape(1, r)
        return counts.astype(np.int64), 1
    inv = _config_groups(data, mb, space)[1]
    m = int(inv.max()) + 1
    counts = np.bincount(inv * r + target, minlength=m * r).reshape(m, r)
    return counts.astype(np.int64), space


def _config_groups(
    data: Dataset, mb: tuple[int, ...], space: int
) -> tuple[np.ndarray, np.ndarray]:
    """Group rows by blanket configuration.

    Returns (keys, inverse): keys identifies each distinct observed
    configuration in ascending order and inverse maps every row to its group.
    When `space` fits in an int64 the key is the mixed-radix packing of the
    configuration; otherwise keys are indices into the row-sorted uniques.
    """
    sub = data.values[:, mb]
    if space <= _KEY_LIMIT:
        strides = np.empty(len(mb), dtype=np.int64)
        acc = 1
        for t in range(len(mb) - 1, -1, -1):
            strides[t] = acc
            acc *= data.cards[mb[t]]
        keys = sub @ strides
        uniq, inv = np.unique(keys, return_inverse=True)
        return uniq, inv.astype(np.int64)
    uniq_rows, inv = np.unique(sub, axis=0, return_inverse=True)
    return np.arange(uniq_rows.shape[0], dtype=np.int64), inv.reshape(-1).astype(np.int64)


def _decode_key(key: int, mb: tuple[int, ...], cards: Sequence[int]) -> tuple[int, ...]:
    digits = []
    for v in reversed(mb):
        key, rem = divmod(key, cards[v])
        digits.append(rem)
    return tuple(reversed(digits))


def count_configurations(data: Dataset, j: int, blanket: Iterable[int]) -> CountTable:
    """Tally target-category counts per observed blanket configuration.

    Only configurations that occur in the data appear in the result, so the
    number of entries is at most min(space, n).
    """
    mb = _check_target_blanket(data.d, j, blanket)
    r = data.cards[j]
    if r > _DENSE_CARD_LIMIT:
        raise ValueError(
            f"target cardinality {r} is too large for a dense count table"
        )
    entries: dict[tuple[int, ...], np.ndarray] = {}
    if data.n == 0:
        return CountTable(j=j, blanket=mb, entries=entries)
    if not mb:
        counts = np.bincount(data.values[:, j], minlength=r).astype(np.int64)
        entries[()] = counts
        return CountTable(j=j, blanket=mb, entries=entries)
    space = blanket_space_size(data.cards, mb)
    sub = data.values[:, mb]
    keys, inv = _config_groups(data, mb, space)
    m = int(inv.max()) + 1
    counts = np.bincount(inv * r + data.values[:, j], minlength=m * r).reshape(m, r)
    if space <= _KEY_LIMIT:
        configs = [_decode_key(int(k), mb, data.cards) for k in keys]
    else:
        # keys are group indices; recover one representative row per group
        first = np.full(m, -1, dtype=np.int64)
        for row, g in enumerate(inv):
            if first[g] < 0:
                first[g] = row
        configs = [tuple(int(x) for x in sub[first[g]]) for g in range(m)]
    for cfg, row in zip(configs, counts):
        entries[cfg] = row.astype(np.int64)
    return CountTable(j=j, blanket=mb, entries=entries)


def _tokenize(line: str) -> list[str]:
    return line.replace(",", " ").split()


def load_dataset(
    source: IO[str] | Iterable[str],
    declared_cards: Sequence[int] | None = None,
    has_header: bool | None = None,
) -> Dataset:
    """Parse a whitespace- or comma-separated integer matrix.

    The file may start with one header line giving the per-variable
    cardinalities; lines starting with '#' are comments.  Detection rule when
    `has_header` is None: the first non-comment line is treated as a header
    exactly when all of its tokens are >= 1 (a cardinality can never be 0,
    while any real category column eventually contains a 0).  Data whose first
    row is all-nonzero must either pass `has_header=False` or declare
    cardinalities.  Explicitly declared cardinalities always win; a detected
    header must then agree with them.  Without header or declaration,
    cardinalities are inferred as column max + 1.
    """
    if declared_cards is not None and has_header is None:
        has_header = False
    rows: list[list[int]] = []
    header: list[int] | None = None
    width: int | None = None
    first_content = True
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = _tokenize(line)
        try:
            values = [int(t) for t in tokens]
        except ValueError:
            bad = next(t for t in tokens if not _is_int(t))
            raise DataFormatError(f"line {lineno}: non-integer token {bad!r}")
        if first_content:
            first_content = False
            treat_as_header = has_header if has_header is not None else all(
                v >= 1 for v in values
            )
            if treat_as_header:
                if any(v < 1 for v in values):
                    raise DataFormatError(
                        f"line {lineno}: header cardinalities must be >= 1"
                    )
                header = values
                width = len(values)
                continue
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise DataFormatError(
                f"line {lineno}: expected {width} columns, got {len(values)}"
            )
        rows.append(values)
    if declared_cards is not None:
        cards = [int(c) for c in declared_cards]
        if header is not None and list(header) != cards:
            raise DataFormatError(
                f"header cardinalities {header} disagree with declared {cards}"
            )
    elif header is not None:
        cards = header
    elif rows:
        cards = [max(row[j] for row in rows) + 1 for j in range(len(rows[0]))]
    else:
        raise DataFormatError("empty input with no header and no declared cardinalities")
    if rows and len(rows[0]) != len(cards):
        raise DataFormatError(
            f"rows have {len(rows[0])} columns but {len(cards)} cardinalities given"
        )
    arr = np.asarray(rows, dtype=np.int64).reshape(len(rows), len(cards))
    for k, row in enumerate(rows):
        for j, v in enumerate(row):
            if not 0 <= v < cards[j]:
                raise DataFormatError(
                    f"row {k + 1}: value {v} out of range for cardinality {cards[j]} "
                    f"(variable {j})"
                )
    try:
        return Dataset(arr, cards)
    except ValueError as exc:
        raise DataFormatError(str(exc))


def _is_int(token: str) -> bool:
    try:
        int(token)
        return True
    except ValueError:
        return False


def write_dataset(data: Dataset, sink: IO[str], header: bool = True) -> None:
    """Write a dataset in the loadable text format (header line + rows)."""
    if header:
        sink.write(" ".join(str(c) for c in data.cards) + "\n")
    for row in data.values:
        sink.write(" ".join(str(int(v)) for v in row) + "\n")
