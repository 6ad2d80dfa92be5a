"""Synthetic valuation sampling, district partitioning, ratings ingestion.

Also defines the plain-text instance interchange format used by the
command line: a header line "n m k", then n rows of m decimal
valuations, then k lines of space-separated agent indices.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .core import Districts, Instance, ValidationError, normalize_unit_sum


@dataclass(frozen=True)
class DistributionSpec:
    """A named value distribution with its parameters."""

    kind: str
    params: tuple[float, ...]

    def __post_init__(self):
        params = tuple(float(p) for p in self.params)
        object.__setattr__(self, "params", params)
        if self.kind == "uniform":
            if len(params) != 2 or params[0] >= params[1]:
                raise ValidationError("uniform needs bounds lo < hi")
        elif self.kind == "beta":
            if len(params) != 2 or params[0] <= 0 or params[1] <= 0:
                raise ValidationError("beta needs two positive shape parameters")
        elif self.kind == "exponential":
            if len(params) != 1 or params[0] <= 0:
                raise ValidationError("exponential needs a positive rate")
        else:
            raise ValidationError(
                f"unknown distribution {self.kind!r}; valid: uniform, beta, exponential"
            )

    @classmethod
    def uniform(cls, lo: float = 1.0, hi: float = 100.0) -> "DistributionSpec":
        return cls("uniform", (lo, hi))

    @classmethod
    def beta(cls, alpha: float = 0.1, beta: float = 0.1) -> "DistributionSpec":
        return cls("beta", (alpha, beta))

    @classmethod
    def exponential(cls, rate: float = 4.0) -> "DistributionSpec":
        return cls("exponential", (rate,))


def parse_distribution(text: str) -> DistributionSpec:
    """Parse "uniform", "beta:0.5,0.5", "exponential:2", etc.

    A bare name uses the default parameters: uniform over [1, 100],
    beta(0.1, 0.1), exponential with rate 4.
    """
    kind, sep, rest = text.partition(":")
    if not sep:
        defaults = {
            "uniform": DistributionSpec.uniform,
            "beta": DistributionSpec.beta,
            "exponential": DistributionSpec.exponential,
        }
        if kind not in defaults:
            raise ValidationError(
                f"unknown distribution {kind!r}; valid: uniform, beta, exponential"
            )
        return defaults[kind]()
    try:
        params = tuple(float(p) for p in rest.split(","))
    except ValueError:
        raise ValidationError(f"bad distribution parameters {rest!r}") from None
    return DistributionSpec(kind, params)


def sample_valuations(
    n: int, m: int, dist: DistributionSpec, rng: np.random.Generator
) -> np.ndarray:
    """Raw i.i.d. valuation draws; callers normalize to unit sum."""
    if n < 1 or m < 1:
        raise ValidationError("n and m must be positive")
    if dist.kind == "uniform":
        lo, hi = dist.params
        return rng.uniform(lo, hi, size=(n, m))
    if dist.kind == "beta":
        a, b = dist.params
        return rng.beta(a, b, size=(n, m))
    rate = dist.params[0]
    return rng.exponential(scale=1.0 / rate, size=(n, m))


def partition_uniform(n: int, k: int, rng: np.random.Generator) -> Districts:
    """Uniformly random partition into k equal-sized districts.

    Shuffles the agents and chunks the permutation into k consecutive
    groups of n/k.
    """
    if k < 1:
        raise ValidationError("k must be positive")
    if n % k != 0:
        raise ValidationError(f"k={k} does not divide n={n}")
    perm = rng.permutation(n)
    size = n // k
    return Districts(tuple(tuple(int(a) for a in perm[d * size : (d + 1) * size]) for d in range(k)))


@dataclass(frozen=True, eq=False)
class RatingsMatrix:
    """A users-by-items table of ratings with explicit missing entries.

    ``values`` holds NaN where ``missing`` is True; ``rated_counts`` is
    the per-user number of rated items (read from the file's count
    column when present, else computed).
    """

    values: np.ndarray
    missing: np.ndarray
    value_range: tuple[float, float]
    rated_counts: np.ndarray

    @property
    def n_users(self) -> int:
        return self.values.shape[0]

    @property
    def n_items(self) -> int:
        return self.values.shape[1]

    def item_rated_counts(self) -> np.ndarray:
        return (~self.missing).sum(axis=0)


def load_ratings(
    path,
    missing_marker: float = 99.0,
    value_range: tuple[float, float] = (-10.0, 10.0),
    has_count_column: bool = True,
) -> RatingsMatrix:
    """Read a comma-separated ratings file.

    Each row is one user: an optional leading rated-count column, then
    one column per item, with ``missing_marker`` standing for "not
    rated". Non-missing entries must lie inside ``value_range``.

    Raises:
        ValidationError: if the marker lies inside the rating range, or
            on any malformed row (named by 1-based line number).
    """
    lo, hi = float(value_range[0]), float(value_range[1])
    if lo >= hi:
        raise ValidationError("value range must satisfy lo < hi")
    if lo <= missing_marker <= hi:
        raise ValidationError(
            f"missing marker {missing_marker} collides with the rating range [{lo}, {hi}]"
        )
    rows: list[list[float]] = []
    counts: list[int] = []
    width = None
    with open(path, newline="") as fh:
        for lineno, record in enumerate(csv.reader(fh), start=1):
            if not record or all(not f.strip() for f in record):
                continue
            try:
                fields = [float(f) for f in record]
            except ValueError:
                raise ValidationError(f"line {lineno}: non-numeric field") from None
            if has_count_column:
                if len(fields) < 2:
                    raise ValidationError(f"line {lineno}: expected a count column plus ratings")
                counts.append(int(fields[0]))
                fields = fields[1:]
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise ValidationError(
                    f"line {lineno}: expected {width} rating columns, found {len(fields)}"
                )
            for j, v in enumerate(fields):
                if v != missing_marker and not lo <= v <= hi:
                    raise ValidationError(
                        f"line {lineno}: rating {v} in column {j} outside [{lo}, {hi}]"
                    )
            rows.append(fields)
    if not rows:
        values = np.zeros((0, 0))
        missing = np.zeros((0, 0), dtype=bool)
        return RatingsMatrix(values, missing, (lo, hi), np.zeros(0, dtype=np.intp))
    values = np.asarray(rows, dtype=np.float64)
    missing = values == missing_marker
    values = np.where(missing, np.nan, values)
    if has_count_column:
        rated = np.asarray(counts, dtype=np.intp)
    else:
        rated = (~missing).sum(axis=1).astype(np.intp)
    return RatingsMatrix(values, missing, (lo, hi), rated)


def most_rated_items(ratings: RatingsMatrix, items: int) -> list[int]:
    """Indices of the most-rated columns; count ties go to lower index."""
    if items < 1 or items > ratings.n_items:
        raise ValidationError(f"cannot select {items} of {ratings.n_items} items")
    counts = ratings.item_rated_counts()
    return sorted(range(ratings.n_items), key=lambda j: (-int(counts[j]), j))[:items]


def sample_ratings_valuations(
    ratings: RatingsMatrix, users: int, items: int, rng: np.random.Generator
) -> np.ndarray:
    """Raw valuation rows from a ratings matrix (pre-normalization).

    Selects the ``items`` most-rated columns, uniformly samples ``users``
    rows that rated all of them, and shifts every entry by -lo so values
    are non-negative (a user who gave the minimum everywhere becomes an
    all-zero row, which ``normalize_unit_sum`` maps to uniform).
    """
    cols = most_rated_items(ratings, items)
    complete = np.flatnonzero(~ratings.missing[:, cols].any(axis=1))
    if complete.size < users:
        raise ValidationError(
            f"only {complete.size} users rated all {items} selected items; need {users}"
        )
    chosen = rng.choice(complete, size=users, replace=False)
    return ratings.values[np.ix_(chosen, cols)] - ratings.value_range[0]


def build_ratings_instance(
    ratings: RatingsMatrix,
    users: int = 100,
    items: int = 8,
    k: int = 1,
    rng: np.random.Generator | None = None,
) -> Instance:
    """Full pipeline from a ratings matrix to an election instance."""
    if rng is None:
        rng = np.random.default_rng()
    raw = sample_ratings_valuations(ratings, users, items, rng)
    return Instance(normalize_unit_sum(raw), partition_uniform(users, k, rng))


def save_instance(instance: Instance, path) -> None:
    """Write an instance in the plain-text interchange format."""
    with open(path, "w") as fh:
        fh.write(f"{instance.n} {instance.m} {instance.k}\n")
        for row in instance.valuations:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")
        for group in instance.districts.groups:
            fh.write(" ".join(str(a) for a in group) + "\n")


def load_instance(path) -> Instance:
    """Read an instance written by ``save_instance`` (validating it)."""
    with open(path) as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if not lines:
        raise ValidationError("empty instance file")
    try:
        n, m, k = (int(x) for x in lines[0].split())
    except ValueError:
        raise ValidationError("header must be three integers: n m k") from None
    if len(lines) != 1 + n + k:
        raise ValidationError(f"expected {1 + n + k} lines for n={n}, k={k}; found {len(lines)}")
    try:
        vals = [[float(x) for x in lines[1 + i].split()] for i in range(n)]
        groups = tuple(tuple(int(x) for x in lines[1 + n + d].split()) for d in range(k))
    except ValueError:
        raise ValidationError("malformed numeric field in instance file") from None
    if any(len(r) != m for r in vals):
        raise ValidationError(f"every valuation row must have {m} entries")
    return Instance(np.asarray(vals), Districts(groups))
