"""Election instances, districts, ordinal profiles, lotteries, tie orders.

An instance holds a table of non-negative agent-by-alternative valuations
whose rows each sum to 1, together with a partition of the agents into
districts. Every other module consumes these types. All values are
immutable after construction and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels

ROW_SUM_TOL = 1e-9
LOTTERY_SUM_TOL = 1e-12


class ValidationError(ValueError):
    """An input violates a structural invariant."""


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Districts:
    """An ordered partition of agent indices into non-empty groups.

    Group order and the order of agents inside a group are meaningful
    (dictatorship rules read the first agent of a group).
    """

    groups: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        groups = tuple(tuple(int(a) for a in g) for g in self.groups)
        object.__setattr__(self, "groups", groups)
        if not groups:
            raise ValidationError("at least one district is required")
        seen: set[int] = set()
        total = 0
        for d, g in enumerate(groups):
            if not g:
                raise ValidationError(f"district {d} is empty")
            for a in g:
                if a in seen:
                    raise ValidationError(f"agent {a} assigned to more than one district")
                seen.add(a)
            total += len(g)
        if seen != set(range(total)):
            missing = sorted(set(range(total)) - seen)
            raise ValidationError(
                f"districts must partition 0..{total - 1}; missing or out-of-range agents "
                f"(first few: {missing[:5] if missing else sorted(seen - set(range(total)))[:5]})"
            )

    @classmethod
    def single(cls, n: int) -> "Districts":
        return cls((tuple(range(n)),))

    @classmethod
    def from_sizes(cls, sizes) -> "Districts":
        """Consecutive blocks of the given sizes: (2, 3) -> (0,1), (2,3,4)."""
        groups = []
        start = 0
        for s in sizes:
            groups.append(tuple(range(start, start + int(s))))
            start += int(s)
        return cls(tuple(groups))

    @property
    def k(self) -> int:
        return len(self.groups)

    @property
    def n(self) -> int:
        return sum(len(g) for g in self.groups)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(g) for g in self.groups)

    @property
    def symmetric(self) -> bool:
        return len(set(self.sizes)) == 1


@dataclass(frozen=True, eq=False)
class Instance:
    """A unit-sum valuation table plus a district partition.

    valuations: (n, m) float64, entries >= 0, each row sums to 1 within
    ``ROW_SUM_TOL``. The array is stored read-only.
    """

    valuations: np.ndarray
    districts: Districts

    def __post_init__(self):
        vals = np.array(self.valuations, dtype=np.float64, order="C", copy=True)
        if vals.ndim != 2 or vals.shape[0] < 1 or vals.shape[1] < 2:
            raise ValidationError(
                f"valuations must be an n x m table with n >= 1, m >= 2; got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            i, a = np.argwhere(~np.isfinite(vals))[0]
            raise ValidationError(f"valuations row {i} column {a}: non-finite entry")
        if np.any(vals < 0.0):
            i, a = np.argwhere(vals < 0.0)[0]
            raise ValidationError(
                f"valuations row {i} column {a}: negative entry {vals[i, a]}"
            )
        sums = vals.sum(axis=1)
        bad = np.abs(sums - 1.0) > ROW_SUM_TOL
        if np.any(bad):
            i = int(np.argmax(bad))
            raise ValidationError(f"valuations row {i} sums to {sums[i]}, expected 1")
        object.__setattr__(self, "valuations", _readonly(vals))
        districts = self.districts
        if not isinstance(districts, Districts):
            districts = Districts(tuple(tuple(g) for g in districts))
            object.__setattr__(self, "districts", districts)
        if districts.n != vals.shape[0]:
            raise ValidationError(
                f"districts cover {districts.n} agents but the table has {vals.shape[0]} rows"
            )

    @property
    def n(self) -> int:
        return self.valuations.shape[0]

    @property
    def m(self) -> int:
        return self.valuations.shape[1]

    @property
    def k(self) -> int:
        return self.districts.k


def build_instance(valuations, districts) -> Instance:
    """Validate and assemble an Instance from raw inputs.

    Args:
        valuations: n x m table of non-negative reals, each row summing
            to 1 within ``ROW_SUM_TOL``.
        districts: a Districts value, or a sequence of agent-index
            sequences forming an exact partition of 0..n-1.

    Raises:
        ValidationError: on negative entries, row-sum violations, or a
            broken partition (duplicate or missing agents).
    """
    return Instance(valuations, districts)


@dataclass(frozen=True)
class TieOrder:
    """Fixed tie-break priority: earlier index in ``order`` wins ties."""

    order: tuple[int, ...]

    def __post_init__(self):
        order = tuple(int(a) for a in self.order)
        object.__setattr__(self, "order", order)
        if sorted(order) != list(range(len(order))):
            raise ValidationError(f"tie order must be a permutation of 0..{len(order) - 1}")

    @classmethod
    def index(cls, m: int) -> "TieOrder":
        """Natural priority: lower alternative index wins."""
        return cls(tuple(range(m)))

    @property
    def m(self) -> int:
        return len(self.order)

    def priority(self) -> np.ndarray:
        """priority[a] = position of alternative a (lower wins)."""
        pri = np.empty(self.m, dtype=np.intp)
        for pos, a in enumerate(self.order):
            pri[a] = pos
        return pri


@dataclass(frozen=True, eq=False)
class OrdinalProfile:
    """One strict ranking (best to worst) per agent.

    Each row is a permutation of 0..m-1. Consistency with an Instance is
    a property of how the profile was produced (see ``derive_ordinal``
    and ``is_consistent``), not enforced here: manipulation checks need
    profiles that deliberately deviate from the valuations.
    """

    rankings: np.ndarray

    def __post_init__(self):
        rk = np.array(self.rankings, dtype=np.intp, order="C", copy=True)
        if rk.ndim != 2 or rk.shape[0] < 1:
            raise ValidationError("rankings must be a non-empty 2-D table")
        m = rk.shape[1]
        if not np.array_equal(np.sort(rk, axis=1), np.broadcast_to(np.arange(m), rk.shape)):
            raise ValidationError("every ranking row must be a permutation of 0..m-1")
        object.__setattr__(self, "rankings", _readonly(rk))

    @property
    def n(self) -> int:
        return self.rankings.shape[0]

    @property
    def m(self) -> int:
        return self.rankings.shape[1]

    def positions(self) -> np.ndarray:
        """Inverse permutations: positions[i, a] = rank of a for agent i."""
        return np.argsort(self.rankings, axis=1)

    def replace_row(self, agent: int, ranking) -> "OrdinalProfile":
        """A copy of the profile with one agent's ranking swapped out."""
        rk = np.array(self.rankings)
        rk[agent] = ranking
        return OrdinalProfile(rk)


def normalize_unit_sum(raw) -> np.ndarray:
    """Scale each row of a non-negative table to sum to 1.

    All-zero rows become the uniform row 1/m (keeps dataset pipelines
    total; a rater who gave the minimum everywhere carries no signal).

    Raises:
        ValidationError: on negative or non-finite entries, naming the
            offending row and column.
    """
    arr = np.array(raw, dtype=np.float64, order="C", copy=True)
    if arr.ndim != 2:
        raise ValidationError("expected a 2-D table")
    if not np.all(np.isfinite(arr)):
        i, a = np.argwhere(~np.isfinite(arr))[0]
        raise ValidationError(f"row {i} column {a}: non-finite entry")
    if np.any(arr < 0.0):
        i, a = np.argwhere(arr < 0.0)[0]
        raise ValidationError(f"row {i} column {a}: negative entry {arr[i, a]}")
    sums = arr.sum(axis=1)
    zero = sums == 0.0
    if np.any(zero):
        arr[zero] = 1.0 / arr.shape[1]
        sums = np.where(zero, 1.0, sums)
    return arr / sums[:, None]


def derive_ordinal(instance: Instance, tie: TieOrder | None = None) -> OrdinalProfile:
    """Rank every agent's alternatives by valuation, ties by priority.

    Exact-value ties (including all-tied uniform rows) resolve to the
    earlier alternative in ``tie``; the default is index order.
    """
    if tie is None:
        tie = TieOrder.index(instance.m)
    if tie.m != instance.m:
        raise ValidationError(f"tie order has {tie.m} entries, instance has {instance.m}")
    return OrdinalProfile(kernels.rank_rows(instance.valuations, tie.order))


def is_consistent(profile: OrdinalProfile, instance: Instance) -> bool:
    """True iff each agent's ranking is non-increasing in their valuations."""
    if profile.n != instance.n or profile.m != instance.m:
        return False
    ranked_vals = np.take_along_axis(instance.valuations, profile.rankings, axis=1)
    return bool(np.all(ranked_vals[:, :-1] >= ranked_vals[:, 1:]))


@dataclass(frozen=True, eq=False)
class Lottery:
    """A probability distribution over the m alternatives."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=np.float64, copy=True)
        if p.ndim != 1 or p.size < 1:
            raise ValidationError("a lottery needs a non-empty 1-D probability vector")
        if np.any(p < 0.0) or not np.all(np.isfinite(p)):
            raise ValidationError("lottery probabilities must be finite and non-negative")
        total = float(p.sum())
        if abs(total - 1.0) > LOTTERY_SUM_TOL:
            raise ValidationError(f"lottery probabilities sum to {total}, expected 1")
        object.__setattr__(self, "probs", _readonly(p))

    @classmethod
    def degenerate(cls, winner: int, m: int) -> "Lottery":
        p = np.zeros(m)
        p[winner] = 1.0
        return cls(p)

    @classmethod
    def uniform(cls, m: int) -> "Lottery":
        return cls(np.full(m, 1.0 / m))

    @property
    def m(self) -> int:
        return self.probs.shape[0]

    def is_degenerate(self) -> bool:
        return bool(np.any(self.probs == 1.0))


@dataclass(frozen=True, eq=False)
class DistrictView:
    """Read-only slice of an instance restricted to one district."""

    district: int
    agents: tuple[int, ...]
    valuations: np.ndarray
    rankings: np.ndarray | None

    @property
    def n_agents(self) -> int:
        return len(self.agents)

    @property
    def m(self) -> int:
        return self.valuations.shape[1]


def restrict_to_district(
    instance: Instance, d: int, profile: OrdinalProfile | None = None
) -> DistrictView:
    """View over exactly the agents of district d, in their stored order.

    Pass a profile to carry the matching ranking rows along (ordinal
    rules need them).
    """
    if not 0 <= d < instance.k:
        raise IndexError(f"district index {d} out of range for k={instance.k}")
    agents = instance.districts.groups[d]
    idx = np.asarray(agents, dtype=np.intp)
    rankings = None
    if profile is not None:
        if profile.n != instance.n:
            raise ValidationError("profile size does not match the instance")
        rankings = _readonly(profile.rankings[idx])
    return DistrictView(
        district=d,
        agents=agents,
        valuations=_readonly(instance.valuations[idx]),
        rankings=rankings,
    )
