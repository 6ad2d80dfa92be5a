"""Centralized voting rules, usable standalone or inside one district.

Deterministic rules (positional scoring, range voting, dictatorship)
return a single winning alternative; randomized rules are point-voting
schemes (pick an agent uniformly at random, output their rank-t
alternative with probability p_t) and return a lottery.

Rules are addressable by string identifiers through ``get_rule``:

    plurality, veto, borda, harmonic, range, first,
    prop-plurality, prop-veto, prop-borda, prop-harmonic,
    bchlps, uniform-random
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import DistrictView, Lottery, TieOrder, ValidationError

WEIGHT_SUM_TOL = 1e-12


class UnknownRuleError(ValidationError):
    """A rule identifier is not in the registry."""


@dataclass(frozen=True)
class ScoringVector:
    """Positional scores s_1 >= ... >= s_m >= 0, not all zero."""

    scores: tuple[float, ...]

    def __post_init__(self):
        scores = tuple(float(s) for s in self.scores)
        object.__setattr__(self, "scores", scores)
        if not scores:
            raise ValidationError("scoring vector must be non-empty")
        if any(a < b for a, b in zip(scores, scores[1:])):
            raise ValidationError("scores must be non-increasing")
        if scores[-1] < 0.0:
            raise ValidationError("scores must be non-negative")
        if all(s == 0.0 for s in scores):
            raise ValidationError("scores must not all be zero")

    @property
    def m(self) -> int:
        return len(self.scores)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.scores, dtype=np.float64)


@dataclass(frozen=True)
class PointVotingVector:
    """Rank probabilities p_1 >= ... >= p_m >= 0 summing to 1."""

    probs: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if not probs:
            raise ValidationError("point-voting vector must be non-empty")
        if any(a < b for a, b in zip(probs, probs[1:])):
            raise ValidationError("rank probabilities must be non-increasing")
        if probs[-1] < 0.0:
            raise ValidationError("rank probabilities must be non-negative")
        total = 0.0
        for p in probs:
            total += p
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValidationError(f"rank probabilities sum to {total}, expected 1")

    @property
    def m(self) -> int:
        return len(self.probs)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=np.float64)


def plurality_scores(m: int) -> ScoringVector:
    return ScoringVector((1.0,) + (0.0,) * (m - 1))


def veto_scores(m: int) -> ScoringVector:
    if m < 2:
        raise ValidationError("veto needs at least two alternatives")
    return ScoringVector((1.0,) * (m - 1) + (0.0,))


def borda_scores(m: int) -> ScoringVector:
    return ScoringVector(tuple(float(m - 1 - t) for t in range(m)))


def harmonic_scores(m: int) -> ScoringVector:
    return ScoringVector(tuple(1.0 / (t + 1) for t in range(m)))


def uniform_point_voting(m: int) -> PointVotingVector:
    return PointVotingVector((1.0 / m,) * m)


def normalize_scoring(s: ScoringVector) -> PointVotingVector:
    """Turn a scoring vector into rank probabilities p_t = s_t / sum(s)."""
    total = 0.0
    for v in s.scores:
        total += v
    if total <= 0.0:
        raise ValidationError("cannot normalize a zero-sum scoring vector")
    return PointVotingVector(tuple(v / total for v in s.scores))


def mix_point_voting(vectors, weights) -> PointVotingVector:
    """Convex combination of point-voting vectors, entrywise.

    Running scheme j with probability weights[j] is itself a point-voting
    scheme with rank probabilities sum_j weights[j] * p_{j,t}.
    """
    vectors = list(vectors)
    weights = [float(w) for w in weights]
    if not vectors or len(vectors) != len(weights):
        raise ValidationError("need one weight per vector")
    m = vectors[0].m
    if any(v.m != m for v in vectors):
        raise ValidationError("all vectors must have the same length")
    if any(w < 0.0 for w in weights):
        raise ValidationError("weights must be non-negative")
    total = 0.0
    for w in weights:
        total += w
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise ValidationError(f"weights sum to {total}, expected 1")
    mixed = []
    for t in range(m):
        acc = 0.0
        for v, w in zip(vectors, weights):
            acc += w * v.probs[t]
        mixed.append(acc)
    return PointVotingVector(tuple(mixed))


def bchlps_vector(m: int) -> PointVotingVector:
    """Half uniform, half normalized-harmonic rank probabilities."""
    return mix_point_voting(
        (uniform_point_voting(m), normalize_scoring(harmonic_scores(m))),
        (0.5, 0.5),
    )


def argmax_tiebreak(totals, tie: TieOrder) -> int:
    """Index of the maximum entry; exact-value ties go to higher priority."""
    best = -1
    best_val = None
    for a in tie.order:
        v = totals[a]
        if best_val is None or v > best_val:
            best, best_val = a, v
    return int(best)


def scoring_winner(rankings, s: ScoringVector, tie: TieOrder) -> int:
    """Winner under a positional scoring rule.

    Args:
        rankings: one permutation row (best to worst) per agent.
        s: the scoring vector, same length as the rows.
        tie: priority used to break exact score ties.
    """
    rankings = np.asarray(rankings, dtype=np.intp)
    if rankings.ndim != 2 or rankings.shape[0] == 0:
        raise ValidationError("scoring_winner needs at least one ranking")
    if s.m != rankings.shape[1]:
        raise ValidationError("scoring vector length must match the rankings")
    totals = kernels.score_totals(rankings, s.as_array())
    return argmax_tiebreak(totals, tie)


def range_voting_winner(valuations, tie: TieOrder) -> int:
    """The alternative with maximum total valuation (ties by priority)."""
    valuations = np.asarray(valuations, dtype=np.float64)
    if valuations.ndim != 2 or valuations.shape[0] == 0:
        raise ValidationError("range_voting_winner needs at least one agent")
    return argmax_tiebreak(kernels.welfare_totals(valuations), tie)


def first_dictator(rankings) -> int:
    """Top-ranked alternative of the first agent."""
    rankings = np.asarray(rankings, dtype=np.intp)
    if rankings.ndim != 2 or rankings.shape[0] == 0:
        raise ValidationError("first_dictator needs at least one agent")
    return int(rankings[0, 0])


def point_voting_distribution(rankings, p: PointVotingVector) -> Lottery:
    """Winner distribution of a point-voting scheme on a profile.

    Pr[a] = (1/n) * sum_i p_{rank of a under agent i}.
    """
    rankings = np.asarray(rankings, dtype=np.intp)
    if rankings.ndim != 2 or rankings.shape[0] == 0:
        raise ValidationError("point_voting_distribution needs at least one agent")
    if p.m != rankings.shape[1]:
        raise ValidationError("vector length must match the rankings")
    totals = kernels.score_totals(rankings, p.as_array())
    return Lottery(totals / rankings.shape[0])


@dataclass(frozen=True)
class RuleDescriptor:
    """Registry metadata for one rule.

    delta is the rule's exact centralized distortion when a constant
    bound is known (range voting: 1); None otherwise.
    """

    name: str
    info: str  # "cardinal" | "ordinal"
    determinism: str  # "deterministic" | "randomized"
    unanimous: bool
    delta: float | None = None

    def __post_init__(self):
        if self.info not in ("cardinal", "ordinal"):
            raise ValidationError(f"bad info kind {self.info!r}")
        if self.determinism not in ("deterministic", "randomized"):
            raise ValidationError(f"bad determinism {self.determinism!r}")
        if self.delta is not None and self.delta < 1.0:
            raise ValidationError("a distortion bound cannot be below 1")


class Rule:
    """A rule descriptor bound to its implementation.

    Deterministic rules implement ``winner(view, tie)``; randomized ones
    are point-voting schemes and implement ``distribution(view)`` through
    a rank-probability vector built per alternative count.
    """

    def __init__(self, descriptor: RuleDescriptor, *, scoring_fn=None, winner_fn=None, vector_fn=None):
        if descriptor.determinism == "deterministic":
            if (scoring_fn is None) == (winner_fn is None):
                raise ValidationError("deterministic rules need scoring_fn or winner_fn")
        elif vector_fn is None:
            raise ValidationError("randomized rules need vector_fn")
        self.descriptor = descriptor
        self._scoring_fn = scoring_fn
        self._winner_fn = winner_fn
        self._vector_fn = vector_fn

    def __repr__(self):
        return f"Rule({self.descriptor.name!r})"

    @property
    def name(self) -> str:
        return self.descriptor.name

    @property
    def is_deterministic(self) -> bool:
        return self.descriptor.determinism == "deterministic"

    @property
    def uses_rankings(self) -> bool:
        return self.descriptor.info == "ordinal"

    def vector(self, m: int) -> PointVotingVector:
        if self._vector_fn is None:
            raise ValidationError(f"rule {self.name!r} is not a point-voting scheme")
        return self._vector_fn(m)

    def winner(self, view: DistrictView, tie: TieOrder) -> int:
        if not self.is_deterministic:
            raise ValidationError(f"rule {self.name!r} is randomized; use distribution()")
        if self._winner_fn is not None:
            return self._winner_fn(view, tie)
        if view.rankings is None:
            raise ValidationError(f"rule {self.name!r} needs rankings in the district view")
        return scoring_winner(view.rankings, self._scoring_fn(view.m), tie)

    def distribution(self, view: DistrictView) -> Lottery:
        if self.is_deterministic:
            raise ValidationError(f"rule {self.name!r} is deterministic; use winner()")
        if view.rankings is None:
            raise ValidationError(f"rule {self.name!r} needs rankings in the district view")
        return point_voting_distribution(view.rankings, self._vector_fn(view.m))


def _range_winner(view: DistrictView, tie: TieOrder) -> int:
    return range_voting_winner(view.valuations, tie)


def _first_winner(view: DistrictView, tie: TieOrder) -> int:
    if view.rankings is None:
        raise ValidationError("dictatorship needs rankings in the district view")
    return first_dictator(view.rankings)


def _build_registry() -> dict[str, Rule]:
    registry: dict[str, Rule] = {}

    def det(name, info, unanimous, delta=None, **impl):
        registry[name] = Rule(RuleDescriptor(name, info, "deterministic", unanimous, delta), **impl)

    def rand(name, unanimous, vector_fn):
        registry[name] = Rule(
            RuleDescriptor(name, "ordinal", "randomized", unanimous), vector_fn=vector_fn
        )

    det("plurality", "ordinal", True, scoring_fn=plurality_scores)
    # veto is not unanimous: a common top can still tie with a never-vetoed rival
    det("veto", "ordinal", False, scoring_fn=veto_scores)
    det("borda", "ordinal", True, scoring_fn=borda_scores)
    det("harmonic", "ordinal", True, scoring_fn=harmonic_scores)
    det("range", "cardinal", True, delta=1.0, winner_fn=_range_winner)
    det("first", "ordinal", True, winner_fn=_first_winner)

    rand("prop-plurality", True, lambda m: normalize_scoring(plurality_scores(m)))
    rand("prop-veto", False, lambda m: normalize_scoring(veto_scores(m)))
    rand("prop-borda", False, lambda m: normalize_scoring(borda_scores(m)))
    rand("prop-harmonic", False, lambda m: normalize_scoring(harmonic_scores(m)))
    rand("bchlps", False, bchlps_vector)
    rand("uniform-random", False, uniform_point_voting)
    return registry


RULES: dict[str, Rule] = _build_registry()


def rule_names() -> list[str]:
    return sorted(RULES)


def get_rule(rule) -> Rule:
    """Resolve a rule identifier (or pass a Rule instance through)."""
    if isinstance(rule, Rule):
        return rule
    try:
        return RULES[rule]
    except KeyError:
        raise UnknownRuleError(
            f"unknown rule {rule!r}; valid identifiers: {', '.join(rule_names())}"
        ) from None
