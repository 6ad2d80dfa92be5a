"""Distributed mechanisms: an in-district rule composed with an over-districts rule.

Step 1 holds a local election in every district and yields one
representative per district (a lottery when the in-rule is randomized).
Step 2 maps the representatives to a final winner:

    plurality     most-represented alternative, ties by priority
    uniform       a district drawn uniformly at random
    proportional  district d drawn with probability n_d / n
    first         district 0's representative

Mechanisms are addressable as "<over>-of-<in>" strings, e.g.
"plurality-of-plurality", "uniform-of-range", "proportional-of-bchlps".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    Instance,
    Lottery,
    OrdinalProfile,
    TieOrder,
    ValidationError,
    derive_ordinal,
    restrict_to_district,
)
from .rules import Rule, argmax_tiebreak, get_rule

OVER_RULES = ("plurality", "uniform", "proportional", "first")
MODES = ("exact", "montecarlo")


class UnsupportedCombinationError(ValidationError):
    """The requested combination has no exact winner distribution."""


@dataclass(frozen=True)
class MechanismSpec:
    """A named pairing of in-district rule, over-districts rule and tie order.

    ``tie=None`` means index order for whatever instance the spec is
    applied to. ``mode`` records how the spec is meant to be evaluated;
    a plurality over-rule on top of a randomized in-rule is only
    evaluable by sampling (mode "montecarlo").
    """

    in_rule: str | Rule
    over_rule: str
    tie: TieOrder | None = None
    mode: str = "exact"

    def __post_init__(self):
        if self.over_rule not in OVER_RULES:
            raise ValidationError(
                f"unknown over-rule {self.over_rule!r}; valid: {', '.join(OVER_RULES)}"
            )
        if self.mode not in MODES:
            raise ValidationError(f"unknown mode {self.mode!r}; valid: {', '.join(MODES)}")
        get_rule(self.in_rule)  # fail fast on unknown identifiers

    @property
    def name(self) -> str:
        return f"{self.over_rule}-of-{get_rule(self.in_rule).name}"

    def is_exactly_evaluable(self) -> bool:
        return get_rule(self.in_rule).is_deterministic or self.over_rule != "plurality"


def parse_mechanism(text: str, tie: TieOrder | None = None, mode: str = "exact") -> MechanismSpec:
    """Build a spec from an "<over>-of-<in>" identifier."""
    over, sep, inner = text.partition("-of-")
    if not sep or not inner:
        raise ValidationError(
            f"mechanism {text!r} is not of the form '<over>-of-<in>' "
            f"with over in {{{', '.join(OVER_RULES)}}}"
        )
    return MechanismSpec(in_rule=inner, over_rule=over, tie=tie, mode=mode)


@dataclass(frozen=True, eq=False)
class RepresentativeProfile:
    """One representative lottery per district (degenerate when the
    in-rule is deterministic)."""

    lotteries: tuple[Lottery, ...]

    @property
    def k(self) -> int:
        return len(self.lotteries)


def _resolve_tie(spec: MechanismSpec, m: int) -> TieOrder:
    if spec.tie is None:
        return TieOrder.index(m)
    if spec.tie.m != m:
        raise ValidationError(f"tie order has {spec.tie.m} entries, instance has {m}")
    return spec.tie


def _district_views(instance: Instance, rule: Rule, tie: TieOrder, profile):
    if profile is None and rule.uses_rankings:
        profile = derive_ordinal(instance, tie)
    return [restrict_to_district(instance, d, profile) for d in range(instance.k)]


def district_representatives(
    instance: Instance, spec: MechanismSpec, profile: OrdinalProfile | None = None
) -> RepresentativeProfile:
    """Run step 1: the local election of every district.

    Pass ``profile`` to reuse rankings already derived for the instance
    (they do not depend on the partition).
    """
    rule = get_rule(spec.in_rule)
    tie = _resolve_tie(spec, instance.m)
    views = _district_views(instance, rule, tie, profile)
    if rule.is_deterministic:
        lotteries = tuple(Lottery.degenerate(rule.winner(v, tie), instance.m) for v in views)
    else:
        lotteries = tuple(rule.distribution(v) for v in views)
    return RepresentativeProfile(lotteries)


def plurality_over(reps, tie: TieOrder) -> int:
    """The alternative representing the most districts, ties by priority."""
    reps = list(reps)
    if not reps:
        raise ValidationError("plurality_over needs at least one representative")
    counts = np.bincount(np.asarray(reps, dtype=np.intp), minlength=tie.m)
    return argmax_tiebreak(counts, tie)


def run_deterministic(
    instance: Instance, spec: MechanismSpec, profile: OrdinalProfile | None = None
) -> int:
    """Final winner of a fully deterministic mechanism.

    Requires a deterministic in-rule and over-rule in {plurality, first}.
    """
    rule = get_rule(spec.in_rule)
    if not rule.is_deterministic:
        raise UnsupportedCombinationError(
            f"in-rule {rule.name!r} is randomized; use winner_distribution or sample_winner"
        )
    if spec.over_rule not in ("plurality", "first"):
        raise UnsupportedCombinationError(
            f"over-rule {spec.over_rule!r} is randomized; use winner_distribution"
        )
    tie = _resolve_tie(spec, instance.m)
    views = _district_views(instance, rule, tie, profile)
    winners = [rule.winner(v, tie) for v in views]
    if spec.over_rule == "first":
        return winners[0]
    return plurality_over(winners, tie)


def winner_distribution(
    instance: Instance, spec: MechanismSpec, profile: OrdinalProfile | None = None
) -> Lottery:
    """Exact distribution of the mechanism's final winner.

    With a randomized in-rule the distribution factorizes per district
    for the uniform, proportional and first over-rules; a plurality
    over-rule would need the joint distribution over all representative
    tuples and is only available through sampling.
    """
    rule = get_rule(spec.in_rule)
    tie = _resolve_tie(spec, instance.m)
    m, k, n = instance.m, instance.k, instance.n
    views = _district_views(instance, rule, tie, profile)

    if rule.is_deterministic:
        winners = [rule.winner(v, tie) for v in views]
        if spec.over_rule == "plurality":
            return Lottery.degenerate(plurality_over(winners, tie), m)
        if spec.over_rule == "first":
            return Lottery.degenerate(winners[0], m)
        probs = [0.0] * m
        if spec.over_rule == "uniform":
            for w in winners:
                probs[w] += 1.0
            probs = [p / k for p in probs]
        else:  # proportional
            for w, g in zip(winners, instance.districts.groups):
                probs[w] += len(g) / n
        return Lottery(np.asarray(probs))

    if spec.over_rule == "plurality":
        raise UnsupportedCombinationError(
            "plurality over a randomized in-rule has no factorized exact distribution; "
            "evaluate in montecarlo mode (sample_winner / distortion_empirical)"
        )
    lotteries = [rule.distribution(v) for v in views]
    if spec.over_rule == "first":
        return lotteries[0]
    acc = [0.0] * m
    if spec.over_rule == "uniform":
        for lot in lotteries:
            p = lot.probs
            for a in range(m):
                acc[a] += p[a]
        acc = [x / k for x in acc]
    else:  # proportional
        for lot, g in zip(lotteries, instance.districts.groups):
            w = len(g) / n
            p = lot.probs
            for a in range(m):
                acc[a] += w * p[a]
    return Lottery(np.asarray(acc))


def sample_winner(
    instance: Instance,
    spec: MechanismSpec,
    rng: np.random.Generator,
    profile: OrdinalProfile | None = None,
) -> int:
    """One sampled final winner.

    Realizes every district lottery in district order, then applies the
    over-rule (drawing its district when randomized). A fixed generator
    state therefore reproduces the same winner sequence.
    """
    rule = get_rule(spec.in_rule)
    tie = _resolve_tie(spec, instance.m)
    views = _district_views(instance, rule, tie, profile)
    if rule.is_deterministic:
        reps = [rule.winner(v, tie) for v in views]
    else:
        reps = [int(rng.choice(instance.m, p=rule.distribution(v).probs)) for v in views]
    if spec.over_rule == "plurality":
        return plurality_over(reps, tie)
    if spec.over_rule == "first":
        return reps[0]
    if spec.over_rule == "uniform":
        return reps[int(rng.integers(instance.k))]
    weights = [len(g) / instance.n for g in instance.districts.groups]
    return reps[int(rng.choice(instance.k, p=weights))]


def sample_winners(
    instance: Instance,
    spec: MechanismSpec,
    rng: np.random.Generator,
    size: int,
    profile: OrdinalProfile | None = None,
) -> np.ndarray:
    """Batch of sampled winners (district draws vectorized per district).

    Consumes the generator differently from repeated ``sample_winner``
    calls but is deterministic for a fixed seed; this is the Monte Carlo
    path used by the experiment harness.
    """
    if size < 1:
        raise ValidationError("size must be positive")
    rule = get_rule(spec.in_rule)
    tie = _resolve_tie(spec, instance.m)
    k, m = instance.k, instance.m
    views = _district_views(instance, rule, tie, profile)
    reps = np.empty((k, size), dtype=np.intp)
    for d, v in enumerate(views):
        if rule.is_deterministic:
            reps[d] = rule.winner(v, tie)
        else:
            reps[d] = rng.choice(m, size=size, p=rule.distribution(v).probs)
    if spec.over_rule == "first":
        return reps[0].copy()
    if spec.over_rule == "uniform":
        picked = rng.integers(0, k, size=size)
        return reps[picked, np.arange(size)]
    if spec.over_rule == "proportional":
        weights = np.asarray([len(g) / instance.n for g in instance.districts.groups])
        picked = rng.choice(k, size=size, p=weights)
        return reps[picked, np.arange(size)]
    out = np.empty(size, dtype=np.intp)
    for s in range(size):
        out[s] = plurality_over(reps[:, s], tie)
    return out
