"""Social welfare, distortion, and manipulation checking.

Distortion of a mechanism on an instance is the optimal social welfare
divided by the (expected) social welfare of the mechanism's winner; 1 is
perfect, +inf means the mechanism puts all probability on worthless
alternatives while a valuable one exists.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import Instance, Lottery, TieOrder, ValidationError, derive_ordinal
from .mechanisms import MechanismSpec, sample_winners, winner_distribution
from .rules import argmax_tiebreak, get_rule

UTILITY_TOL = 1e-12
EXHAUSTIVE_MAX_M = 6


def welfare_vector(instance: Instance) -> np.ndarray:
    """Social welfare of every alternative (column sums of the table)."""
    return kernels.welfare_totals(instance.valuations)


def social_welfare(instance: Instance, a: int) -> float:
    """Total value the agents assign to alternative a."""
    if not 0 <= a < instance.m:
        raise IndexError(f"alternative {a} out of range for m={instance.m}")
    return float(welfare_vector(instance)[a])


def expected_welfare(instance: Instance, lottery: Lottery) -> float:
    """Expected social welfare of a lottery over the alternatives."""
    if lottery.m != instance.m:
        raise ValidationError(f"lottery over {lottery.m} alternatives, instance has {instance.m}")
    wv = welfare_vector(instance)
    total = 0.0
    for a in range(instance.m):
        total += lottery.probs[a] * wv[a]
    return float(total)


def optimal_alternative(instance: Instance, tie: TieOrder | None = None) -> tuple[int, float]:
    """The welfare-maximizing alternative and its welfare, ties by priority."""
    if tie is None:
        tie = TieOrder.index(instance.m)
    wv = welfare_vector(instance)
    best = argmax_tiebreak(wv, tie)
    return best, float(wv[best])


@dataclass(frozen=True)
class DistortionReport:
    """Outcome of one distortion evaluation on one instance."""

    optimal_alt: int
    optimal_sw: float
    mechanism_expected_sw: float
    ratio: float  # math.inf when the mechanism's welfare is 0


def _ratio(optimal_sw: float, mechanism_sw: float) -> float:
    if mechanism_sw > 0.0:
        return optimal_sw / mechanism_sw
    return math.inf if optimal_sw > 0.0 else 1.0


def distortion_exact(
    instance: Instance, spec: MechanismSpec, profile=None
) -> DistortionReport:
    """Distortion from the mechanism's exact winner distribution."""
    tie = spec.tie if spec.tie is not None else TieOrder.index(instance.m)
    best, best_sw = optimal_alternative(instance, tie)
    lottery = winner_distribution(instance, spec, profile)
    esw = expected_welfare(instance, lottery)
    return DistortionReport(best, best_sw, esw, _ratio(best_sw, esw))


def distortion_empirical(
    instance: Instance,
    spec: MechanismSpec,
    samples: int,
    rng: np.random.Generator,
    profile=None,
) -> DistortionReport:
    """Distortion with the mechanism's welfare estimated by sampling.

    The expected welfare is the sample mean of the winners' welfare over
    ``samples`` independent runs of the mechanism; the optimum stays
    exact.
    """
    if samples < 1:
        raise ValidationError("samples must be positive")
    tie = spec.tie if spec.tie is not None else TieOrder.index(instance.m)
    best, best_sw = optimal_alternative(instance, tie)
    winners = sample_winners(instance, spec, rng, samples, profile)
    wv = welfare_vector(instance)
    esw = float(np.mean(wv[winners]))
    return DistortionReport(best, best_sw, esw, _ratio(best_sw, esw))


@dataclass(frozen=True)
class ManipulationVerdict:
    """Result of probing one agent's incentive to misreport.

    ``counterexample`` is the profitable report (a ranking tuple or a
    valuation row) and is present exactly when the best deviation beats
    truth by more than ``UTILITY_TOL``.
    """

    agent: int
    truthful_utility: float
    best_deviation_utility: float
    counterexample: tuple | None

    @property
    def profitable(self) -> bool:
        return self.counterexample is not None


def _expected_utility(values_row: np.ndarray, lottery: Lottery) -> float:
    total = 0.0
    for a in range(lottery.m):
        total += values_row[a] * lottery.probs[a]
    return float(total)


def check_strategyproof(
    instance: Instance,
    spec: MechanismSpec,
    agent: int,
    mode: str = "exhaustive-ordinal",
    samples: int = 200,
    rng: np.random.Generator | None = None,
) -> ManipulationVerdict:
    """Search one agent's report space for a profitable deviation.

    Modes:
        "exhaustive-ordinal": try all m! rankings of the agent (m <= 6;
            the in-rule must be ordinal). A clean verdict is a proof of
            non-manipulability for this agent on this instance.
        "sampled-cardinal": try ``samples`` unit-sum valuation rows drawn
            uniformly from the simplex (needs ``rng``). A clean verdict
            only means no counterexample was found.

    Utilities are expectations under the exact winner distribution, so
    verdicts are deterministic.
    """
    if not 0 <= agent < instance.n:
        raise IndexError(f"agent {agent} out of range for n={instance.n}")
    rule = get_rule(spec.in_rule)
    tie = spec.tie if spec.tie is not None else TieOrder.index(instance.m)
    truth = instance.valuations[agent]
    profile = derive_ordinal(instance, tie)
    truthful_u = _expected_utility(truth, winner_distribution(instance, spec, profile))

    best_u = truthful_u
    best_report: tuple | None = None

    if mode == "exhaustive-ordinal":
        if not rule.uses_rankings:
            raise ValidationError(
                f"in-rule {rule.name!r} reads valuations; use mode='sampled-cardinal'"
            )
        if instance.m > EXHAUSTIVE_MAX_M:
            raise ValidationError(
                f"exhaustive mode enumerates m! rankings; m={instance.m} exceeds {EXHAUSTIVE_MAX_M}"
            )
        for perm in itertools.permutations(range(instance.m)):
            deviated = profile.replace_row(agent, perm)
            u = _expected_utility(truth, winner_distribution(instance, spec, deviated))
            if u > best_u:
                best_u, best_report = u, perm
    elif mode == "sampled-cardinal":
        if rng is None:
            raise ValidationError("sampled-cardinal mode needs an rng")
        reports = rng.dirichlet(np.ones(instance.m), size=samples)
        for row in reports:
            vals = np.array(instance.valuations)
            vals[agent] = row
            deviated = Instance(vals, instance.districts)
            u = _expected_utility(truth, winner_distribution(deviated, spec))
            if u > best_u:
                best_u, best_report = u, tuple(float(x) for x in row)
    else:
        raise ValidationError(
            f"unknown mode {mode!r}; valid: 'exhaustive-ordinal', 'sampled-cardinal'"
        )

    if best_u <= truthful_u + UTILITY_TOL:
        best_report = None
    return ManipulationVerdict(agent, truthful_u, best_u, best_report)
