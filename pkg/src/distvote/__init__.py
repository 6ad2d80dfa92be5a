"""Distributed single-winner voting and its utilitarian distortion.

Agents with unit-sum valuations are partitioned into districts; an
in-district rule elects one representative per district and an
over-districts rule picks the final winner. This package evaluates such
mechanisms exactly or by sampling, measures their distortion against
the welfare-optimal alternative, constructs worst-case instances, and
ships an experiment harness over synthetic and ratings data.
"""

from .analysis import (
    DistortionReport,
    ManipulationVerdict,
    check_strategyproof,
    distortion_empirical,
    distortion_exact,
    expected_welfare,
    optimal_alternative,
    social_welfare,
    welfare_vector,
)
from .core import (
    Districts,
    DistrictView,
    Instance,
    Lottery,
    OrdinalProfile,
    TieOrder,
    ValidationError,
    build_instance,
    derive_ordinal,
    is_consistent,
    normalize_unit_sum,
    restrict_to_district,
)
from .kernels import backend_name
from .mechanisms import (
    MechanismSpec,
    RepresentativeProfile,
    UnsupportedCombinationError,
    district_representatives,
    parse_mechanism,
    plurality_over,
    run_deterministic,
    sample_winner,
    sample_winners,
    winner_distribution,
)
from .rules import (
    PointVotingVector,
    Rule,
    RuleDescriptor,
    ScoringVector,
    UnknownRuleError,
    bchlps_vector,
    borda_scores,
    first_dictator,
    get_rule,
    harmonic_scores,
    mix_point_voting,
    normalize_scoring,
    plurality_scores,
    point_voting_distribution,
    range_voting_winner,
    rule_names,
    scoring_winner,
    uniform_point_voting,
    veto_scores,
)

__version__ = "0.1.0"
