import numpy as np
import pytest

from distvote.core import (
    Districts,
    Instance,
    TieOrder,
    ValidationError,
    build_instance,
    derive_ordinal,
    restrict_to_district,
)
from distvote.mechanisms import (
    MechanismSpec,
    UnsupportedCombinationError,
    district_representatives,
    parse_mechanism,
    plurality_over,
    run_deterministic,
    sample_winner,
    sample_winners,
    winner_distribution,
)
from distvote.rules import get_rule, point_voting_distribution
from distvote.adversarial import gen_unanimous_lb

from conftest import random_instance


class TestParseMechanism:
    def test_parses_over_and_in(self):
        spec = parse_mechanism("plurality-of-plurality")
        assert (spec.over_rule, spec.name) == ("plurality", "plurality-of-plurality")
        assert parse_mechanism("uniform-of-range").name == "uniform-of-range"
        assert parse_mechanism("proportional-of-bchlps").name == "proportional-of-bchlps"
        assert parse_mechanism("first-of-first").name == "first-of-first"

    def test_rejects_missing_separator(self):
        with pytest.raises(ValidationError):
            parse_mechanism("borda")

    def test_rejects_unknown_over_rule(self):
        with pytest.raises(ValidationError):
            parse_mechanism("median-of-borda")

    def test_rejects_unknown_in_rule(self):
        with pytest.raises(ValidationError):
            parse_mechanism("uniform-of-approval")

    def test_exact_evaluability(self):
        assert parse_mechanism("plurality-of-borda").is_exactly_evaluable()
        assert parse_mechanism("uniform-of-bchlps").is_exactly_evaluable()
        assert not parse_mechanism("plurality-of-bchlps").is_exactly_evaluable()


class TestDistrictRepresentatives:
    def test_range_single_agent_degenerate(self):
        inst = build_instance([[1.0, 0.0]], [[0]])
        reps = district_representatives(inst, parse_mechanism("uniform-of-range"))
        assert reps.k == 1
        assert reps.lotteries[0].probs.tolist() == [1.0, 0.0]

    def test_unanimous_top_makes_point_voting_degenerate(self):
        # p = (1, 0, 0): everyone tops alternative 2
        vals = [[0.1, 0.2, 0.7], [0.0, 0.3, 0.7]]
        inst = build_instance(vals, [[0, 1]])
        reps = district_representatives(inst, parse_mechanism("uniform-of-prop-plurality"))
        assert reps.lotteries[0].probs.tolist() == [0.0, 0.0, 1.0]

    def test_uniform_random_gives_uniform_lotteries(self):
        rng = np.random.default_rng(2)
        inst = random_instance(rng)
        reps = district_representatives(inst, parse_mechanism("uniform-of-uniform-random"))
        for lot in reps.lotteries:
            assert np.allclose(lot.probs, 1.0 / inst.m, atol=1e-15)


class TestPluralityOver:
    def test_majority(self):
        assert plurality_over((1, 1, 0), TieOrder.index(2)) == 1

    def test_tie_break(self):
        assert plurality_over((0, 1), TieOrder((1, 0))) == 1

    def test_unanimity(self):
        assert plurality_over((2, 2, 2), TieOrder.index(3)) == 2

    def test_empty(self):
        with pytest.raises(ValidationError):
            plurality_over((), TieOrder.index(2))


class TestRunDeterministic:
    def test_identical_districts(self):
        vals = [[0.2, 0.8], [0.3, 0.7], [0.2, 0.8], [0.3, 0.7]]
        inst = build_instance(vals, [[0, 1], [2, 3]])
        assert run_deterministic(inst, parse_mechanism("plurality-of-plurality")) == 1

    def test_first_of_first_is_double_dictatorship(self):
        vals = [[0.1, 0.2, 0.7], [0.8, 0.1, 0.1], [0.1, 0.8, 0.1]]
        inst = build_instance(vals, [[0, 1], [2]])
        assert run_deterministic(inst, parse_mechanism("first-of-first")) == 2

    def test_unanimous_construction_elects_first_alternative(self):
        # unanimous districts force distinct representatives; index ties pick 0
        inst = gen_unanimous_lb(k=3, m=4, lam=2, eps=0.01)
        assert run_deterministic(inst, parse_mechanism("plurality-of-range")) == 0

    def test_randomized_in_rule_rejected(self):
        inst = build_instance([[1.0, 0.0]], [[0]])
        with pytest.raises(UnsupportedCombinationError):
            run_deterministic(inst, parse_mechanism("plurality-of-bchlps"))

    def test_randomized_over_rule_rejected(self):
        inst = build_instance([[1.0, 0.0]], [[0]])
        with pytest.raises(UnsupportedCombinationError):
            run_deterministic(inst, parse_mechanism("uniform-of-range"))


class TestWinnerDistribution:
    def test_uniform_over_two_districts(self):
        vals = [[0.9, 0.1], [0.1, 0.9]]
        inst = build_instance(vals, [[0], [1]])
        lot = winner_distribution(inst, parse_mechanism("uniform-of-range"))
        assert lot.probs.tolist() == [0.5, 0.5]

    def test_proportional_weights_by_district_size(self):
        vals = [[0.9, 0.1], [0.1, 0.9], [0.1, 0.9], [0.1, 0.9]]
        inst = build_instance(vals, [[0], [1, 2, 3]])
        lot = winner_distribution(inst, parse_mechanism("proportional-of-range"))
        assert lot.probs.tolist() == [0.25, 0.75]

    def test_first_over_takes_district_zero(self):
        vals = [[0.9, 0.1], [0.1, 0.9]]
        inst = build_instance(vals, [[0], [1]])
        lot = winner_distribution(inst, parse_mechanism("first-of-range"))
        assert lot.probs.tolist() == [1.0, 0.0]

    def test_deterministic_spec_gives_degenerate_lottery(self):
        rng = np.random.default_rng(4)
        inst = random_instance(rng)
        spec = parse_mechanism("plurality-of-borda")
        lot = winner_distribution(inst, spec)
        assert lot.probs[run_deterministic(inst, spec)] == 1.0

    def test_plurality_over_randomized_requires_montecarlo(self):
        inst = build_instance([[1.0, 0.0]], [[0]])
        with pytest.raises(UnsupportedCombinationError, match="montecarlo"):
            winner_distribution(inst, parse_mechanism("plurality-of-prop-borda"))

    def test_proportional_point_voting_matches_centralized(self):
        # the distributed split must not change the distribution at all,
        # including on asymmetric districts
        rng = np.random.default_rng(100)
        worst = 0.0
        for _ in range(60):
            inst = random_instance(rng, n_max=30, m_max=6)
            profile = derive_ordinal(inst)
            for name in ("prop-borda", "bchlps", "prop-plurality"):
                lot = winner_distribution(inst, parse_mechanism(f"proportional-of-{name}"))
                central = point_voting_distribution(
                    profile.rankings, get_rule(name).vector(inst.m)
                )
                worst = max(worst, float(np.max(np.abs(lot.probs - central.probs))))
        assert worst <= 1e-12

    def test_uniform_over_point_voting_averages_districts(self):
        rng = np.random.default_rng(101)
        inst = random_instance(rng, n_max=12, m_max=4)
        spec = parse_mechanism("uniform-of-bchlps")
        reps = district_representatives(inst, spec)
        manual = np.mean([lot.probs for lot in reps.lotteries], axis=0)
        lot = winner_distribution(inst, spec)
        assert np.max(np.abs(lot.probs - manual)) <= 1e-12


class TestSampleWinner:
    def test_deterministic_spec_equals_run_deterministic(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            inst = random_instance(rng, n_max=12, m_max=4)
            spec = parse_mechanism("plurality-of-plurality")
            expected = run_deterministic(inst, spec)
            assert sample_winner(inst, spec, rng) == expected

    def test_fixed_seed_reproducible(self):
        inst = random_instance(np.random.default_rng(10), n_max=12, m_max=4)
        spec = parse_mechanism("uniform-of-bchlps")
        seq_a = [sample_winner(inst, spec, np.random.default_rng(55)) for _ in range(20)]
        seq_b = [sample_winner(inst, spec, np.random.default_rng(55)) for _ in range(20)]
        assert seq_a == seq_b

    def test_batch_sampler_reproducible(self):
        inst = random_instance(np.random.default_rng(10), n_max=12, m_max=4)
        spec = parse_mechanism("proportional-of-prop-veto")
        a = sample_winners(inst, spec, np.random.default_rng(7), 500)
        b = sample_winners(inst, spec, np.random.default_rng(7), 500)
        assert np.array_equal(a, b)

    def test_empirical_frequency_matches_distribution(self):
        inst = random_instance(np.random.default_rng(12), n_max=15, m_max=5)
        spec = parse_mechanism("uniform-of-prop-borda")
        exact = winner_distribution(inst, spec).probs
        size = 20000
        winners = sample_winners(inst, spec, np.random.default_rng(99), size)
        freq = np.bincount(winners, minlength=inst.m) / size
        se = np.sqrt(exact * (1 - exact) / size)
        assert np.all(np.abs(freq - exact) <= 3 * se + 1e-9)

    def test_plurality_over_randomized_sampled(self):
        inst = build_instance([[0.5, 0.5], [0.5, 0.5]], [[0], [1]])
        spec = MechanismSpec("prop-plurality", "plurality", mode="montecarlo")
        w = sample_winner(inst, spec, np.random.default_rng(0))
        assert w in (0, 1)


class TestStructuralProperties:
    def test_duplicated_district_same_representative(self):
        rng = np.random.default_rng(21)
        vals = rng.dirichlet(np.ones(4), size=3)
        doubled = np.vstack([vals, vals])
        inst = Instance(doubled, Districts(((0, 1, 2), (3, 4, 5))))
        for mech in ("uniform-of-range", "uniform-of-plurality", "uniform-of-bchlps"):
            reps = district_representatives(inst, parse_mechanism(mech))
            assert np.array_equal(reps.lotteries[0].probs, reps.lotteries[1].probs)

    def test_district_permutation_leaves_uniform_over_unchanged(self):
        rng = np.random.default_rng(22)
        vals = rng.dirichlet(np.ones(3), size=6)
        inst_a = Instance(vals, Districts(((0, 1), (2, 3, 4), (5,))))
        inst_b = Instance(vals, Districts(((5,), (0, 1), (2, 3, 4))))
        for mech in ("uniform-of-plurality", "uniform-of-bchlps"):
            lot_a = winner_distribution(inst_a, parse_mechanism(mech))
            lot_b = winner_distribution(inst_b, parse_mechanism(mech))
            assert np.max(np.abs(lot_a.probs - lot_b.probs)) <= 1e-12

    def test_single_district_collapses_to_in_rule(self):
        rng = np.random.default_rng(23)
        vals = rng.dirichlet(np.ones(4), size=7)
        inst = Instance(vals, Districts.single(7))
        profile = derive_ordinal(inst)
        for over in ("plurality", "uniform", "proportional", "first"):
            spec = MechanismSpec("borda", over)
            lot = winner_distribution(inst, spec)
            direct = get_rule("borda").winner(
                restrict_to_district(inst, 0, profile), TieOrder.index(4)
            )
            assert lot.probs[direct] == 1.0
            rand_spec = MechanismSpec("bchlps", over)
            if rand_spec.is_exactly_evaluable():
                lot = winner_distribution(inst, rand_spec)
                central = point_voting_distribution(profile.rankings, get_rule("bchlps").vector(4))
                assert np.max(np.abs(lot.probs - central.probs)) <= 1e-12

    def test_unanimity_propagates_through_every_over_rule(self):
        rng = np.random.default_rng(24)
        n, m, a = 8, 4, 2
        rest = rng.dirichlet(np.ones(m - 1), size=n) * 0.4
        vals = np.insert(rest, a, 0.6, axis=1)
        inst = Instance(vals, Districts(((0, 1, 2), (3, 4), (5, 6, 7))))
        unanimous = [n for n in ("plurality", "borda", "harmonic", "range", "first", "prop-plurality")]
        for name in unanimous:
            assert get_rule(name).descriptor.unanimous
            for over in ("plurality", "uniform", "proportional", "first"):
                spec = MechanismSpec(name, over)
                if not spec.is_exactly_evaluable():
                    continue
                lot = winner_distribution(inst, spec)
                assert lot.probs[a] == 1.0
