from collections import Counter

import numpy as np
import pytest

from distvote.core import Instance, ValidationError, normalize_unit_sum
from distvote.datagen import (
    DistributionSpec,
    build_ratings_instance,
    load_instance,
    load_ratings,
    most_rated_items,
    parse_distribution,
    partition_uniform,
    sample_ratings_valuations,
    sample_valuations,
    save_instance,
)

from conftest import FIXTURE_RATINGS, random_instance


def ks_statistic(draws, cdf):
    """Hand-rolled Kolmogorov-Smirnov distance of draws against a CDF."""
    xs = np.sort(draws)
    n = len(xs)
    cdf_vals = cdf(xs)
    upper = np.max(np.arange(1, n + 1) / n - cdf_vals)
    lower = np.max(cdf_vals - np.arange(0, n) / n)
    return max(float(upper), float(lower))


class TestDistributionSpec:
    def test_defaults(self):
        assert DistributionSpec.uniform().params == (1.0, 100.0)
        assert DistributionSpec.beta().params == (0.1, 0.1)
        assert DistributionSpec.exponential().params == (4.0,)

    def test_parse(self):
        assert parse_distribution("uniform") == DistributionSpec.uniform()
        assert parse_distribution("beta:0.5,2") == DistributionSpec("beta", (0.5, 2.0))
        assert parse_distribution("exponential:2") == DistributionSpec("exponential", (2.0,))

    def test_validation(self):
        with pytest.raises(ValidationError):
            DistributionSpec("uniform", (5.0, 1.0))
        with pytest.raises(ValidationError):
            DistributionSpec("beta", (0.0, 1.0))
        with pytest.raises(ValidationError):
            parse_distribution("zipf")


class TestSampleValuations:
    def test_uniform_range(self):
        rng = np.random.default_rng(0)
        raw = sample_valuations(50, 8, DistributionSpec.uniform(), rng)
        assert raw.shape == (50, 8)
        assert raw.min() >= 1.0 and raw.max() <= 100.0

    def test_beta_mean(self):
        # Beta(0.1, 0.1) has mean alpha / (alpha + beta) = 1/2
        rng = np.random.default_rng(1)
        draws = sample_valuations(100_000, 1, DistributionSpec.beta(), rng)
        assert abs(draws.mean() - 0.5) < 0.01

    def test_exponential_mean(self):
        # rate 4 means mean 1/4
        rng = np.random.default_rng(2)
        draws = sample_valuations(100_000, 1, DistributionSpec.exponential(), rng)
        assert abs(draws.mean() - 0.25) < 0.01

    def test_uniform_ks_statistic(self):
        rng = np.random.default_rng(3)
        draws = sample_valuations(10_000, 1, DistributionSpec.uniform(), rng).ravel()
        stat = ks_statistic(draws, lambda x: np.clip((x - 1.0) / 99.0, 0.0, 1.0))
        assert stat < 0.02

    def test_seed_determinism(self):
        a = sample_valuations(10, 4, DistributionSpec.beta(), np.random.default_rng(9))
        b = sample_valuations(10, 4, DistributionSpec.beta(), np.random.default_rng(9))
        assert np.array_equal(a, b)


class TestPartitionUniform:
    def test_two_equal_districts(self):
        d = partition_uniform(4, 2, np.random.default_rng(0))
        assert d.sizes == (2, 2)
        assert sorted(a for g in d.groups for a in g) == [0, 1, 2, 3]

    def test_single_district(self):
        d = partition_uniform(6, 1, np.random.default_rng(0))
        assert d.k == 1 and d.sizes == (6,)

    def test_hundred_into_twentyfive(self):
        d = partition_uniform(100, 25, np.random.default_rng(0))
        assert d.k == 25 and set(d.sizes) == {4}

    def test_indivisible_rejected(self):
        with pytest.raises(ValidationError):
            partition_uniform(10, 3, np.random.default_rng(0))

    def test_unordered_partitions_equally_likely(self):
        # n=4, k=2 has three unordered pair-partitions; chi-squared at 5%
        # (df=2, critical 5.991) over 3000 seeded draws
        rng = np.random.default_rng(42)
        counts = Counter()
        for _ in range(3000):
            d = partition_uniform(4, 2, rng)
            key = frozenset(frozenset(g) for g in d.groups)
            counts[key] += 1
        assert len(counts) == 3
        expected = 1000.0
        chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
        assert chi2 < 5.991


class TestLoadRatings:
    def test_fixture_shape_and_counts(self):
        ratings = load_ratings(FIXTURE_RATINGS)
        assert ratings.n_users == 25 and ratings.n_items == 12
        assert ratings.item_rated_counts().tolist() == [25, 25, 25, 25, 25, 25, 25, 20, 20, 5, 4, 3]

    def test_hand_written_row(self, tmp_path):
        path = tmp_path / "tiny.csv"
        path.write_text("2, 4.5, 99, -3.2\n")
        ratings = load_ratings(path)
        assert ratings.rated_counts.tolist() == [2]
        assert ratings.missing.tolist() == [[False, True, False]]
        assert ratings.values[0, 0] == 4.5 and ratings.values[0, 2] == -3.2

    def test_non_numeric_field_names_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("2, 1.0, 2.0\n3, one, 2.0\n")
        with pytest.raises(ValidationError, match="line 2"):
            load_ratings(path)

    def test_ragged_row_names_line(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("2, 1.0, 2.0\n2, 1.0, 2.0, 3.0\n")
        with pytest.raises(ValidationError, match="line 2"):
            load_ratings(path)

    def test_out_of_range_rating_rejected(self, tmp_path):
        path = tmp_path / "range.csv"
        path.write_text("1, 11.5\n")
        with pytest.raises(ValidationError, match="outside"):
            load_ratings(path)

    def test_marker_collision_rejected(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("1, 1.0\n")
        with pytest.raises(ValidationError, match="collides"):
            load_ratings(path, missing_marker=5.0)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        ratings = load_ratings(path)
        assert ratings.n_users == 0
        with pytest.raises(ValidationError, match="cannot select"):
            most_rated_items(ratings, 8)

    def test_no_count_column(self, tmp_path):
        path = tmp_path / "plain.csv"
        path.write_text("4.5, 99, -3.2\n")
        ratings = load_ratings(path, has_count_column=False)
        assert ratings.rated_counts.tolist() == [2]


class TestBuildRatingsInstance:
    def test_most_rated_tie_broken_by_lower_index(self):
        ratings = load_ratings(FIXTURE_RATINGS)
        # columns 7 and 8 tie at 20 ratings; 7 wins
        assert most_rated_items(ratings, 8) == [0, 1, 2, 3, 4, 5, 6, 7]

    def test_pipeline_produces_valid_instance(self):
        ratings = load_ratings(FIXTURE_RATINGS)
        inst = build_ratings_instance(ratings, users=16, items=8, k=4, rng=np.random.default_rng(5))
        assert isinstance(inst, Instance)
        assert (inst.n, inst.m, inst.k) == (16, 8, 4)

    def test_zero_row_becomes_uniform(self):
        ratings = load_ratings(FIXTURE_RATINGS)
        # user 0 rated the minimum everywhere: the shifted row is all zero
        raw = sample_ratings_valuations(ratings, 20, 8, np.random.default_rng(0))
        zero_rows = np.flatnonzero(raw.sum(axis=1) == 0.0)
        assert zero_rows.size == 1
        vals = normalize_unit_sum(raw)
        assert np.allclose(vals[zero_rows[0]], 1.0 / 8)

    def test_single_support_row(self):
        ratings = load_ratings(FIXTURE_RATINGS)
        raw = sample_ratings_valuations(ratings, 20, 8, np.random.default_rng(0))
        vals = normalize_unit_sum(raw)
        # user 1: maximum on item 0, minimum elsewhere -> all mass on 0
        onehot = [i for i in range(20) if vals[i].max() == 1.0]
        assert len(onehot) == 1
        assert vals[onehot[0]].tolist() == [1.0] + [0.0] * 7

    def test_insufficient_complete_users(self):
        ratings = load_ratings(FIXTURE_RATINGS)
        with pytest.raises(ValidationError, match="need 24"):
            build_ratings_instance(ratings, users=24, items=8, k=1, rng=np.random.default_rng(0))

    def test_seed_determinism(self):
        ratings = load_ratings(FIXTURE_RATINGS)
        a = build_ratings_instance(ratings, 16, 8, 2, np.random.default_rng(7))
        b = build_ratings_instance(ratings, 16, 8, 2, np.random.default_rng(7))
        assert np.array_equal(a.valuations, b.valuations)
        assert a.districts == b.districts


class TestInstanceFiles:
    def test_round_trip_bit_identical(self, tmp_path):
        inst = random_instance(np.random.default_rng(20))
        path = tmp_path / "inst.txt"
        save_instance(inst, path)
        loaded = load_instance(path)
        assert np.array_equal(loaded.valuations, inst.valuations)
        assert loaded.districts == inst.districts

    def test_header_format(self, tmp_path):
        inst = random_instance(np.random.default_rng(21))
        path = tmp_path / "inst.txt"
        save_instance(inst, path)
        first = path.read_text().splitlines()[0]
        assert first == f"{inst.n} {inst.m} {inst.k}"

    def test_malformed_header(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("1 2\n1.0 0.0\n0\n")
        with pytest.raises(ValidationError, match="header"):
            load_instance(path)

    def test_wrong_line_count(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("2 2 1\n1.0 0.0\n0 1\n")
        with pytest.raises(ValidationError, match="lines"):
            load_instance(path)

    def test_loaded_instance_is_validated(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("1 2 1\n0.7 0.7\n0\n")
        with pytest.raises(ValidationError, match="sums to"):
            load_instance(path)
