from decimal import ROUND_HALF_UP, Decimal

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cbos.clustering import ClusterModel
from cbos.dataset import FeatureBounds, make_blobs, profile
from cbos.errors import ConfigError, DataError
from cbos.resample import (
    ResampleConfig,
    allocate_counts,
    auto_clusters,
    cbos_fit_resample,
    cbos_resample,
    centroid_distances,
    clip_to_bounds,
    generate_for_sample,
    inverse_weights,
    normalize_distances,
)
from conftest import make_dataset, row_multiset


def model_of(centroids, assignments):
    return ClusterModel(np.asarray(centroids, dtype=float), np.asarray(assignments), 0.0, 0)


class TestConfig:
    @pytest.mark.parametrize("kw", [dict(eta=0), dict(eta=1.5), dict(random_lo=0.5, random_hi=0.5),
                                    dict(random_hi=1.2), dict(weight_mode="sideways"), dict(clusters=0)])
    def test_rejects(self, kw):
        with pytest.raises(ConfigError):
            ResampleConfig(**kw)


class TestCentroidDistances:
    def test_single_cluster(self):
        raw = centroid_distances([[3, 4], [0, 0]], model_of([[0, 0]], [0, 0]))
        np.testing.assert_array_equal(raw, [5, 0])

    def test_all_on_centroids(self):
        raw = centroid_distances([[1, 1], [2, 2]], model_of([[1, 1], [2, 2]], [0, 1]))
        np.testing.assert_array_equal(raw, [0, 0])

    def test_two_clusters(self):
        raw = centroid_distances([[1, 0], [9, 0]], model_of([[0, 0], [10, 0]], [0, 1]))
        np.testing.assert_array_equal(raw, [1, 1])

    def test_length_mismatch(self):
        with pytest.raises(DataError):
            centroid_distances([[1, 0]], model_of([[0, 0]], [0, 0]))


class TestNormalize:
    @pytest.mark.parametrize("raw, expected", [([2, 2], [0.5, 0.5]), ([1, 3], [0.25, 0.75]), ([0, 0], [0.5, 0.5])])
    def test_examples(self, raw, expected):
        np.testing.assert_array_equal(normalize_distances(raw), expected)

    def test_empty(self):
        with pytest.raises(DataError):
            normalize_distances([])

    def test_negative(self):
        with pytest.raises(DataError):
            normalize_distances([1.0, -0.1])


class TestAllocate:
    def test_direct(self):
        np.testing.assert_array_equal(allocate_counts([0.25, 0.75], 110, 10, 1.0).counts, [25, 75])

    def test_half_rounds_up(self):
        np.testing.assert_array_equal(allocate_counts([0.25, 0.75], 110, 10, 0.5).counts, [13, 38])

    def test_single(self):
        plan = allocate_counts([1.0], 11, 1, 1.0)
        np.testing.assert_array_equal(plan.counts, [10])
        assert plan.total == 10

    def test_inverse(self):
        # complements 0.75, 0.25 renormalised over their sum of 1
        np.testing.assert_array_equal(allocate_counts([0.25, 0.75], 110, 10, 1.0, "inverse").counts, [75, 25])
        np.testing.assert_array_equal(inverse_weights([1.0]), [1.0])

    def test_errors(self):
        with pytest.raises(ConfigError):
            allocate_counts([1.0], 10, 1, 0.0)
        with pytest.raises(DataError):
            allocate_counts([0.5, 0.5], 2, 2, 1.0)

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(0, 1e3), min_size=1, max_size=40), st.integers(1, 5000), st.floats(0.01, 1.0))
    def test_matches_decimal_rounding(self, raw, gap, eta):
        w = normalize_distances(raw)
        k_min = len(w)
        plan = allocate_counts(w, k_min + gap, k_min, eta)
        expected = [int(Decimal(float(wi) * gap * eta).quantize(Decimal(1), rounding=ROUND_HALF_UP)) for wi in w]
        assert plan.counts.tolist() == expected
        assert abs(plan.total - eta * gap) <= k_min / 2 + 1


class TestGenerate:
    cfg = ResampleConfig()

    def test_zero_delta(self):
        out = generate_for_sample([1.0, 2.0], [1.0, 2.0], 5, self.cfg, np.random.default_rng(0))
        np.testing.assert_array_equal(out, np.tile([1.0, 2.0], (5, 1)))

    def test_zero_n(self):
        assert generate_for_sample([1.0], [0.0], 0, self.cfg, np.random.default_rng(0)).shape == (0, 1)

    def test_box_bound_over_ten_thousand_draws(self):
        x, c = np.array([0.0, 2.0]), np.array([1.0, 1.0])
        out = generate_for_sample(x, c, 10_000, self.cfg, np.random.default_rng(42))
        delta = np.abs(x - c)
        assert np.all(out >= x - delta) and np.all(out <= x + delta)
        assert out[:, 0].min() < -0.9 and out[:, 0].max() > 0.9
        # both signs get used
        assert np.mean(out[:, 1] > 2.0) == pytest.approx(0.5, abs=0.03)

    def test_narrow_range(self):
        cfg = ResampleConfig(random_lo=0.2, random_hi=0.4)
        out = generate_for_sample(np.zeros(3), np.ones(3), 2000, cfg, np.random.default_rng(1))
        assert np.all((np.abs(out) >= 0.2) & (np.abs(out) <= 0.4))

    def test_per_sample_uses_one_draw_per_row(self):
        cfg = ResampleConfig(noise_mode="per_sample")
        out = generate_for_sample(np.zeros(4), np.ones(4), 50, cfg, np.random.default_rng(3))
        assert np.all(out == out[:, :1])

    def test_documented_draw_order(self):
        rng = np.random.default_rng(7)
        r = rng.uniform(0, 1, size=(3, 2))
        s = np.where(rng.integers(0, 2, size=(3, 2)) == 1, 1.0, -1.0)
        x, c = np.array([1.0, -1.0]), np.array([0.0, 1.0])
        out = generate_for_sample(x, c, 3, self.cfg, np.random.default_rng(7))
        np.testing.assert_array_equal(out, x + s * np.abs(x - c) * r)

    def test_mismatch(self):
        with pytest.raises(DataError):
            generate_for_sample([1.0, 2.0], [1.0], 1, self.cfg, np.random.default_rng(0))


class TestClip:
    bounds = FeatureBounds(np.array([0.0]), np.array([5.0]))

    @pytest.mark.parametrize("v, expected", [(7.0, 5.0), (-1.0, 0.0), (3.0, 3.0)])
    def test_examples(self, v, expected):
        assert clip_to_bounds([[v]], self.bounds)[0, 0] == expected

    def test_inside_is_bit_identical(self):
        v = np.array([[0.1 + 0.2]])
        assert clip_to_bounds(v, self.bounds).tobytes() == v.tobytes()


class TestCbosResample:
    def test_ninety_ten(self, blobs):
        out = cbos_resample(blobs, ResampleConfig(seed=1))
        grown = profile(out).k_minority - 10
        assert abs(grown - 80) <= 10 / 2 + 1

    def test_rounds_to_zero(self):
        X = np.arange(9.0).reshape(-1, 1)
        d = make_dataset(X, ["maj"] * 5 + ["min"] * 4, minority_label="min")
        res = cbos_fit_resample(d, ResampleConfig(clusters=1))
        # gap of one split over four rows rounds to nothing
        assert res.plan.total == 0
        assert res.dataset.features.tobytes() == d.features.tobytes()

    def test_identical_minority_rows(self):
        X = np.vstack([np.random.default_rng(0).normal(size=(20, 2)), np.tile([3.0, 3.0], (4, 1))])
        d = make_dataset(X, ["maj"] * 20 + ["min"] * 4)
        res = cbos_fit_resample(d, ResampleConfig(clusters=2))
        np.testing.assert_array_equal(res.weights.normalized, [0.25] * 4)
        assert res.plan.total == 16
        assert np.all(res.generated == 3.0)

    def test_too_many_clusters(self, blobs):
        with pytest.raises(ConfigError):
            cbos_resample(blobs, ResampleConfig(clusters=11))

    def test_not_imbalanced(self):
        d = make_dataset(np.arange(4.0).reshape(-1, 1), ["a", "a", "b", "b"])
        with pytest.raises(DataError):
            cbos_resample(d)

    def test_auto_clusters(self):
        assert [auto_clusters(n) for n in (1, 2, 8, 18, 50, 51)] == [1, 1, 2, 3, 5, 5]

    def test_zero_distance_rows_get_nothing(self):
        X = np.array([[0.0]] * 20 + [[0.0], [1.0], [2.0]])
        d = make_dataset(X, ["maj"] * 20 + ["min"] * 3)
        res = cbos_fit_resample(d, ResampleConfig(clusters=1))
        # centroid is 1.0, so the middle row sits on it
        assert res.weights.raw[1] == 0 and res.plan.counts[1] == 0


@settings(max_examples=30, deadline=None)
@given(
    st.integers(3, 30), st.integers(2, 10), st.integers(1, 5), st.floats(0.05, 1.0),
    st.sampled_from(["direct", "inverse"]), st.sampled_from(["per_feature", "per_sample"]),
    st.integers(0, 2**31),
)
def test_resample_properties(k_min, ratio, dims, eta, weight_mode, noise_mode, seed):
    k_maj = k_min * ratio
    d = make_blobs(k_maj, k_min, dims, 1 if k_min < 4 else 2, 1.0, seed)
    cfg = ResampleConfig(eta=eta, weight_mode=weight_mode, noise_mode=noise_mode, seed=seed)
    res = cbos_fit_resample(d, cfg)
    out = res.dataset
    n = len(d)
    # originals untouched and in place, generated rows appended
    assert out.features[:n].tobytes() == d.features.tobytes()
    assert out.labels[:n].tolist() == d.labels.tolist()
    assert set(out.labels[n:].tolist()) <= {"minority"}
    assert row_multiset(out.features[out.labels == "majority"]) == row_multiset(d.features[d.labels == "majority"])
    mino = d.features[d.labels == "minority"]
    assert np.all(res.generated >= mino.min(axis=0)) and np.all(res.generated <= mino.max(axis=0))
    assert abs(res.plan.total - eta * (k_maj - k_min)) <= k_min / 2 + 1
    np.testing.assert_allclose(res.weights.normalized.sum(), 1.0, atol=1e-9)
    if weight_mode == "direct":
        order = np.argsort(res.weights.raw, kind="stable")
        assert np.all(np.diff(res.plan.counts[order]) >= 0)
    again = cbos_resample(d, cfg)
    assert again.features.tobytes() == out.features.tobytes()
