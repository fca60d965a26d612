import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bilasym.config import SMILE_SCHEME, reflect_config, sequential_scheme
from bilasym.features import (
    absolute_features,
    collapse_to_landmarks,
    feature_matrix,
    landmark_features,
    signed_features,
)


def test_square_signed_features(X2, square_scheme):
    d = signed_features(X2, square_scheme)
    np.testing.assert_allclose(d.values, [0.04, -0.18, -0.28, -0.31], atol=1e-15)
    assert d.kind == "signed"
    assert [lab.short() for lab in d.index_map] == ["p1_3_c1", "p1_3_c2", "s2", "s4"]


def test_square_absolute_features(X2, square_scheme):
    a = absolute_features(signed_features(X2, square_scheme))
    np.testing.assert_allclose(a.values, [0.04, 0.18, 0.28, 0.31], atol=1e-15)
    assert a.kind == "absolute"


def test_square_landmark_features(X2, square_scheme):
    ds = landmark_features(X2, square_scheme)
    np.testing.assert_allclose(ds.values, [np.hypot(0.04, 0.18), 0.28, 0.31], atol=1e-15)
    assert ds.values[0] == pytest.approx(0.18439, abs=1e-5)


def test_symmetric_config_has_zero_features(X1, square_scheme):
    np.testing.assert_array_equal(signed_features(X1, square_scheme).values, 0.0)
    np.testing.assert_array_equal(landmark_features(X1, square_scheme).values, 0.0)


def test_feature_count_smile():
    X = np.random.default_rng(0).standard_normal((24, 3))
    assert signed_features(X, SMILE_SCHEME).values.size == 35
    assert landmark_features(X, SMILE_SCHEME).values.size == 13


def test_collapse_matches_landmark_features(rng):
    scheme = sequential_scheme(3, 2)
    configs = rng.standard_normal((5, 8, 3))
    labels = signed_features(configs[0], scheme).index_map
    pooled, lab = collapse_to_landmarks(feature_matrix(configs, scheme, "signed"), labels)
    np.testing.assert_allclose(pooled, feature_matrix(configs, scheme, "landmark"), atol=1e-14)
    assert len(lab) == 5


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_reflection_negates_signed_features(seed, M):
    # Reflecting swaps partners and flips x1, which negates every signed feature.
    scheme = sequential_scheme(3, 2)
    X = np.random.default_rng(seed).standard_normal((8, M))
    np.testing.assert_allclose(
        signed_features(reflect_config(X, scheme), scheme).values, -signed_features(X, scheme).values, atol=1e-12
    )


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_features_zero_iff_symmetric(seed):
    scheme = sequential_scheme(3, 1)
    X = np.random.default_rng(seed).standard_normal((7, 3))
    S = 0.5 * (X + reflect_config(X, scheme))
    np.testing.assert_allclose(signed_features(S, scheme).values, 0.0, atol=1e-12)
    # Half-difference of a config and its mirror carries the features.
    np.testing.assert_allclose(
        signed_features(X - S, scheme).values, signed_features(X, scheme).values, atol=1e-12
    )
