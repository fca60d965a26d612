import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bilasym.config import (
    SMILE_SCHEME,
    DuplicateIndex,
    FeatureVector,
    IndexOutOfRange,
    MissingIndex,
    PairingScheme,
    Plane,
    RigidMotion,
    SchemeError,
    TwoGroupDataset,
    feature_labels,
    reflect_config,
    sequential_scheme,
    validate_scheme,
)


def test_square_scheme_valid(square_scheme):
    validate_scheme(square_scheme, 4)
    assert (square_scheme.n_pairs, square_scheme.n_solos) == (1, 2)


def test_smile_scheme_valid():
    validate_scheme(SMILE_SCHEME, 24)
    assert SMILE_SCHEME.n_pairs == 11 and SMILE_SCHEME.n_solos == 2
    assert SMILE_SCHEME.to_one_based()["solos"] == [7, 19]


@pytest.mark.parametrize(
    "pairs, solos, K, err, label",
    [
        ([(1, 1)], [2], 3, DuplicateIndex, "landmark 1"),
        ([(1, 2)], [2], 3, DuplicateIndex, "landmark 2"),
        ([(1, 2)], [], 3, MissingIndex, "landmark 3"),
        ([(1, 5)], [2], 3, IndexOutOfRange, "landmark 5"),
    ],
)
def test_invalid_schemes_name_the_landmark(pairs, solos, K, err, label):
    with pytest.raises(err, match=label):
        validate_scheme(PairingScheme.from_one_based(pairs, solos), K)


def test_reflect_x1_is_fixed_point(X1, square_scheme):
    np.testing.assert_array_equal(reflect_config(X1, square_scheme), X1)


def test_reflect_x2_by_hand(X2, square_scheme):
    expected = np.array([[-0.99, 0.54], [0.28, 2.11], [0.95, 0.36], [0.31, -1.37]])
    np.testing.assert_array_equal(reflect_config(X2, square_scheme), expected)


def test_reflect_rejects_wrong_landmark_count(square_scheme):
    with pytest.raises(SchemeError):
        reflect_config(np.zeros((5, 2)), square_scheme)


@st.composite
def config_and_scheme(draw):
    kp = draw(st.integers(0, 5))
    ks = draw(st.integers(0 if kp else 1, 4))
    M = draw(st.integers(1, 4))
    perm = draw(st.permutations(range(2 * kp + ks)))
    scheme = PairingScheme(tuple((perm[2 * i], perm[2 * i + 1]) for i in range(kp)), tuple(perm[2 * kp :]))
    vals = draw(st.lists(st.floats(-100, 100), min_size=scheme.n_landmarks * M, max_size=scheme.n_landmarks * M))
    return np.array(vals).reshape(scheme.n_landmarks, M), scheme


@settings(max_examples=200, deadline=None)
@given(config_and_scheme())
def test_reflection_is_an_involution(case):
    X, scheme = case
    validate_scheme(scheme, X.shape[0])
    np.testing.assert_array_equal(reflect_config(reflect_config(X, scheme), scheme), X)


@settings(max_examples=100, deadline=None)
@given(config_and_scheme())
def test_reflection_preserves_abs_x1_and_other_coordinates(case):
    X, scheme = case
    R = reflect_config(X, scheme)
    np.testing.assert_array_equal(np.sort(np.abs(R[:, 0])), np.sort(np.abs(X[:, 0])))
    np.testing.assert_array_equal(np.sort(R[:, 1:], axis=0), np.sort(X[:, 1:], axis=0))


def test_plane_requires_unit_normal():
    Plane([0.0, 1.0], 2.0)
    with pytest.raises(ValueError):
        Plane([0.0, 2.0], 0.0)


def test_rigid_motion_rejects_reflection():
    with pytest.raises(ValueError):
        RigidMotion(np.diag([-1.0, 1.0]), np.zeros(2))


def test_rigid_motion_inverse_and_composition(rng):
    from bilasym.synth import random_motion

    m = random_motion(3, rng)
    ident = m.then(m.inverse())
    np.testing.assert_allclose(ident.rotation, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(ident.translation, 0, atol=1e-12)


def test_feature_labels_canonical_order(square_scheme):
    labs = feature_labels(square_scheme, 2)
    assert [lab.describe() for lab in labs] == ["pair (1,3), coordinate 1", "pair (1,3), coordinate 2", "solo 2", "solo 4"]
    assert len(feature_labels(SMILE_SCHEME, 3)) == 3 * 11 + 2
    assert len(feature_labels(SMILE_SCHEME, 3, "axis")) == 11 + 2


def test_feature_vector_absolute_must_be_nonnegative(square_scheme):
    labs = feature_labels(square_scheme, 2)
    with pytest.raises(ValueError):
        FeatureVector([0.1, -0.2, 0.0, 0.0], "absolute", "basis", labs)
    FeatureVector([0.1, -0.2, 0.0, 0.0], "signed", "basis", labs)


def test_two_group_dataset_checks():
    ds = TwoGroupDataset(np.ones((3, 2)), np.ones((4, 2)))
    assert (ds.n1, ds.n2, ds.n_features) == (3, 4, 2)
    with pytest.raises(ValueError):
        TwoGroupDataset(np.ones((3, 2)), np.ones((4, 3)))
    with pytest.raises(ValueError):
        TwoGroupDataset(np.ones((1, 2)), np.ones((4, 2))).require_testable()


def test_sequential_scheme():
    s = sequential_scheme(2, 1)
    assert s.pairs == ((0, 1), (2, 3)) and s.solos == (4,)
    validate_scheme(s, 5)
