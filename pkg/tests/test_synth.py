import numpy as np
import pytest

from bilasym.config import SMILE_SCHEME, reflect_config, sequential_scheme
from bilasym.features import feature_matrix
from bilasym.registration import estimate_midplane
from bilasym.synth import (
    SynthSpec,
    generate_dataset,
    make_symmetric_template,
    offset_displacement,
    random_rotation,
)


def test_random_rotation_is_proper(rng):
    for M in (2, 3, 4):
        Q = random_rotation(M, rng)
        np.testing.assert_allclose(Q.T @ Q, np.eye(M), atol=1e-12)
        assert np.linalg.det(Q) == pytest.approx(1.0)


def test_template_is_exactly_symmetric():
    T = make_symmetric_template(11, 2, 3, seed=5, scheme=SMILE_SCHEME)
    np.testing.assert_array_equal(reflect_config(T, SMILE_SCHEME), T)
    np.testing.assert_array_equal(T[[6, 18], 0], 0.0)


def test_offset_displacement_plants_exact_features(rng):
    scheme = sequential_scheme(3, 2)
    T = make_symmetric_template(3, 2, 3, seed=1)
    offsets = rng.normal(size=11)
    D = offset_displacement(offsets, scheme, 3)
    np.testing.assert_allclose(feature_matrix([T + D], scheme, "signed")[0], offsets, atol=1e-14)


def test_generate_is_deterministic():
    spec = SynthSpec(SMILE_SCHEME, seed=4)
    a, b = generate_dataset(spec), generate_dataset(SynthSpec(SMILE_SCHEME, seed=4))
    np.testing.assert_array_equal(a.configs, b.configs)
    c = generate_dataset(SynthSpec(SMILE_SCHEME, seed=5))
    assert not np.array_equal(a.configs, c.configs)


def test_generate_groups_and_ids():
    data = generate_dataset(SynthSpec(sequential_scheme(2, 1), M=2, n1=3, n2=4))
    assert data.groups == ["control"] * 3 + ["case"] * 4
    assert data.ids[0] == "control001" and data.ids[3] == "case001"
    assert data.registered


def test_noise_free_case_features_equal_offsets():
    scheme = sequential_scheme(2, 1)
    offsets = np.array([0.3, 0.0, -0.1, 0.0, 0.0, 0.0, 0.2])
    data = generate_dataset(SynthSpec(scheme, M=3, noise_sigma=0.0, asymmetry_offsets=offsets, n1=2, n2=2))
    F = feature_matrix(data.configs, scheme, "signed")
    np.testing.assert_allclose(F[:2], 0.0, atol=1e-15)
    np.testing.assert_allclose(F[2:], np.tile(offsets, (2, 1)), atol=1e-15)


def test_nuisance_motion_then_registration_recovers_zero_features():
    scheme = sequential_scheme(4, 2)
    data = generate_dataset(SynthSpec(scheme, M=3, noise_sigma=0.0, nuisance_motion=True, n1=2, n2=2))
    assert not data.registered
    reg = estimate_midplane(data.configs, scheme)
    np.testing.assert_allclose(feature_matrix(reg.configs, scheme), 0.0, atol=1e-8)


def test_generator_settings_validation():
    scheme = sequential_scheme(1, 1)
    with pytest.raises(ValueError):
        SynthSpec(scheme, M=2, template=np.ones((3, 2)))
    with pytest.raises(ValueError):
        SynthSpec(scheme, M=2, asymmetry_offsets=[1.0])
    with pytest.raises(ValueError):
        SynthSpec(scheme, M=2, noise_sigma=-1)
