"""Landmark-based analysis of bilateral asymmetry in two groups of shapes."""

__version__ = "0.1.0"

from .config import (
    SMILE_SCHEME,
    FeatureLabel,
    FeatureVector,
    PairingScheme,
    Plane,
    RigidMotion,
    TwoGroupDataset,
    reflect_config,
    sequential_scheme,
    validate_scheme,
)
from .features import absolute_features, landmark_features, signed_features
from .registration import (
    RegisteredDataset,
    apply_rigid,
    estimate_midplane,
    gpa,
    householder,
    opa_rigid,
    transform_plane,
)
from .scores import (
    L1,
    L2,
    STAR_L1,
    STAR_L2,
    ScoreSpec,
    WeightVector,
    adaptive_weights,
    additive_score,
    bock_score,
    score_dataset,
    star_score,
)
from .stats import (
    TestResult,
    UitResult,
    bootstrap_critical,
    feature_t_stats,
    mann_whitney_u,
    pooled_t_test,
    run_comparison,
    uit_max,
    welch_t_test,
)
from .synth import SynthSpec, generate_dataset, make_symmetric_template
