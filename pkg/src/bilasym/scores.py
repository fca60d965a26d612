"""Composite asymmetry scores and weighting schemes."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import FeatureLabel, FeatureVector, PairingScheme, TwoGroupDataset, reflect_config
from .features import collapse_to_landmarks


class ZeroPairDistance(ValueError):
    pass


PSI = {
    "linear": lambda a: a,
    "quadratic": lambda a: a * a,
}


@dataclass(frozen=True)
class WeightVector:
    weights: np.ndarray
    source: str = "user"

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).reshape(-1)
        if w.size == 0 or not np.all(np.isfinite(w)):
            raise ValueError("weights must be a non-empty finite vector")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if not np.any(w > 0):
            raise ValueError("at least one weight must be positive")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def equal(cls, n: int) -> "WeightVector":
        return cls(np.ones(n), "equal")

    def __len__(self):
        return self.weights.size


@dataclass(frozen=True)
class ScoreSpec:
    """Which composite score to compute.

    ``family`` is ``"additive"`` (sum over coordinatewise features) or
    ``"star"`` (sum over landmark-level features).  ``weights`` of ``None``
    means equal weights.
    """

    family: str = "additive"
    psi: str = "linear"
    weights: WeightVector | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.family not in ("additive", "star"):
            raise ValueError(f"unknown score family {self.family!r}")
        if self.psi not in PSI:
            raise ValueError(f"unknown psi {self.psi!r}")
        if not self.name:
            prefix = "" if self.family == "additive" else "star-"
            tag = "l1" if self.psi == "linear" else "l2"
            weighted = "" if self.weights is None or self.weights.source == "equal" else f"-{self.weights.source}"
            object.__setattr__(self, "name", f"{prefix}{tag}{weighted}")


L1 = ScoreSpec("additive", "linear", name="l1")
L2 = ScoreSpec("additive", "quadratic", name="l2")
STAR_L1 = ScoreSpec("star", "linear", name="star-l1")
STAR_L2 = ScoreSpec("star", "quadratic", name="star-l2")


def _weights(weights: WeightVector | None, n: int) -> np.ndarray:
    if weights is None:
        return np.ones(n)
    if len(weights) != n:
        raise ValueError(f"{len(weights)} weights given for {n} features")
    return weights.weights


def _values(a) -> np.ndarray:
    vals = a.values if isinstance(a, FeatureVector) else np.asarray(a, dtype=float)
    if np.any(vals < 0):
        raise ValueError("composite scores take nonnegative features")
    return vals


def additive_score(a, spec: ScoreSpec = L1) -> float:
    """Weighted sum ``sum_j w_j psi(a_j)`` of absolute coordinatewise features."""
    vals = _values(a)
    return float(np.sum(_weights(spec.weights, vals.size) * PSI[spec.psi](vals)))


def bock_weights(scheme: PairingScheme, M: int) -> WeightVector:
    return WeightVector(np.r_[np.ones(M * scheme.n_pairs), 2.0 * np.ones(scheme.n_solos)], "bock")


def bock_score(a, scheme: PairingScheme) -> float:
    """Squared pair features plus twice the squared solo features."""
    vals = _values(a)
    n_pair_feats = vals.size - scheme.n_solos
    _, rem = divmod(n_pair_feats, max(scheme.n_pairs, 1))
    if n_pair_feats < 0 or rem or (scheme.n_pairs == 0) != (n_pair_feats == 0):
        raise ValueError("feature vector does not match the scheme")
    return float(np.sum(vals[:n_pair_feats] ** 2) + 2.0 * np.sum(vals[n_pair_feats:] ** 2))


def star_score(dstar, psi: str = "linear", weights: WeightVector | None = None) -> float:
    """Score over landmark-level features: one term per pair and per solo."""
    vals = _values(dstar)
    return float(np.sum(_weights(weights, vals.size) * PSI[psi](vals)))


def scale_star_l1(raw: float, how: str = "half", n_landmarks: int | None = None) -> float:
    """Presentation scaling of the landmark-level L1 score.

    ``"half"`` divides by two; ``"landmarks"`` divides by the landmark count.
    """
    if how == "half":
        return raw / 2.0
    if how == "landmarks":
        if not n_landmarks:
            raise ValueError("n_landmarks required for landmark scaling")
        return raw / n_landmarks
    raise ValueError(f"unknown scaling {how!r}")


def symmetric_mean_shape(configs, scheme: PairingScheme) -> np.ndarray:
    """Landmark-wise mean of registered configurations and their reflections."""
    mean = np.mean(np.asarray(configs, dtype=float), axis=0)
    return 0.5 * (mean + reflect_config(mean, scheme))


def adaptive_weights(
    registered,
    scheme: PairingScheme,
    kind: str = "absolute",
    solo_weight: float = 1.0,
) -> WeightVector:
    """Reciprocal mean pair separation as the weight of each pair.

    ``registered`` is a :class:`~bilasym.registration.RegisteredDataset` or an
    array of registered configurations.  Pairs close to the midplane get the
    larger weights; solos get ``solo_weight``.  For ``kind="absolute"`` every
    coordinate feature of a pair repeats the pair weight, for
    ``kind="landmark"`` there is one weight per pair.
    """
    configs = getattr(registered, "configs", registered)
    mean = symmetric_mean_shape(configs, scheme)
    M = mean.shape[1]
    w = []
    for l, r in scheme.pairs:
        dist = float(np.linalg.norm(mean[l] - mean[r]))
        if dist < 1e-12:
            raise ZeroPairDistance(f"mean shape landmarks {l + 1} and {r + 1} coincide")
        w.extend([1.0 / dist] * (M if kind != "landmark" else 1))
    w.extend([float(solo_weight)] * scheme.n_solos)
    return WeightVector(np.array(w), "adaptive")


def landmark_weights_from_features(weights: WeightVector, index_map: tuple[FeatureLabel, ...]) -> WeightVector:
    """Collapse per-coordinate weights to per-landmark weights (first coordinate's weight)."""
    seen: dict[tuple[int, ...], float] = {}
    for w, lab in zip(weights.weights, index_map):
        seen.setdefault(lab.landmarks, float(w))
    return WeightVector(np.array(list(seen.values())), weights.source)


def score_matrix(values: np.ndarray, spec: ScoreSpec, index_map: tuple[FeatureLabel, ...], kind: str = "absolute") -> np.ndarray:
    """Scores for every row of an ``(N, J)`` feature matrix."""
    values = np.asarray(values, dtype=float)
    if spec.family == "star" and kind != "landmark":
        values, index_map = collapse_to_landmarks(values, index_map)
    elif spec.family == "additive" and kind == "landmark":
        raise ValueError("additive scores need coordinatewise features")
    if np.any(values < 0):
        raise ValueError("composite scores take nonnegative features")
    w = _weights(spec.weights, values.shape[1])
    return PSI[spec.psi](values) @ w


def score_dataset(dataset: TwoGroupDataset, spec: ScoreSpec) -> tuple[np.ndarray, np.ndarray]:
    """Per-subject scores ``(u1, u2)`` in input order."""
    u1 = score_matrix(dataset.group1, spec, dataset.index_map, dataset.kind)
    u2 = score_matrix(dataset.group2, spec, dataset.index_map, dataset.kind)
    return u1, u2
