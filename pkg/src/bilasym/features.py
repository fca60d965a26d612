"""Elementary asymmetry features of registered configurations."""

from __future__ import annotations

import numpy as np

from .config import FeatureLabel, FeatureVector, PairingScheme, as_config, feature_labels


def signed_features(X, scheme: PairingScheme) -> FeatureVector:
    """Coordinatewise signed features of a basis-registered configuration.

    For a pair ``(l, r)`` the first-coordinate feature is ``X[l,0] + X[r,0]``
    and the others are ``X[l,m] - X[r,m]``; a solo contributes ``X[s,0]``.
    """
    X = as_config(X, scheme)
    M = X.shape[1]
    vals = []
    for l, r in scheme.pairs:
        diff = X[l] - X[r]
        diff[0] = X[l, 0] + X[r, 0]
        vals.extend(diff)
    vals.extend(X[s, 0] for s in scheme.solos)
    return FeatureVector(np.array(vals, dtype=float), "signed", "basis", feature_labels(scheme, M, "basis"))


def absolute_features(d: FeatureVector) -> FeatureVector:
    return FeatureVector(np.abs(d.values), "absolute" if d.kind == "signed" else d.kind, d.registration, d.index_map)


def landmark_features(X, scheme: PairingScheme) -> FeatureVector:
    """One value per pair (distance between a landmark and its partner's mirror image) and per solo."""
    X = as_config(X, scheme)
    M = X.shape[1]
    vals = []
    for l, r in scheme.pairs:
        diff = X[l] - X[r]
        diff[0] = X[l, 0] + X[r, 0]
        vals.append(np.sqrt(diff @ diff))
    vals.extend(abs(X[s, 0]) for s in scheme.solos)
    return FeatureVector(np.array(vals, dtype=float), "landmark", "axis", feature_labels(scheme, M, "axis"))


def collapse_to_landmarks(values, index_map: tuple[FeatureLabel, ...]):
    """Pool basis-level features into landmark-level ones (root sum of squares per pair).

    ``values`` may be a vector or an ``(N, J)`` matrix.  Returns the pooled
    values and the landmark-level index map.
    """
    values = np.asarray(values, dtype=float)
    groups: dict[tuple[int, ...], list[int]] = {}
    for j, lab in enumerate(index_map):
        groups.setdefault(lab.landmarks, []).append(j)
    labels, cols = [], []
    for lm, js in groups.items():
        sub = values[..., js]
        if len(lm) == 2:
            cols.append(np.sqrt(np.sum(sub**2, axis=-1)))
            labels.append(FeatureLabel(lm, None))
        else:
            cols.append(np.abs(sub[..., 0]))
            labels.append(FeatureLabel(lm, 0))
    return np.stack(cols, axis=-1), tuple(labels)


def feature_matrix(configs, scheme: PairingScheme, kind: str = "absolute") -> np.ndarray:
    """Stack the features of many configurations into an ``(N, J)`` matrix."""
    rows = []
    for X in configs:
        if kind == "landmark":
            rows.append(landmark_features(X, scheme).values)
        else:
            d = signed_features(X, scheme)
            rows.append(d.values if kind == "signed" else np.abs(d.values))
    return np.array(rows)
