"""Glue between landmark files and the analysis functions."""

from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np

from .config import TwoGroupDataset, feature_labels
from .features import feature_matrix
from .io import LandmarkFile, Subject
from .registration import RegisteredDataset, estimate_midplane
from .scores import (
    ScoreSpec,
    WeightVector,
    adaptive_weights,
    bock_weights,
    landmark_weights_from_features,
    scale_star_l1,
    score_matrix,
)

log = logging.getLogger(__name__)

SCORE_NAMES = ("l1", "l2", "star-l1", "star-l2", "bock")


class NotRegistered(ValueError):
    pass


def register_file(lf: LandmarkFile, mode: str = "basis", hint=None, up_landmarks=None) -> LandmarkFile:
    """Register every subject of ``lf``; already basis-registered input passes through."""
    if lf.registration == "basis" or lf.registration == mode:
        log.warning("input is already %s-registered; coordinates are left unchanged", lf.registration)
        return lf
    reg = estimate_midplane(lf.configs, lf.scheme, mode, orientation_hint=hint, up_landmarks=up_landmarks)
    subjects = [Subject(s.id, s.group, X) for s, X in zip(lf.subjects, reg.configs)]
    planes = [{"normal": p.normal.tolist(), "offset": p.offset} for p in reg.raw_planes()]
    return LandmarkFile(
        dimension=lf.dimension,
        scheme=lf.scheme,
        registration=mode,
        subjects=subjects,
        frame=lf.frame,
        groups=lf.groups,
        plane={"normal": reg.plane.normal.tolist(), "offset": reg.plane.offset, "raw": planes},
        mean_shape=reg.mean_shape,
        meta=dict(lf.meta),
    )


def require_registered(lf: LandmarkFile, kind: str = "absolute") -> None:
    if lf.registration == "raw":
        raise NotRegistered("input is not registered; run 'register' first")
    if lf.registration == "axis" and kind != "landmark":
        raise NotRegistered("axis-registered data only supports landmark-level features")


def registered_dataset(lf: LandmarkFile) -> RegisteredDataset:
    require_registered(lf, "landmark")
    return RegisteredDataset.from_registered(lf.configs, lf.scheme, lf.registration, "known")


def feature_table(lf: LandmarkFile, kind: str = "absolute"):
    require_registered(lf, kind)
    labels = feature_labels(lf.scheme, lf.dimension, "axis" if kind == "landmark" else "basis")
    return feature_matrix(lf.configs, lf.scheme, kind), labels


def two_group_dataset(lf: LandmarkFile, kind: str = "absolute") -> tuple[TwoGroupDataset, list[str]]:
    values, labels = feature_table(lf, kind)
    i1, i2, order = lf.split()
    ds = TwoGroupDataset(
        values[i1],
        values[i2],
        kind=kind,
        registration="axis" if kind == "landmark" else "basis",
        index_map=labels,
        ids1=[lf.subjects[i].id for i in i1],
        ids2=[lf.subjects[i].id for i in i2],
    )
    return ds, order


def load_weights(path) -> WeightVector:
    """Weights from a JSON list / ``{"weights": [...]}`` or a CSV with a ``weight`` column."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        doc = json.loads(text)
        values = doc["weights"] if isinstance(doc, dict) else doc
    else:
        import csv

        rows = list(csv.DictReader(text.splitlines()))
        values = [float(r["weight"]) for r in rows]
    return WeightVector(np.array(values, dtype=float), "user")


def make_spec(name: str, lf: LandmarkFile, weights: str | WeightVector = "equal") -> ScoreSpec:
    """Score spec for a CLI score name and weighting choice."""
    if name not in SCORE_NAMES:
        raise ValueError(f"unknown score {name!r}; choose from {', '.join(SCORE_NAMES)}")
    if name == "bock":
        return ScoreSpec("additive", "quadratic", bock_weights(lf.scheme, lf.dimension), name="bock")
    family = "star" if name.startswith("star") else "additive"
    psi = "linear" if name.endswith("l1") else "quadratic"
    if isinstance(weights, str) and weights == "equal":
        return ScoreSpec(family, psi, None, name=name)
    if isinstance(weights, str) and weights == "adaptive":
        w = adaptive_weights(registered_dataset(lf), lf.scheme, "landmark" if family == "star" else "absolute")
        return ScoreSpec(family, psi, w, name=f"weighted-{name}")
    w = weights
    if family == "star":
        J_axis = lf.scheme.n_pairs + lf.scheme.n_solos
        J_basis = lf.scheme.n_features(lf.dimension)
        if len(w) not in (J_axis, J_basis):
            raise ValueError(f"{len(w)} weights given; expected {J_axis} (per landmark) or {J_basis}")
        if len(w) != J_axis:
            w = landmark_weights_from_features(w, feature_labels(lf.scheme, lf.dimension))
    return ScoreSpec(family, psi, w, name=f"weighted-{name}")


def score_rows(lf: LandmarkFile, specs: list[ScoreSpec]) -> list[dict]:
    """Long-format score table: one row per (subject, score).

    The landmark-level L1 score is also emitted halved as ``<name>-scaled``.
    """
    values, labels = feature_table(lf, "absolute")
    order = lf.group_order()
    rows = []

    def add(name, scores):
        for s, u in zip(lf.subjects, scores):
            rows.append(
                {"id": s.id, "group": s.group, "group_index": order.index(s.group) + 1,
                 "frame": lf.frame or "", "score": name, "value": float(u)}
            )

    for spec in specs:
        scores = score_matrix(values, spec, labels, "absolute")
        add(spec.name, scores)
        if spec.family == "star" and spec.psi == "linear":
            add(f"{spec.name}-scaled", [scale_star_l1(float(u)) for u in scores])
    return rows
