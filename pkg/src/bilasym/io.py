"""Landmark file format (JSON) and CSV import.

A landmark file looks like::

    {
      "dimension": 2,
      "scheme": {"pairs": [[1, 3]], "solos": [2, 4]},
      "registration": "basis",
      "groups": ["control", "case"],
      "frame": "first",
      "subjects": [{"id": "s1", "group": "control", "coords": [[-1, 0], ...]}]
    }

Landmark indices are 1-based.  ``groups`` (optional) orders the two group
labels as (group 1, group 2); without it the labels are sorted.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import PairingScheme, SchemeError, validate_scheme

REGISTRATION_FLAGS = ("raw", "axis", "basis")


class LandmarkFileError(ValueError):
    pass


@dataclass
class Subject:
    id: str
    group: str
    coords: np.ndarray


@dataclass
class LandmarkFile:
    dimension: int
    scheme: PairingScheme
    registration: str
    subjects: list[Subject]
    frame: str | None = None
    groups: list[str] | None = None
    plane: dict | None = None
    mean_shape: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.registration not in REGISTRATION_FLAGS:
            raise LandmarkFileError(f"registration must be one of {REGISTRATION_FLAGS}, got {self.registration!r}")
        if not self.subjects:
            raise LandmarkFileError("file contains no subjects")
        K = self.scheme.n_landmarks
        for s in self.subjects:
            if s.coords.shape != (K, self.dimension):
                raise LandmarkFileError(
                    f"subject {s.id!r}: expected {K} landmarks in {self.dimension} dimensions, "
                    f"got shape {s.coords.shape}"
                )
            if not np.all(np.isfinite(s.coords)):
                raise LandmarkFileError(f"subject {s.id!r}: non-finite coordinate")

    @property
    def configs(self) -> np.ndarray:
        return np.array([s.coords for s in self.subjects])

    def group_order(self) -> list[str]:
        present = sorted({s.group for s in self.subjects})
        if self.groups:
            extra = [g for g in present if g not in self.groups]
            if extra:
                raise LandmarkFileError(f"group label {extra[0]!r} is not listed in 'groups'")
            return [g for g in self.groups if g in present]
        return present

    def split(self) -> tuple[list[int], list[int], list[str]]:
        """Indices of group-1 and group-2 subjects plus the two labels."""
        order = self.group_order()
        if len(order) != 2:
            raise LandmarkFileError(f"testing needs exactly two groups, found {len(order)}: {order}")
        g1 = [i for i, s in enumerate(self.subjects) if s.group == order[0]]
        g2 = [i for i, s in enumerate(self.subjects) if s.group == order[1]]
        return g1, g2, order


def _parse_scheme(doc: dict, K: int | None) -> PairingScheme:
    raw = doc.get("scheme")
    if not isinstance(raw, dict) or "pairs" not in raw:
        raise LandmarkFileError("missing 'scheme' with 'pairs' and 'solos'")
    try:
        pairs = [tuple(int(i) for i in p) for p in raw["pairs"]]
        solos = [int(i) for i in raw.get("solos", [])]
    except (TypeError, ValueError) as e:
        raise LandmarkFileError(f"scheme indices must be integers: {e}") from None
    for p in pairs:
        if len(p) != 2:
            raise LandmarkFileError(f"pair {list(p)} must have exactly two landmarks")
    scheme = PairingScheme.from_one_based(pairs, solos)
    if K is not None:
        try:
            validate_scheme(scheme, K)
        except SchemeError as e:
            raise LandmarkFileError(f"invalid scheme: {e}") from None
    return scheme


def from_dict(doc: dict) -> LandmarkFile:
    try:
        M = int(doc["dimension"])
    except (KeyError, TypeError, ValueError):
        raise LandmarkFileError("missing or invalid 'dimension'") from None
    if M < 1:
        raise LandmarkFileError("dimension must be at least 1")
    subjects_raw = doc.get("subjects")
    if not isinstance(subjects_raw, list) or not subjects_raw:
        raise LandmarkFileError("missing or empty 'subjects'")
    subjects = []
    for n, s in enumerate(subjects_raw, 1):
        sid = str(s.get("id", f"subject{n}"))
        try:
            coords = np.array(s["coords"], dtype=float)
        except (KeyError, TypeError, ValueError):
            raise LandmarkFileError(f"subject {sid!r} (#{n}): missing or malformed 'coords'") from None
        if coords.ndim != 2:
            raise LandmarkFileError(f"subject {sid!r} (#{n}): 'coords' must be a K x M list of rows")
        if coords.shape[1] != M:
            raise LandmarkFileError(f"subject {sid!r} (#{n}): rows have {coords.shape[1]} coordinates, dimension is {M}")
        subjects.append(Subject(sid, str(s.get("group", "")), coords))
    K = subjects[0].coords.shape[0]
    for n, s in enumerate(subjects, 1):
        if s.coords.shape[0] != K:
            raise LandmarkFileError(f"subject {s.id!r} (#{n}): has {s.coords.shape[0]} landmarks, expected {K}")
    scheme = _parse_scheme(doc, K)
    mean = doc.get("mean_shape")
    return LandmarkFile(
        dimension=M,
        scheme=scheme,
        registration=str(doc.get("registration", "raw")),
        subjects=subjects,
        frame=doc.get("frame"),
        groups=doc.get("groups"),
        plane=doc.get("plane"),
        mean_shape=None if mean is None else np.array(mean, dtype=float),
        meta=doc.get("meta", {}),
    )


def to_dict(lf: LandmarkFile) -> dict:
    doc = {
        "dimension": lf.dimension,
        "scheme": lf.scheme.to_one_based(),
        "registration": lf.registration,
    }
    if lf.groups:
        doc["groups"] = list(lf.groups)
    if lf.frame is not None:
        doc["frame"] = lf.frame
    if lf.plane is not None:
        doc["plane"] = lf.plane
    if lf.mean_shape is not None:
        doc["mean_shape"] = lf.mean_shape.tolist()
    if lf.meta:
        doc["meta"] = lf.meta
    doc["subjects"] = [{"id": s.id, "group": s.group, "coords": s.coords.tolist()} for s in lf.subjects]
    return doc


def read_landmarks(path) -> LandmarkFile:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise LandmarkFileError(f"{path}: not valid JSON (line {e.lineno}, column {e.colno}): {e.msg}") from None
    try:
        return from_dict(doc)
    except LandmarkFileError as e:
        raise LandmarkFileError(f"{path}: {e}") from None


def dumps(lf: LandmarkFile) -> str:
    # json writes floats with repr(), which round-trips exactly.
    return json.dumps(to_dict(lf), indent=1) + "\n"


def write_landmarks(lf: LandmarkFile, path) -> None:
    Path(path).write_text(dumps(lf), encoding="utf-8")


def read_csv_configs(path, scheme_path, registration: str = "raw") -> LandmarkFile:
    """Import a plain CSV table with a JSON sidecar holding the scheme.

    The CSV has columns ``id, group, landmark, x1, ..., xM`` with one row per
    landmark (1-based ``landmark``).  The sidecar is ``{"pairs": ..., "solos": ...}``.
    """
    sidecar = json.loads(Path(scheme_path).read_text(encoding="utf-8"))
    rows: dict[str, dict] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        coord_cols = [c for c in reader.fieldnames or [] if c.startswith("x") and c[1:].isdigit()]
        if not coord_cols:
            raise LandmarkFileError(f"{path}: no coordinate columns x1..xM")
        coord_cols.sort(key=lambda c: int(c[1:]))
        for line, row in enumerate(reader, 2):
            try:
                sid = row["id"]
                k = int(row["landmark"])
                xyz = [float(row[c]) for c in coord_cols]
            except (KeyError, ValueError, TypeError) as e:
                raise LandmarkFileError(f"{path}:{line}: bad row ({e})") from None
            entry = rows.setdefault(sid, {"group": row.get("group", ""), "lm": {}})
            entry["lm"][k] = xyz
    subjects = []
    for sid, entry in rows.items():
        K = max(entry["lm"])
        if sorted(entry["lm"]) != list(range(1, K + 1)):
            raise LandmarkFileError(f"{path}: subject {sid!r} has missing landmark rows")
        subjects.append({"id": sid, "group": entry["group"], "coords": [entry["lm"][k] for k in range(1, K + 1)]})
    return from_dict(
        {"dimension": len(coord_cols), "scheme": sidecar, "registration": registration, "subjects": subjects}
    )
