"""Core value types shared across the package.

Configurations are plain ``(K, M)`` float arrays.  Landmark indices are
0-based everywhere inside the package; the 1-based labels used in files and
reports are converted by :meth:`PairingScheme.from_one_based` and
:meth:`PairingScheme.to_one_based`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np


class SchemeError(ValueError):
    """Invalid pairing scheme for the given landmark count."""


class DuplicateIndex(SchemeError):
    pass


class MissingIndex(SchemeError):
    pass


class IndexOutOfRange(SchemeError):
    pass


@dataclass(frozen=True)
class PairingScheme:
    """Partition of landmarks into ordered (left, right) pairs and solos.

    Indices are 0-based.
    """

    pairs: tuple[tuple[int, int], ...]
    solos: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((int(l), int(r)) for l, r in self.pairs))
        object.__setattr__(self, "solos", tuple(int(s) for s in self.solos))

    @classmethod
    def from_one_based(cls, pairs: Iterable[Sequence[int]], solos: Iterable[int] = ()) -> "PairingScheme":
        return cls(tuple((l - 1, r - 1) for l, r in pairs), tuple(s - 1 for s in solos))

    def to_one_based(self) -> dict:
        return {
            "pairs": [[l + 1, r + 1] for l, r in self.pairs],
            "solos": [s + 1 for s in self.solos],
        }

    @property
    def n_pairs(self) -> int:
        return len(self.pairs)

    @property
    def n_solos(self) -> int:
        return len(self.solos)

    @property
    def n_landmarks(self) -> int:
        return 2 * self.n_pairs + self.n_solos

    def permutation(self) -> np.ndarray:
        """Row permutation that swaps the two landmarks of every pair."""
        perm = np.arange(self.n_landmarks)
        for l, r in self.pairs:
            perm[l], perm[r] = r, l
        return perm

    def n_features(self, M: int, registration: str = "basis") -> int:
        if registration == "basis":
            return M * self.n_pairs + self.n_solos
        return self.n_pairs + self.n_solos


def validate_scheme(scheme: PairingScheme, K: int) -> None:
    """Raise a :class:`SchemeError` subclass unless ``scheme`` partitions ``range(K)``.

    Messages name the offending landmark with its 1-based label.
    """
    seen: set[int] = set()
    flat = [i for pair in scheme.pairs for i in pair] + list(scheme.solos)
    for idx in flat:
        if idx < 0 or idx >= K:
            raise IndexOutOfRange(f"landmark {idx + 1} is outside 1..{K}")
        if idx in seen:
            raise DuplicateIndex(f"landmark {idx + 1} appears more than once in the scheme")
        seen.add(idx)
    missing = sorted(set(range(K)) - seen)
    if missing:
        raise MissingIndex(f"landmark {missing[0] + 1} is not assigned to a pair or solo")


def as_config(X, scheme: PairingScheme | None = None) -> np.ndarray:
    """Validate and return ``X`` as a finite ``(K, M)`` float array."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError(f"configuration must be a non-empty K x M matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("configuration contains non-finite coordinates")
    if scheme is not None and X.shape[0] != scheme.n_landmarks:
        raise SchemeError(
            f"configuration has {X.shape[0]} landmarks but the scheme describes {scheme.n_landmarks}"
        )
    return X


def reflect_config(X, scheme: PairingScheme) -> np.ndarray:
    """Reflect a registered configuration through the plane ``x_1 = 0``.

    The first column is negated and the rows of each pair are swapped, so a
    bilaterally symmetric configuration is a fixed point.
    """
    X = as_config(X, scheme)
    out = X[scheme.permutation()].copy()
    out[:, 0] *= -1.0
    return out


@dataclass(frozen=True)
class Plane:
    """Hyperplane ``{x : normal . x = offset}`` with a unit normal."""

    normal: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float).reshape(-1)
        if abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise ValueError("plane normal must have unit length")
        n.setflags(write=False)
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    def signed_distance(self, points) -> np.ndarray:
        return np.asarray(points, dtype=float) @ self.normal - self.offset


@dataclass(frozen=True)
class RigidMotion:
    """Row-vector rigid motion ``X -> X @ rotation + translation``."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        R = np.array(self.rotation, dtype=float)
        c = np.array(self.translation, dtype=float).reshape(-1)
        M = R.shape[0]
        if R.shape != (M, M) or c.shape != (M,):
            raise ValueError("rotation must be M x M and translation length M")
        if not np.allclose(R.T @ R, np.eye(M), atol=1e-10, rtol=0):
            raise ValueError("rotation is not orthogonal")
        if abs(np.linalg.det(R) - 1.0) > 1e-10:
            raise ValueError("rotation must have determinant +1")
        R.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", c)

    @classmethod
    def identity(cls, M: int) -> "RigidMotion":
        return cls(np.eye(M), np.zeros(M))

    @property
    def dim(self) -> int:
        return self.rotation.shape[0]

    def inverse(self) -> "RigidMotion":
        Rt = self.rotation.T
        return RigidMotion(Rt, -self.translation @ Rt)

    def then(self, other: "RigidMotion") -> "RigidMotion":
        """Motion equivalent to applying ``self`` first and ``other`` second."""
        return RigidMotion(
            self.rotation @ other.rotation,
            self.translation @ other.rotation + other.translation,
        )


class FeatureLabel(NamedTuple):
    """Origin of one feature position.

    ``landmarks`` holds 0-based indices (two for a pair, one for a solo);
    ``coordinate`` is the 0-based axis, or ``None`` for a landmark-level pair
    feature that pools all axes.
    """

    landmarks: tuple[int, ...]
    coordinate: int | None

    @property
    def is_pair(self) -> bool:
        return len(self.landmarks) == 2

    def describe(self) -> str:
        one = tuple(i + 1 for i in self.landmarks)
        if self.is_pair:
            head = f"pair ({one[0]},{one[1]})"
            if self.coordinate is None:
                return head
            return f"{head}, coordinate {self.coordinate + 1}"
        return f"solo {one[0]}"

    def short(self) -> str:
        one = [str(i + 1) for i in self.landmarks]
        if self.is_pair:
            base = "p" + "_".join(one)
            return base if self.coordinate is None else f"{base}_c{self.coordinate + 1}"
        return "s" + one[0]


def feature_labels(scheme: PairingScheme, M: int, registration: str = "basis") -> tuple[FeatureLabel, ...]:
    """Canonical feature order: pairs (coordinates 1..M each), then solos."""
    labels = []
    for pair in scheme.pairs:
        if registration == "basis":
            labels.extend(FeatureLabel(pair, m) for m in range(M))
        else:
            labels.append(FeatureLabel(pair, None))
    labels.extend(FeatureLabel((s,), 0) for s in scheme.solos)
    return tuple(labels)


KINDS = ("signed", "absolute", "landmark")
REGISTRATIONS = ("axis", "basis")


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    kind: str
    registration: str
    index_map: tuple[FeatureLabel, ...]

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(-1)
        if self.kind not in KINDS:
            raise ValueError(f"unknown feature kind {self.kind!r}")
        if self.registration not in REGISTRATIONS:
            raise ValueError(f"unknown registration {self.registration!r}")
        if len(self.index_map) != v.size:
            raise ValueError("index_map length does not match the feature count")
        if self.kind != "signed" and np.any(v < 0):
            raise ValueError(f"{self.kind} features must be nonnegative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "index_map", tuple(self.index_map))

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class TwoGroupDataset:
    """Feature matrices of two groups, group 2 being the one suspected more asymmetric."""

    group1: np.ndarray
    group2: np.ndarray
    kind: str = "absolute"
    registration: str = "basis"
    index_map: tuple[FeatureLabel, ...] = field(default=())
    ids1: tuple[str, ...] = ()
    ids2: tuple[str, ...] = ()

    def __post_init__(self):
        g1 = np.array(self.group1, dtype=float, ndmin=2)
        g2 = np.array(self.group2, dtype=float, ndmin=2)
        if g1.ndim != 2 or g2.ndim != 2 or g1.shape[1] != g2.shape[1]:
            raise ValueError("both groups must be N_g x J matrices with the same J")
        if self.index_map and len(self.index_map) != g1.shape[1]:
            raise ValueError("index_map length does not match the feature count")
        if self.kind != "signed" and (np.any(g1 < 0) or np.any(g2 < 0)):
            raise ValueError(f"{self.kind} features must be nonnegative")
        g1.setflags(write=False)
        g2.setflags(write=False)
        object.__setattr__(self, "group1", g1)
        object.__setattr__(self, "group2", g2)
        object.__setattr__(self, "ids1", tuple(self.ids1) or tuple(f"g1_{i + 1}" for i in range(len(g1))))
        object.__setattr__(self, "ids2", tuple(self.ids2) or tuple(f"g2_{i + 1}" for i in range(len(g2))))

    @classmethod
    def from_vectors(cls, group1: Sequence[FeatureVector], group2: Sequence[FeatureVector], ids1=(), ids2=()):
        vecs = list(group1) + list(group2)
        if not vecs:
            raise ValueError("no feature vectors given")
        ref = vecs[0]
        for fv in vecs[1:]:
            if (fv.kind, fv.registration, fv.index_map) != (ref.kind, ref.registration, ref.index_map):
                raise ValueError("feature vectors disagree on kind, registration or index map")
        J = len(ref)
        as_mat = lambda vs: np.array([fv.values for fv in vs], dtype=float).reshape(len(vs), J)
        return cls(as_mat(group1), as_mat(group2), ref.kind, ref.registration, ref.index_map, ids1, ids2)

    @property
    def n1(self) -> int:
        return self.group1.shape[0]

    @property
    def n2(self) -> int:
        return self.group2.shape[0]

    @property
    def n_features(self) -> int:
        return self.group1.shape[1]

    def pooled(self) -> np.ndarray:
        return np.vstack([self.group1, self.group2])

    def require_testable(self) -> None:
        if self.n1 < 2 or self.n2 < 2:
            raise ValueError(f"each group needs at least 2 subjects (got {self.n1} and {self.n2})")


# Landmark layout of the lip-periphery smile data: 11 pairs and 2 solos (1-based).
SMILE_SCHEME = PairingScheme.from_one_based(
    [(1, 13), (2, 12), (3, 11), (4, 10), (5, 9), (6, 8), (20, 18), (21, 17), (22, 16), (23, 15), (24, 14)],
    [7, 19],
)


def sequential_scheme(n_pairs: int, n_solos: int) -> PairingScheme:
    """Pairs ``(1,2), (3,4), ...`` followed by the solos (1-based description)."""
    pairs = [(2 * i, 2 * i + 1) for i in range(n_pairs)]
    solos = list(range(2 * n_pairs, 2 * n_pairs + n_solos))
    return PairingScheme(tuple(pairs), tuple(solos))
