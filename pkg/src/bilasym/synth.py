"""Seeded synthetic bilateral landmark cohorts with known ground truth."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import PairingScheme, RigidMotion, feature_labels, reflect_config, sequential_scheme


def random_rotation(M: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed rotation with determinant +1."""
    Q, R = np.linalg.qr(rng.standard_normal((M, M)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] *= -1
    return Q


def random_motion(M: int, rng: np.random.Generator, shift_scale: float = 5.0) -> RigidMotion:
    return RigidMotion(random_rotation(M, rng), shift_scale * rng.standard_normal(M))


def make_symmetric_template(
    n_pairs: int,
    n_solos: int,
    M: int,
    seed: int = 0,
    scheme: PairingScheme | None = None,
    spread: float = 1.0,
) -> np.ndarray:
    """Random configuration that is exactly symmetric about ``x_1 = 0``.

    Left landmarks get ``x_1`` in ``[0.5, 2] * spread``; their partners are
    the exact mirror images; solos sit on the plane.
    """
    if n_pairs < 1 and n_solos < 1:
        raise ValueError("need at least one pair or solo")
    scheme = scheme or sequential_scheme(n_pairs, n_solos)
    if (scheme.n_pairs, scheme.n_solos) != (n_pairs, n_solos):
        raise ValueError("scheme does not match the requested pair/solo counts")
    rng = np.random.default_rng(seed)
    X = np.zeros((scheme.n_landmarks, M))
    for l, r in scheme.pairs:
        p = spread * rng.standard_normal(M)
        p[0] = spread * rng.uniform(0.5, 2.0)
        X[l] = p
        X[r] = p
        X[r, 0] = -p[0]
    for s in scheme.solos:
        X[s, 1:] = spread * rng.standard_normal(M - 1)
    X[:, 1:] -= X[:, 1:].mean(axis=0)
    return X


def offset_displacement(offsets, scheme: PairingScheme, M: int) -> np.ndarray:
    """Landmark displacement whose signed features equal ``offsets`` exactly.

    A pair's coordinate-1 offset moves both landmarks by half of it along
    ``x_1``; an offset on coordinate ``m >= 2`` moves the left landmark by
    ``+half`` and the right by ``-half``; a solo moves by the full offset.
    """
    offsets = np.asarray(offsets, dtype=float)
    J = M * scheme.n_pairs + scheme.n_solos
    if offsets.shape != (J,):
        raise ValueError(f"offsets must have length {J}")
    D = np.zeros((scheme.n_landmarks, M))
    j = 0
    for l, r in scheme.pairs:
        half = 0.5 * offsets[j : j + M]
        D[l] += half
        D[r, 0] += half[0]
        D[r, 1:] -= half[1:]
        j += M
    for s in scheme.solos:
        D[s, 0] += offsets[j]
        j += 1
    return D


@dataclass
class SynthSpec:
    scheme: PairingScheme
    M: int = 3
    template: np.ndarray | None = None
    noise_sigma: float = 0.05
    asymmetry_offsets: np.ndarray | None = None
    n1: int = 12
    n2: int = 13
    nuisance_motion: bool = False
    seed: int = 0
    group_labels: tuple[str, str] = ("control", "case")

    def __post_init__(self):
        if self.template is None:
            self.template = make_symmetric_template(
                self.scheme.n_pairs, self.scheme.n_solos, self.M, self.seed, self.scheme
            )
        self.template = np.asarray(self.template, dtype=float)
        if self.template.shape != (self.scheme.n_landmarks, self.M):
            raise ValueError("template shape does not match the scheme and dimension")
        if not np.array_equal(reflect_config(self.template, self.scheme), self.template):
            raise ValueError("template is not exactly bilaterally symmetric")
        J = self.M * self.scheme.n_pairs + self.scheme.n_solos
        if self.asymmetry_offsets is None:
            self.asymmetry_offsets = np.zeros(J)
        self.asymmetry_offsets = np.asarray(self.asymmetry_offsets, dtype=float)
        if self.asymmetry_offsets.shape != (J,):
            raise ValueError(f"asymmetry_offsets must have length {J}")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError("group sizes must be positive")


@dataclass
class SyntheticData:
    configs: np.ndarray
    groups: list[str]
    ids: list[str]
    registered: bool
    truth: dict = field(default_factory=dict)


def generate_dataset(spec: SynthSpec) -> SyntheticData:
    """Draw ``n1`` control and ``n2`` case subjects around the template.

    Subject ``n`` uses its own generator seeded by ``(seed, n)``.  Case
    subjects carry the planted offsets; nuisance motions, when enabled, are
    applied last so the raw data must be registered again.
    """
    M = spec.M
    shift = offset_displacement(spec.asymmetry_offsets, spec.scheme, M)
    configs, groups, ids, motions = [], [], [], []
    for n in range(spec.n1 + spec.n2):
        rng = np.random.default_rng([spec.seed, n])
        X = spec.template + spec.noise_sigma * rng.standard_normal(spec.template.shape)
        in_case = n >= spec.n1
        if in_case:
            X = X + shift
        if spec.nuisance_motion:
            m = random_motion(M, rng)
            X = X @ m.rotation + m.translation
            motions.append(m)
        configs.append(X)
        groups.append(spec.group_labels[int(in_case)])
        ids.append(f"{spec.group_labels[int(in_case)]}{n + 1 - (spec.n1 if in_case else 0):03d}")
    truth = {
        "seed": spec.seed,
        "offsets": spec.asymmetry_offsets.tolist(),
        "labels": [lab.describe() for lab in feature_labels(spec.scheme, M)],
        "noise_sigma": spec.noise_sigma,
        "template": spec.template.tolist(),
        "motions": motions,
    }
    return SyntheticData(np.array(configs), groups, ids, not spec.nuisance_motion, truth)
