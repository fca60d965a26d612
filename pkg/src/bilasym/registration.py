"""Rigid-body Procrustes registration and midplane estimation.

Everything works in size-and-shape space: rotations and translations only,
never scaling or reflections.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import PairingScheme, Plane, RigidMotion, as_config, reflect_config, validate_scheme

log = logging.getLogger(__name__)

GPA_TOL = 1e-10
GPA_MAX_ITER = 200


class NonConvergence(RuntimeError):
    pass


class DegenerateConfiguration(ValueError):
    pass


class NonUnitNormal(ValueError):
    pass


def householder(normal) -> np.ndarray:
    """Reflection matrix ``I - 2 n n^T`` through the hyperplane with unit normal ``n``."""
    n = np.asarray(normal, dtype=float).reshape(-1)
    if abs(np.linalg.norm(n) - 1.0) > 1e-10:
        raise NonUnitNormal(f"normal has length {np.linalg.norm(n):.6g}, expected 1")
    return np.eye(n.size) - 2.0 * np.outer(n, n)


def apply_rigid(X, motion: RigidMotion) -> np.ndarray:
    X = as_config(X)
    if X.shape[1] != motion.dim:
        raise ValueError(f"configuration is {X.shape[1]}-D but the motion is {motion.dim}-D")
    return X @ motion.rotation + motion.translation


def transform_plane(plane: Plane, motion: RigidMotion) -> Plane:
    n = plane.normal
    new_n = motion.rotation.T @ n
    return Plane(new_n / np.linalg.norm(new_n), plane.offset + n @ motion.rotation @ motion.translation)


def _rotation_fit(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Proper rotation ``R`` minimising ``||A R - B||_F`` for centred ``A`` and ``B``."""
    U, _, Vt = np.linalg.svd(A.T @ B)
    d = np.ones(A.shape[1])
    d[-1] = np.sign(np.linalg.det(U @ Vt)) or 1.0
    return (U * d) @ Vt


def opa_rigid(X, target) -> tuple[RigidMotion, float]:
    """Ordinary Procrustes fit of ``X`` onto ``target`` by rotation and translation.

    Returns the motion and the residual Frobenius norm after alignment.
    """
    X = as_config(X)
    target = as_config(target)
    if X.shape != target.shape:
        raise ValueError(f"shape mismatch: {X.shape} vs {target.shape}")
    cx = X.mean(axis=0)
    ct = target.mean(axis=0)
    A = X - cx
    if np.linalg.norm(A) < 1e-300:
        raise DegenerateConfiguration("all landmarks coincide")
    R = _rotation_fit(A, target - ct)
    motion = RigidMotion(R, ct - cx @ R)
    residual = float(np.linalg.norm(apply_rigid(X, motion) - target))
    return motion, residual


@dataclass
class GPAResult:
    mean: np.ndarray
    fitted: list[np.ndarray]
    motions: list[RigidMotion]
    objective: list[float] = field(default_factory=list)
    iterations: int = 0


def gpa(configs: Sequence, tol: float = GPA_TOL, max_iter: int = GPA_MAX_ITER) -> GPAResult:
    """Generalised Procrustes analysis without scaling.

    Configurations are centred first.  Each sweep rotates every configuration
    onto the current mean and then recomputes the mean as the landmark-wise
    average.  ``objective`` records the total Procrustes sum of squares
    after each sweep; iteration stops when its relative decrease falls
    below ``tol``.
    """
    Xs = [as_config(X) for X in configs]
    if len(Xs) < 2:
        raise ValueError("GPA needs at least two configurations")
    shape = Xs[0].shape
    if any(X.shape != shape for X in Xs):
        raise ValueError("all configurations must share K and M")
    centroids = [X.mean(axis=0) for X in Xs]
    centred = [X - c for X, c in zip(Xs, centroids)]
    if any(np.linalg.norm(C) < 1e-300 for C in centred):
        raise DegenerateConfiguration("a configuration has all landmarks coincident")

    M = shape[1]
    rotations = [np.eye(M) for _ in Xs]
    fitted = list(centred)
    mean = centred[0].copy()
    history: list[float] = []
    for it in range(1, max_iter + 1):
        rotations = [_rotation_fit(C, mean) for C in centred]
        fitted = [C @ R for C, R in zip(centred, rotations)]
        mean = np.mean(fitted, axis=0)
        obj = float(sum(np.sum((F - mean) ** 2) for F in fitted))
        history.append(obj)
        if len(history) > 1:
            prev = history[-2]
            if prev <= 1e-300 or (prev - obj) <= tol * prev:
                break
        elif obj <= 1e-300:
            break
    else:
        raise NonConvergence(f"GPA did not converge in {max_iter} iterations")

    motions = [RigidMotion(R, -c @ R) for R, c in zip(rotations, centroids)]
    return GPAResult(mean, fitted, motions, history, it)


@dataclass
class RegisteredDataset:
    """Configurations registered so the midplane is ``{x_1 = 0}``.

    ``motions[n]`` maps the raw configuration ``n`` onto ``configs[n]``.
    """

    configs: np.ndarray
    mean_shape: np.ndarray
    scheme: PairingScheme
    mode: str = "basis"
    provenance: str = "estimated"
    motions: list[RigidMotion] | None = None
    plane: Plane = field(init=False)

    def __post_init__(self):
        self.configs = np.asarray(self.configs, dtype=float)
        self.plane = Plane(np.eye(self.configs.shape[2])[0], 0.0)

    @classmethod
    def from_registered(cls, configs, scheme: PairingScheme, mode: str = "basis", provenance: str = "known"):
        """Wrap data that is already registered.

        The mean shape is the landmark-wise mean of the data augmented by
        its reflections.
        """
        configs = np.asarray([as_config(X, scheme) for X in configs])
        mean = configs.mean(axis=0)
        mean = 0.5 * (mean + reflect_config(mean, scheme))
        return cls(configs, mean, scheme, mode, provenance)

    def raw_planes(self) -> list[Plane]:
        """The estimated midplane expressed in each subject's raw coordinates."""
        if self.motions is None:
            return [self.plane for _ in self.configs]
        return [transform_plane(self.plane, m.inverse()) for m in self.motions]


def _reflection_normal(mean: np.ndarray, scheme: PairingScheme) -> np.ndarray:
    """Unit normal of the mirror plane of a (near) bilaterally symmetric centred shape.

    Fits the improper orthogonal map carrying the pair-swapped shape onto
    the shape itself and returns its eigenvector for eigenvalue -1.
    """
    M = mean.shape[1]
    if M == 1:
        return np.ones(1)
    swapped = mean[scheme.permutation()]
    U, _, Vt = np.linalg.svd(swapped.T @ mean)
    d = np.ones(M)
    d[-1] = -np.sign(np.linalg.det(U @ Vt)) or -1.0
    Q = (U * d) @ Vt
    w, V = np.linalg.eigh(0.5 * (Q + Q.T))
    return V[:, 0]


def _basis_with_first(n: np.ndarray) -> np.ndarray:
    """Rotation matrix whose first column is ``n``."""
    M = n.size
    # Full QR of n gives an orthonormal completion.
    Q, _ = np.linalg.qr(np.column_stack([n, np.eye(M)]))
    B = Q[:, :M]
    if B[:, 0] @ n < 0:
        B[:, 0] *= -1
    if M > 1 and np.linalg.det(B) < 0:
        B[:, -1] *= -1
    return B


def _inplane_fit(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Rotation ``diag(s, Q)`` keeping axis 1 (up to sign) that best maps ``A`` onto ``B``."""
    M = A.shape[1]
    if M == 1:
        return np.eye(1)
    best, best_cost = None, np.inf
    for s in (1.0, -1.0):
        S = A[:, 1:].T @ B[:, 1:]
        U, _, Vt = np.linalg.svd(S)
        d = np.ones(M - 1)
        d[-1] = s * (np.sign(np.linalg.det(U @ Vt)) or 1.0)
        Q = (U * d) @ Vt
        R = np.zeros((M, M))
        R[0, 0] = s
        R[1:, 1:] = Q
        cost = np.sum((A @ R - B) ** 2)
        if cost < best_cost - 1e-12:
            best, best_cost = R, cost
    return best


def _principal_orientation(mean: np.ndarray, scheme: PairingScheme, up_landmarks: Sequence[int] | None) -> np.ndarray:
    """Default in-plane basis: principal axes of the midplane projection.

    Largest variance goes to coordinate 2.  Coordinate 2 is signed so the
    ``up_landmarks`` centroid is positive (default: the solos, else the first
    pair); for M >= 3 coordinate 1 is signed so left landmarks sit at positive
    ``x_1``; the remaining sign is whatever keeps the determinant +1.
    """
    M = mean.shape[1]
    R = np.eye(M)
    if M == 1:
        return R
    inplane = mean[:, 1:]
    w, V = np.linalg.eigh(inplane.T @ inplane)
    V = V[:, ::-1]
    if up_landmarks is None:
        up_landmarks = list(scheme.solos) or list(scheme.pairs[0] if scheme.pairs else [0])
    up = (inplane @ V[:, 0])[list(up_landmarks)].mean()
    if up < 0:
        V[:, 0] *= -1
    s = 1.0
    if M >= 3 and scheme.pairs:
        left = [l for l, _ in scheme.pairs]
        if mean[left, 0].mean() < 0:
            s = -1.0
    R[0, 0] = s
    R[1:, 1:] = V
    if np.linalg.det(R) < 0:
        if M >= 3:
            R[1:, -1] *= -1
        else:
            R[0, 0] *= -1
    return R


def estimate_midplane(
    configs: Sequence,
    scheme: PairingScheme,
    mode: str = "basis",
    orientation_hint=None,
    up_landmarks: Sequence[int] | None = None,
    tol: float = GPA_TOL,
    max_iter: int = GPA_MAX_ITER,
) -> RegisteredDataset:
    """Estimate the midplane from the landmarks and register every configuration.

    The data are augmented with their reflections, superimposed by GPA, and
    the (symmetrised) Procrustes mean is rotated so its mirror plane becomes
    ``{x_1 = 0}``.  In basis mode the in-plane axes are then fixed, either by
    fitting ``orientation_hint`` or by the principal-axes fallback, and each
    configuration is fitted onto that oriented mean.  Axis mode keeps the
    GPA fit and only rotates the midplane normal onto axis 1.
    """
    if mode not in ("axis", "basis"):
        raise ValueError(f"mode must be 'axis' or 'basis', not {mode!r}")
    Xs = [as_config(X, scheme) for X in configs]
    if not Xs:
        raise ValueError("no configurations given")
    validate_scheme(scheme, Xs[0].shape[0])
    N = len(Xs)

    augmented = Xs + [reflect_config(X, scheme) for X in Xs]
    fit = gpa(augmented, tol=tol, max_iter=max_iter)
    mean = fit.mean - fit.mean.mean(axis=0)

    n = _reflection_normal(mean, scheme)
    mean = 0.5 * (mean + mean[scheme.permutation()] @ householder(n))
    B = _basis_with_first(n)
    axis_mean = mean @ B
    axis_mean = 0.5 * (axis_mean + reflect_config(axis_mean, scheme))

    if mode == "axis":
        rot = RigidMotion(B, np.zeros(B.shape[0]))
        motions = [m.then(rot) for m in fit.motions[:N]]
        registered = np.array([apply_rigid(X, m) for X, m in zip(Xs, motions)])
        return RegisteredDataset(registered, axis_mean, scheme, "axis", "estimated", motions)

    if orientation_hint is not None:
        hint = as_config(orientation_hint, scheme)
        if hint.shape != axis_mean.shape:
            raise ValueError("orientation hint must match the configurations' shape")
        R = _inplane_fit(axis_mean, hint - hint.mean(axis=0))
    else:
        R = _principal_orientation(axis_mean, scheme, up_landmarks)
    oriented = axis_mean @ R
    oriented = 0.5 * (oriented + reflect_config(oriented, scheme))

    motions = [opa_rigid(X, oriented)[0] for X in Xs]
    registered = np.array([apply_rigid(X, m) for X, m in zip(Xs, motions)])
    return RegisteredDataset(registered, oriented, scheme, "basis", "estimated", motions)
