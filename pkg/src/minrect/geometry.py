"""Pinhole cameras, stereo rigs and two-view epipolar geometry.

Conventions: intrinsics ``A`` are upper-triangular with unit last element,
``R``/``t`` map world coordinates to camera coordinates (``x_cam = R X + t``),
image points are homogeneous 3-vectors in pixels with the origin at the
center of the top-left pixel.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import InvalidCalibration, InvalidCamera, InvalidRig, SingularProjection

COND_LIMIT = 1e12
_ORTHO_TOL = 1e-9


def _freeze(obj, name, value):
    arr = np.array(value, dtype=float)
    arr.setflags(write=False)
    object.__setattr__(obj, name, arr)
    return arr


@dataclass(frozen=True)
class Camera:
    """One calibrated pinhole camera."""

    A: np.ndarray
    R: np.ndarray
    t: np.ndarray
    width: int
    height: int

    def __post_init__(self):
        A = _freeze(self, "A", self.A)
        R = _freeze(self, "R", self.R)
        t = _freeze(self, "t", self.t)
        if A.shape != (3, 3) or R.shape != (3, 3) or t.shape != (3,):
            raise InvalidCamera("A and R must be 3x3, t must be a 3-vector")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(R)) and np.all(np.isfinite(t))):
            raise InvalidCamera("camera parameters must be finite")
        if abs(A[1, 0]) > 0 or abs(A[2, 0]) > 0 or abs(A[2, 1]) > 0:
            raise InvalidCamera("intrinsic matrix must be upper-triangular")
        if A[0, 0] <= 0 or A[1, 1] <= 0 or abs(A[2, 2] - 1.0) > 1e-12:
            raise InvalidCamera("intrinsics need positive focal terms and A[2,2] == 1")
        if np.linalg.norm(R.T @ R - np.eye(3)) > _ORTHO_TOL:
            raise InvalidCamera("rotation is not orthonormal")
        if abs(np.linalg.det(R) - 1.0) > _ORTHO_TOL:
            raise InvalidCamera("rotation determinant must be +1")
        if int(self.width) < 2 or int(self.height) < 2:
            raise InvalidCamera("image must be at least 2x2 pixels")
        object.__setattr__(self, "width", int(self.width))
        object.__setattr__(self, "height", int(self.height))

    @property
    def projection(self) -> np.ndarray:
        """The 3x3 product A*R."""
        return self.A @ self.R

    @property
    def axis(self) -> np.ndarray:
        """Optical axis direction in world coordinates."""
        return self.R[2, :].copy()


def optical_center(cam: Camera) -> np.ndarray:
    """Camera center in world coordinates, -R^-1 t."""
    return -np.linalg.solve(cam.R, cam.t)


@dataclass(frozen=True)
class StereoRig:
    """An ordered pair of calibrated cameras with distinct centers."""

    cam1: Camera
    cam2: Camera

    def __post_init__(self):
        if np.linalg.norm(self.baseline) <= 1e-12:
            raise InvalidRig("optical centers coincide")

    @property
    def baseline(self) -> np.ndarray:
        return optical_center(self.cam2) - optical_center(self.cam1)

    @property
    def x_hat(self) -> np.ndarray:
        b = self.baseline
        return b / np.linalg.norm(b)


def _checked_inverse(P: np.ndarray, what: str) -> np.ndarray:
    if np.linalg.cond(P) > COND_LIMIT:
        raise SingularProjection(f"{what} is singular within conditioning bound")
    return np.linalg.inv(P)


def normalize_matrix(F: np.ndarray) -> np.ndarray:
    """Unit Frobenius norm with the largest-magnitude entry made positive."""
    n = np.linalg.norm(F)
    if n == 0:
        return F.copy()
    F = F / n
    flat = F.ravel()
    if flat[np.argmax(np.abs(flat))] < 0:
        F = -F
    return F


def fundamental_matrix(rig: StereoRig) -> np.ndarray:
    """Fundamental matrix of the rig (p2^T F p1 = 0), normalised."""
    P1 = rig.cam1.projection
    P2 = rig.cam2.projection
    _checked_inverse(P2, "A2*R2")
    G = P2 @ rig.baseline
    Hm = P2 @ _checked_inverse(P1, "A1*R1")
    F = np.array(
        [
            G[1] * Hm[2, :] - G[2] * Hm[1, :],
            G[2] * Hm[0, :] - G[0] * Hm[2, :],
            G[0] * Hm[1, :] - G[1] * Hm[0, :],
        ]
    )
    return normalize_matrix(F)


def epipoles(rig: StereoRig) -> tuple[np.ndarray, np.ndarray]:
    """Normalised epipoles (e1, e2); kernels of F and F^T respectively."""
    b = rig.baseline
    e1 = rig.cam1.projection @ b
    e2 = rig.cam2.projection @ b
    return e1 / np.linalg.norm(e1), e2 / np.linalg.norm(e2)


def project(cam: Camera, X) -> np.ndarray:
    """Project a world point; homogeneous pixel coordinates, unnormalised."""
    X = np.asarray(X, dtype=float)
    return cam.A @ (cam.R @ X + cam.t)


def is_in_front(cam: Camera, X) -> bool:
    """Whether the point has positive depth in the camera."""
    X = np.asarray(X, dtype=float)
    return float((cam.R @ X + cam.t)[2]) > 0.0


def epipolar_line(F: np.ndarray, p, direction: str = "1->2") -> np.ndarray:
    """Epipolar line of ``p``: F p for direction "1->2", F^T p for "2->1"."""
    p = np.asarray(p, dtype=float)
    if direction == "1->2":
        return F @ p
    if direction == "2->1":
        return F.T @ p
    raise ValueError(f"unknown direction {direction!r}")


def camera_to_dict(cam: Camera) -> dict:
    return {
        "A": cam.A.tolist(),
        "R": cam.R.tolist(),
        "t": cam.t.tolist(),
        "width": cam.width,
        "height": cam.height,
    }


def camera_from_dict(d: dict) -> Camera:
    try:
        return Camera(
            A=np.array(d["A"], dtype=float),
            R=np.array(d["R"], dtype=float),
            t=np.array(d["t"], dtype=float),
            width=int(d["width"]),
            height=int(d["height"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidCalibration(f"bad camera record: {exc}") from exc


def rig_to_dict(rig: StereoRig) -> dict:
    return {"cam1": camera_to_dict(rig.cam1), "cam2": camera_to_dict(rig.cam2)}


def load_calibration(path) -> StereoRig:
    """Read a two-camera calibration JSON file.

    Rejects non-finite numbers; matrices are row-major lists of rows.
    """
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh, parse_constant=_reject_constant)
        except json.JSONDecodeError as exc:
            raise InvalidCalibration(f"calibration is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or "cam1" not in data or "cam2" not in data:
        raise InvalidCalibration("calibration must contain 'cam1' and 'cam2'")
    return StereoRig(camera_from_dict(data["cam1"]), camera_from_dict(data["cam2"]))


def _reject_constant(name):
    raise InvalidCalibration(f"non-finite number {name!r} in calibration")
