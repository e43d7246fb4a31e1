"""The perspective-distortion metric and its reduction to one scalar.

The metric scores a pair of perspective rows (w vectors) by how far the
transformations stray from affinity over the pixel grid, as a sum of two
Rayleigh quotients.  With the horizon parametrised by its y-intercept on
image 1, both w vectors become affine functions of that single scalar and
the metric a rational function of it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadDimensions, DegenerateCenter, PoleAtY, SingularProjection
from .geometry import COND_LIMIT, StereoRig

POLE_HALF_WIDTH = 1e-9  # relative half-width of the exclusion zone around poles


@dataclass(frozen=True)
class MomentMatrices:
    """Second-moment matrices of the integer pixel grid of one image."""

    ppt: np.ndarray  # centered moments, diagonal with zero last entry
    pcpct: np.ndarray  # outer product of the average pixel
    width: int
    height: int


def moment_matrices(width: int, height: int) -> MomentMatrices:
    """Closed-form pixel-grid moments for a width x height image."""
    if width < 2 or height < 2:
        raise BadDimensions("image must be at least 2x2 pixels")
    w, h = float(width), float(height)
    ppt = (w * h / 12.0) * np.diag([w * w - 1.0, h * h - 1.0, 0.0])
    v = np.array([(w - 1.0) / 2.0, (h - 1.0) / 2.0, 1.0])
    pcpct = np.outer(v, v)
    ppt.setflags(write=False)
    pcpct.setflags(write=False)
    return MomentMatrices(ppt=ppt, pcpct=pcpct, width=int(width), height=int(height))


@dataclass(frozen=True)
class DistortionOperands:
    """Matrices reducing the metric to a function of the horizon intercept."""

    L1: np.ndarray
    L2: np.ndarray
    M1: np.ndarray
    M2: np.ndarray
    C1: np.ndarray
    C2: np.ndarray
    moments1: MomentMatrices
    moments2: MomentMatrices


def _sym(M: np.ndarray) -> np.ndarray:
    M = (M + M.T) / 2.0
    M.setflags(write=False)
    return M


def operand_matrices(rig: StereoRig) -> DistortionOperands:
    """Build L, M and C matrices for a rig."""
    P1 = rig.cam1.projection
    P2 = rig.cam2.projection
    if np.linalg.cond(P1) > COND_LIMIT or np.linalg.cond(P2) > COND_LIMIT:
        raise SingularProjection("camera projection is singular within conditioning bound")
    P1inv = np.linalg.inv(P1)
    P2inv = np.linalg.inv(P2)
    x_hat = rig.x_hat
    ortho = np.eye(3) - np.outer(x_hat, x_hat)
    L1 = P1inv.T @ ortho @ P1inv
    L2 = P2inv.T @ ortho @ P1inv
    mom1 = moment_matrices(rig.cam1.width, rig.cam1.height)
    mom2 = moment_matrices(rig.cam2.width, rig.cam2.height)
    M1 = _sym(L1.T @ mom1.ppt @ L1)
    M2 = _sym(L2.T @ mom2.ppt @ L2)
    C1 = _sym(L1.T @ mom1.pcpct @ L1)
    C2 = _sym(L2.T @ mom2.pcpct @ L2)
    L1 = L1.copy()
    L2 = L2.copy()
    L1.setflags(write=False)
    L2.setflags(write=False)
    return DistortionOperands(L1=L1, L2=L2, M1=M1, M2=M2, C1=C1, C2=C2,
                              moments1=mom1, moments2=mom2)


def w_from_y_raw(ops: DistortionOperands, y1: float) -> tuple[np.ndarray, np.ndarray]:
    """Unscaled perspective rows L_i (0, y1, 1)^T."""
    u = np.array([0.0, float(y1), 1.0])
    return ops.L1 @ u, ops.L2 @ u


def w_from_y(ops: DistortionOperands, y1: float) -> tuple[np.ndarray, np.ndarray]:
    """Perspective rows for a horizon intercept, rescaled to third component 1."""
    w1, w2 = w_from_y_raw(ops, y1)
    out = []
    for w in (w1, w2):
        if abs(w[2]) <= 1e-12 * (1.0 + np.linalg.norm(w)):
            raise PoleAtY(f"y1={y1!r} is at a pole of the distortion function")
        out.append(w / w[2])
    return out[0], out[1]


def _quotient(w: np.ndarray, mom: MomentMatrices) -> float:
    num = float(w @ mom.ppt @ w)
    den = float(w @ mom.pcpct @ w)
    if den <= 1e-15 * max(num, 1.0):
        raise DegenerateCenter("average-pixel denominator vanishes")
    return num / den


def distortion_of_w(w1, w2, m1: MomentMatrices, m2: MomentMatrices) -> float:
    """Two-term Rayleigh-quotient metric for a pair of perspective rows."""
    return _quotient(np.asarray(w1, dtype=float), m1) + _quotient(np.asarray(w2, dtype=float), m2)


def pixel_sum_distortion(w, width: int, height: int) -> float:
    """Reference oracle: explicit squared sum over every pixel of one image."""
    if width < 2 or height < 2:
        raise BadDimensions("image must be at least 2x2 pixels")
    w = np.asarray(w, dtype=float)
    pc = np.array([(width - 1) / 2.0, (height - 1) / 2.0, 1.0])
    den = float(w @ pc)
    if abs(den) <= 1e-15 * max(abs(w[0]) * width, abs(w[1]) * height, abs(w[2]), 1.0):
        raise DegenerateCenter("w is orthogonal to the average pixel")
    total = 0.0
    for y in range(height):
        for x in range(width):
            p = np.array([float(x), float(y), 1.0])
            num = float(w @ (p - pc))
            total += (num / den) ** 2
    return total


def poles(ops: DistortionOperands) -> tuple[float, float]:
    """Roots of the two quadratic denominators (each a double root)."""
    return (-ops.C1[1, 2] / ops.C1[1, 1], -ops.C2[1, 2] / ops.C2[1, 1])


def _exclusion_half_width(pole: float) -> float:
    return POLE_HALF_WIDTH * (1.0 + abs(pole))


def is_admissible(ops: DistortionOperands, y1: float) -> bool:
    """Whether y1 lies outside both pole-exclusion zones."""
    return all(abs(y1 - p) > _exclusion_half_width(p) for p in poles(ops))


def _rational_terms(ops: DistortionOperands):
    """Quadratic numerator/denominator coefficient triples for both terms."""
    out = []
    for M, C in ((ops.M1, ops.C1), (ops.M2, ops.C2)):
        out.append(
            (
                (M[1, 1], 2.0 * M[1, 2], M[2, 2]),
                (C[1, 1], 2.0 * C[1, 2], C[2, 2]),
            )
        )
    return out


def distortion_of_y(ops: DistortionOperands, y1: float) -> float:
    """The metric as a function of the horizon intercept on image 1."""
    y = float(y1)
    total = 0.0
    for (n2, n1, n0), (d2, d1, d0) in _rational_terms(ops):
        num = (n2 * y + n1) * y + n0
        den = (d2 * y + d1) * y + d0
        if den <= 1e-15 * max(abs(num), 1.0):
            raise PoleAtY(f"y1={y1!r} is at a pole of the distortion function")
        total += num / den
    return total


def distortion_of_y_many(ops: DistortionOperands, ys: np.ndarray) -> np.ndarray:
    """Vectorised evaluation; pole-adjacent samples come out as +inf."""
    ys = np.asarray(ys, dtype=float)
    total = np.zeros_like(ys)
    for (n2, n1, n0), (d2, d1, d0) in _rational_terms(ops):
        num = (n2 * ys + n1) * ys + n0
        den = (d2 * ys + d1) * ys + d0
        bad = den <= 1e-15 * np.maximum(np.abs(num), 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            term = np.where(bad, np.inf, num / np.where(bad, 1.0, den))
        total = total + term
    p1, p2 = poles(ops)
    for p in (p1, p2):
        total = np.where(np.abs(ys - p) <= _exclusion_half_width(p), np.inf, total)
    return total
