"""Comparison methods and verification oracles.

Holds the orientation-of-camera-1 baseline rectifier, a dense-scan global
minimiser used as an independent oracle, the degenerate-configuration
family on which initial-guess methods lose positive-definiteness, and a
randomized stress harness aggregating all of the above.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import quartic
from .distortion import (
    DistortionOperands,
    distortion_of_w,
    distortion_of_y,
    distortion_of_y_many,
    is_admissible,
    moment_matrices,
    operand_matrices,
    w_from_y_raw,
)
from .errors import DegenerateOrientation, EmptyDomain, MinrectError
from .geometry import Camera, StereoRig, fundamental_matrix, epipoles
from .rectify import CommonOrientation, RectifiedPair, assemble, complete_homographies

DEFAULT_INTRINSICS = np.array([[800.0, 0.0, 320.0], [0.0, 800.0, 240.0], [0.0, 0.0, 1.0]])
DEFAULT_SIZE = (640, 480)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def fusiello_rectify(rig: StereoRig) -> RectifiedPair:
    """Baseline: rectifying plane fixed by camera 1's old optical axis."""
    x_hat = rig.x_hat
    axis1 = rig.cam1.axis
    y_dir = np.cross(axis1, x_hat)
    ny = np.linalg.norm(y_dir)
    if ny <= 1e-12:
        raise DegenerateOrientation("camera-1 axis is parallel to the baseline")
    y_hat = y_dir / ny
    z_hat = np.cross(x_hat, y_hat)
    Rnew = np.vstack([x_hat, y_hat, z_hat])
    Rnew.setflags(write=False)
    ops = operand_matrices(rig)
    w1 = Rnew[2, :] @ np.linalg.inv(rig.cam1.projection)
    w2 = Rnew[2, :] @ np.linalg.inv(rig.cam2.projection)
    dist = distortion_of_w(w1, w2, ops.moments1, ops.moments2)
    return complete_homographies(rig, CommonOrientation(Rnew=Rnew), float("nan"), dist)


def scan_minimize(ops: DistortionOperands, y_lo: float, y_hi: float,
                  samples: int = 200_001) -> tuple[float, float]:
    """Dense scan plus golden-section refinement; independent oracle."""
    if samples < 1001:
        raise ValueError("samples must be at least 1001")
    ys = np.linspace(y_lo, y_hi, samples)
    vals = distortion_of_y_many(ops, ys)
    if not np.any(np.isfinite(vals)):
        raise EmptyDomain("every sample is pole-excluded")
    i = int(np.nanargmin(np.where(np.isfinite(vals), vals, np.inf)))
    lo = ys[max(i - 1, 0)]
    hi = ys[min(i + 1, samples - 1)]
    return _golden_section(ops, lo, hi)


def _golden_section(ops: DistortionOperands, lo: float, hi: float,
                    tol: float = 1e-10) -> tuple[float, float]:
    def f(y):
        try:
            return distortion_of_y(ops, y)
        except MinrectError:
            return float("inf")

    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol * (1.0 + abs(lo) + abs(hi)):
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = f(x2)
    best = min(((f1, x1), (f2, x2)))
    return best[1], best[0]


def _rot_x(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def degenerate_rig(a: float, theta_x: float, intrinsics=None,
                   size=DEFAULT_SIZE) -> StereoRig:
    """Second camera at (1, a, a*tan(theta_x)), body-rotated about x.

    On this family the second epipole sits at infinity and initial-guess
    methods relying on positive-definite forms break down.
    """
    if abs(theta_x) >= math.pi / 2:
        raise ValueError("theta_x must be inside (-pi/2, pi/2)")
    A = DEFAULT_INTRINSICS if intrinsics is None else np.asarray(intrinsics, dtype=float)
    w, h = size
    cam1 = Camera(A=A, R=np.eye(3), t=np.zeros(3), width=w, height=h)
    o2 = np.array([1.0, a, a * math.tan(theta_x)])
    R2 = _rot_x(theta_x).T  # world->camera map of a body rotated by theta_x
    cam2 = Camera(A=A, R=R2, t=-R2 @ o2, width=w, height=h)
    return StereoRig(cam1, cam2)


def _cross_matrix(v: np.ndarray) -> np.ndarray:
    return np.array([[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]])


def default_pd_builder(rig: StereoRig) -> tuple[np.ndarray, np.ndarray]:
    """Approximate reconstruction of the initial-guess quadratic forms.

    Image 1 uses the epipole cross-product parametrisation, image 2 the
    fundamental-matrix transfer; both are restricted to the first two
    coordinates of the shared parameter.  This is a stand-in for the prior
    method's unpublished construction and is labelled as such in reports.
    """
    F = fundamental_matrix(rig)
    e1, _ = epipoles(rig)
    mom1 = moment_matrices(rig.cam1.width, rig.cam1.height)
    mom2 = moment_matrices(rig.cam2.width, rig.cam2.height)
    E1 = _cross_matrix(e1)
    A = (E1.T @ mom1.ppt @ E1)[:2, :2]
    Ap = (F.T @ mom2.ppt @ F)[:2, :2]
    return A, Ap


def _cholesky_ok(M: np.ndarray) -> bool:
    tr = float(np.trace(M))
    if not np.isfinite(tr) or tr <= 0.0:
        return False
    rel = 1e-12 * tr
    if M[0, 0] <= rel:
        return False
    l21 = M[1, 0] / M[0, 0]
    return M[1, 1] - l21 * M[1, 0] > rel


def pd_probe(rig: StereoRig, builder=default_pd_builder) -> bool:
    """Whether both quadratic forms admit a Cholesky-style factorization."""
    A, Ap = builder(rig)
    return _cholesky_ok(np.asarray(A, dtype=float)) and _cholesky_ok(np.asarray(Ap, dtype=float))


def random_rig(rng: np.random.Generator, intrinsics=None, size=DEFAULT_SIZE,
               max_angle: float = math.pi / 3) -> StereoRig:
    """Fixed intrinsics, random extrinsics: angle-axis rotation inside a
    bounded ball, unit-length random baseline direction."""
    A = DEFAULT_INTRINSICS if intrinsics is None else np.asarray(intrinsics, dtype=float)
    w, h = size
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    angle = rng.uniform(0.0, max_angle)
    K = _cross_matrix(axis)
    R2 = np.eye(3) + math.sin(angle) * K + (1 - math.cos(angle)) * (K @ K)
    o2 = rng.normal(size=3)
    o2 /= np.linalg.norm(o2)
    cam1 = Camera(A=A, R=np.eye(3), t=np.zeros(3), width=w, height=h)
    cam2 = Camera(A=A, R=R2, t=-R2 @ o2, width=w, height=h)
    return StereoRig(cam1, cam2)


@dataclass
class StressReport:
    """Aggregate results of the randomized stress harness."""

    trials: int
    seed: int
    direct_successes: int = 0
    baseline_failures: int = 0
    pd_failures: int = 0
    distortion_ratios: dict = field(default_factory=dict)  # baseline / direct
    timings_ms: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)  # (trial, stage, message)

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "direct_successes": self.direct_successes,
            "baseline_failures": self.baseline_failures,
            "pd_failures": self.pd_failures,
            "pd_failure_fraction": self.pd_failures / self.trials if self.trials else 0.0,
            "pd_probe_note": "default builder approximates the prior method's "
                             "unpublished forms; fractions are indicative only",
            "distortion_ratios": self.distortion_ratios,
            "failures": [list(f) for f in self.failures],
            "timings_ms": self.timings_ms,
        }


def stress(trials: int, seed: int, scan_samples: int = 20_001) -> StressReport:
    """Run direct, baseline, scan oracle and PD probe on random rigs."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    report = StressReport(trials=trials, seed=seed)
    ratios = []
    t_direct, t_baseline, t_scan = [], [], []
    for trial in range(trials):
        rig = random_rig(rng)
        t0 = time.perf_counter()
        try:
            direct = assemble(rig)
        except MinrectError as exc:
            report.failures.append((trial, "direct", str(exc)))
            continue
        t_direct.append(time.perf_counter() - t0)
        report.direct_successes += 1

        t0 = time.perf_counter()
        try:
            baseline = fusiello_rectify(rig)
            t_baseline.append(time.perf_counter() - t0)
            if direct.distortion > 0:
                ratios.append(baseline.distortion / direct.distortion)
        except MinrectError as exc:
            report.baseline_failures += 1
            report.failures.append((trial, "baseline", str(exc)))

        ops = operand_matrices(rig)
        h = rig.cam1.height
        t0 = time.perf_counter()
        try:
            scan_minimize(ops, -10.0 * h, 10.0 * h, scan_samples)
        except MinrectError as exc:
            report.failures.append((trial, "scan", str(exc)))
        t_scan.append(time.perf_counter() - t0)

        if not pd_probe(rig):
            report.pd_failures += 1
    if ratios:
        arr = np.array(sorted(ratios))
        report.distortion_ratios = {
            "count": len(arr),
            "min": float(arr[0]),
            "median": float(np.median(arr)),
            "max": float(arr[-1]),
        }
    report.timings_ms = {
        name: (1000.0 * float(np.mean(vals)) if vals else 0.0)
        for name, vals in (("direct", t_direct), ("baseline", t_baseline), ("scan", t_scan))
    }
    return report
