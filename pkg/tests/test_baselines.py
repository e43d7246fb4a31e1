"""Comparison baseline, dense-scan oracle, degenerate family, stress harness."""
import numpy as np
import pytest

from minrect.baselines import (
    degenerate_rig,
    fusiello_rectify,
    pd_probe,
    random_rig,
    scan_minimize,
    stress,
)
from minrect.distortion import operand_matrices
from minrect.errors import EmptyDomain
from minrect.geometry import fundamental_matrix, normalize_matrix, optical_center
from minrect.rectify import assemble
from minrect import serialize

from test_rectify import rectified_residual


def test_fusiello_frontoparallel_optimal(frontoparallel):
    direct = assemble(frontoparallel)
    base = fusiello_rectify(frontoparallel)
    assert base.distortion <= 1e-10
    assert direct.distortion <= 1e-10


def test_fusiello_dominated_by_direct(rig_d):
    direct = assemble(rig_d)
    base = fusiello_rectify(rig_d)
    assert base.distortion >= direct.distortion - 1e-9


def test_fusiello_rectified_form(rig_d):
    base = fusiello_rectify(rig_d)
    assert rectified_residual(rig_d, base) <= 1e-7


def test_scan_frontoparallel_zero(frontoparallel):
    ops = operand_matrices(frontoparallel)
    _, d = scan_minimize(ops, -1000.0, 1000.0, samples=2001)
    assert d <= 1e-10


def test_scan_agrees_with_closed_form(rig_d):
    ops = operand_matrices(rig_d)
    direct = assemble(rig_d)
    _, d = scan_minimize(ops, -4800.0, 4800.0, samples=200_001)
    assert direct.distortion == pytest.approx(d, rel=1e-9, abs=1e-12)


def test_scan_skips_poles():
    """Scanning a window containing a pole still brackets the minimum."""
    from conftest import A_LEFT, make_camera, rot_x
    from minrect.distortion import distortion_of_y, is_admissible, poles
    from minrect.geometry import StereoRig

    # pitch camera 1 so the distortion pole falls inside a modest y-range
    cam1 = make_camera(A_LEFT, rot_x(0.5), (0.0, 0.0, 0.0))
    cam2 = make_camera(A_LEFT, rot_x(0.3), (1.0, 0.1, 0.0))
    ops = operand_matrices(StereoRig(cam1=cam1, cam2=cam2))
    p1, _ = poles(ops)
    half = 0.1 * (1.0 + abs(p1))
    y, d = scan_minimize(ops, p1 - half, p1 + half, samples=5001)
    assert np.isfinite(d)
    assert d >= 0.0
    assert is_admissible(ops, y)
    assert abs(y - p1) > 1e-9


def test_scan_requires_samples(rig_d):
    ops = operand_matrices(rig_d)
    with pytest.raises(ValueError):
        scan_minimize(ops, 0.0, 1.0, samples=10)


def test_degenerate_rig_zero_is_frontoparallel():
    rig = degenerate_rig(0.0, 0.0)
    assert np.allclose(rig.cam2.R, np.eye(3))
    assert np.allclose(optical_center(rig.cam2), [1.0, 0.0, 0.0])


def test_degenerate_rig_geometry():
    rig = degenerate_rig(0.3, 0.4)
    o2 = optical_center(rig.cam2)
    assert o2[2] == pytest.approx(0.3 * np.tan(0.4))
    assert np.allclose(o2[:2], [1.0, 0.3])


def test_degenerate_rig_pipeline_succeeds():
    rig = degenerate_rig(0.3, 0.4)
    pair = assemble(rig)
    assert rectified_residual(rig, pair) <= 1e-7
    assert np.isfinite(pair.distortion)


def test_pd_probe_degenerate_family_fails():
    assert pd_probe(degenerate_rig(0.3, 0.4)) is False


def test_pd_probe_generic_rig_passes():
    rng = np.random.default_rng(61)
    hits = sum(pd_probe(random_rig(rng)) for _ in range(20))
    assert hits >= 1  # default builder accepts well-posed generic rigs


def test_random_rig_valid():
    rng = np.random.default_rng(67)
    for _ in range(20):
        rig = random_rig(rng)
        F = fundamental_matrix(rig)
        s = np.linalg.svd(F, compute_uv=False)
        assert s[2] <= 1e-9 * s[0]


def test_stress_small_run():
    report = stress(10, seed=1)
    assert report.direct_successes == 10
    assert report.trials == 10
    assert report.distortion_ratios["min"] >= 1.0 - 1e-9


def test_stress_deterministic_excluding_timings():
    a = stress(5, seed=7).to_dict()
    b = stress(5, seed=7).to_dict()
    a.pop("timings_ms")
    b.pop("timings_ms")
    assert serialize.dumps(a) == serialize.dumps(b)


def test_stress_rejects_zero_trials():
    with pytest.raises(ValueError):
        stress(0, seed=1)
