import math
from pathlib import Path

import pytest

import hop

DATA = Path(__file__).resolve().parents[2] / "data"


def test_identity_fused():
    assert hop.fused_from_quat(1.0, 0.0, 0.0, 0.0) == (0.0, 0.0, 0.0, 1)


def test_fused_round_trip():
    q = hop.quat_from_fused(0.4, -0.2, 0.1, 1)
    yaw, pitch, roll, h = hop.fused_from_quat(*q)
    assert (yaw, pitch, roll, h) == pytest.approx((0.4, -0.2, 0.1, 1), abs=1e-12)


def test_invalid_fused_raises():
    with pytest.raises(ValueError):
        hop.quat_from_fused(0.0, 1.2, 1.2, 1)


def test_ticks():
    assert hop.angle_to_ticks(math.pi / 2) == (3072, False)
    assert hop.ticks_to_angle(0) == pytest.approx(-math.pi)


def test_camera_round_trip():
    ray = (0.3, -0.2, 0.9)
    n = math.sqrt(sum(c * c for c in ray))
    back = hop.undistort_pixel(*hop.distort_point(*ray))
    assert back == pytest.approx([c / n for c in ray], abs=1e-9)


def test_motion_and_scenario():
    frame = hop.interpolate_motion(DATA / "motions" / "getup_prone.json", 0.0)
    assert len(frame["pos"]) == 20
    log, summary = hop.run_scenario(DATA / "scenarios" / "getup_prone.json", DATA)
    assert log.startswith("t,truth_pitch")
    assert summary["motion_completed"]
