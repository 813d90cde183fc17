from ._core import (
    InvalidArgument,
    SchemaError,
    angle_to_ticks,
    distort_point,
    fused_from_quat,
    interpolate_motion,
    quat_from_fused,
    run_scenario,
    ticks_to_angle,
    undistort_pixel,
    wrap_angle,
)

__all__ = [
    "InvalidArgument",
    "SchemaError",
    "angle_to_ticks",
    "distort_point",
    "fused_from_quat",
    "interpolate_motion",
    "quat_from_fused",
    "run_scenario",
    "ticks_to_angle",
    "undistort_pixel",
    "wrap_angle",
]
