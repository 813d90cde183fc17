#!/usr/bin/env python3
"""Regenerates the shipped data files under data/.

Link geometry and masses are engineering estimates sized to a 92 cm,
6.6 kg robot with 20 actuators (2 head, 3 per arm, 6 per leg).
"""

import json
import math
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent
DATA = ROOT / "data"


def num(x):
    if isinstance(x, bool) or isinstance(x, int):
        return str(x)
    s = "%.9g" % x
    return "0" if s == "-0" else s


def canonical(doc):
    """Same bytes the library emits: sorted keys, compact, %.9g floats."""
    if isinstance(doc, dict):
        return "{" + ",".join(json.dumps(k) + ":" + canonical(doc[k]) for k in sorted(doc)) + "}"
    if isinstance(doc, list):
        return "[" + ",".join(canonical(v) for v in doc) + "]"
    if isinstance(doc, bool):
        return "true" if doc else "false"
    if isinstance(doc, (int, float)):
        return num(doc)
    if doc is None:
        return "null"
    return json.dumps(doc)


def write(path, doc, compact=False):
    path.parent.mkdir(parents=True, exist_ok=True)
    text = canonical(doc) if compact else json.dumps(doc, indent=2)
    path.write_text(text + "\n")


def box(m, x, y, z):
    return [[m * (y * y + z * z) / 12, 0, 0], [0, m * (x * x + z * z) / 12, 0], [0, 0, m * (x * x + y * y) / 12]]


def rod(m, length, r=0.03):
    # Along z.
    side = m * (3 * r * r + length * length) / 12
    return [[side, 0, 0], [0, side, 0], [0, 0, m * r * r / 2]]


def link(name, parent, axis, origin, mass, com, inertia, limits=None, notes=None):
    d = {"name": name, "parent": parent, "axis": axis, "origin": origin, "mass": mass, "com": com, "inertia": inertia}
    if limits is not None:
        d["limits"] = limits
    if notes:
        d["notes"] = notes
    return d


def mirror_limits(lo_hi, flip):
    lo, hi = lo_hi
    return [-hi, -lo] if flip else [lo, hi]


def model():
    thigh = shank = 0.2
    links = [
        link("trunk", None, [0, 0, 1], [0, 0, 0], 2.8, [0, 0, 0.08], box(2.8, 0.12, 0.2, 0.3)),
        link("neck_yaw", "trunk", [0, 0, 1], [0, 0, 0.25], 0.05, [0, 0, 0.02], box(0.05, 0.03, 0.03, 0.04), [-2.0, 2.0]),
        link("head_pitch", "neck_yaw", [0, 1, 0], [0, 0, 0.05], 0.35, [0.01, 0, 0.05], box(0.35, 0.12, 0.12, 0.12),
             [-0.6, 1.2]),
    ]
    for side, sy in (("l", 1.0), ("r", -1.0)):
        flip = sy < 0
        links += [
            link(f"{side}_shoulder_pitch", "trunk", [0, 1, 0], [0, 0.12 * sy, 0.2], 0.05, [0, 0, 0],
                 box(0.05, 0.03, 0.03, 0.03), [-3.0, 3.0]),
            link(f"{side}_shoulder_roll", f"{side}_shoulder_pitch", [1, 0, 0], [0, 0, 0], 0.2, [0, 0, -0.085],
                 rod(0.2, 0.17), mirror_limits([-0.2, 1.6], flip)),
            link(f"{side}_elbow_pitch", f"{side}_shoulder_roll", [0, 1, 0], [0, 0, -0.17], 0.15, [0, 0, -0.085],
                 rod(0.15, 0.17), [-2.6, 0.05]),
        ]
    for side, sy in (("l", 1.0), ("r", -1.0)):
        flip = sy < 0
        links += [
            link(f"{side}_hip_yaw", "trunk", [0, 0, 1], [0, 0.055 * sy, -0.075], 0.05, [0, 0, 0],
                 box(0.05, 0.04, 0.04, 0.04), mirror_limits([-0.6, 0.9], flip)),
            link(f"{side}_hip_roll", f"{side}_hip_yaw", [1, 0, 0], [0, 0, 0], 0.25, [0, 0, 0],
                 box(0.25, 0.06, 0.05, 0.05), mirror_limits([-0.5, 0.9], flip)),
            link(f"{side}_hip_pitch", f"{side}_hip_roll", [0, 1, 0], [0, 0, 0], 0.4, [0, 0, -thigh / 2],
                 rod(0.4, thigh, 0.035), [-2.0, 1.2]),
            link(f"{side}_knee_pitch", f"{side}_hip_pitch", [0, 1, 0], [0, 0, -thigh], 0.35, [0, 0, -shank / 2],
                 rod(0.35, shank, 0.03), [0.0, 2.7]),
            link(f"{side}_ankle_pitch", f"{side}_knee_pitch", [0, 1, 0], [0, 0, -shank], 0.05, [0, 0, 0],
                 box(0.05, 0.04, 0.04, 0.04), [-1.2, 1.2]),
            link(f"{side}_ankle_roll", f"{side}_ankle_pitch", [1, 0, 0], [0, 0, 0], 0.2, [0.01, 0, -0.03],
                 box(0.2, 0.2, 0.1, 0.03), mirror_limits([-0.7, 0.7], flip)),
        ]
    total = sum(l["mass"] for l in links)
    return {
        "schema_version": 1,
        "name": "humanoid-92cm",
        "notes": "Engineering estimates. Sole 0.52 m below the trunk origin, head top about 0.40 m above it: 0.92 m tall.",
        "total_mass": round(total, 9),
        "sole_offset": [0, 0, -0.045],
        "hand_offset": [0, 0, -0.17],
        "links": links,
    }


JOINTS = [
    "neck_yaw", "head_pitch",
    "l_shoulder_pitch", "l_shoulder_roll", "l_elbow_pitch",
    "r_shoulder_pitch", "r_shoulder_roll", "r_elbow_pitch",
    "l_hip_yaw", "l_hip_roll", "l_hip_pitch", "l_knee_pitch", "l_ankle_pitch", "l_ankle_roll",
    "r_hip_yaw", "r_hip_roll", "r_hip_pitch", "r_knee_pitch", "r_ankle_pitch", "r_ankle_roll",
]


def servo():
    joints = []
    for i, name in enumerate(JOINTS):
        leg = i >= 8
        joints.append({"name": name, "tick_offset": 2048, "direction": 1, "stiffness": 28.0 if leg else 20.0,
                       "max_offset": 0.2})
    return {"schema_version": 1,
            "notes": "Stiffness estimates scaled by stall torque (legs MX-106, head and arms MX-64).",
            "joints": joints}


def imu():
    return {"schema_version": 1,
            "notes": "Magnetometer hard/soft iron map is identity until measured.",
            "filter": {"kp": 2.2, "ti": 2.65, "km": 0.2, "accel_trust_band": 4.0,
                       "bias_error_band": 5.0 * math.pi / 180.0,
                       "mag_matrix": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "mag_offset": [0, 0, 0]}}


def gait():
    return {
        "schema_version": 1,
        "freq": 1.4, "eta0": 0.05, "arm_extension": 0.1,
        "A_sag": 0.12, "A_lat": 0.06, "A_rot": 0.10, "A_step": 0.08, "A_sway": 0.04, "A_arm": 0.15,
        "channels": {
            "arm": {"P": -0.6, "D": -0.05, "sat": 0.25},
            "hipY": {"P": 0.5, "D": 0.04, "sat": 0.15},
            "footY": {"P": 0.3, "D": 0.02, "sat": 0.12},
            "hipX": {"P": 0.4, "D": 0.03, "sat": 0.12},
            "footX": {"P": 0.3, "D": 0.02, "sat": 0.10},
            "footHeight": {"P": 0.15, "D": 0.0, "sat": 0.03},
            "timing": {"P": 8.0, "D": 0.0, "sat": 4.0},
        },
        "expectedPitch": 0.0, "expectedRoll": 0.0,
        "deadband": 0.5 * math.pi / 180.0, "slewRate": 2.0, "derivativeTimeConstant": 0.05,
        "feedback": True,
    }


def camera():
    k = [-0.06, 0.003, 0.0, 0.0]
    t = 75.0 * math.pi / 180.0
    td = t * (1 + k[0] * t ** 2 + k[1] * t ** 4)
    f = 320.0 / td
    # Optical axis along head +x, image right along head -y, image down along head -z.
    return {
        "schema_version": 1,
        "notes": "Synthetic intrinsics: 75 deg off axis maps to the half image width.",
        "camera": {"width": 640, "height": 480, "fx": f, "fy": f, "cx": 320.0, "cy": 240.0, "k": k,
                   "rated_half_fov": t, "position": [0.05, 0.0, 0.05], "orientation": [0.5, -0.5, 0.5, -0.5]},
        "view": {"head_joints": [0.0, 0.6], "trunk_fused": [0.0, 0.0, 0.0, 1], "trunk_height": 0.55},
    }


def getup_prone():
    """Get-up from lying face down: push up on the arms, tuck the legs, rise."""
    z = [0.0] * 20

    def pose(**kw):
        p = list(z)
        for name, v in kw.items():
            if name.startswith("both_"):
                base = name[5:]
                p[JOINTS.index("l_" + base)] = v
                p[JOINTS.index("r_" + base)] = v
            else:
                p[JOINTS.index(name)] = v
        return p

    frames = [
        (0.0, pose(head_pitch=-0.4, both_shoulder_pitch=-3.0, both_elbow_pitch=-0.1), 0.3, (0.0, 0.0)),
        (0.8, pose(head_pitch=-0.2, both_shoulder_pitch=-1.5, both_elbow_pitch=-1.9), 0.8, (0.0, 0.0)),
        (1.6, pose(head_pitch=0.2, both_shoulder_pitch=-0.1, both_elbow_pitch=-0.3, both_hip_pitch=-1.5,
                   both_knee_pitch=2.0, both_ankle_pitch=-0.5), 1.0, (0.3, 0.3)),
        (2.5, pose(head_pitch=0.3, both_shoulder_pitch=0.4, both_elbow_pitch=-0.5, both_hip_pitch=-1.9,
                   both_knee_pitch=2.5, both_ankle_pitch=-0.6), 1.0, (0.8, 0.8)),
        (3.4, pose(head_pitch=0.2, both_shoulder_pitch=0.2, both_elbow_pitch=-0.6, both_hip_pitch=-1.2,
                   both_knee_pitch=1.8, both_ankle_pitch=-0.6), 1.0, (1.0, 1.0)),
        (4.4, pose(both_elbow_pitch=-0.9, both_hip_pitch=-0.32, both_knee_pitch=0.64, both_ankle_pitch=-0.32), 0.8,
         (1.0, 1.0)),
    ]
    # Knot velocities from neighbouring knots (zero at the ends).
    keyframes = []
    for i, (t, pos, eff, sup) in enumerate(frames):
        if 0 < i < len(frames) - 1:
            t0, p0 = frames[i - 1][0], frames[i - 1][1]
            t1, p1 = frames[i + 1][0], frames[i + 1][1]
            vel = [round((b - a) / (t1 - t0), 6) for a, b in zip(p0, p1)]
        else:
            vel = [0.0] * 20
        keyframes.append({"t": t, "pos": pos, "vel": vel, "eff": [eff] * 20, "sup": {"l": sup[0], "r": sup[1]}})
    pitch_map = [0.0] * 20
    for name, w in (("l_hip_pitch", 1.0), ("r_hip_pitch", 1.0), ("l_ankle_pitch", 0.5), ("r_ankle_pitch", 0.5)):
        pitch_map[JOINTS.index(name)] = w
    roll_map = [0.0] * 20
    for name, w in (("l_hip_roll", 1.0), ("r_hip_roll", 1.0), ("l_ankle_roll", -0.5), ("r_ankle_roll", -0.5)):
        roll_map[JOINTS.index(name)] = w
    return {
        "name": "getup_prone",
        "keyframes": keyframes,
        "pid": {"pitch": {"P": 0.4, "I": 0.2, "D": 0.02, "enabled": True},
                "roll": {"P": 0.3, "I": 0.1, "D": 0.01, "enabled": True},
                "i_limit": 0.1,
                "map": {"pitch": pitch_map, "roll": roll_map}},
    }


def scenarios():
    noise = {"gyro_density": 5e-4, "gyro_bias": [0.01, -0.005, 0.008], "accel": 0.05, "mag": 0.02}
    return {
        "gait_walk_10s.json": {
            "schema_version": 1, "controller": "gait", "duration": 10.0, "rate": 100, "seed": 7, "noise": noise,
            "truth": {"sway_pitch": 0.02, "sway_roll": 0.04, "sway_freq": 0.7, "yaw_rate": 0.05,
                      "disturbances": [{"t": 4.0, "duration": 0.4, "pitch": 0.08, "roll": 0.0},
                                       {"t": 7.0, "duration": 0.4, "pitch": 0.0, "roll": -0.1}]},
            "command": {"vx": 0.6, "vy": 0.0, "wz": 0.1, "walk": True},
        },
        "disturbance_standard.json": {
            "schema_version": 1,
            "notes": "Reference disturbance profile for estimator tracking.",
            "controller": "gait", "duration": 20.0, "rate": 100, "seed": 11, "noise": noise,
            "truth": {"sway_pitch": 0.03, "sway_roll": 0.05, "sway_freq": 0.7, "yaw_rate": 0.1,
                      "disturbances": [{"t": 3.0, "duration": 0.5, "pitch": 0.15, "roll": 0.0},
                                       {"t": 8.0, "duration": 0.5, "pitch": 0.0, "roll": 0.15},
                                       {"t": 13.0, "duration": 0.6, "pitch": -0.12, "roll": -0.1}]},
            "command": {"vx": 0.5, "vy": 0.0, "wz": 0.0, "walk": True},
        },
        "filter_convergence.json": {
            "schema_version": 1, "controller": "gait", "duration": 5.0, "rate": 100, "seed": 3, "noise": noise,
            "truth": {"initial": [0.0, 0.0, 0.0]},
            "estimator_initial": [0.0, 20.0 * math.pi / 180.0, 0.0],
            "command": {"walk": False},
        },
        "getup_prone.json": {
            "schema_version": 1, "controller": "motion", "motion": "../motions/getup_prone.json", "rate": 100,
            "seed": 5, "noise": noise,
            "truth": {"initial": [0.0, 0.0, 0.0], "sway_pitch": 0.02, "sway_freq": 0.5},
        },
    }


def main():
    write(DATA / "model" / "robot.json", model())
    write(DATA / "calibration" / "servo.json", servo())
    write(DATA / "calibration" / "imu.json", imu())
    write(DATA / "calibration" / "camera.json", camera())
    write(DATA / "gait" / "default.json", gait())
    write(DATA / "motions" / "getup_prone.json", getup_prone(), compact=True)
    for name, doc in scenarios().items():
        write(DATA / "scenarios" / name, doc)


if __name__ == "__main__":
    main()
