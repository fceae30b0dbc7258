"""Regenerate the bundled UR5e mobile-manipulator description files.

Screw axes come from the published UR5e link dimensions with the arm's
zero configuration stretched along +x (elbow and wrist straight). The arm
base sits at the platform centre, MOUNT_HEIGHT above the ground; base and
arm share one body-fixed frame at ground level under the platform centre.

The end-effector frame is defined with identity orientation at the zero
configuration (x forward, z up), which keeps the joint transformation close
to the identity for paths whose frames follow the direction of travel.
"""

import json
import math
from pathlib import Path

D1, A2, A3, D4, D5, D6 = 0.1625, 0.425, 0.3922, 0.1333, 0.0997, 0.0996
MOUNT_HEIGHT = 0.4
JOINT_LIMIT = 2.0 * math.pi
READY = [0.0, -math.pi / 4, math.pi / 2, -math.pi / 4, 0.0, 0.0]

OUT = Path(__file__).resolve().parents[1] / "src" / "lieplan" / "data" / "robots"


def r(x):
    return round(x, 10)


def ur5e_joints(h):
    shoulder = h + D1
    reach = A2 + A3
    geometry = [
        ((0, 0, 1), (0, 0, h)),
        ((0, 1, 0), (0, 0, shoulder)),
        ((0, 1, 0), (A2, 0, shoulder)),
        ((0, 1, 0), (reach, 0, shoulder)),
        ((0, 0, -1), (reach, D4, shoulder)),
        ((0, 1, 0), (reach, 0, shoulder - D5)),
    ]
    joints = [{"kind": "revolute", "axis": list(map(float, a)), "point": [r(x) for x in p],
               "limits": [-JOINT_LIMIT, JOINT_LIMIT]} for a, p in geometry]
    home = {"rotation": [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
            "translation": [r(reach), r(D4 + D6), r(shoulder - D5)]}
    return joints, home


def main():
    joints, home = ur5e_joints(MOUNT_HEIGHT)
    husky = {
        "name": "ur5e_husky",
        "description": "UR5e on a differential-drive (Husky-class) platform",
        "base": {"kind": "nonholonomic", "limits": [[-2.0, 2.0], [-math.pi, math.pi]]},
        "joints": joints,
        "home_pose": home,
        "ready": READY,
        "planner": {"lambda_v": [1.0, 1.0, 0.25, 0.25, 0.1, 0.1, 0.1, 0.1]},
    }
    xdrive = {
        "name": "ur5e_xdrive",
        "description": "UR5e on an omnidirectional x-drive platform",
        "base": {"kind": "holonomic",
                 "limits": [[-2.0, 2.0], [-1.0, 1.0], [-math.pi, math.pi]]},
        "joints": joints,
        "home_pose": home,
        "ready": READY,
        "planner": {"lambda_v": [1.0, 1.0, 1.0, 0.25, 0.25, 0.1, 0.1, 0.1, 0.1]},
    }
    OUT.mkdir(parents=True, exist_ok=True)
    for d in (husky, xdrive):
        (OUT / f"{d['name']}.json").write_text(json.dumps(d, indent=2) + "\n")
        print("wrote", OUT / f"{d['name']}.json")


if __name__ == "__main__":
    main()
