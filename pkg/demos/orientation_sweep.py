"""Radiation force and torque against particle tilt.

Each non-spherical particle sits at the origin in a 1 Pa plane wave
travelling along +z (40 kHz, air, sound-hard) and is tilted about the x
axis from 0 to 90 degrees. At 0 degrees the symmetry axis is parallel to
the wave, so the transverse force and the torque vanish; in between, the
torque about x tries to turn the particle. The table is written to
``out/orientation_sweep.csv``.

Run from this directory::

    python orientation_sweep.py
"""

from pathlib import Path

import numpy as np

from acoustorque import PlaneWave, euler_to_rotation
from acoustorque.dynamics import ForceModel, Scene

SHAPES = {
    "cone": (0.002, 0.0, 0.0, 0.00025),
    "cylinder": (0.002, 0.0, -0.0005, 0.0, -0.00025),
    "diamond": (0.002, 0.0, 0.0, 0.0, 0.0002),
    "ellipsoid": (0.002, 0.0, 0.0004),
}


def sweep(c, degrees):
    model = ForceModel(Scene(c, PlaneWave(1.0, (0.0, 0.0, 1.0))))
    rows = [model.evaluate(np.zeros(3), euler_to_rotation((np.deg2rad(d), 0.0, 0.0))).as_row() for d in degrees]
    return np.array(rows)


def main():
    degrees = np.linspace(0.0, 90.0, 10)
    out = Path("out")
    out.mkdir(exist_ok=True)
    table = []
    for name, c in SHAPES.items():
        rows = sweep(c, degrees)
        print(f"\n{name}: c = {list(c)}")
        print(f"{'theta_x':>8} {'Fy [N]':>12} {'Fz [N]':>12} {'Tx [N m]':>12}")
        for d, r in zip(degrees, rows):
            print(f"{d:8.1f} {r[1]:12.4e} {r[2]:12.4e} {r[3]:12.4e}")
        table += [[name, d, *r] for d, r in zip(degrees, rows)]
    path = out / "orientation_sweep.csv"
    with open(path, "w") as fh:
        fh.write("shape,theta_x_deg,Fx,Fy,Fz,Tx,Ty,Tz\n")
        for name, *vals in table:
            fh.write(name + "," + ",".join(f"{v:.12e}" for v in vals) + "\n")
    print(f"\nwrote {path}")


if __name__ == "__main__":
    main()
