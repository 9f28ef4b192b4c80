"""Cross-checks of the scattering solver.

1. For a sphere the null-field T-matrix must reproduce the analytic Mie
   coefficients.
2. For each non-spherical particle the T-matrix must be unitary in the
   lossless sense, ``T + T^H + 2 T^H T = 0``.
3. For a cone tilted 45 degrees, the far field predicted by the T-matrix
   must agree with an independent point-source collocation solve.

Run from this directory::

    python solver_check.py
"""

import math

import numpy as np

from acoustorque import AIR, PlaneWave, euler_to_rotation
from acoustorque.collocation import collocation_scatter, far_field_difference
from acoustorque.scatter import scatter_lab_frame, sphere_tmatrix, tmatrix_nullfield
from acoustorque.wavefield import plane_wave_coefficients

K = AIR.wavenumber(40e3)
SHAPES = {
    "cone": (0.002, 0.0, 0.0, 0.00025),
    "cylinder": (0.002, 0.0, -0.0005, 0.0, -0.00025),
    "diamond": (0.002, 0.0, 0.0, 0.0, 0.0002),
    "ellipsoid": (0.002, 0.0, 0.0004),
}


def main():
    print("sphere against Mie (max entry error)")
    for ka in (0.5, K * 0.002, 3.0):
        for bc in ("sound_hard", "sound_soft"):
            k = ka / 0.002
            err = np.abs(tmatrix_nullfield((0.002,), bc, k, 12).full() - sphere_tmatrix(bc, k, 0.002, 12).full()).max()
            print(f"  ka = {ka:.3f} {bc:10s} {err:.2e}")

    print("\nlossless unitarity residual at 40 kHz, sound-hard")
    for name, c in SHAPES.items():
        print(f"  {name:10s} {tmatrix_nullfield(c, 'sound_hard', K, 11).unitarity_residual():.2e}")

    wave = PlaneWave(1.0, (0.0, 0.0, 1.0))
    o = euler_to_rotation((math.pi / 4, 0.0, 0.0))
    T = tmatrix_nullfield(SHAPES["cone"], "sound_hard", K, 11)
    tm = scatter_lab_frame(T, plane_wave_coefficients(wave, K, 11), o)
    col = collocation_scatter(SHAPES["cone"], "sound_hard", K, 11, wave, o)
    print(f"\ncone at 45 degrees, null-field vs collocation far field: {far_field_difference(tm, col):.2e}")


if __name__ == "__main__":
    main()
