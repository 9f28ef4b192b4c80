"""Independent scattering solver by least-squares surface collocation.

Used as a cross-check of the null-field T-matrix. The scattered field is
represented by point sources (monopoles) on a shrunken copy of the surface,
an approach also known as the method of fundamental solutions, and the
boundary condition is imposed in the least-squares sense at points of the
rotated surface in the lab frame. Nothing here reuses the T-matrix code
path: the surface is sampled in three dimensions, the incident plane wave
enters through its analytic value and gradient, and no expansion is
rotated. The outgoing coefficients about the origin follow from the
addition theorem for a displaced monopole,

    h_0(k |x - y|) = 4 pi sum_nu j_n(k|y|) conj(Y_nu(yhat)) h_n(k|x|) Y_nu(xhat),  |x| > |y|.

Unlike a multipole expansion about the centre, the point sources do not rely
on the outgoing series converging down to the surface, so elongated bodies
converge too.
"""

import numpy as np

from .geometry import MappingCoefficients, meridian
from .scatter import BoundaryKind
from .specfun import gauss_legendre, harmonic_table, mode_numbers, radial_table
from .transform import Orientation
from .wavefield import PlaneWave, WaveExpansion


def surface_points(c: MappingCoefficients, o: Orientation, n_gamma: int, n_phi: int):
    """Lab-frame surface points, outward normals and area weights."""
    rule = gauss_legendre(n_gamma)
    gamma = 0.5 * np.pi * (rule.nodes + 1.0)
    s = meridian(c, gamma)
    phi = 2 * np.pi * (np.arange(n_phi) + 0.5) / n_phi
    cp, sp = np.cos(phi), np.sin(phi)
    pts = np.stack(
        [s.rho[:, None] * cp, s.rho[:, None] * sp, np.repeat(s.z[:, None], n_phi, axis=1)], -1
    ).reshape(-1, 3)
    nrm = np.stack(
        [
            s.unit_normal[:, 0, None] * cp,
            s.unit_normal[:, 0, None] * sp,
            np.repeat(s.unit_normal[:, 1, None], n_phi, axis=1),
        ],
        -1,
    ).reshape(-1, 3)
    area = (s.rho * s.arc_jacobian * 0.5 * np.pi * rule.weights)[:, None] * (2 * np.pi / n_phi)
    R = o.rotation
    return pts @ R.T, nrm @ R.T, np.repeat(area, n_phi, axis=1).ravel()


def collocation_scatter(
    c,
    bc,
    k: float,
    n_max: int,
    wave: PlaneWave,
    o: Orientation,
    rings: int = 24,
    shrink: float = 0.8,
    oversample: float = 1.5,
) -> WaveExpansion:
    """Outgoing coefficients (degree ``n_max``) of the field scattered from a plane wave.

    ``rings x 2 rings`` monopoles sit on the surface scaled by ``shrink``;
    the boundary condition is fitted at ``oversample`` times as many surface
    points in each direction, weighted by the square root of the area
    element.
    """
    if not isinstance(c, MappingCoefficients):
        c = MappingCoefficients(c)
    bc = BoundaryKind.parse(bc)
    src, _, _ = surface_points(c.scaled(shrink), o, rings, 2 * rings)
    n_col = int(round(oversample * rings))
    pts, nrm, area = surface_points(c, o, n_col, 2 * n_col)
    diff = pts[:, None, :] - src[None, :, :]
    dist = np.linalg.norm(diff, axis=-1)
    kd = k * dist
    phase = np.exp(1j * kd)
    d = np.asarray(wave.direction, float)
    p_inc = complex(wave.amplitude) * np.exp(1j * k * pts @ d)
    if bc is BoundaryKind.SOUND_HARD:
        # grad h_0(k|x - y|) = -k h_1(k|x - y|) (x - y)/|x - y|, h_1(x) = -e^{ix}(x + i)/x^2
        h1 = -phase * (kd + 1j) / kd**2
        A = -k * h1 * np.einsum("nsj,nj->ns", diff, nrm) / dist
        b = -1j * k * (nrm @ d) * p_inc
    else:
        A = phase / (1j * kd)
        b = -p_inc
    w = np.sqrt(area)
    q, *_ = np.linalg.lstsq(A * w[:, None], b * w, rcond=1e-13)

    r = np.linalg.norm(src, axis=1)
    theta = np.arccos(np.clip(src[:, 2] / r, -1.0, 1.0))
    phi = np.arctan2(src[:, 1], src[:, 0])
    n, _ = mode_numbers(n_max)
    J = radial_table("regular", n_max, k * r).values[n]
    Y = harmonic_table(n_max, theta, phi).values
    coeffs = 4 * np.pi * (J * np.conj(Y)) @ q
    return WaveExpansion("outgoing", n_max, k, np.zeros(3), coeffs)


def far_field_difference(a: WaveExpansion, b: WaveExpansion) -> float:
    """Relative L2 difference of two outgoing far-field patterns over the sphere.

    ``h_n(kr) -> (-i)^(n+1) exp(ikr) / (kr)``, so by orthonormality the
    pattern norm equals the coefficient norm up to a common factor.
    """
    return float(np.linalg.norm(a.coeffs - b.coeffs) / np.linalg.norm(b.coeffs))
