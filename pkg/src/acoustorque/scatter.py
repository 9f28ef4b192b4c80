"""Scattering by rigid (sound-hard) or pressure-release (sound-soft) bodies.

The scattered field of a body centred at the expansion origin is written
``p_s = sum_nu s_nu h_n(kr) Y_nu``; for an incident field
``sum_nu a_nu j_n(kr) Y_nu`` the T-matrix maps ``a`` to ``s``. Spheres have
the closed-form (Mie) diagonal T; other axisymmetric bodies use the
null-field method over the conformal-map meridian, one block per azimuthal
order ``m``.
"""

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConditioningError, DomainError
from .geometry import MappingCoefficients, max_radius, meridian
from .specfun import gauss_legendre, harmonic_table, mode_index, n_coeffs, radial_table
from .transform import Orientation, rotate_expansion
from .wavefield import WaveExpansion

CONDITION_LIMIT = 1e12


class BoundaryKind(enum.Enum):
    """Boundary condition on the particle surface."""

    SOUND_HARD = "sound_hard"  # zero normal velocity (Neumann)
    SOUND_SOFT = "sound_soft"  # zero total pressure (Dirichlet)

    @classmethod
    def parse(cls, value) -> "BoundaryKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_").replace(" ", "_")
        aliases = {"hard": "sound_hard", "rigid": "sound_hard", "neumann": "sound_hard",
                   "soft": "sound_soft", "dirichlet": "sound_soft"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise DomainError(f"unknown boundary kind {value!r}") from None


@dataclass(frozen=True)
class TMatrix:
    """Block-diagonal T-matrix of an axisymmetric body.

    ``blocks[m]`` maps incident coefficients of degrees ``|m|..n_max`` at
    azimuthal order ``m`` to scattered ones.
    """

    n_max: int
    k: float
    blocks: dict = field(repr=False)

    def apply(self, coeffs) -> np.ndarray:
        coeffs = np.asarray(coeffs, complex)
        if coeffs.shape != (n_coeffs(self.n_max),):
            raise DomainError(
                f"T-matrix of degree {self.n_max} needs {n_coeffs(self.n_max)} coefficients, "
                f"got {coeffs.shape[0]}"
            )
        out = np.zeros_like(coeffs)
        for m, block in self.blocks.items():
            idx = mode_index(np.arange(abs(m), self.n_max + 1), m)
            out[idx] = block @ coeffs[idx]
        return out

    def full(self) -> np.ndarray:
        """Dense ``(n_max + 1)^2`` square matrix in the ``nu`` ordering."""
        size = n_coeffs(self.n_max)
        out = np.zeros((size, size), complex)
        for m, block in self.blocks.items():
            idx = mode_index(np.arange(abs(m), self.n_max + 1), m)
            out[np.ix_(idx, idx)] = block
        return out

    def unitarity_residual(self) -> float:
        """``max |T + T^H + 2 T^H T|``, zero for a lossless scatterer."""
        return max(
            float(np.abs(T + T.conj().T + 2 * T.conj().T @ T).max()) for T in self.blocks.values()
        )

    def symmetry_residual(self) -> float:
        """``max |T^m - T^-m|`` over all orders."""
        return max(
            (float(np.abs(self.blocks[m] - self.blocks[-m]).max()) for m in range(1, self.n_max + 1)),
            default=0.0,
        )

    def reciprocity_residual(self) -> float:
        """``max |T^m - (T^m)^T|``.

        With orthonormal harmonics, real ``Pbar_n^m`` and the same radial
        convention for incident and scattered waves, reciprocity makes every
        block symmetric.
        """
        return max(float(np.abs(T - T.T).max()) for T in self.blocks.values())


def mie_coefficients(bc, ka: float, n_max: int) -> TMatrix:
    """Diagonal T-matrix of a sphere of radius ``a`` at ``k = 1 / a`` scale.

    ``s_n = -j_n(ka) / h_n(ka)`` (sound-soft) or ``-j_n'(ka) / h_n'(ka)``
    (sound-hard). The returned ``k`` is ``ka`` itself, i.e. lengths are in
    units of the radius; use :func:`sphere_tmatrix` for a dimensional one.
    """
    return sphere_tmatrix(bc, ka, 1.0, n_max)


def sphere_tmatrix(bc, k: float, radius: float, n_max: int) -> TMatrix:
    bc = BoundaryKind.parse(bc)
    ka = k * radius
    if not ka > 0:
        raise DomainError("ka must be positive")
    j = radial_table("regular", n_max, ka)
    h = radial_table("outgoing", n_max, ka)
    if bc is BoundaryKind.SOUND_SOFT:
        s = -j.values / h.values
    else:
        s = -j.derivatives / h.derivatives
    blocks = {m: np.diag(s[abs(m):]).astype(complex) for m in range(-n_max, n_max + 1)}
    return TMatrix(n_max, k, blocks)


def _meridian_tables(c: MappingCoefficients, k: float, n_max: int, points: int):
    """Basis values and normal derivatives along the meridian (``phi = 0``)."""
    rule = gauss_legendre(points)
    gamma = 0.5 * np.pi * (rule.nodes + 1.0)
    sample = meridian(c, gamma)
    r = np.hypot(sample.rho, sample.z)
    theta = np.arctan2(sample.rho, sample.z)
    n_rho, n_z = sample.unit_normal[..., 0], sample.unit_normal[..., 1]
    n_r = n_rho * np.sin(theta) + n_z * np.cos(theta)
    n_t = n_rho * np.cos(theta) - n_z * np.sin(theta)
    # dS = rho dphi |dw/dgamma| dgamma; the phi integral contributes 2 pi
    weight = 2 * np.pi * sample.rho * sample.arc_jacobian * (0.5 * np.pi * rule.weights)
    H = harmonic_table(n_max, theta, 0.0)
    P = H.values.real
    dP = H.theta_derivatives.real
    tables = {}
    for kind in ("regular", "outgoing"):
        rad = radial_table(kind, n_max, k * r)
        tables[kind] = (rad.values, k * rad.derivatives)
    return r, n_r, n_t, weight, P, dP, tables


def _equilibrated_solve(Q, RgQ, m):
    """``-RgQ Q^{-1}`` with row/column scaling and a condition check."""
    row = 1.0 / np.abs(Q).max(axis=1)
    Qr = Q * row[:, None]
    col = 1.0 / np.abs(Qr).max(axis=0)
    Qs = Qr * col[None, :]
    cond = np.linalg.cond(Qs)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise ConditioningError(
            f"null-field matrix for m = {m} has condition number {cond:.2e}; "
            "use a smaller n_max or a milder aspect ratio"
        )
    # T = -RgQ diag(col) Qs^{-1} diag(row)
    X = np.linalg.solve(Qs.T, (RgQ * col[None, :]).T).T
    return -X * row[None, :]


def _nullfield_blocks(c, bc, k, n_max, points):
    r, n_r, n_t, weight, P, dP, tables = _meridian_tables(c, k, n_max, points)
    h, dh = tables["outgoing"]
    j, dj = tables["regular"]
    blocks = {}
    for m in range(0, n_max + 1):
        degrees = np.arange(m, n_max + 1)
        idx = mode_index(degrees, m)
        Pm, dPm = P[idx], dP[idx]
        out_val = h[degrees] * Pm
        out_dn = n_r * dh[degrees] * Pm + n_t * h[degrees] / r * dPm
        reg_val = j[degrees] * Pm
        reg_dn = n_r * dj[degrees] * Pm + n_t * j[degrees] / r * dPm
        if bc is BoundaryKind.SOUND_HARD:
            # surface pressure expanded in regular waves (columns), tested
            # against normal derivatives of the conjugate bases (rows)
            Q = 1j * k * (out_dn * weight) @ reg_val.T
            RgQ = 1j * k * (reg_dn * weight) @ reg_val.T
        else:
            # surface normal velocity expanded in regular-wave derivatives
            Q = -1j * k * (out_val * weight) @ reg_dn.T
            RgQ = -1j * k * (reg_val * weight) @ reg_dn.T
        blocks[m] = _equilibrated_solve(Q, RgQ, m)
    for m in range(1, n_max + 1):
        blocks[-m] = blocks[m].copy()
    return blocks


def tmatrix_nullfield(
    c,
    bc,
    k: float,
    n_max: int,
    quadrature_points: int | None = None,
    unitarity_target: float = 1e-8,
    surface_padding: int = 8,
) -> TMatrix:
    """Null-field T-matrix of the body of revolution defined by ``c``.

    The surface field of a non-spherical body needs more degrees than the
    incident field it responds to, so the blocks are solved at degree
    ``n_max + surface_padding`` and their leading ``n_max`` part is kept.
    Meridian integrals use Gauss-Legendre in ``gamma`` with
    ``4 n + 16`` points for the solve degree ``n``. If the lossless-unitarity
    residual exceeds ``unitarity_target`` the rule is doubled (at most twice)
    and the best result is kept.
    """
    if not isinstance(c, MappingCoefficients):
        c = MappingCoefficients(c)
    bc = BoundaryKind.parse(bc)
    if not k > 0:
        raise DomainError("wavenumber must be positive")
    if n_max < 0 or surface_padding < 0:
        raise DomainError("n_max and surface_padding must be non-negative")
    kr = k * max_radius(c)
    if kr > 10:
        warnings.warn(f"k r_max = {kr:.1f} exceeds 10; null-field results may be inaccurate", stacklevel=2)
    n_solve = n_max + surface_padding
    points = 4 * n_solve + 16 if quadrature_points is None else int(quadrature_points)
    best = None
    for _ in range(3):
        solved = _nullfield_blocks(c, bc, k, n_solve, points)
        blocks = {m: b[: n_max + 1 - abs(m), : n_max + 1 - abs(m)].copy()
                  for m, b in solved.items() if abs(m) <= n_max}
        T = TMatrix(n_max, k, blocks)
        res = T.unitarity_residual()
        if best is None or res < best[0]:
            best = (res, T)
        if res <= unitarity_target or quadrature_points is not None:
            break
        points *= 2
    return best[1]


def tmatrix_for(c, bc, k: float, n_max: int) -> TMatrix:
    """Mie T-matrix for a one-term ``c`` (a sphere), null-field otherwise."""
    if not isinstance(c, MappingCoefficients):
        c = MappingCoefficients(c)
    if np.all(c.array[1:] == 0):
        return sphere_tmatrix(bc, k, c.averaged_radius, n_max)
    return tmatrix_nullfield(c, bc, k, n_max)


def scatter_lab_frame(T: TMatrix, incident: WaveExpansion, o: Orientation) -> WaveExpansion:
    """Scattered (outgoing) expansion in the lab frame.

    The incident coefficients are rotated into the body frame, multiplied by
    the body-frame ``T`` and rotated back: ``s = D(o) T D(o)^-1 a``.
    """
    if incident.kind != "regular":
        raise DomainError("incident expansion must be regular")
    if incident.n_max != T.n_max:
        raise DomainError(f"incident degree {incident.n_max} does not match T-matrix degree {T.n_max}")
    if not math.isclose(incident.k, T.k, rel_tol=1e-12):
        raise DomainError("incident wavenumber does not match the T-matrix")
    body = rotate_expansion(incident, o.inverse)
    scattered = body.with_coeffs(T.apply(body.coeffs))
    lab = rotate_expansion(scattered, o)
    return WaveExpansion("outgoing", T.n_max, incident.k, incident.origin, lab.coeffs)
