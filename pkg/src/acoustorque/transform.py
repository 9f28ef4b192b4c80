"""Rotations and translations of spherical-wave expansions.

Rotations act on the coefficient vector degree by degree through the Wigner
D-matrix; translations along ``z`` use the regular-to-regular addition
theorem, which is diagonal in the azimuthal order ``m``. Any other
translation is composed from a rotation, an axial translation and the
inverse rotation.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, TruncationError
from .specfun import gauss_legendre, legendre_normalized, mode_index, mode_numbers, n_coeffs
from .specfun import radial_table, wigner_d_block
from .wavefield import WaveExpansion

_GIMBAL_TOL = 1e-12


def _rot_x(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def _rot_y(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _rot_z(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def euler_angles(rotation, reference=None) -> np.ndarray:
    """Angles ``(theta_x, theta_y, theta_z)`` with ``R = Rz Ry Rx``.

    Every rotation has two angle triples (and a one-parameter family at
    ``theta_y = +-pi/2``). Without ``reference`` the principal branch
    ``|theta_y| <= pi/2`` is returned. With ``reference`` the branch and the
    ``2 pi`` offsets closest to it are chosen, which keeps a time series of
    reported angles continuous.
    """
    R = np.asarray(rotation, float)
    sy = -np.clip(R[2, 0], -1.0, 1.0)
    cy = math.hypot(R[2, 1], R[2, 2])
    theta_y = math.atan2(sy, cy)
    if cy > _GIMBAL_TOL:
        theta_x = math.atan2(R[2, 1], R[2, 2])
        theta_z = math.atan2(R[1, 0], R[0, 0])
    else:
        # only theta_z -+ theta_x is determined; keep theta_x from the reference
        theta_x = 0.0 if reference is None else float(reference[0])
        if sy > 0:
            theta_z = math.atan2(-R[0, 1], R[1, 1]) + theta_x
        else:
            theta_z = math.atan2(-R[0, 1], R[1, 1]) - theta_x
    principal = np.array([theta_x, theta_y, theta_z])
    if reference is None:
        return principal
    ref = np.asarray(reference, float)
    alternate = np.array([theta_x + math.pi, math.pi - theta_y, theta_z + math.pi])
    best, best_dist = principal, np.inf
    for cand in (principal, alternate):
        shifted = cand + 2 * math.pi * np.round((ref - cand) / (2 * math.pi))
        dist = np.abs(shifted - ref).sum()
        if dist < best_dist:
            best, best_dist = shifted, dist
    return best


@dataclass(frozen=True)
class Orientation:
    """A proper rotation together with the Euler angles that describe it.

    ``rotation = Rz(theta_z) @ Ry(theta_y) @ Rx(theta_x)``: the body is
    rotated about the lab ``x`` axis first, then ``y``, then ``z``.
    """

    angles: np.ndarray
    rotation: np.ndarray = field(repr=False)

    def __post_init__(self):
        R = np.asarray(self.rotation, float).reshape(3, 3)
        if np.abs(R @ R.T - np.eye(3)).max() > 1e-10 or np.linalg.det(R) < 0:
            raise DomainError("orientation matrix must be a proper rotation")
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "angles", np.asarray(self.angles, float).reshape(3))

    @classmethod
    def identity(cls) -> "Orientation":
        return cls(np.zeros(3), np.eye(3))

    @classmethod
    def from_matrix(cls, rotation, reference=None) -> "Orientation":
        R = np.asarray(rotation, float)
        return cls(euler_angles(R, reference), R)

    @property
    def inverse(self) -> "Orientation":
        return Orientation.from_matrix(self.rotation.T)

    def compose(self, first: "Orientation") -> "Orientation":
        """Rotation applying ``first`` and then ``self``."""
        return Orientation.from_matrix(self.rotation @ first.rotation)

    def zyz_angles(self) -> tuple[float, float, float]:
        """``(alpha, beta, gamma)`` with ``R = Rz(alpha) Ry(beta) Rz(gamma)``."""
        R = self.rotation
        sb = math.hypot(R[0, 2], R[1, 2])
        beta = math.atan2(sb, R[2, 2])
        if sb > _GIMBAL_TOL:
            alpha = math.atan2(R[1, 2], R[0, 2])
            gamma = math.atan2(R[2, 1], -R[2, 0])
        elif R[2, 2] > 0:
            alpha, gamma = math.atan2(R[1, 0], R[0, 0]), 0.0
        else:
            alpha, gamma = math.atan2(-R[1, 0], -R[0, 0]), 0.0
        return alpha, beta, gamma


def euler_to_rotation(angles) -> Orientation:
    """Orientation from ``(theta_x, theta_y, theta_z)`` in radians."""
    a = np.asarray(angles, float).reshape(3)
    if not np.all(np.isfinite(a)):
        raise DomainError("orientation angles must be finite")
    R = _rot_z(a[2]) @ _rot_y(a[1]) @ _rot_x(a[0])
    return Orientation(a, R)


def rotation_between(u, v) -> Orientation:
    """A rotation taking unit vector ``u`` to unit vector ``v``."""
    u = np.asarray(u, float) / np.linalg.norm(u)
    v = np.asarray(v, float) / np.linalg.norm(v)
    axis = np.cross(u, v)
    s, c = np.linalg.norm(axis), float(u @ v)
    if s < 1e-15:
        if c > 0:
            return Orientation.identity()
        # half turn about any axis perpendicular to u
        helper = np.eye(3)[np.argmin(np.abs(u))]
        axis = np.cross(u, helper)
        axis /= np.linalg.norm(axis)
        return Orientation.from_matrix(2 * np.outer(axis, axis) - np.eye(3))
    K = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]]) / s
    R = np.eye(3) + s * K + (1 - c) * K @ K
    return Orientation.from_matrix(R)


def rotation_blocks(n_max: int, o: Orientation) -> list[np.ndarray]:
    """Wigner D-matrices ``D^n_{m'm} = exp(-i m' alpha) d^n_{m'm}(beta) exp(-i m gamma)``."""
    alpha, beta, gamma = o.zyz_angles()
    blocks = []
    for n in range(n_max + 1):
        m = np.arange(-n, n + 1)
        d = wigner_d_block(n, beta)
        blocks.append(np.exp(-1j * m * alpha)[:, None] * d * np.exp(-1j * m * gamma)[None, :])
    return blocks


def rotate_coefficients(coeffs, n_max: int, o: Orientation) -> np.ndarray:
    """Apply :func:`rotation_blocks` degree by degree to a coefficient vector."""
    coeffs = np.asarray(coeffs, complex)
    out = np.empty_like(coeffs)
    for n, D in enumerate(rotation_blocks(n_max, o)):
        sl = slice(n * n, (n + 1) * (n + 1))
        out[sl] = D @ coeffs[sl]
    return out


def rotate_expansion(exp: WaveExpansion, o: Orientation) -> WaveExpansion:
    """Expansion of the rotated field ``p'(x) = p(o.rotation^T x)``.

    Rotation is about the expansion origin; kind, wavenumber and origin are
    kept.
    """
    return exp.with_coeffs(rotate_coefficients(exp.coeffs, exp.n_max, o))


def axial_translation_blocks(k: float, d: float, n_in: int, n_out: int) -> list[np.ndarray]:
    """Per-``m`` regular-to-regular translation matrices along ``z``.

    ``S^m_{n'n} = i^(n'-n) 2 pi int_{-1}^{1} Pbar_{n'}^m(x) Pbar_n^m(x) exp(i k d x) dx``
    follows from writing each regular wave as a superposition of plane
    waves. The integrand is a polynomial times an entire function, so
    Gauss-Legendre quadrature with a few points beyond ``n_in + n_out + k|d|``
    converges to machine precision. Block ``m`` has shape
    ``(n_out + 1 - |m|, n_in + 1 - |m|)``; blocks are returned for
    ``m = 0..min(n_in, n_out)`` since ``S^{-m} = S^m``.
    """
    points = n_in + n_out + int(math.ceil(abs(k * d))) + 16
    rule = gauss_legendre(points)
    x = rule.nodes
    P, _ = legendre_normalized(max(n_in, n_out), x, np.sqrt(1.0 - x * x))
    kernel = 2 * np.pi * rule.weights * np.exp(1j * k * d * x)
    blocks = []
    for m in range(min(n_in, n_out) + 1):
        rows = P[m : n_out + 1, m]
        cols = P[m : n_in + 1, m]
        S = (rows * kernel) @ cols.T
        n_row = np.arange(m, n_out + 1)[:, None]
        n_col = np.arange(m, n_in + 1)[None, :]
        blocks.append(S * 1j ** ((n_row - n_col) % 4))
    return blocks


def _tail_weights(k_r: float, n_top: int) -> np.ndarray:
    return np.abs(radial_table("regular", n_top, k_r).values)


def translate_z_regular(exp: WaveExpansion, d: float, n_max_out: int | None = None) -> WaveExpansion:
    """Move the origin of a regular expansion by ``d`` along ``z``.

    The returned expansion has origin ``exp.origin + d z`` and local
    coefficients ``b`` such that ``sum b psi(x) = p(x + d z)`` in local
    coordinates. Degrees up to ``n_max_out + max(8, k|d|)`` are computed and
    the part above ``n_max_out`` is dropped; if that dropped part carries more
    than ``1e-6`` of the field on the ball ``k r <= n_max_out / 2`` (measured
    with ``|j_n|`` weights at its rim), a :class:`TruncationError` is raised.
    """
    if exp.kind != "regular":
        raise DomainError("only regular expansions can be translated")
    n_in = exp.n_max
    n_out = n_in if n_max_out is None else int(n_max_out)
    if n_out < n_in:
        raise DomainError(f"target truncation {n_out} is below the input truncation {n_in}")
    d = float(d)
    if not math.isfinite(d):
        raise DomainError("translation distance must be finite")
    new_origin = exp.origin + np.array([0.0, 0.0, d])
    if d == 0.0:
        return exp.truncated(n_out)
    pad = max(8, int(math.ceil(abs(exp.k * d))))
    n_int = n_out + pad
    out = np.zeros(n_coeffs(n_int), complex)
    for m, S in enumerate(axial_translation_blocks(exp.k, d, n_in, n_int)):
        for sign in ((1,) if m == 0 else (1, -1)):
            src = mode_index(np.arange(m, n_in + 1), sign * m)
            dst = mode_index(np.arange(m, n_int + 1), sign * m)
            out[dst] = S @ exp.coeffs[src]
    n_all, _ = mode_numbers(n_int)
    w = _tail_weights(0.5 * max(n_out, 1), n_int)[n_all]
    total = np.linalg.norm(out * w)
    tail = np.linalg.norm((out * w)[n_all > n_out])
    if total > 0 and tail > 1e-6 * total:
        raise TruncationError(
            f"translation by {d:.4g} m needs more than degree {n_out} "
            f"(dropped tail {tail / total:.2e}); raise the target truncation"
        )
    return WaveExpansion("regular", n_out, exp.k, new_origin, out[: n_coeffs(n_out)])


def translate_regular(exp: WaveExpansion, displacement, n_max_out: int | None = None) -> WaveExpansion:
    """Move the origin of a regular expansion by an arbitrary 3-vector.

    The axis of the displacement is rotated onto ``z``, the expansion is
    translated axially and the result rotated back.
    """
    disp = np.asarray(displacement, float).reshape(3)
    dist = float(np.linalg.norm(disp))
    if dist == 0.0:
        return exp.truncated(exp.n_max if n_max_out is None else n_max_out)
    to_axis = rotation_between(np.array([0.0, 0.0, 1.0]), disp / dist)
    aligned = rotate_expansion(exp, to_axis.inverse)
    moved = translate_z_regular(aligned, dist, n_max_out)
    back = rotate_expansion(moved, to_axis)
    return WaveExpansion("regular", back.n_max, exp.k, exp.origin + disp, back.coeffs)
