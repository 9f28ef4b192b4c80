"""Acoustic radiation force and torque.

The time-averaged force is the flux of the second-order momentum tensor
through a sphere enclosing the particle and no sources,

    F = -int [ <p2> n + rho0 <v (v . n)> ] dS,
    <p2> = <p^2> / (2 rho0 c0^2) - rho0 <|v|^2> / 2,

and the torque is the flux of angular momentum,

    T = -rho0 R^3 int <(rhat x v)(v . rhat)> dOmega.

For complex amplitudes ``<Re(A e^{-iwt}) Re(B e^{-iwt})> = Re(A conj(B)) / 2``.
The incident field alone carries zero net flux through a source-free sphere,
so the quadratic forms are evaluated on the scattered-scattered and
incident-scattered products only; this avoids cancelling two large numbers.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GeometryError
from .wavefield import Medium, WaveExpansion, evaluate_expansion, sphere_sampling


@dataclass(frozen=True)
class ForceTorque:
    """Radiation force (N) and torque about the particle centre (N m)."""

    force: np.ndarray
    torque: np.ndarray

    def __post_init__(self):
        force = np.asarray(self.force, float).reshape(3)
        torque = np.asarray(self.torque, float).reshape(3)
        if not (np.all(np.isfinite(force)) and np.all(np.isfinite(torque))):
            raise DomainError("force and torque must be finite")
        object.__setattr__(self, "force", force)
        object.__setattr__(self, "torque", torque)

    @classmethod
    def zero(cls) -> "ForceTorque":
        return cls(np.zeros(3), np.zeros(3))

    def as_row(self) -> np.ndarray:
        """``[Fx, Fy, Fz, Tx, Ty, Tz]``."""
        return np.concatenate([self.force, self.torque])


def _half_re(a, b):
    """``Re(a conj(b)) / 2`` summed over the last axis when vectors are given."""
    return 0.5 * np.real(a * np.conj(b))


def force_torque(
    incident: WaveExpansion,
    scattered: WaveExpansion,
    medium: Medium,
    f: float,
    radius: float,
    particle_extent: float | None = None,
    source_distance: float | None = None,
) -> ForceTorque:
    """Force and torque from momentum-flux quadrature on a sphere.

    ``incident`` (regular) and ``scattered`` (outgoing) must share origin
    and wavenumber. Quadrature is Gauss-Legendre in ``cos theta`` with
    ``2 N + 2`` nodes times ``4 N + 4`` uniform azimuths, ``N`` the larger of
    the two truncation degrees. ``particle_extent`` and ``source_distance``,
    when given, are checked against ``radius``.
    """
    if incident.kind != "regular" or scattered.kind != "outgoing":
        raise DomainError("expected a regular incident and an outgoing scattered expansion")
    if not np.allclose(incident.origin, scattered.origin, rtol=0, atol=1e-15) or not math.isclose(
        incident.k, scattered.k, rel_tol=1e-12
    ):
        raise DomainError("incident and scattered expansions must share origin and wavenumber")
    if not radius > 0:
        raise GeometryError("quadrature radius must be positive")
    if particle_extent is not None and radius <= particle_extent:
        raise GeometryError(
            f"quadrature radius {radius:.4g} m does not enclose the particle (extent {particle_extent:.4g} m)"
        )
    if source_distance is not None and radius >= source_distance:
        raise GeometryError(
            f"quadrature radius {radius:.4g} m reaches a source at {source_distance:.4g} m"
        )
    n = max(incident.n_max, scattered.n_max)
    sampling = sphere_sampling(2 * n + 2, 4 * n + 4)
    rhat = sampling.points
    pts = incident.origin + radius * rhat
    p_i, v_i = evaluate_expansion(incident, medium, f, pts)
    p_s, v_s = evaluate_expansion(scattered, medium, f, pts)
    rho, c = medium.rho0, medium.c0

    def pair(a):
        # quadratic form Q(u, u) - Q(u_i, u_i) = Q(s, s) + Q(i, s) + Q(s, i)
        return a(p_s, v_s, p_s, v_s) + a(p_i, v_i, p_s, v_s) + a(p_s, v_s, p_i, v_i)

    p_sq = pair(lambda p1, v1, p2, v2: _half_re(p1, p2))
    v_sq = pair(lambda p1, v1, p2, v2: _half_re(v1, v2).sum(axis=1))
    vn = lambda v: np.einsum("nj,nj->n", v, rhat)  # noqa: E731
    v_vn = pair(lambda p1, v1, p2, v2: _half_re(v1, vn(v2)[:, None]))
    p2 = p_sq / (2 * rho * c * c) - rho * v_sq / 2

    w = sampling.weights
    force = -(radius**2) * ((p2[:, None] * rhat + rho * v_vn) * w[:, None]).sum(axis=0)
    cross = lambda v: np.cross(rhat, v)  # noqa: E731
    ang = pair(lambda p1, v1, p2_, v2: _half_re(cross(v1), vn(v2)[:, None]))
    torque = -rho * radius**3 * (ang * w[:, None]).sum(axis=0)
    return ForceTorque(force, torque)


@dataclass(frozen=True)
class GorkovCoefficients:
    """Monopole and dipole scattering factors of a small sphere."""

    f1: float = 1.0
    f2: float = 1.0

    @classmethod
    def sound_hard(cls) -> "GorkovCoefficients":
        """Rigid, immovable sphere: ``f1 = f2 = 1``."""
        return cls(1.0, 1.0)


def gorkov_potential(field, particle_radius: float, gc: GorkovCoefficients, medium: Medium, points):
    """``U = 2 pi a^3 [f1 <p^2> / (3 rho0 c0^2) - f2 rho0 <|v|^2> / 2]``.

    ``field`` maps ``(N, 3)`` points to ``(p, v)`` complex amplitudes.
    """
    pts = np.atleast_2d(np.asarray(points, float))
    p, v = field(pts)
    p_sq = 0.5 * np.abs(p) ** 2
    v_sq = 0.5 * np.sum(np.abs(v) ** 2, axis=-1)
    rho, c = medium.rho0, medium.c0
    return 2 * np.pi * particle_radius**3 * (gc.f1 * p_sq / (3 * rho * c * c) - gc.f2 * rho * v_sq / 2)


def gorkov_force(
    field, particle_radius: float, gc: GorkovCoefficients, medium: Medium, position, k: float
) -> np.ndarray:
    """Small-particle force ``-grad U`` by central differences (step ``1e-3 / k``).

    A single travelling plane wave has uniform ``U`` and therefore yields
    zero force: the potential captures gradient forces only.
    """
    if k * particle_radius > 0.3:
        warnings.warn(
            f"k a = {k * particle_radius:.3g} > 0.3; the small-particle potential is unreliable",
            stacklevel=2,
        )
    x = np.asarray(position, float).reshape(3)
    h = 1e-3 / k
    stencil = np.concatenate([x + h * np.eye(3), x - h * np.eye(3)])
    U = gorkov_potential(field, particle_radius, gc, medium, stencil)
    return -(U[:3] - U[3:]) / (2 * h)
