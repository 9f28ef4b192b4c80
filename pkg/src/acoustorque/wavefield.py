"""Incident fields and their spherical-wave representation.

A field is expanded as ``p(x) = sum_nu a_nu R_n(k |x - o|) Y_nu(x - o)``
with ``R_n = j_n`` (regular) or ``h_n^(1)`` (outgoing). Particle velocity
follows from the linearised Euler equation, ``v = grad p / (i omega rho0)``.
"""

import math
from functools import lru_cache
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConditioningError, DomainError, GeometryError
from .specfun import gauss_legendre, harmonic_table, mode_numbers, n_coeffs, radial_table
from .specfun import cylindrical_j1, cylindrical_j2


@dataclass(frozen=True)
class Medium:
    rho0: float
    c0: float
    mu: float
    name: str = "custom"

    def __post_init__(self):
        if not (self.rho0 > 0 and self.c0 > 0 and self.mu > 0):
            raise DomainError(f"medium properties must be positive: {self}")

    @classmethod
    def preset(cls, name: str) -> "Medium":
        try:
            return MEDIA[name.lower()]
        except KeyError:
            raise DomainError(f"unknown medium preset {name!r}; choose from {sorted(MEDIA)}") from None

    def wavenumber(self, f: float) -> float:
        return 2 * np.pi * f / self.c0


AIR = Medium(1.2, 343.0, 1.81e-5, "air")
WATER = Medium(998.0, 1481.0, 1.0e-3, "water")
MEDIA = {"air": AIR, "water": WATER}


@dataclass(frozen=True)
class PlaneWave:
    """Plane wave ``amplitude * exp(i k direction . x)``."""

    amplitude: complex = 1.0
    direction: tuple = (0.0, 0.0, 1.0)

    def __post_init__(self):
        d = np.asarray(self.direction, float)
        if d.shape != (3,) or abs(np.linalg.norm(d) - 1.0) > 1e-12:
            raise DomainError(f"plane-wave direction must be a unit 3-vector, got {self.direction}")


@dataclass(frozen=True)
class TransducerArray:
    """Baffled circular pistons, all radiating along +z.

    ``positions`` are relative to the probe element at the origin; the
    whole array is shifted by ``(0, 0, -interdistance)``.
    """

    radius: float
    positions: np.ndarray
    v0: float = 1.5
    phase_delay: np.ndarray = None
    amplitude_ratio: np.ndarray = None
    interdistance: float = 0.02

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, float))
        if pos.ndim != 2 or pos.shape[1] != 3 or len(pos) < 1:
            raise DomainError("transducer positions must be an N x 3 array with N >= 1")
        if np.any(pos[0] != 0):
            raise DomainError("the first (probe) transducer must sit at (0, 0, 0)")
        n = len(pos)
        phase = np.zeros(n) if self.phase_delay is None else np.asarray(self.phase_delay, float).ravel()
        amp = np.ones(n) if self.amplitude_ratio is None else np.asarray(self.amplitude_ratio, float).ravel()
        if phase.shape != (n,) or amp.shape != (n,):
            raise DomainError("phase_delay and amplitude_ratio need one entry per transducer")
        if np.any(amp < 0):
            raise DomainError("amplitude ratios must be non-negative")
        if not self.radius > 0:
            raise DomainError("transducer radius must be positive")
        if self.interdistance < 0:
            raise DomainError("interdistance must be non-negative")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "phase_delay", phase)
        object.__setattr__(self, "amplitude_ratio", amp)

    @property
    def centers(self) -> np.ndarray:
        return self.positions - np.array([0.0, 0.0, self.interdistance])

    def nearest_source_distance(self, point) -> float:
        return float(np.min(np.linalg.norm(self.centers - np.asarray(point, float), axis=1)))


@dataclass(frozen=True)
class WaveExpansion:
    kind: str
    n_max: int
    k: float
    origin: np.ndarray
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.kind not in ("regular", "outgoing"):
            raise DomainError(f"unknown expansion kind {self.kind!r}")
        if not self.k > 0:
            raise DomainError("wavenumber must be positive")
        coeffs = np.asarray(self.coeffs, complex)
        if coeffs.shape != (n_coeffs(self.n_max),):
            raise DomainError(f"expected {n_coeffs(self.n_max)} coefficients, got {coeffs.shape}")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "origin", np.asarray(self.origin, float).reshape(3))

    def with_coeffs(self, coeffs, n_max=None) -> "WaveExpansion":
        return replace(self, coeffs=coeffs, n_max=self.n_max if n_max is None else n_max)

    def truncated(self, n_max: int) -> "WaveExpansion":
        """Copy truncated (or zero-padded) to degree ``n_max``."""
        out = np.zeros(n_coeffs(n_max), complex)
        keep = min(n_coeffs(n_max), n_coeffs(self.n_max))
        out[:keep] = self.coeffs[:keep]
        return replace(self, coeffs=out, n_max=n_max)

    def __add__(self, other):
        if (self.kind, self.n_max, self.k) != (other.kind, other.n_max, other.k) or not np.array_equal(
            self.origin, other.origin
        ):
            raise DomainError("expansions must share kind, truncation, wavenumber and origin")
        return self.with_coeffs(self.coeffs + other.coeffs)

    def __mul__(self, scalar):
        return self.with_coeffs(self.coeffs * scalar)

    __rmul__ = __mul__


def wavenumber(f: float, medium: Medium) -> float:
    return medium.wavenumber(f)


def default_n_max(k: float, r_max: float) -> int:
    """Wiscombe-style truncation ``ceil(x + 4 x^(1/3) + 4)`` with ``x = k r_max``."""
    x = k * r_max
    return int(math.ceil(x + 4 * x ** (1 / 3) + 4))


def default_projection_radii(r_max: float) -> tuple[float, float]:
    return 1.5 * r_max, 1.9 * r_max


def plane_wave_coefficients(pw: PlaneWave, k: float, n_max: int, origin=(0.0, 0.0, 0.0)) -> WaveExpansion:
    """Regular expansion about ``origin`` of ``p0 exp(i k khat . x)``.

    ``a_n^m = 4 pi i^n conj(Y_n^m(khat)) p0 exp(i k khat . origin)``; the
    phase factor keeps the field referenced to the global frame.
    """
    d = np.asarray(pw.direction, float)
    origin = np.asarray(origin, float)
    theta = np.arctan2(np.hypot(d[0], d[1]), d[2])
    phi = np.arctan2(d[1], d[0])
    Y = harmonic_table(n_max, theta, phi).values
    n, _ = mode_numbers(n_max)
    phase = np.exp(1j * k * d @ origin)
    coeffs = 4 * np.pi * (1j**n) * np.conj(Y) * complex(pw.amplitude) * phase
    return WaveExpansion("regular", n_max, k, origin, coeffs)


def _spherical(points):
    r = np.linalg.norm(points, axis=-1)
    theta = np.arctan2(np.hypot(points[..., 0], points[..., 1]), points[..., 2])
    phi = np.arctan2(points[..., 1], points[..., 0])
    return r, theta, phi


def _unit_vectors(theta, phi):
    st, ct, sp, cp = np.sin(theta), np.cos(theta), np.sin(phi), np.cos(phi)
    rhat = np.stack([st * cp, st * sp, ct], -1)
    that = np.stack([ct * cp, ct * sp, -st], -1)
    phat = np.stack([-sp, cp, np.zeros_like(sp)], -1)
    return rhat, that, phat


def basis_functions(kind: str, n_max: int, k: float, points):
    """Values and Cartesian gradients of every basis function at ``points``.

    Returns ``(values, gradients)`` shaped ``(ncoef, N)`` and
    ``(ncoef, N, 3)``; ``points`` are relative to the expansion origin.
    """
    points = np.atleast_2d(np.asarray(points, float))
    r, theta, phi = _spherical(points)
    at_origin = r == 0
    if kind == "outgoing" and at_origin.any():
        raise DomainError("outgoing expansions cannot be evaluated at their origin")
    n, m = mode_numbers(n_max)
    rad = radial_table(kind, n_max, k * r)
    H = harmonic_table(n_max, theta, phi)
    R = rad.values[n]
    dR = rad.derivatives[n]
    values = R * H.values
    safe_r = np.where(at_origin, 1.0, r)
    d_r = k * dR * H.values
    d_theta = R / safe_r * H.theta_derivatives
    d_phi = 1j * R / safe_r * H.m_over_sin
    rhat, that, phat = _unit_vectors(theta, phi)
    grads = d_r[..., None] * rhat + d_theta[..., None] * that + d_phi[..., None] * phat
    if at_origin.any():
        # only the n = 1 regular functions have a gradient at the origin: j_1(kr) ~ kr / 3
        g = np.zeros((len(n), 3), complex)
        c0 = np.sqrt(3 / (4 * np.pi))
        c1 = np.sqrt(3 / (8 * np.pi))
        if n_max >= 1:
            g[1] = (k / 3) * c1 * np.array([1.0, -1j, 0.0])
            g[2] = (k / 3) * c0 * np.array([0.0, 0.0, 1.0])
            g[3] = (k / 3) * -c1 * np.array([1.0, 1j, 0.0])
        grads[:, at_origin] = g[:, None, :]
    return values, grads


_CHUNK = 2048


def evaluate_expansion(exp: WaveExpansion, medium: Medium, f: float, points):
    """Pressure and particle velocity of an expansion at ``points``.

    ``points`` may be a single 3-vector or an ``(N, 3)`` array in the global
    frame. Returns ``(p, v)`` with shapes ``(N,)`` and ``(N, 3)`` (or a
    scalar and a 3-vector for a single point).
    """
    pts = np.asarray(points, float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts) - exp.origin
    p = np.empty(len(pts), complex)
    grad = np.empty((len(pts), 3), complex)
    for s in range(0, len(pts), _CHUNK):
        vals, grads = basis_functions(exp.kind, exp.n_max, exp.k, pts[s : s + _CHUNK])
        p[s : s + _CHUNK] = exp.coeffs @ vals
        grad[s : s + _CHUNK] = np.einsum("c,cnj->nj", exp.coeffs, grads)
    omega = 2 * np.pi * f
    v = grad / (1j * omega * medium.rho0)
    if single:
        return p[0], v[0]
    return p, v


def piston_directivity(x):
    """``2 J1(x) / x`` with the limit 1 at ``x = 0``."""
    x = np.asarray(x, float)
    small = np.abs(x) < 1e-6
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 - x**2 / 8.0, 2.0 * cylindrical_j1(safe) / safe)


def _piston_terms(array, medium, f, points):
    k = medium.wavenumber(f)
    pts = np.atleast_2d(np.asarray(points, float))
    rel = pts[:, None, :] - array.centers[None, :, :]
    r = np.linalg.norm(rel, axis=-1)
    if np.any(r < 1e-12):
        raise DomainError("field point coincides with a transducer center")
    drive = array.amplitude_ratio * array.v0 * np.exp(1j * array.phase_delay)
    scale = -0.5j * medium.rho0 * medium.c0 * k * array.radius**2 * drive
    return k, pts, rel, r, scale


def piston_pressure(array: TransducerArray, medium: Medium, f: float, points):
    """Far-field pressure of the array, summed over elements.

    ``p_j = -(i/2) rho0 c0 k a^2 (A_j v0 e^{i phi_j}) D(theta_j) e^{i k r_j} / r_j``
    with ``D(theta) = 2 J1(k a sin theta) / (k a sin theta)``.
    """
    single = np.asarray(points).ndim == 1
    k, pts, rel, r, scale = _piston_terms(array, medium, f, points)
    sin_t = np.hypot(rel[..., 0], rel[..., 1]) / r
    p = (scale * piston_directivity(k * array.radius * sin_t) * np.exp(1j * k * r) / r).sum(axis=1)
    return p[0] if single else p


def piston_field(array: TransducerArray, medium: Medium, f: float, points):
    """Pressure and analytic particle velocity of the far-field piston model."""
    single = np.asarray(points).ndim == 1
    k, pts, rel, r, scale = _piston_terms(array, medium, f, points)
    rho_c = np.hypot(rel[..., 0], rel[..., 1])
    sin_t, cos_t = rho_c / r, rel[..., 2] / r
    u = k * array.radius * sin_t
    D = piston_directivity(u)
    small = np.abs(u) < 1e-6
    safe = np.where(small, 1.0, u)
    dD_du = np.where(small, -u / 4.0, -2.0 * cylindrical_j2(safe) / safe)
    radial = np.exp(1j * k * r) / r
    p_j = scale * D * radial
    rhat = rel / r[..., None]
    # theta-hat of each element frame; on the element axis the D' factor vanishes
    with np.errstate(invalid="ignore", divide="ignore"):
        ex = np.where(rho_c > 0, rel[..., 0] / rho_c, 1.0)
        ey = np.where(rho_c > 0, rel[..., 1] / rho_c, 0.0)
    that = np.stack([cos_t * ex, cos_t * ey, -sin_t], -1)
    grad = scale[None, :, None] * radial[..., None] * (
        (D * (1j * k - 1.0 / r))[..., None] * rhat
        + (dD_du * k * array.radius * cos_t / r)[..., None] * that
    )
    p = p_j.sum(axis=1)
    v = grad.sum(axis=1) / (1j * 2 * np.pi * f * medium.rho0)
    if single:
        return p[0], v[0]
    return p, v


EXACT_MIN_DISTANCE = 1.5  # in piston radii


@lru_cache(maxsize=64)
def piston_multipole_coefficients(ka: float, n_top: int) -> np.ndarray:
    """Coefficients ``b_n`` of the exact baffled-piston field outside ``r = a``.

    Applying the addition theorem for ``h_0(k |x - y|)`` to the Rayleigh
    integral over the disk (where every source point has ``P_n(cos) = P_n(0)``)
    gives

        p = rho0 c0 u sum_n b_n h_n(k r) P_n(cos theta),
        b_n = (2 n + 1) P_n(0) int_0^{ka} j_n(t) t dt,

    so odd terms vanish. The integrand is smooth and, for ``n > ka``,
    single-signed, so Gauss-Legendre keeps full relative accuracy even for
    the tiny high-degree coefficients.
    """
    rule = gauss_legendre(n_top + 32)
    t = 0.5 * ka * (rule.nodes + 1.0)
    j = radial_table("regular", n_top, t).values
    integral = 0.5 * ka * (j * t) @ rule.weights
    P0, _ = _legendre_with_derivative(n_top, np.array(0.0))
    b = (2 * np.arange(n_top + 1) + 1) * P0 * integral
    b[1::2] = 0.0
    b.setflags(write=False)
    return b


def _legendre_with_derivative(n_max, x):
    """``P_n(x)`` and ``dP_n/dx`` for ``n <= n_max`` (rows)."""
    P = np.zeros((n_max + 1,) + x.shape)
    dP = np.zeros_like(P)
    P[0] = 1.0
    if n_max >= 1:
        P[1] = x
        dP[1] = 1.0
    for n in range(1, n_max):
        P[n + 1] = ((2 * n + 1) * x * P[n] - n * P[n - 1]) / (n + 1)
        dP[n + 1] = dP[n - 1] + (2 * n + 1) * P[n]
    return P, dP


EXACT_MIN_HEIGHT = 0.25  # in piston radii, above the face, for the direct integral
_RAYLEIGH_NODES = (64, 128)  # radial Gauss-Legendre x uniform azimuth over the disk


def exact_field_reachable(array: TransducerArray, points) -> np.ndarray:
    """Mask of points where :func:`piston_exact_field` can be evaluated.

    A point is out of reach when it lies within ``1.5 a`` of an element
    centre and less than ``0.25 a`` above that element's face.
    """
    pts = np.atleast_2d(np.asarray(points, float))
    rel = pts[:, None, :] - array.centers[None, :, :]
    r = np.linalg.norm(rel, axis=-1)
    near = r <= EXACT_MIN_DISTANCE * array.radius
    low = rel[..., 2] < EXACT_MIN_HEIGHT * array.radius
    return ~np.any(near & low, axis=1)


def _rayleigh_disk(rel, k: float, a: float):
    """Direct Rayleigh integral of a unit-velocity disk: ``(p, grad p) / (rho0 c0)``.

    ``p / (rho0 c0) = -(i k / 2 pi) int e^{ikR} / R dS``. Used only above the
    face, where the integrand is smooth enough for a fixed product rule.
    """
    ns, nphi = _RAYLEIGH_NODES
    rule = gauss_legendre(ns)
    s = 0.5 * a * (rule.nodes + 1.0)
    phi = 2 * np.pi * np.arange(nphi) / nphi
    y = np.stack(
        [np.outer(s, np.cos(phi)), np.outer(s, np.sin(phi)), np.zeros((ns, nphi))], -1
    ).reshape(-1, 3)
    w = np.repeat(0.5 * a * rule.weights * s, nphi) * (2 * np.pi / nphi)
    d = rel[:, None, :] - y[None]
    R = np.linalg.norm(d, axis=-1)
    g = np.exp(1j * k * R) / R * w
    pre = -1j * k / (2 * np.pi)
    p = pre * g.sum(axis=1)
    grad = pre * np.einsum("pq,pqj->pj", g * (1j * k - 1.0 / R) / R, d)
    return p, grad


def piston_exact_field(array: TransducerArray, medium: Medium, f: float, points):
    """Exact baffled-piston field (Rayleigh integral).

    Each element contributes ``rho0 c0 A_j v0 e^{i phi_j} sum_n b_n h_n(k r_j)
    P_n(cos theta_j)`` with ``b_n`` from :func:`piston_multipole_coefficients`.
    The piston is mirrored into ``z < 0`` (a monopole disk), so the series is
    a Helmholtz solution everywhere outside the sphere of radius ``a``, and
    its far field is exactly :func:`piston_pressure`. The series converges
    like ``(a / r)^n`` and is used beyond ``1.5 a`` from the element centre;
    closer points at least ``0.25 a`` above the face use the Rayleigh
    integral directly. Points closer and lower than that raise ``DomainError``.
    """
    single = np.asarray(points).ndim == 1
    k, pts, rel, r, _ = _piston_terms(array, medium, f, points)
    a = array.radius
    if not np.all(exact_field_reachable(array, pts)):
        raise DomainError(
            f"exact piston field needs points farther than {EXACT_MIN_DISTANCE} piston radii from "
            f"every element centre or at least {EXACT_MIN_HEIGHT} radii above its face "
            f"(closest {float(r.min()):.4g} m)"
        )
    near = r <= EXACT_MIN_DISTANCE * a
    # near points get a harmless stand-in radius in the series and are overwritten below
    r_series = np.where(near, 2.0 * a, r)
    rel_series = np.where(near[..., None], rel / r[..., None] * (2.0 * a), rel)
    r_min = float(r_series.min())
    n_top = max(int(math.ceil(36.8 / math.log(r_min / a))), int(math.ceil(2 * k * a))) + 8
    b = piston_multipole_coefficients(round(k * a, 12), n_top)
    cos_t = rel_series[..., 2] / r_series
    sin_t = np.hypot(rel_series[..., 0], rel_series[..., 1]) / r_series
    rad = radial_table("outgoing", n_top, k * r_series)
    P, dPdx = _legendre_with_derivative(n_top, cos_t)
    h, dh = rad.values, rad.derivatives
    p_j = np.einsum("n,nij,nij->ij", b, h, P)
    dp_dr = k * np.einsum("n,nij,nij->ij", b, dh, P)
    dp_dtheta_over_r = -np.einsum("n,nij,nij->ij", b, h, dPdx) * sin_t / r_series
    rhat = rel_series / r_series[..., None]
    rho_c = np.hypot(rel_series[..., 0], rel_series[..., 1])
    with np.errstate(invalid="ignore", divide="ignore"):
        ex = np.where(rho_c > 0, rel_series[..., 0] / rho_c, 1.0)
        ey = np.where(rho_c > 0, rel_series[..., 1] / rho_c, 0.0)
    that = np.stack([cos_t * ex, cos_t * ey, -sin_t], -1)
    grad_j = dp_dr[..., None] * rhat + dp_dtheta_over_r[..., None] * that
    for i, j in zip(*np.nonzero(near)):
        p_near, g_near = _rayleigh_disk(rel[i, j][None], k, a)
        p_j[i, j] = p_near[0]
        grad_j[i, j] = g_near[0]
    drive = medium.rho0 * medium.c0 * array.amplitude_ratio * array.v0 * np.exp(1j * array.phase_delay)
    p = (drive * p_j).sum(axis=1)
    v = (drive[None, :, None] * grad_j).sum(axis=1) / (1j * 2 * np.pi * f * medium.rho0)
    if single:
        return p[0], v[0]
    return p, v


class PlaneWaveField:
    """Superposition of plane waves as a point sampler."""

    def __init__(self, waves, medium: Medium, f: float):
        self.waves = [waves] if isinstance(waves, PlaneWave) else list(waves)
        self.medium = medium
        self.f = f
        self.k = medium.wavenumber(f)

    def pressure(self, points):
        return self.field(points)[0]

    def field(self, points):
        pts = np.asarray(points, float)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        p = np.zeros(len(pts), complex)
        v = np.zeros((len(pts), 3), complex)
        for w in self.waves:
            d = np.asarray(w.direction, float)
            pw = complex(w.amplitude) * np.exp(1j * self.k * pts @ d)
            p += pw
            v += pw[:, None] * d / (self.medium.rho0 * self.medium.c0)
        return (p[0], v[0]) if single else (p, v)

    def expansion(self, n_max, origin=(0.0, 0.0, 0.0)) -> WaveExpansion:
        exps = [plane_wave_coefficients(w, self.k, n_max, origin) for w in self.waves]
        out = exps[0]
        for e in exps[1:]:
            out = out + e
        return out


class ArrayField:
    """Piston array as a point sampler.

    ``model="exact"`` uses the multipole series of :func:`piston_exact_field`
    (a true Helmholtz solution); ``model="farfield"`` uses the closed-form
    far-field expression of :func:`piston_pressure`.
    """

    MODELS = ("exact", "farfield")

    def __init__(self, array: TransducerArray, medium: Medium, f: float, model: str = "exact"):
        if model not in self.MODELS:
            raise DomainError(f"unknown piston model {model!r}; choose from {self.MODELS}")
        self.array = array
        self.medium = medium
        self.f = f
        self.model = model
        self.k = medium.wavenumber(f)

    def pressure(self, points):
        return self.field(points)[0] if self.model == "exact" else piston_pressure(
            self.array, self.medium, self.f, points
        )

    def field(self, points):
        if self.model == "exact":
            return piston_exact_field(self.array, self.medium, self.f, points)
        return piston_field(self.array, self.medium, self.f, points)


@dataclass(frozen=True)
class _SphereSampling:
    points: np.ndarray
    weights: np.ndarray
    theta: np.ndarray
    phi: np.ndarray


def sphere_sampling(n_theta: int, n_phi: int) -> _SphereSampling:
    """Gauss-Legendre in ``cos theta`` times uniform ``phi`` on the unit sphere."""
    rule = gauss_legendre(n_theta)
    theta = np.arccos(rule.nodes)[:, None] * np.ones((1, n_phi))
    phi = (2 * np.pi / n_phi) * np.arange(n_phi)[None, :] * np.ones((n_theta, 1))
    weights = rule.weights[:, None] * (2 * np.pi / n_phi) * np.ones((1, n_phi))
    rhat, _, _ = _unit_vectors(theta, phi)
    return _SphereSampling(rhat.reshape(-1, 3), weights.ravel(), theta.ravel(), phi.ravel())


def project_incident(
    field,
    k: float,
    n_max: int,
    center=(0.0, 0.0, 0.0),
    radius_pair=None,
    consistency_tol: float = 1e-3,
) -> WaveExpansion:
    """Regular-wave coefficients of a sampled field about ``center``.

    ``a_n^m = (1 / j_n(kR)) * integral p(R, theta, phi) conj(Y_n^m) dOmega``
    evaluated on two spheres; for each degree the radius with the larger
    ``|j_n(kR)|`` is used. ``field`` maps an ``(N, 3)`` array of global
    points to complex pressure. Disagreement between the two spheres beyond
    ``consistency_tol`` means a source lies inside the larger sphere.
    """
    if radius_pair is None:
        raise GeometryError("projection needs two sampling radii")
    r1, r2 = sorted(float(r) for r in radius_pair)
    if not (r1 > 0 and r2 > r1):
        raise GeometryError(f"projection radii must be positive and distinct, got {radius_pair}")
    center = np.asarray(center, float)

    n_theta = n_max + int(math.ceil(k * r2)) + 12
    sampling = sphere_sampling(n_theta, 2 * n_theta)
    Y = harmonic_table(n_max, sampling.theta, sampling.phi).values
    projector = np.conj(Y) * sampling.weights

    n, _ = mode_numbers(n_max)
    orders = np.arange(n_max + 1)
    proj, jn, near_zero = [], [], []
    for R in (r1, r2):
        samples = np.asarray(field(center + R * sampling.points), complex)
        proj.append(projector @ samples)
        x = k * R
        j = radial_table("regular", n_max, x).values
        h = radial_table("outgoing", n_max, x).values
        jn.append(j)
        # |j_n| / |h_n| = |cos(phase)| in the oscillatory region x > n
        near_zero.append((x > orders + 1) & (np.abs(j) < 1e-3 * np.abs(h)))
    j1, j2 = jn
    z1, z2 = near_zero
    if np.any(z1 & z2):
        bad = np.flatnonzero(z1 & z2)
        raise ConditioningError(
            f"both projection radii sit near zeros of j_n for n = {bad.tolist()}; choose other radii"
        )
    use_outer = ((np.abs(j2) >= np.abs(j1)) & ~z2) | z1
    coeffs = np.where(use_outer[n], proj[1] / j2[n], proj[0] / j1[n])

    w = np.minimum(np.abs(j1), np.abs(j2))[n]
    a1, a2 = proj[0] / j1[n], proj[1] / j2[n]
    ref = np.linalg.norm(coeffs * w)
    if ref > 0:
        mismatch = np.linalg.norm((a1 - a2) * w) / ref
        if mismatch > consistency_tol:
            raise GeometryError(
                f"projection spheres of radii {r1:.4g} and {r2:.4g} m disagree "
                f"(relative mismatch {mismatch:.2e}); a source lies inside the sampling sphere"
            )
    return WaveExpansion("regular", n_max, k, center, coeffs)
