r"""Special functions and quadrature used by every wave expansion.

Conventions (fixed globally, inherited by the other modules):

* time dependence :math:`e^{-i\omega t}`, so outgoing waves carry
  :math:`h^{(1)}_n(kr) \sim e^{ikr}/r`;
* orthonormal spherical harmonics with the Condon-Shortley phase,
  :math:`Y_n^{-m} = (-1)^m \overline{Y_n^m}`;
* coefficient vectors are indexed by :math:`\nu = n(n+1) + m`.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np

from .errors import DomainError

RadialKind = Literal["regular", "outgoing"]

_RESCALE_LIMIT = 1e250


def n_coeffs(n_max: int) -> int:
    """Length of a coefficient vector truncated at degree ``n_max``."""
    return (n_max + 1) ** 2


def mode_index(n, m):
    """Flat index of mode ``(n, m)``."""
    return n * (n + 1) + m


@lru_cache(maxsize=64)
def _mode_arrays(n_max):
    n = np.concatenate([np.full(2 * k + 1, k) for k in range(n_max + 1)])
    m = np.concatenate([np.arange(-k, k + 1) for k in range(n_max + 1)])
    n.setflags(write=False)
    m.setflags(write=False)
    return n, m


def mode_numbers(n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Degree and order arrays ``(n, m)`` aligned with the flat index."""
    return _mode_arrays(int(n_max))


@dataclass(frozen=True)
class RadialTable:
    """Spherical Bessel (``regular``) or Hankel (``outgoing``) values.

    ``values[n]`` and ``derivatives[n]`` hold :math:`f_n(x)` and
    :math:`f_n'(x)` for ``0 <= n <= order_max``; trailing axes follow the
    shape of ``argument``.
    """

    kind: str
    order_max: int
    argument: np.ndarray
    values: np.ndarray
    derivatives: np.ndarray


def _check_order(n_max):
    if int(n_max) != n_max or n_max < 0:
        raise DomainError(f"order must be a non-negative integer, got {n_max!r}")
    return int(n_max)


def _spherical_jn_all(n_top, x):
    """j_0..j_{n_top+1} for a 1-D array of x > 0."""
    out = np.zeros((n_top + 2, x.size))
    if x.size == 0:
        return out
    up = x >= n_top + 1
    if up.any():
        xu = x[up]
        s, c = np.sin(xu), np.cos(xu)
        out[0, up] = s / xu
        if n_top + 1 >= 1:
            out[1, up] = s / xu**2 - c / xu
        for n in range(1, n_top + 1):
            out[n + 1, up] = (2 * n + 1) / xu * out[n, up] - out[n - 1, up]
    down = ~up
    if down.any():
        xd = x[down]
        start = n_top + 1 + 20 + int(np.sqrt(40.0 * (n_top + 1)))
        f = np.zeros((start + 2, xd.size))
        f[start] = 1e-300
        for n in range(start, 0, -1):
            f[n - 1] = (2 * n + 1) / xd * f[n] - f[n + 1]
            big = np.abs(f[n - 1]) > _RESCALE_LIMIT
            if big.any():
                f[n - 1 :, big] /= _RESCALE_LIMIT
        s, c = np.sin(xd), np.cos(xd)
        j0 = s / xd
        j1 = s / xd**2 - c / xd
        use0 = np.abs(j0) >= np.abs(j1)
        scale = np.where(use0, j0 / np.where(use0, f[0], 1.0), j1 / np.where(use0, 1.0, f[1]))
        out[:, down] = f[: n_top + 2] * scale
    return out


def radial_table(kind: RadialKind, n_max: int, x) -> RadialTable:
    """Tabulate spherical Bessel or Hankel functions of the first kind.

    Parameters
    ----------
    kind : {"regular", "outgoing"}
        ``regular`` gives :math:`j_n`; ``outgoing`` gives :math:`h_n^{(1)}`.
    n_max : int
        Highest order.
    x : float or array_like
        Non-negative argument ``k r``. Must be strictly positive for the
        outgoing kind.

    Notes
    -----
    :math:`j_n` is obtained by downward (Miller) recurrence normalised to
    whichever of :math:`j_0`, :math:`j_1` is larger, except where
    ``x > n_max`` and upward recurrence is stable. :math:`y_n` always uses
    upward recurrence.
    """
    if kind not in ("regular", "outgoing"):
        raise DomainError(f"unknown radial kind {kind!r}")
    n_max = _check_order(n_max)
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("radial argument must be finite")
    if np.any(x < 0):
        raise DomainError("radial argument must be non-negative")
    if kind == "outgoing" and np.any(x == 0):
        raise DomainError("outgoing functions are singular at x = 0")

    flat = x.ravel()
    j = np.zeros((n_max + 2, flat.size))
    pos = flat > 0
    j[:, pos] = _spherical_jn_all(n_max, flat[pos])
    j[0, ~pos] = 1.0

    orders = np.arange(n_max + 1)[:, None]
    dj = np.empty((n_max + 1, flat.size))
    with np.errstate(divide="ignore", invalid="ignore"):
        dj[:, pos] = orders / flat[pos] * j[: n_max + 1, pos] - j[1:, pos]
    dj[:, ~pos] = 0.0
    if n_max >= 1:
        dj[1, ~pos] = 1.0 / 3.0

    if kind == "regular":
        values, derivs = j[: n_max + 1], dj
    else:
        y = np.empty((n_max + 2, flat.size))
        s, c = np.sin(flat), np.cos(flat)
        y[0] = -c / flat
        y[1] = -c / flat**2 - s / flat
        with np.errstate(over="ignore", invalid="ignore"):
            for n in range(1, n_max + 1):
                y[n + 1] = (2 * n + 1) / flat * y[n] - y[n - 1]
            dy = orders / flat * y[: n_max + 1] - y[1:]
        values = np.empty((n_max + 1, flat.size), complex)
        values.real, values.imag = j[: n_max + 1], y[: n_max + 1]
        derivs = np.empty_like(values)
        derivs.real, derivs.imag = dj, dy

    shape = (n_max + 1,) + x.shape
    return RadialTable(kind, n_max, x, values.reshape(shape), derivs.reshape(shape))


@dataclass(frozen=True)
class HarmonicTable:
    """Orthonormal spherical harmonics and their angular derivatives.

    All arrays have shape ``((order_max + 1)**2, *theta.shape)``.
    ``m_over_sin`` holds :math:`m Y_n^m / \\sin\\theta` evaluated with the
    pole limits, so that :math:`\\partial_\\phi Y / \\sin\\theta = i\\,`
    ``m_over_sin``.
    """

    order_max: int
    theta: np.ndarray
    phi: np.ndarray
    values: np.ndarray
    theta_derivatives: np.ndarray
    m_over_sin: np.ndarray


def legendre_normalized(n_max: int, cos_theta, sin_theta):
    """Normalised associated Legendre functions for ``m >= 0``.

    Returns ``(P, Q)`` of shape ``(n_max + 1, n_max + 1, *shape)`` indexed
    ``[n, m]``, where ``P[n, m]`` is :math:`\\bar P_n^m(\\cos\\theta)` such
    that :math:`Y_n^m = \\bar P_n^m e^{im\\phi}`, and ``Q[n, m]`` equals
    ``P[n, m] / sin(theta)`` for ``m >= 1`` (computed without the division,
    so it is finite at the poles). ``Q[:, 0]`` is zero.
    """
    x = np.asarray(cos_theta, dtype=float)
    s = np.asarray(sin_theta, dtype=float)
    shape = (n_max + 1, n_max + 1) + x.shape
    P = np.zeros(shape)
    Q = np.zeros(shape)

    P[0, 0] = 1.0 / np.sqrt(4 * np.pi)
    if n_max >= 1:
        P[1, 0] = np.sqrt(3.0) * x * P[0, 0]
    for n in range(2, n_max + 1):
        a = np.sqrt((4.0 * n * n - 1) / (n * n))
        b = np.sqrt(((n - 1.0) ** 2) / (4.0 * (n - 1) ** 2 - 1))
        P[n, 0] = a * (x * P[n - 1, 0] - b * P[n - 2, 0])

    for m in range(1, n_max + 1):
        if m == 1:
            Q[1, 1] = -np.sqrt(1.5) * P[0, 0] * np.ones_like(x)
        else:
            Q[m, m] = -np.sqrt((2.0 * m + 1) / (2.0 * m)) * s * Q[m - 1, m - 1]
        if m + 1 <= n_max:
            Q[m + 1, m] = np.sqrt(2.0 * m + 3) * x * Q[m, m]
        for n in range(m + 2, n_max + 1):
            a = np.sqrt((4.0 * n * n - 1) / (n * n - m * m))
            b = np.sqrt(((n - 1.0) ** 2 - m * m) / (4.0 * (n - 1) ** 2 - 1))
            Q[n, m] = a * (x * Q[n - 1, m] - b * Q[n - 2, m])
        P[m:, m] = s * Q[m:, m]
    return P, Q


def harmonic_table(n_max: int, theta, phi) -> HarmonicTable:
    """Spherical harmonics :math:`Y_n^m(\\theta, \\phi)` up to degree ``n_max``.

    ``theta`` and ``phi`` broadcast against each other. Derivatives with
    respect to ``theta`` use the ladder relation, which needs no division by
    :math:`\\sin\\theta` and is exact at the poles.
    """
    n_max = _check_order(n_max)
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    if not (np.all(np.isfinite(theta)) and np.all(np.isfinite(phi))):
        raise DomainError("angles must be finite")
    if np.any(theta < 0) or np.any(theta > np.pi):
        raise DomainError("theta must lie in [0, pi]")

    ct, st = np.cos(theta), np.sin(theta)
    P, Q = legendre_normalized(n_max + 1, ct, st)

    count = n_coeffs(n_max)
    Y = np.empty((count,) + theta.shape, complex)
    dY = np.empty_like(Y)
    mY = np.empty_like(Y)
    for n in range(n_max + 1):
        for m in range(0, n + 1):
            up = np.sqrt((n - m) * (n + m + 1.0))
            down = np.sqrt((n + m) * (n - m + 1.0))
            p_up = P[n, m + 1] if m + 1 <= n else 0.0
            p_down = P[n, m - 1] if m >= 1 else -P[n, 1] if n >= 1 else 0.0
            dP = 0.5 * (up * p_up - down * p_down)
            phase = np.exp(1j * m * phi)
            k = mode_index(n, m)
            Y[k] = P[n, m] * phase
            dY[k] = dP * phase
            mY[k] = m * Q[n, m] * phase
            if m > 0:
                sign = (-1) ** m
                kk = mode_index(n, -m)
                Y[kk] = sign * np.conj(Y[k])
                dY[kk] = sign * np.conj(dY[k])
                mY[kk] = -sign * np.conj(mY[k])
    return HarmonicTable(n_max, theta, phi, Y, dY, mY)


@lru_cache(maxsize=128)
def _jy_eigen(n):
    m = np.arange(-n, n + 1, dtype=float)
    # <m+1|J+|m> = sqrt((n - m)(n + m + 1))
    lad = np.sqrt((n - m[:-1]) * (n + m[:-1] + 1))
    jplus = np.diag(lad, -1)
    jy = (jplus - jplus.T) / 2j
    w, v = np.linalg.eigh(jy)
    w.setflags(write=False)
    v.setflags(write=False)
    return w, v


def wigner_d_block(n: int, beta: float) -> np.ndarray:
    """Wigner small-d matrix :math:`d^n_{m'm}(\\beta)`, rows/cols ``m = -n..n``.

    Built from the eigendecomposition of :math:`J_y`, i.e.
    :math:`d^n(\\beta) = \\exp(-i\\beta J_y)`; exact identity at ``beta = 0``.
    """
    n = _check_order(n)
    beta = float(beta)
    if not np.isfinite(beta):
        raise DomainError("rotation angle must be finite")
    if beta == 0.0:
        return np.eye(2 * n + 1)
    w, v = _jy_eigen(n)
    d = (v * np.exp(-1j * beta * w)) @ v.conj().T
    return d.real.copy()


def wigner_d(n_max: int, beta: float) -> list[np.ndarray]:
    """Wigner-d blocks for all degrees ``0..n_max``."""
    n_max = _check_order(n_max)
    return [wigner_d_block(n, beta) for n in range(n_max + 1)]


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray


@lru_cache(maxsize=256)
def _gauss_legendre(points):
    i = np.arange(1, points + 1)
    x = np.cos(np.pi * (i - 0.25) / (points + 0.5))
    for _ in range(100):
        p0, p1 = np.ones_like(x), x.copy()
        for k in range(2, points + 1):
            p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
        dp = points * (x * p1 - p0) / (x * x - 1)
        dx = p1 / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    p0, p1 = np.ones_like(x), x.copy()
    for k in range(2, points + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = points * (x * p1 - p0) / (x * x - 1)
    w = 2.0 / ((1 - x * x) * dp * dp)
    order = np.argsort(x)
    x, w = x[order], w[order]
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(points: int) -> QuadratureRule:
    """Gauss-Legendre rule on ``[-1, 1]`` by Newton iteration on :math:`P_n`."""
    if int(points) != points or points < 1:
        raise DomainError(f"need at least one quadrature point, got {points!r}")
    x, w = _gauss_legendre(int(points))
    return QuadratureRule(x, w)


def cylindrical_j1(x):
    """Bessel function :math:`J_1`; thin wrapper kept for a single import site."""
    from scipy.special import j1

    return j1(x)


def cylindrical_j2(x):
    from scipy.special import jv

    return jv(2, x)
