"""Axisymmetric particle geometry from conformal-mapping coefficients.

The meridian is the image of the upper unit semicircle under

    w(gamma) = sum_j c_j exp(i (2 - j) gamma),    gamma in [0, pi],

with the symmetry axis along ``z = Re w`` and the cylindrical radius
``rho = Im w``. A single coefficient ``[a]`` is a sphere of radius ``a``,
which is why the first coefficient is the averaged radius.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import GeometryError, InvalidShapeError
from .specfun import gauss_legendre

_VALIDATION_POINTS = 4096
_INTERSECTION_POINTS = 512
_MASS_QUADRATURE_POINTS = 512


@dataclass(frozen=True)
class MappingCoefficients:
    """Shape vector ``c_1 ... c_J`` in metres.

    Construction validates the shape: ``c_1 > 0``, ``rho > 0`` on the open
    interval and a non-self-intersecting meridian.
    """

    c: tuple

    def __init__(self, c):
        values = tuple(float(v) for v in np.atleast_1d(np.asarray(c, dtype=float)))
        object.__setattr__(self, "c", values)
        _validate(self)

    @property
    def averaged_radius(self) -> float:
        return self.c[0]

    @property
    def array(self) -> np.ndarray:
        return np.array(self.c)

    def __len__(self):
        return len(self.c)

    def scaled(self, factor: float) -> "MappingCoefficients":
        return MappingCoefficients(np.array(self.c) * factor)


def _w_and_derivative(c, gamma):
    c = np.asarray(c, dtype=float)
    powers = 2 - np.arange(1, len(c) + 1)
    phase = np.exp(1j * np.multiply.outer(np.asarray(gamma, float), powers))
    w = phase @ c
    dw = phase @ (1j * powers * c)
    return w, dw


def _gamma_ranges(gamma, mask):
    """Contiguous gamma intervals where ``mask`` holds, as (start, stop) pairs."""
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        return []
    breaks = np.flatnonzero(np.diff(idx) > 1)
    starts = np.concatenate([[idx[0]], idx[breaks + 1]])
    stops = np.concatenate([idx[breaks], [idx[-1]]])
    return [(float(gamma[a]), float(gamma[b])) for a, b in zip(starts, stops)]


def _segments_intersect(p):
    """Indices of crossing segment pairs of the open polyline ``p``."""
    a, b = p[:-1], p[1:]
    d = b - a

    def orient(o, u, v):
        return (u[..., 0] - o[..., 0]) * (v[..., 1] - o[..., 1]) - (u[..., 1] - o[..., 1]) * (
            v[..., 0] - o[..., 0]
        )

    ai, bi = a[:, None], b[:, None]
    aj, bj = a[None, :], b[None, :]
    o1 = np.sign(orient(ai, bi, aj))
    o2 = np.sign(orient(ai, bi, bj))
    o3 = np.sign(orient(aj, bj, ai))
    o4 = np.sign(orient(aj, bj, bi))
    cross = (o1 * o2 < 0) & (o3 * o4 < 0)
    n = len(d)
    i, j = np.triu_indices(n, k=2)
    hits = cross[i, j]
    return i[hits], j[hits]


def _validate(coeffs):
    c = coeffs.c
    if len(c) == 0:
        raise InvalidShapeError("at least one mapping coefficient is required")
    if not np.all(np.isfinite(c)):
        raise InvalidShapeError("mapping coefficients must be finite")
    if c[0] <= 0:
        raise InvalidShapeError(f"first mapping coefficient (averaged radius) must be > 0, got {c[0]}")

    gamma = np.linspace(0.0, np.pi, _VALIDATION_POINTS)
    w, _ = _w_and_derivative(c, gamma)
    rho = w.imag
    bad = rho[1:-1] <= 1e-12 * c[0]
    if bad.any():
        ranges = _gamma_ranges(gamma[1:-1], bad)
        text = ", ".join(f"[{a:.4f}, {b:.4f}]" for a, b in ranges)
        raise InvalidShapeError(f"meridian has rho <= 0 for gamma in {text} rad")

    g = np.linspace(0.0, np.pi, _INTERSECTION_POINTS)
    wg, _ = _w_and_derivative(c, g)
    pts = np.column_stack([wg.real, wg.imag])
    i, j = _segments_intersect(pts)
    if i.size:
        raise InvalidShapeError(
            f"meridian self-intersects near gamma = {g[i[0]]:.4f} and {g[j[0]]:.4f} rad"
        )


@dataclass(frozen=True)
class MeridianSample:
    """Meridian point(s). ``unit_normal[..., :]`` is ordered ``(n_rho, n_z)``."""

    gamma: np.ndarray
    rho: np.ndarray
    z: np.ndarray
    unit_normal: np.ndarray
    arc_jacobian: np.ndarray


def meridian(c: MappingCoefficients, gamma) -> MeridianSample:
    """Evaluate the meridian curve, its outward normal and ``|dw/dgamma|``."""
    if not isinstance(c, MappingCoefficients):
        c = MappingCoefficients(c)
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma < 0) or np.any(gamma > np.pi):
        raise GeometryError("gamma must lie in [0, pi]")
    w, dw = _w_and_derivative(c.c, gamma)
    rho = np.where((gamma == 0) | (gamma == np.pi), 0.0, w.imag)
    jac = np.abs(dw)
    normal = np.stack([-dw.real / jac, dw.imag / jac], axis=-1)
    return MeridianSample(gamma, rho, w.real, normal, jac)


def max_radius(c: MappingCoefficients) -> float:
    """Largest distance from the origin to the surface."""
    gamma = np.linspace(0.0, np.pi, 2049)
    w, _ = _w_and_derivative(c.c, gamma)
    return float(np.max(np.abs(w)))


@dataclass(frozen=True)
class SurfaceMesh:
    vertices: np.ndarray
    triangles: np.ndarray
    facet_normals: np.ndarray

    def signed_volume(self) -> float:
        v = self.vertices[self.triangles]
        return float(np.einsum("ij,ij->i", v[:, 0], np.cross(v[:, 1], v[:, 2])).sum() / 6.0)

    def edge_counts(self) -> dict:
        """Undirected edge -> number of incident triangles."""
        t = self.triangles
        edges = np.sort(np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]]), axis=1)
        uniq, counts = np.unique(edges, axis=0, return_counts=True)
        return {tuple(e): int(k) for e, k in zip(uniq, counts)}

    def is_closed(self) -> bool:
        return all(k == 2 for k in self.edge_counts().values())


def _facet_normals(vertices, triangles):
    v = vertices[triangles]
    n = np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])
    return n / np.linalg.norm(n, axis=1, keepdims=True)


def build_mesh(c: MappingCoefficients, n_theta: int = 64, n_phi: int = 64) -> SurfaceMesh:
    """Revolve the meridian into a closed, outward-oriented triangle mesh.

    Rings sit at ``gamma_i = i pi / n_theta``; the two poles are closed with
    triangle fans. Ring radii are scaled by ``sqrt(dphi / sin(dphi))`` so
    each polygonal cross-section keeps the area of its circle, which removes
    the leading-order volume deficit of an inscribed polyhedron.
    """
    if not isinstance(c, MappingCoefficients):
        c = MappingCoefficients(c)
    if n_theta < 8 or n_phi < 8:
        raise GeometryError("mesh resolution must be at least 8 x 8")
    gamma = np.pi * np.arange(1, n_theta) / n_theta
    ring = meridian(c, gamma)
    poles = meridian(c, np.array([0.0, np.pi]))
    dphi = 2 * np.pi / n_phi
    area_fix = np.sqrt(dphi / np.sin(dphi))
    phi = dphi * np.arange(n_phi)

    rho = ring.rho[:, None] * area_fix
    ring_xyz = np.stack(
        [rho * np.cos(phi), rho * np.sin(phi), np.repeat(ring.z[:, None], n_phi, axis=1)], axis=-1
    ).reshape(-1, 3)
    top = np.array([[0.0, 0.0, poles.z[0]]])
    bottom = np.array([[0.0, 0.0, poles.z[1]]])
    vertices = np.concatenate([top, ring_xyz, bottom])

    n_rings = n_theta - 1
    bottom_index = 1 + n_rings * n_phi

    def vid(i, j):
        return 1 + i * n_phi + (j % n_phi)

    j = np.arange(n_phi)
    tris = [np.column_stack([np.zeros(n_phi, int), vid(0, j), vid(0, j + 1)])]
    for i in range(n_rings - 1):
        a, b = vid(i, j), vid(i + 1, j)
        cc, d = vid(i + 1, j + 1), vid(i, j + 1)
        tris.append(np.column_stack([a, b, cc]))
        tris.append(np.column_stack([a, cc, d]))
    last = n_rings - 1
    tris.append(np.column_stack([vid(last, j), np.full(n_phi, bottom_index), vid(last, j + 1)]))
    triangles = np.concatenate(tris).astype(np.int64)
    return SurfaceMesh(vertices, triangles, _facet_normals(vertices, triangles))


def export_stl(mesh: SurfaceMesh, path, name: str = "particle") -> Path:
    """Write ``mesh`` as ASCII STL (metres, 13 significant digits)."""
    path = Path(path)
    lines = [f"solid {name}"]
    fmt = "{:.12e} {:.12e} {:.12e}"
    for tri, normal in zip(mesh.triangles, mesh.facet_normals):
        lines.append("  facet normal " + fmt.format(*normal))
        lines.append("    outer loop")
        for v in mesh.vertices[tri]:
            lines.append("      vertex " + fmt.format(*v))
        lines.append("    endloop")
        lines.append("  endfacet")
    lines.append(f"endsolid {name}")
    try:
        path.write_text("\n".join(lines) + "\n", encoding="ascii")
    except OSError as exc:
        raise OSError(f"cannot write STL file {path}: {exc}") from exc
    return path


def read_stl(path) -> SurfaceMesh:
    """Parse an ASCII STL file, merging vertices with identical coordinates."""
    normals, corners = [], []
    with open(path, encoding="ascii") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "facet":
                normals.append([float(v) for v in parts[2:5]])
            elif parts[0] == "vertex":
                corners.append(tuple(float(v) for v in parts[1:4]))
    if len(corners) != 3 * len(normals):
        raise GeometryError(f"malformed STL file {path}")
    index = {}
    tri = np.empty(len(corners), dtype=np.int64)
    for k, v in enumerate(corners):
        tri[k] = index.setdefault(v, len(index))
    vertices = np.array(list(index), dtype=float).reshape(-1, 3)
    return SurfaceMesh(vertices, tri.reshape(-1, 3), np.array(normals, dtype=float).reshape(-1, 3))


@dataclass(frozen=True)
class MassProperties:
    """Mass data of a homogeneous solid of revolution.

    ``mass`` and the inertias use the true solid; ``gravity_mass`` is the
    mass used for the weight, which may be the ``(4/3) pi c_1^3`` surrogate.
    Inertias are about the centroid. ``averaged_radius`` is ``c_1``, the
    radius used by the sphere drag laws.
    """

    volume: float
    mass: float
    center_z: float
    inertia_axial: float
    inertia_transverse: float
    gravity_mass: float
    averaged_radius: float

    def weight(self, g: float = 9.81) -> float:
        return self.gravity_mass * g


def mass_properties(
    c: MappingCoefficients, rho_p: float, weight_from_averaged_radius: bool = True
) -> MassProperties:
    """Volume, centroid and inertia from meridian line integrals."""
    if not isinstance(c, MappingCoefficients):
        c = MappingCoefficients(c)
    if not rho_p > 0:
        raise GeometryError("particle density must be positive")
    rule = gauss_legendre(_MASS_QUADRATURE_POINTS)
    gamma = 0.5 * np.pi * (rule.nodes + 1.0)
    wq = 0.5 * np.pi * rule.weights
    w, dw = _w_and_derivative(c.c, gamma)
    rho, z, dz = w.imag, w.real, dw.real

    volume = -np.pi * np.sum(wq * rho**2 * dz)
    center_z = -np.pi * np.sum(wq * rho**2 * z * dz) / volume
    mass = rho_p * volume
    i_axial = -0.5 * np.pi * rho_p * np.sum(wq * rho**4 * dz)
    i_origin = -rho_p * np.pi * np.sum(wq * (0.25 * rho**4 + rho**2 * z**2) * dz)
    i_transverse = i_origin - mass * center_z**2
    if weight_from_averaged_radius:
        gravity_mass = rho_p * 4.0 / 3.0 * np.pi * c.averaged_radius**3
    else:
        gravity_mass = mass
    return MassProperties(
        float(volume), float(mass), float(center_z), float(i_axial), float(i_transverse), float(gravity_mass),
        float(c.averaged_radius),
    )
