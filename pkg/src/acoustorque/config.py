"""Scene configuration files.

A configuration is a YAML document whose sections mirror the calculation
controls of an interactive levitation tool::

    particle:
      mapping_coefficients: [0.002, 0, 0.0004]
      averaged_radius_override: null
      density: 15.0
    boundary: sound_hard
    medium: air                      # or {rho0: ..., c0: ..., mu: ...}
    source:
      array:
        radius: 0.005
        positions: [[0, 0, 0], [0.01, 0, 0]]
        v0: 1.5
        phase_delay: [0, 0]
        amplitude_ratio: [1, 1]
        interdistance: 0.02
        model: exact
    frequency: 40000
    pose:
      initial_position: [0.002, 0, 0]
      initial_orientation: [0.5235987755982988, 0, 0]
    dynamics: {dt: 0.0001, t_end: 0.1}
    numerics: {n_max: null, projection_radii: null, force_radius: null}
    outputs: {directory: ., trajectory_filename: Myfilename.txt}

Missing keys take the defaults of :class:`SceneConfig`; unknown keys are
rejected so that typos do not pass silently.
"""

import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np
import yaml

from .dynamics import DynamicsParams, Scene
from .errors import ConfigError
from .geometry import MappingCoefficients
from .scatter import BoundaryKind
from .wavefield import MEDIA, ArrayField, Medium, PlaneWave, TransducerArray


def _floats(value, name, length=None):
    try:
        out = tuple(float(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a list of numbers") from None
    if length is not None and len(out) != length:
        raise ConfigError(f"{name} must have {length} entries")
    return out


def _float(value, name):
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number") from None


def _int(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value) or value != int(value):
        raise ConfigError(f"{name} must be an integer")
    return int(value)


def _opt_float(value, name):
    return None if value is None else _float(value, name)


def _check_keys(section: dict, allowed, name):
    if not isinstance(section, dict):
        raise ConfigError(f"section {name!r} must be a mapping")
    unknown = set(section) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {name!r}: {sorted(unknown)}")


@dataclass(frozen=True)
class ParticleConfig:
    mapping_coefficients: tuple = (0.002,)
    averaged_radius_override: float | None = None
    density: float = 15.0

    def coefficients(self) -> MappingCoefficients:
        c = MappingCoefficients(self.mapping_coefficients)
        if self.averaged_radius_override is not None:
            c = c.scaled(self.averaged_radius_override / c.averaged_radius)
        return c


@dataclass(frozen=True)
class MediumConfig:
    preset: str | None = "air"
    rho0: float | None = None
    c0: float | None = None
    mu: float | None = None

    def medium(self) -> Medium:
        if self.preset is not None:
            return Medium.preset(self.preset)
        return Medium(self.rho0, self.c0, self.mu, "custom")

    def to_yaml(self):
        if self.preset is not None:
            return self.preset
        return {"rho0": self.rho0, "c0": self.c0, "mu": self.mu}


@dataclass(frozen=True)
class PlaneConfig:
    amplitude: float = 1.0
    direction: tuple = (0.0, 0.0, 1.0)


@dataclass(frozen=True)
class ArrayConfig:
    radius: float = 0.005
    positions: tuple = ((0.0, 0.0, 0.0),)
    v0: float = 1.5
    phase_delay: tuple | None = None
    amplitude_ratio: tuple | None = None
    interdistance: float = 0.02
    model: str = "exact"

    def array(self) -> TransducerArray:
        return TransducerArray(
            self.radius,
            [list(p) for p in self.positions],
            self.v0,
            None if self.phase_delay is None else list(self.phase_delay),
            None if self.amplitude_ratio is None else list(self.amplitude_ratio),
            self.interdistance,
        )


@dataclass(frozen=True)
class DynamicsConfig:
    dt: float = 1e-4
    t_end: float = 0.1
    gravity: float = 9.81
    rel_tol: float = 0.05
    min_interdistance: float = 0.010
    weight_from_averaged_radius: bool = True


@dataclass(frozen=True)
class NumericsConfig:
    n_max: int | None = None
    projection_radii: tuple | None = None
    force_radius: float | None = None


@dataclass(frozen=True)
class OutputsConfig:
    directory: str = "."
    trajectory_filename: str = "Myfilename.txt"
    stl_filename: str = "particle_data.stl"
    provenance: bool = False


@dataclass(frozen=True)
class SceneConfig:
    particle: ParticleConfig = field(default_factory=ParticleConfig)
    boundary: str = "sound_hard"
    medium: MediumConfig = field(default_factory=MediumConfig)
    plane: PlaneConfig | None = None
    array: ArrayConfig | None = None
    frequency: float = 40e3
    initial_position: tuple = (0.0, 0.0, 0.0)
    initial_orientation: tuple = (0.0, 0.0, 0.0)
    dynamics: DynamicsConfig = field(default_factory=DynamicsConfig)
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    outputs: OutputsConfig = field(default_factory=OutputsConfig)

    def __post_init__(self):
        if (self.plane is None) == (self.array is None):
            raise ConfigError("exactly one source (plane or array) must be given")
        BoundaryKind.parse(self.boundary)

    # -- conversion to domain objects ------------------------------------------------

    def source(self):
        if self.plane is not None:
            return (PlaneWave(self.plane.amplitude, self.plane.direction),)
        return self.array.array()

    def scene(self) -> Scene:
        num = self.numerics
        return Scene(
            particle=self.particle.coefficients(),
            source=self.source(),
            bc=BoundaryKind.parse(self.boundary),
            medium=self.medium.medium(),
            frequency=self.frequency,
            position=np.array(self.initial_position),
            angles=np.array(self.initial_orientation),
            n_max=num.n_max,
            projection_radii=num.projection_radii,
            force_radius=num.force_radius,
            piston_model=self.array.model if self.array is not None else "exact",
        )

    def dynamics_params(self) -> DynamicsParams:
        d = self.dynamics
        return DynamicsParams(
            rho_p=self.particle.density,
            dt=d.dt,
            t_end=d.t_end,
            g=d.gravity,
            rel_tol=d.rel_tol,
            min_interdistance=d.min_interdistance,
            weight_from_averaged_radius=d.weight_from_averaged_radius,
        )

    def with_n_max(self, n_max: int | None) -> "SceneConfig":
        if n_max is None:
            return self
        return replace(self, numerics=replace(self.numerics, n_max=int(n_max)))

    # -- serialisation ---------------------------------------------------------------

    def to_dict(self) -> dict:
        source = {"plane": _plain(asdict(self.plane))} if self.plane is not None else {
            "array": _plain(asdict(self.array))
        }
        return {
            "particle": _plain(asdict(self.particle)),
            "boundary": self.boundary,
            "medium": self.medium.to_yaml(),
            "source": source,
            "frequency": self.frequency,
            "pose": {
                "initial_position": list(self.initial_position),
                "initial_orientation": list(self.initial_orientation),
            },
            "dynamics": _plain(asdict(self.dynamics)),
            "numerics": _plain(asdict(self.numerics)),
            "outputs": _plain(asdict(self.outputs)),
        }

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False, default_flow_style=None)

    @classmethod
    def from_dict(cls, data: dict) -> "SceneConfig":
        if data is None:
            data = {}
        top = ("particle", "boundary", "medium", "source", "frequency", "pose", "dynamics", "numerics", "outputs")
        _check_keys(data, top, "config")

        p = data.get("particle", {}) or {}
        _check_keys(p, [f.name for f in fields(ParticleConfig)], "particle")
        particle = ParticleConfig(
            _floats(p.get("mapping_coefficients", (0.002,)), "particle.mapping_coefficients"),
            _opt_float(p.get("averaged_radius_override"), "particle.averaged_radius_override"),
            _float(p.get("density", 15.0), "particle.density"),
        )

        m = data.get("medium", "air")
        if isinstance(m, str):
            if m.lower() not in MEDIA:
                raise ConfigError(f"unknown medium preset {m!r}; choose from {sorted(MEDIA)}")
            medium = MediumConfig(m.lower())
        else:
            _check_keys(m, ("rho0", "c0", "mu"), "medium")
            try:
                medium = MediumConfig(None, _float(m["rho0"], "medium.rho0"), _float(m["c0"], "medium.c0"),
                                      _float(m["mu"], "medium.mu"))
            except KeyError as exc:
                raise ConfigError(f"medium needs {exc.args[0]!r}") from None

        src = data.get("source")
        if src is None:
            src = {"plane": {}}
        _check_keys(src, ("plane", "array"), "source")
        if len(src) != 1:
            raise ConfigError("source must contain exactly one of 'plane' or 'array'")
        plane = array = None
        if "plane" in src:
            s = src["plane"] or {}
            _check_keys(s, ("amplitude", "direction"), "source.plane")
            plane = PlaneConfig(
                _float(s.get("amplitude", 1.0), "source.plane.amplitude"),
                _floats(s.get("direction", (0, 0, 1)), "source.plane.direction", 3),
            )
        else:
            s = src["array"] or {}
            _check_keys(s, [f.name for f in fields(ArrayConfig)], "source.array")
            positions = s.get("positions", ((0, 0, 0),))
            try:
                positions = tuple(_floats(row, "source.array.positions", 3) for row in positions)
            except TypeError:
                raise ConfigError("source.array.positions must be a list of 3-vectors") from None
            array = ArrayConfig(
                _float(s.get("radius", 0.005), "source.array.radius"),
                positions,
                _float(s.get("v0", 1.5), "source.array.v0"),
                None if s.get("phase_delay") is None else _floats(s["phase_delay"], "source.array.phase_delay"),
                None
                if s.get("amplitude_ratio") is None
                else _floats(s["amplitude_ratio"], "source.array.amplitude_ratio"),
                _float(s.get("interdistance", 0.02), "source.array.interdistance"),
                str(s.get("model", "exact")),
            )
            if array.model not in ArrayField.MODELS:
                raise ConfigError(f"source.array.model must be one of {ArrayField.MODELS}, got {array.model!r}")

        pose = data.get("pose", {}) or {}
        _check_keys(pose, ("initial_position", "initial_orientation"), "pose")
        d = data.get("dynamics", {}) or {}
        _check_keys(d, [f.name for f in fields(DynamicsConfig)], "dynamics")
        dyn = DynamicsConfig(
            **{k: (bool(v) if k == "weight_from_averaged_radius" else _float(v, f"dynamics.{k}")) for k, v in d.items()}
        )
        n = data.get("numerics", {}) or {}
        _check_keys(n, [f.name for f in fields(NumericsConfig)], "numerics")
        radii = n.get("projection_radii")
        numerics = NumericsConfig(
            None if n.get("n_max") is None else _int(n["n_max"], "numerics.n_max"),
            None if radii is None else _floats(radii, "numerics.projection_radii", 2),
            _opt_float(n.get("force_radius"), "numerics.force_radius"),
        )
        o = data.get("outputs", {}) or {}
        _check_keys(o, [f.name for f in fields(OutputsConfig)], "outputs")
        outputs = OutputsConfig(
            str(o.get("directory", ".")),
            str(o.get("trajectory_filename", "Myfilename.txt")),
            str(o.get("stl_filename", "particle_data.stl")),
            bool(o.get("provenance", False)),
        )
        try:
            return cls(
                particle=particle,
                boundary=str(data.get("boundary", "sound_hard")),
                medium=medium,
                plane=plane,
                array=array,
                frequency=_float(data.get("frequency", 40e3), "frequency"),
                initial_position=_floats(pose.get("initial_position", (0, 0, 0)), "pose.initial_position", 3),
                initial_orientation=_floats(
                    pose.get("initial_orientation", (0, 0, 0)), "pose.initial_orientation", 3
                ),
                dynamics=dyn,
                numerics=numerics,
                outputs=outputs,
            )
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_yaml(cls, text: str) -> "SceneConfig":
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"invalid YAML: {exc}") from None
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "SceneConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        return cls.from_yaml(text)


def _plain(obj):
    """Tuples to lists recursively, so YAML output stays in plain sequences."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj
