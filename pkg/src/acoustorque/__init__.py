"""Acoustic radiation force and torque on axisymmetric particles.

The public API re-exports the most used names of the submodules:
:mod:`~acoustorque.specfun`, :mod:`~acoustorque.geometry`,
:mod:`~acoustorque.wavefield`, :mod:`~acoustorque.transform`,
:mod:`~acoustorque.scatter`, :mod:`~acoustorque.radforce`,
:mod:`~acoustorque.dynamics` and :mod:`~acoustorque.config`.
"""

__version__ = "0.1.0"

from .errors import (
    AcoustorqueError,
    ConditioningError,
    ConfigError,
    DomainError,
    GeometryError,
    IntegrationError,
    InvalidShapeError,
    TruncationError,
)
from .geometry import MappingCoefficients, build_mesh, export_stl, mass_properties, meridian, read_stl
from .wavefield import (
    AIR,
    WATER,
    ArrayField,
    Medium,
    PlaneWave,
    PlaneWaveField,
    TransducerArray,
    WaveExpansion,
    evaluate_expansion,
    piston_pressure,
    plane_wave_coefficients,
    project_incident,
)
from .transform import Orientation, euler_to_rotation, rotate_expansion, translate_regular
from .scatter import BoundaryKind, TMatrix, mie_coefficients, scatter_lab_frame, tmatrix_nullfield
from .radforce import ForceTorque, force_torque, gorkov_force
from .dynamics import DynamicsParams, ForceModel, Scene, simulate
from .config import SceneConfig

__all__ = [
    "__version__",
    "AcoustorqueError",
    "ConditioningError",
    "ConfigError",
    "DomainError",
    "GeometryError",
    "IntegrationError",
    "InvalidShapeError",
    "TruncationError",
    "MappingCoefficients",
    "build_mesh",
    "export_stl",
    "mass_properties",
    "meridian",
    "read_stl",
    "AIR",
    "WATER",
    "ArrayField",
    "Medium",
    "PlaneWave",
    "PlaneWaveField",
    "TransducerArray",
    "WaveExpansion",
    "evaluate_expansion",
    "piston_pressure",
    "plane_wave_coefficients",
    "project_incident",
    "Orientation",
    "euler_to_rotation",
    "rotate_expansion",
    "translate_regular",
    "BoundaryKind",
    "TMatrix",
    "mie_coefficients",
    "scatter_lab_frame",
    "tmatrix_nullfield",
    "ForceTorque",
    "force_torque",
    "gorkov_force",
    "DynamicsParams",
    "ForceModel",
    "Scene",
    "simulate",
    "SceneConfig",
]
