import math

import numpy as np
import pytest
import yaml
from hypothesis import given, settings
from hypothesis import strategies as st

from acoustorque.config import (
    ArrayConfig,
    DynamicsConfig,
    MediumConfig,
    NumericsConfig,
    OutputsConfig,
    ParticleConfig,
    PlaneConfig,
    SceneConfig,
)
from acoustorque.errors import ConfigError
from acoustorque.wavefield import AIR, TransducerArray

from conftest import REFERENCE_SHAPES, SPHERE

DEMO = """
particle:
  mapping_coefficients: [0.002, 0, 0.0004]
  density: 15.0
source:
  array:
    positions: [[0, 0, 0], [0.01, 0, 0], [-0.01, 0, 0], [0, 0.01, 0], [0, -0.01, 0]]
pose:
  initial_position: [0.002, 0, 0]
  initial_orientation: [0.5235987755982988, 0, 0]
"""

finite = st.floats(-1e3, 1e3, allow_nan=False)
positive = st.floats(1e-4, 1e3)
vec3 = st.tuples(finite, finite, finite)


@st.composite
def configs(draw):
    particle = ParticleConfig(
        draw(st.sampled_from([SPHERE, *REFERENCE_SHAPES.values()])),
        draw(st.none() | st.floats(1e-4, 1e-2)),
        draw(positive),
    )
    medium = draw(
        st.sampled_from([MediumConfig("air"), MediumConfig("water")])
        | st.builds(lambda r, c, m: MediumConfig(None, r, c, m), positive, positive, positive)
    )
    if draw(st.booleans()):
        plane, array = PlaneConfig(draw(finite), (0.0, 0.0, 1.0)), None
    else:
        n = draw(st.integers(1, 4))
        positions = ((0.0, 0.0, 0.0),) + tuple(draw(vec3) for _ in range(n - 1))
        array = ArrayConfig(
            draw(positive),
            positions,
            draw(finite),
            draw(st.none() | st.tuples(*[finite] * n)),
            draw(st.none() | st.tuples(*[positive] * n)),
            draw(positive),
            draw(st.sampled_from(["exact", "farfield"])),
        )
        plane = None
    return SceneConfig(
        particle=particle,
        boundary=draw(st.sampled_from(["sound_hard", "sound_soft"])),
        medium=medium,
        plane=plane,
        array=array,
        frequency=draw(positive),
        initial_position=draw(vec3),
        initial_orientation=draw(vec3),
        dynamics=DynamicsConfig(draw(positive), draw(positive), draw(positive), 0.05, 0.01, draw(st.booleans())),
        numerics=NumericsConfig(
            draw(st.none() | st.integers(1, 40)),
            draw(st.none() | st.tuples(positive, positive)),
            draw(st.none() | positive),
        ),
        outputs=OutputsConfig(
            draw(st.sampled_from([".", "out/run 1"])), "traj.txt", "shape.stl", draw(st.booleans())
        ),
    )


class TestRoundTrip:
    @given(cfg=configs())
    @settings(max_examples=100, deadline=None)
    def test_parse_serialise_parse(self, cfg):
        once = SceneConfig.from_yaml(cfg.to_yaml())
        assert once == cfg
        assert SceneConfig.from_yaml(once.to_yaml()) == once

    def test_demo_round_trip(self):
        cfg = SceneConfig.from_yaml(DEMO)
        assert SceneConfig.from_yaml(cfg.to_yaml()) == cfg

    def test_yaml_is_plain(self):
        text = SceneConfig.from_yaml(DEMO).to_yaml()
        assert "!!python" not in text
        assert yaml.safe_load(text)["source"]["array"]["model"] == "exact"

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "scene.yaml"
        path.write_text(DEMO)
        assert SceneConfig.load(path) == SceneConfig.from_yaml(DEMO)


class TestDefaults:
    def test_empty_document(self):
        cfg = SceneConfig.from_yaml("")
        assert cfg.frequency == 40e3
        assert cfg.boundary == "sound_hard"
        assert cfg.medium.medium() == AIR
        assert cfg.plane == PlaneConfig(1.0, (0.0, 0.0, 1.0))
        assert cfg.array is None
        assert cfg.outputs.trajectory_filename == "Myfilename.txt"
        assert cfg.outputs.stl_filename == "particle_data.stl"
        assert cfg.particle.mapping_coefficients == (0.002,)

    def test_array_defaults(self):
        cfg = SceneConfig.from_yaml("source: {array: {}}")
        arr = cfg.array.array()
        assert isinstance(arr, TransducerArray)
        assert (arr.radius, arr.v0, arr.interdistance) == (0.005, 1.5, 0.02)
        assert cfg.array.model == "exact"

    def test_dynamics_defaults(self):
        p = SceneConfig.from_yaml(DEMO).dynamics_params()
        assert (p.rho_p, p.dt, p.t_end, p.g, p.rel_tol, p.min_interdistance) == (15.0, 1e-4, 0.1, 9.81, 0.05, 0.01)

    def test_scene(self):
        scene = SceneConfig.from_yaml(DEMO).scene()
        assert scene.is_array
        np.testing.assert_allclose(scene.position, [0.002, 0, 0])
        assert scene.angles[0] == pytest.approx(math.pi / 6)
        assert len(scene.source.positions) == 5

    def test_custom_medium(self):
        cfg = SceneConfig.from_yaml("medium: {rho0: 1000, c0: 1500, mu: 0.001}")
        m = cfg.medium.medium()
        assert (m.rho0, m.c0, m.mu) == (1000.0, 1500.0, 0.001)

    def test_with_n_max(self):
        cfg = SceneConfig.from_yaml(DEMO)
        assert cfg.with_n_max(None) is cfg
        assert cfg.with_n_max(9).numerics.n_max == 9
        assert cfg.with_n_max(9).scene().n_max == 9


class TestOverride:
    def test_averaged_radius_scales_all_coefficients(self):
        cfg = SceneConfig.from_yaml(
            "particle: {mapping_coefficients: [0.002, 0, 0.0004], averaged_radius_override: 0.003}"
        )
        np.testing.assert_allclose(cfg.particle.coefficients().array, [0.003, 0, 0.0006])

    def test_no_override(self):
        cfg = SceneConfig.from_yaml(DEMO)
        np.testing.assert_array_equal(cfg.particle.coefficients().array, [0.002, 0, 0.0004])


class TestErrors:
    @pytest.mark.parametrize(
        "text",
        [
            "partcle: {}",
            "particle: {density: 1, colour: red}",
            "source: {plane: {amplitude: 1, phase: 0}}",
            "dynamics: {dt: 1e-4, tend: 1}",
            "outputs: {dir: x}",
            "numerics: {nmax: 3}",
            "pose: {position: [0, 0, 0]}",
        ],
    )
    def test_unknown_keys(self, text):
        with pytest.raises(ConfigError, match="unknown keys"):
            SceneConfig.from_yaml(text)

    def test_two_sources(self):
        with pytest.raises(ConfigError, match="exactly one"):
            SceneConfig.from_yaml("source: {plane: {}, array: {}}")

    def test_two_sources_in_code(self):
        with pytest.raises(ConfigError):
            SceneConfig(plane=PlaneConfig(), array=ArrayConfig())

    @pytest.mark.parametrize(
        "text, match",
        [
            ("medium: vacuum", "preset"),
            ("medium: {rho0: 1, c0: 2}", "mu"),
            ("frequency: fast", "frequency"),
            ("pose: {initial_position: [0, 0]}", "3 entries"),
            ("numerics: {n_max: 2.5}", "integer"),
            ("source: {array: {model: bem}}", "model"),
            ("source: {array: {positions: 3}}", "positions"),
            ("boundary: elastic", "boundary"),
            ("particle: [1, 2]", "mapping"),
            ("particle: {mapping_coefficients: [0.002, x]}", "mapping_coefficients"),
            ("{", "invalid YAML"),
        ],
    )
    def test_bad_values(self, text, match):
        with pytest.raises(ConfigError, match=match):
            SceneConfig.from_yaml(text)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            SceneConfig.load(tmp_path / "absent.yaml")

    def test_is_value_error(self):
        assert issubclass(ConfigError, ValueError)
