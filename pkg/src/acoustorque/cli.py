"""Command-line front end.

::

    acoustorque particle --config scene.yaml
    acoustorque field    --config scene.yaml --x-range -0.02:0.02:41 --z-range -0.02:0.02:41
    acoustorque force    --config scene.yaml [--sweep x=0:90:19]
    acoustorque simulate --config scene.yaml

Exit codes: 0 success, 1 usage or configuration error, 2 domain or
geometry error, 3 numerical failure (conditioning, truncation,
integration). Every data file is a deterministic function of the
configuration; with ``outputs.provenance: true`` a ``#`` comment naming the
package version is added, still without timestamps.
"""

import argparse
import io
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import SceneConfig
from .dynamics import ForceModel, simulate
from .errors import ConditioningError, ConfigError, DomainError, GeometryError, IntegrationError, TruncationError
from .geometry import build_mesh, export_stl, mass_properties, max_radius, meridian
from .transform import euler_to_rotation
from .wavefield import ArrayField, PlaneWaveField, exact_field_reachable

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_NUMERICAL = 0, 1, 2, 3

_FMT = "%.12e"
log = logging.getLogger("acoustorque")


class UsageError(Exception):
    """Bad command line; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _parse_range(text: str, name: str):
    try:
        lo, hi, count = text.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError:
        raise UsageError(f"{name} must look like min:max:count, got {text!r}") from None
    if count < 1:
        raise UsageError(f"{name} count must be at least 1")
    return lo, hi, count


def parse_sweep(text: str):
    """``axis=min:max:count`` (degrees) to ``(axis index, angles in degrees)``."""
    axis, sep, rng = text.partition("=")
    axes = {"x": 0, "y": 1, "z": 2}
    if not sep or axis.strip().lower() not in axes:
        raise UsageError(f"--sweep must look like x=0:90:19, got {text!r}")
    lo, hi, count = _parse_range(rng, "--sweep")
    return axes[axis.strip().lower()], np.linspace(lo, hi, count)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="acoustorque", description="Acoustic radiation force, torque and acoustophoresis.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", required=True, help="scene configuration (YAML)")
        p.add_argument("--out-dir", help="output directory (overrides outputs.directory)")
        p.add_argument("--n-max", type=int, help="truncation degree override")
        p.add_argument("--quiet", action="store_true", help="suppress the printed summary")

    common(sub.add_parser("particle", help="export the particle mesh as ASCII STL and report its shape"))
    p = sub.add_parser("field", help="incident pressure on the xOz plane as CSV")
    common(p)
    p.add_argument("--x-range", default="-0.02:0.02:41", help="min:max:count in metres")
    p.add_argument("--z-range", default="-0.02:0.02:41", help="min:max:count in metres")
    p.add_argument("--output", default="field.csv", help="file name inside the output directory")
    p = sub.add_parser("force", help="radiation force and torque, optionally over an orientation sweep")
    common(p)
    p.add_argument("--sweep", help="axis=min:max:count in degrees, e.g. x=0:90:19")
    p.add_argument("--output", help="file name (default force.csv or sweep_<axis>.csv)")
    common(sub.add_parser("simulate", help="integrate the particle motion and write the trajectory"))
    return parser


def _out_dir(args, cfg: SceneConfig) -> Path:
    out = Path(args.out_dir if args.out_dir is not None else cfg.outputs.directory)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _header(cfg: SceneConfig) -> str:
    lines = []
    if cfg.outputs.provenance:
        lines.append(f"# acoustorque {__version__}")
    return "".join(line + "\n" for line in lines)


def _write(path: Path, text: str) -> Path:
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    return path


# -- subcommands ---------------------------------------------------------------------


def run_particle(cfg: SceneConfig, out: Path, quiet: bool = False) -> Path:
    c = cfg.particle.coefficients()
    mesh = build_mesh(c)
    path = export_stl(mesh, out / cfg.outputs.stl_filename)
    ends = meridian(c, np.array([0.0, np.pi]))
    axial = float(ends.z[0] - ends.z[1])
    equator = 2 * max_radius_equatorial(c)
    props = mass_properties(c, cfg.particle.density, cfg.dynamics.weight_from_averaged_radius)
    if not quiet:
        print(f"wrote {path}")
        print(f"averaged radius  {c.averaged_radius:.6g} m")
        print(f"volume           {props.volume:.6g} m^3")
        print(f"axial extent     {axial:.6g} m")
        print(f"equatorial width {equator:.6g} m")
        print(f"largest radius   {max_radius(c):.6g} m")
        print(f"mass             {props.mass:.6g} kg")
    return path


def max_radius_equatorial(c) -> float:
    """Largest distance of the surface from the symmetry axis."""
    gamma = np.linspace(0.0, np.pi, 4097)
    return float(np.max(meridian(c, gamma).rho))


def field_grid(cfg: SceneConfig, x_range, z_range):
    """Incident pressure on the ``y = 0`` plane.

    Returns ``(x, z, p, skipped)`` with ``p`` NaN at skipped points and
    ``skipped`` a list of ``(x, z, reason)``.
    """
    x = np.linspace(*x_range)
    z = np.linspace(*z_range)
    X, Z = np.meshgrid(x, z, indexing="ij")
    pts = np.stack([X.ravel(), np.zeros(X.size), Z.ravel()], -1)
    medium = cfg.medium.medium()
    skipped = []
    if cfg.plane is not None:
        p = PlaneWaveField(cfg.source(), medium, cfg.frequency).pressure(pts)
    else:
        array = cfg.array.array()
        field = ArrayField(array, medium, cfg.frequency, cfg.array.model)
        r = np.min(np.linalg.norm(pts[:, None, :] - array.centers[None], axis=-1), axis=1)
        bad = r < 1e-12
        if field.model == "exact":
            bad |= ~exact_field_reachable(array, pts)
        p = np.full(len(pts), np.nan + 0j)
        if np.any(~bad):
            p[~bad] = field.pressure(pts[~bad])
        for i in np.flatnonzero(bad):
            reason = "transducer center" if r[i] < 1e-12 else "near-field of the exact piston series"
            skipped.append((pts[i, 0], pts[i, 2], reason))
    return X.ravel(), Z.ravel(), p, skipped


def run_field(cfg: SceneConfig, out: Path, x_range, z_range, name="field.csv", quiet=False) -> Path:
    X, Z, p, skipped = field_grid(cfg, x_range, z_range)
    buf = io.StringIO()
    buf.write(_header(cfg))
    buf.write("x,z,re_p,im_p,abs_p\n")
    keep = ~np.isnan(p.real)
    rows = np.column_stack([X, Z, p.real, p.imag, np.abs(p)])[keep]
    np.savetxt(buf, rows, fmt=_FMT, delimiter=",")
    if skipped:
        buf.write(f"# skipped {len(skipped)} points:\n")
        for x, z, reason in skipped:
            buf.write(f"# {x:.12e},{z:.12e},{reason}\n")
    path = _write(out / name, buf.getvalue())
    if not quiet:
        print(f"wrote {path} ({int(keep.sum())} points, {len(skipped)} skipped)")
        if keep.any():
            print(f"max |p| = {np.abs(p[keep]).max():.6g} Pa")
    return path


def force_rows(cfg: SceneConfig, angles_list):
    """Force/torque rows ``[Fx Fy Fz Tx Ty Tz]`` for each orientation (radians)."""
    scene = cfg.scene()
    model = ForceModel(scene)
    position = scene.position

    def one(angles):
        return model.evaluate(position, euler_to_rotation(angles)).as_row()

    if len(angles_list) == 1:
        return np.array([one(angles_list[0])])
    with ThreadPoolExecutor() as pool:
        return np.array(list(pool.map(one, angles_list)))


def run_force(cfg: SceneConfig, out: Path, sweep=None, name=None, quiet=False) -> Path:
    base = np.array(cfg.initial_orientation)
    buf = io.StringIO()
    buf.write(_header(cfg))
    if sweep is None:
        rows = force_rows(cfg, [base])
        buf.write("Fx,Fy,Fz,Tx,Ty,Tz\n")
        np.savetxt(buf, rows, fmt=_FMT, delimiter=",")
        path = _write(out / (name or "force.csv"), buf.getvalue())
        if not quiet:
            print("F = [" + " ".join(f"{v:.6e}" for v in rows[0, :3]) + "] N")
            print("T = [" + " ".join(f"{v:.6e}" for v in rows[0, 3:]) + "] N m")
            print(f"wrote {path}")
        return path
    axis, degrees = sweep
    angle_sets = []
    for deg in degrees:
        a = base.copy()
        a[axis] = np.deg2rad(deg)
        angle_sets.append(a)
    rows = force_rows(cfg, angle_sets)
    label = "xyz"[axis]
    buf.write(f"theta_{label}_deg,Fx,Fy,Fz,Tx,Ty,Tz\n")
    np.savetxt(buf, np.column_stack([degrees, rows]), fmt=_FMT, delimiter=",")
    path = _write(out / (name or f"sweep_{label}.csv"), buf.getvalue())
    if not quiet:
        print(f"wrote {path} ({len(degrees)} orientations)")
    return path


def run_simulate(cfg: SceneConfig, out: Path, quiet=False) -> Path:
    scene = cfg.scene()
    params = cfg.dynamics_params()
    traj = simulate(scene, params)
    buf = io.StringIO()
    buf.write(_header(cfg))
    for line in cfg.to_yaml().splitlines():
        buf.write(f"# {line}\n")
    buf.write(f"# termination: {traj.termination}\n")
    buf.write("# t x y z theta_x theta_y theta_z\n")
    np.savetxt(buf, traj.as_array(), fmt=_FMT, delimiter=" ")
    path = _write(out / cfg.outputs.trajectory_filename, buf.getvalue())
    if not quiet:
        last = traj.records[-1]
        print(f"termination: {traj.termination} at t = {last.t:.6g} s ({len(traj.records)} rows)")
        print("final position [m]: " + " ".join(f"{v:.6e}" for v in last.position))
        print("final angles [rad]: " + " ".join(f"{v:.6e}" for v in last.angles))
        print(f"wrote {path}")
    return path


# -- entry point ---------------------------------------------------------------------


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = SceneConfig.load(args.config).with_n_max(args.n_max)
        logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
        out = _out_dir(args, cfg)
        if args.command == "particle":
            run_particle(cfg, out, args.quiet)
        elif args.command == "field":
            run_field(
                cfg,
                out,
                _parse_range(args.x_range, "--x-range"),
                _parse_range(args.z_range, "--z-range"),
                args.output,
                args.quiet,
            )
        elif args.command == "force":
            sweep = None if args.sweep is None else parse_sweep(args.sweep)
            run_force(cfg, out, sweep, args.output, args.quiet)
        else:
            run_simulate(cfg, out, args.quiet)
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    except (UsageError, ConfigError) as exc:
        print(f"acoustorque: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"acoustorque: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConditioningError, TruncationError, IntegrationError) as exc:
        print(f"acoustorque: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DomainError, GeometryError) as exc:
        print(f"acoustorque: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
