"""Command-line interface.

Commands:

* ``evaluate``     run the full pipeline on a measured cloud CSV;
* ``synth``        generate a synthetic part plus its ground-truth sidecar;
* ``compare-fits`` sweep true twist angles and record what each fitting
                   method detects, as CSV and SVG scatter plots.

Exit codes: 0 success, 2 input error, 3 analysis error, 4 non-convergence
(a report is still written).
"""

from __future__ import annotations

import argparse
import hashlib
import math
import sys
from pathlib import Path

import numpy as np

from ._version import __version__
from .conicfit import GnSettings, fit_bookstein, fit_gauss_newton, fit_trace, moment_init
from .errors import (
    EmptyCloud,
    HelibendError,
    InputFormatError,
    InvalidSpec,
    InvalidSweep,
)
from .geometry import EllipseParams, fold_half_open
from .helix import HelixSpec, generate
from .linefit import DEFAULT_WINDOW
from .pipeline import evaluate_cloud
from .report import (
    EvaluationReport,
    arc_csv_text,
    read_cloud_csv,
    sections_csv_text,
    svg_scatter,
    write_cloud_csv,
    write_truth_csv,
)
from .torsion import FITTERS, TRACE_FITTER, rectify_against

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_ANALYSIS = 3
EXIT_NONCONVERGED = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="helibend",
        description="Machining-accuracy evaluation for elliptical helical bent pipes",
    )
    parser.add_argument("--version", action="version", version=f"helibend {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("evaluate", help="evaluate a measured point cloud")
    ev.add_argument("--input", required=True, help="cloud CSV (x,y,z[,section])")
    ev.add_argument("--output-dir", required=True)
    ev.add_argument("--fitter", choices=FITTERS, default=TRACE_FITTER)
    ev.add_argument(
        "--sections",
        type=int,
        default=None,
        help="expected section count (required when the input has no section column)",
    )
    ev.add_argument("--window", type=int, default=DEFAULT_WINDOW,
                    help="adjacent sections pooled per direction fit")
    ev.add_argument("--workers", type=int, default=None)
    ev.add_argument("--format", choices=("csv", "report", "both"), default="both")
    ev.add_argument("--seed", type=int, default=0,
                    help="accepted for interface uniformity; evaluation is deterministic")
    ev.add_argument("--gn-max-iterations", type=int, default=None,
                    help="iteration budget for the gauss-newton fitter")

    sy = sub.add_parser("synth", help="generate a synthetic part with ground truth")
    sy.add_argument("--output-dir", required=True)
    sy.add_argument("--seed", type=int, default=0)
    sy.add_argument("--radius", type=float, default=120.0, help="helix radius [mm]")
    sy.add_argument("--pitch", type=float, default=60.0, help="axial advance per turn [mm]")
    sy.add_argument("--semi-major", type=float, default=8.0)
    sy.add_argument("--semi-minor", type=float, default=5.0)
    sy.add_argument("--helix-angle-deg", type=float, default=None,
                    help="surface direction [deg]; default from pitch and radius")
    sy.add_argument("--extent-deg", type=float, default=180.0)
    sy.add_argument("--sections", type=int, default=40)
    sy.add_argument("--points-per-section", type=int, default=48)
    sy.add_argument("--noise-sigma", type=float, default=0.0)
    sy.add_argument("--twist-constant-deg", type=float, default=0.0)
    sy.add_argument("--twist-ramp-deg", type=float, default=0.0,
                    help="twist added linearly from 0 to this value along the part")
    sy.add_argument("--twist-sine-amp-deg", type=float, default=0.0)
    sy.add_argument("--twist-sine-cycles", type=float, default=1.0)

    cf = sub.add_parser("compare-fits", help="sweep twist angles across fitters")
    cf.add_argument("--output-dir", required=True)
    cf.add_argument("--min-angle-deg", type=float, default=-90.0)
    cf.add_argument("--max-angle-deg", type=float, default=90.0)
    cf.add_argument("--trials", type=int, default=181, help="sweep samples per fitter")
    cf.add_argument("--noise-sigma", type=float, default=0.0)
    cf.add_argument("--seed", type=int, default=0)
    cf.add_argument("--semi-major", type=float, default=30.0)
    cf.add_argument("--semi-minor", type=float, default=10.0)
    cf.add_argument("--points", type=int, default=60)
    cf.add_argument("--arc-fraction", type=float, default=1.0,
                    help="fraction of the boundary sampled per trial; below 1 "
                         "emulates a one-sided scan, where the constraint "
                         "choice matters most")
    return parser


def _cmd_evaluate(args) -> int:
    points, labels = read_cloud_csv(args.input)
    if points.size == 0:
        raise EmptyCloud("input file contains no points")
    if labels is None and args.sections is None:
        raise InputFormatError(
            "input has no section column; pass --sections", line_number=None
        )
    digest = "sha256:" + hashlib.sha256(Path(args.input).read_bytes()).hexdigest()
    gn_settings = (
        None
        if args.gn_max_iterations is None
        else GnSettings(max_iterations=args.gn_max_iterations)
    )
    result = evaluate_cloud(
        points,
        labels=labels,
        expected_sections=args.sections,
        fitter=args.fitter,
        window=args.window,
        workers=args.workers,
        gn_settings=gn_settings,
    )
    report = EvaluationReport.from_result(result, fitter=args.fitter, input_digest=digest)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    if args.format in ("report", "both"):
        report.write(out / "report.json")
    if args.format in ("csv", "both"):
        (out / "sections.csv").write_text(sections_csv_text(report), encoding="utf-8")
        (out / "arc.csv").write_text(arc_csv_text(report), encoding="utf-8")
    if not result.all_converged:
        print("warning: at least one section fit did not converge", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def _twist_profile(args, sections: int):
    const = math.radians(args.twist_constant_deg)
    ramp = math.radians(args.twist_ramp_deg)
    amp = math.radians(args.twist_sine_amp_deg)
    cycles = args.twist_sine_cycles
    span = max(sections - 1, 1)

    def profile(i: int) -> float:
        s = i / span
        return const + ramp * s + amp * math.sin(2.0 * math.pi * cycles * s)

    return profile


def _cmd_synth(args) -> int:
    helix_angle = (
        math.atan2(args.pitch / (2.0 * math.pi), args.radius)
        if args.helix_angle_deg is None
        else math.radians(args.helix_angle_deg)
    )
    spec = HelixSpec(
        radius=args.radius,
        pitch_per_turn=args.pitch,
        semi_major=args.semi_major,
        semi_minor=args.semi_minor,
        helix_angle=helix_angle,
        twist_profile=_twist_profile(args, args.sections),
        extent=math.radians(args.extent_deg),
        sections=args.sections,
        points_per_section=args.points_per_section,
        noise_sigma=args.noise_sigma,
        rng_seed=args.seed,
    )
    part = generate(spec)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_cloud_csv(out / "cloud.csv", part.points, part.labels)
    write_truth_csv(out / "truth.csv", part.truth)
    return EXIT_OK


def _boundary_arc(params: EllipseParams, n: int, fraction: float, t_center: float):
    half = math.pi * fraction
    t = t_center + np.linspace(-half, half, n)
    ca, sa = math.cos(params.orientation), math.sin(params.orientation)
    u = params.semi_major * np.cos(t)
    v = params.semi_minor * np.sin(t)
    return np.column_stack(
        (params.center[0] + ca * u - sa * v, params.center[1] + sa * u + ca * v)
    )


def _sweep_fit(fitter: str, pts: np.ndarray):
    if fitter == TRACE_FITTER:
        return fit_trace(pts)
    if fitter == "bookstein":
        return fit_bookstein(pts)
    # Deliberately not warm-started from the trace fit: the sweep compares
    # the methods, so Gauss-Newton starts from plain moment estimates.
    return fit_gauss_newton(pts, init=moment_init(pts))


def _cmd_compare_fits(args) -> int:
    if args.trials < 1:
        raise InvalidSweep("trials must be >= 1")
    if not (args.min_angle_deg < args.max_angle_deg):
        raise InvalidSweep("empty sweep range")
    if args.noise_sigma < 0:
        raise InvalidSweep("noise sigma cannot be negative")
    if args.semi_major <= args.semi_minor:
        raise InvalidSweep("need distinct semi-axes to define an orientation")
    if not (0.0 < args.arc_fraction <= 1.0):
        raise InvalidSweep("arc fraction must lie in (0, 1]")

    lo = math.radians(args.min_angle_deg)
    hi = math.radians(args.max_angle_deg)
    if args.trials == 1:
        true_angles = np.array([0.5 * (lo + hi)])
    else:
        true_angles = lo + (hi - lo) * np.arange(args.trials) / (args.trials - 1)

    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    band = math.radians(10.0)
    summary = []
    for fitter in FITTERS:
        rng = np.random.default_rng(args.seed)
        detected_list = []
        for trial, true in enumerate(true_angles):
            params = EllipseParams(
                np.zeros(2),
                args.semi_major,
                args.semi_minor,
                fold_half_open(float(true)),
            )
            if args.arc_fraction >= 1.0:
                pts = params.boundary_points(args.points)
            else:
                pts = _boundary_arc(params, args.points, args.arc_fraction,
                                    rng.uniform(0.0, 2.0 * math.pi))
            if args.noise_sigma > 0.0:
                pts = pts + rng.normal(0.0, args.noise_sigma, pts.shape)
            fit = _sweep_fit(fitter, pts)
            raw = fit.params.orientation
            rectified = rectify_against(raw, float(true))
            rows.append((fitter, trial, float(true), raw, rectified))
            detected_list.append(rectified)
        detected = np.array(detected_list)
        in_band = np.abs(true_angles) < band
        err = detected[in_band] - true_angles[in_band]
        summary.append((fitter, int(in_band.sum()), float(np.std(err))))
        svg = svg_scatter(
            np.degrees(true_angles),
            np.degrees(detected),
            title=f"Detected twist vs truth ({fitter})",
            xlabel="true angle [deg]",
            ylabel="detected angle [deg]",
            xlim=(args.min_angle_deg, args.max_angle_deg),
            ylim=(args.min_angle_deg, args.max_angle_deg),
        )
        (out / f"compare_{fitter}.svg").write_text(svg, encoding="utf-8")

    with open(out / "sweep.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("fitter,trial,true_theta_y_rad,detected_raw_rad,detected_rectified_rad\n")
        for fitter, trial, true, raw, rect in rows:
            fh.write(f"{fitter},{trial},{true!r},{raw!r},{rect!r}\n")
    with open(out / "summary.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("fitter,trials_in_band,std_error_rad\n")
        for fitter, count, std in summary:
            fh.write(f"{fitter},{count},{std!r}\n")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "evaluate": _cmd_evaluate,
        "synth": _cmd_synth,
        "compare-fits": _cmd_compare_fits,
    }
    try:
        return handlers[args.command](args)
    except (InputFormatError, EmptyCloud, InvalidSpec, InvalidSweep) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except HelibendError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS


if __name__ == "__main__":
    sys.exit(main())
