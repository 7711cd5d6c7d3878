"""Command-line interface.

Subcommands: ``pose`` (single-image pose report), ``fit`` (ellipse from a
contour CSV), ``simulate`` (error-vs-distance sweep), ``calib-model``
(default-focal model from a device database) and ``verify-prop2``
(Monte-Carlo check of the disambiguation rule).

All outputs are deterministic functions of the flags, input files and seed.
Exit codes: 0 success, 1 error, 2 geometrically undecidable pose.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from .conics import Conic
from .disambiguate import centered_side_info, select_vanishing_line
from .ellipse import fit_ellipse
from .intrinsics import (
    CameraIntrinsics,
    default_focal_model,
    default_intrinsics,
    fit_focal_model,
    focal_modifier,
    load_device_database,
)
from .pencil import decompose_pencil
from .pose import homography_from_circle_and_vline, vanishing_candidates
from .simulate import (
    ExperimentConfig,
    prop2_records_to_csv,
    records_to_csv,
    run_experiment,
    run_prop2_oracle,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNDECIDED = 2


def _env_seed(value):
    if value is not None:
        return int(value)
    env = os.environ.get("CIRCLEPOSE_SEED")
    return int(env) if env else 0


def _parse_image_size(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"image size must look like 1280x720, got {text!r}"
        ) from None


def _load_intrinsics(args) -> CameraIntrinsics:
    if args.intrinsics:
        with open(args.intrinsics) as fh:
            k = CameraIntrinsics.from_dict(json.load(fh))
    elif args.default_model:
        if args.image_size is None:
            raise ValueError("--default-model requires --image-size WxH")
        w, h = args.image_size
        k = default_intrinsics(w, h, default_focal_model())
    else:
        raise ValueError("provide --intrinsics FILE or --default-model")
    if args.focal_modifier != 1.0:
        k = focal_modifier(k, args.focal_modifier)
    return k


def _matrix_list(m: np.ndarray) -> list:
    return [[float(v) for v in row] for row in m]


def cmd_pose(args) -> int:
    with open(args.ellipse) as fh:
        conic = Conic.from_dict(json.load(fh))
    k = _load_intrinsics(args)
    pencil = decompose_pencil(conic, Conic.from_matrix(k.iac()))
    cands = vanishing_candidates(pencil, k)

    report = {
        "intrinsics": k.to_dict(),
        "marker_diameter": args.marker_diameter,
        "diagnostics": {
            "lambdas": pencil.lambdas.tolist(),
            "signatures": [[s.p, s.n] for s in pencil.sigs],
            "fronto_parallel": pencil.fronto_parallel,
        },
    }
    if args.dump_pencil:
        report["pencil"] = pencil.to_dict()

    if cands.degenerate:
        pose = homography_from_circle_and_vline(
            conic, cands.v1, k, args.marker_diameter
        )
        report["candidates"] = [_pose_dict(cands.v1, pose)]
        report["selected"] = 1
        report["rule"] = "degenerate_fronto_parallel"
        _emit(report, args.out)
        return EXIT_OK

    poses = [
        homography_from_circle_and_vline(conic, v, k, args.marker_diameter)
        for v in (cands.v1, cands.v2)
    ]
    report["candidates"] = [
        _pose_dict(v, p) for v, p in zip((cands.v1, cands.v2), poses)
    ]
    side = centered_side_info() if args.assume_centered else None
    result = select_vanishing_line(cands, pencil, side)
    report["diagnostics"]["separation_products"] = list(result.separation_products)
    report["rule"] = result.rule_fired.value
    report["selected"] = result.selected
    _emit(report, args.out)
    return EXIT_OK if result.selected is not None else EXIT_UNDECIDED


def _pose_dict(vline, pose) -> dict:
    return {
        "vanishing_line": [float(v) for v in vline],
        "normal": [float(v) for v in pose.normal],
        "distance": pose.distance,
        "center_cam": [float(v) for v in pose.center_cam],
        "homography": _matrix_list(pose.homography),
    }


def _emit(payload: dict, out_path) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    print(text)


def cmd_fit(args) -> int:
    with open(args.contours, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"x", "y"} <= set(reader.fieldnames):
            raise ValueError("contour CSV needs an x,y header")
        pts = [(float(row["x"]), float(row["y"])) for row in reader]
    conic = fit_ellipse(np.asarray(pts))
    payload = {"coefficients": conic.coefficients().tolist(), "m": _matrix_list(conic.m)}
    _emit(payload, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.config:
        with open(args.config) as fh:
            config = ExperimentConfig.from_dict(json.load(fh))
        if args.seed is not None:
            config = ExperimentConfig.from_dict(
                {**config.to_dict(), "seed": _env_seed(args.seed)}
            )
    else:
        config = ExperimentConfig(
            alpha_deg=tuple(args.alpha),
            focal_modifiers=tuple(args.focal_modifiers),
            noise_sigma=args.noise_sigma,
            trials=args.trials,
            seed=_env_seed(args.seed),
            contour_points=args.contour_points,
        )
    records = run_experiment(config)
    text = records_to_csv(records)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
        n_failed = sum(1 for r in records if r.failed)
        print(f"wrote {len(records)} trials to {args.out} ({n_failed} failed)")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_calib_model(args) -> int:
    devices = load_device_database(args.devices)
    model = fit_focal_model([v for _, v in devices], [d for d, _ in devices])
    print(f"devices: {len(devices)}")
    print(f"mean_f35_mm: {model.mean_f35:.4f}")
    print(f"var_f35_mm2: {model.var_f35:.4f} (sd {math.sqrt(model.var_f35):.4f})")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(model.to_dict(), fh, indent=2)
            fh.write("\n")
        print(f"model written to {args.out}")
    return EXIT_OK


def cmd_verify_prop2(args) -> int:
    records, summary = run_prop2_oracle(
        trials=args.trials,
        seed=_env_seed(args.seed),
        noise_sigma=args.noise_sigma,
        r_over_d=args.r_over_d,
        margin=args.margin,
    )
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(prop2_records_to_csv(records))
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="circlepose",
        description="Plane pose from the image of a single circle.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "pose", help="pose report from an ellipse file and intrinsics"
    )
    p.add_argument("--ellipse", required=True, help="JSON conic: {'m': 3x3} or 6 coefficients")
    p.add_argument("--intrinsics", help="JSON intrinsics file {f_px,width_px,height_px}")
    p.add_argument("--default-model", action="store_true", help="derive the focal from the device model")
    p.add_argument("--image-size", type=_parse_image_size, help="WxH in pixels (with --default-model)")
    p.add_argument("--marker-diameter", type=float, default=1.0, help="circle diameter in world units")
    p.add_argument("--assume-centered", action="store_true", help="assume the optical axis passes through the marker centre")
    p.add_argument("--focal-modifier", type=float, default=1.0, help="scale applied to the focal length")
    p.add_argument("--dump-pencil", action="store_true", help="include the pencil decomposition in the report")
    p.add_argument("--out", help="also write the JSON report here")
    p.set_defaults(func=cmd_pose)

    p = sub.add_parser("fit", help="fit an ellipse to contour points")
    p.add_argument("--contours", required=True, help="CSV with header x,y (pixels)")
    p.add_argument("--out", help="also write the JSON result here")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("simulate", help="run the error-vs-distance sweep")
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--alpha", type=float, nargs="+", default=[15.0, 30.0, 45.0], help="plane-to-view angles in degrees")
    p.add_argument("--focal-modifiers", type=float, nargs="+", default=[0.7, 0.85, 1.0, 1.15, 1.3])
    p.add_argument("--noise-sigma", type=float, default=1.0, help="contour noise in pixels")
    p.add_argument("--trials", type=int, default=200, help="trials per grid cell")
    p.add_argument("--contour-points", type=int, default=360, help="sampled contour points per trial")
    p.add_argument("--seed", type=int, default=None, help="sweep seed (or env CIRCLEPOSE_SEED)")
    p.add_argument("--out", help="CSV output path (stdout when omitted)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("calib-model", help="fit the default-focal model from a device database")
    p.add_argument("--devices", required=True, help="JSON array [{'device', 'f35_mm'}]")
    p.add_argument("--out", help="write the fitted model JSON here")
    p.set_defaults(func=cmd_calib_model)

    p = sub.add_parser("verify-prop2", help="Monte-Carlo check of the disambiguation rule")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=None, help="seed (or env CIRCLEPOSE_SEED)")
    p.add_argument("--noise-sigma", type=float, default=0.0, help="contour noise in pixels")
    p.add_argument("--r-over-d", type=float, default=15.0, help="camera distance in marker diameters")
    p.add_argument("--margin", type=float, default=1.5, help="minimum y_c / R offset margin")
    p.add_argument("--out", help="per-trial CSV table path")
    p.set_defaults(func=cmd_verify_prop2)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
