"""Command-line entry point.

Exit codes: 0 success or pass, 1 semantic failure (check failed, nothing to
reconstruct, solver gave up), 2 bad input, 3 I/O error or corrupt file.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import errors
from .curvature import curvature_exit_points, curvature_rows_to_csv, curvature_small_r, write_curvature_csv
from .fit import (
    coarse_to_fine_fit,
    fourier_to_polygon,
    read_fit_config,
    rms_misfit,
    write_shape_json,
)
from .geometry import Polygon, read_polygon_json, rigid_align, validate_polygon, write_polygon_json
from .graphlike import check_tcgl, check_tgl_curve, max_deviation
from .invariant import read_signature_csv, signature, signature_to_csv, write_signature_csv
from .reconstruct import (
    read_tdata_csv,
    reconstruct_polygon,
    reconstruct_tlike,
    tlike_data,
    write_tdata_csv,
)
from .shapes import KINDS, ShapeSpec
from .smooth import curve_signature
from .svg import Layer, overlay, render, write_svg

OK, FAIL, BAD_INPUT, IO_ERROR = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# shapes ----------------------------------------------------------------------


def _add_shape_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_argument_group("shape")
    g.add_argument("--kind", choices=KINDS, required=required)
    g.add_argument("--polygon", help="polygon JSON for --kind polygon_file")
    g.add_argument("--radius-param", type=float, help="circle, star or regular n-gon radius")
    g.add_argument("--a", type=float, help="ellipse semi-axis along x")
    g.add_argument("--b", type=float, help="ellipse semi-axis along y")
    g.add_argument("--amplitude", type=float, help="star lobe amplitude")
    g.add_argument("--lobes", type=int, help="star lobe count")
    g.add_argument("--sides", type=int, help="regular n-gon side count")
    g.add_argument("--side", type=float, help="rounded square side")
    g.add_argument("--width", type=float)
    g.add_argument("--height", type=float)
    g.add_argument("--corner", type=float, help="rounded square corner radius (0 for sharp)")
    g.add_argument("--resolution", type=int, default=512, help="polyline density for parametric kinds")


def _shape_spec(args) -> ShapeSpec:
    names = {
        "radius_param": "radius",
        "a": "a",
        "b": "b",
        "amplitude": "amplitude",
        "lobes": "lobes",
        "sides": "sides",
        "side": "side",
        "width": "width",
        "height": "height",
        "corner": "corner",
    }
    params = {key: getattr(args, attr) for attr, key in names.items() if getattr(args, attr) is not None}
    if args.kind == "polygon_file":
        if not args.polygon:
            raise CliError("--kind polygon_file needs --polygon", BAD_INPUT)
        params["path"] = args.polygon
    return ShapeSpec(args.kind, params, args.resolution)


def _load_shape(spec: ShapeSpec):
    """(exact curve or None, polygon)."""
    try:
        curve = spec.curve()
        return curve, spec.polygon()
    except FileNotFoundError as exc:
        raise CliError(str(exc), IO_ERROR) from exc
    except (json.JSONDecodeError, KeyError) as exc:
        raise CliError(f"corrupt polygon file: {exc}", IO_ERROR) from exc
    except (ValueError, errors.AreaSignatureError) as exc:
        raise CliError(f"invalid shape: {exc}", BAD_INPUT) from exc


def _positive(value: float | None, name: str) -> float:
    if value is None or not (value > 0 and math.isfinite(value)):
        raise CliError(f"{name} must be a positive number", BAD_INPUT)
    return float(value)


def _uniform(L: float, n: int) -> np.ndarray:
    if n < 1:
        raise CliError("--n must be at least 1", BAD_INPUT)
    return L * np.arange(n) / n


def _samples(curve, polygon: Polygon, n: int) -> np.ndarray:
    """Uniform samples; polygon samples always include the vertices."""
    if curve is not None:
        return _uniform(curve.perimeter, n)
    s = np.union1d(_uniform(polygon.perimeter, n), polygon.s_vertices)
    return s


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# commands --------------------------------------------------------------------


def cmd_signature(args) -> int:
    r = _positive(args.r, "--r")
    curve, polygon = _load_shape(_shape_spec(args))
    s = _samples(curve, polygon, args.n)
    sig = curve_signature(curve, r, s) if curve is not None else signature(polygon, r, s)
    if args.out:
        write_signature_csv(args.out, sig)
    else:
        sys.stdout.write(signature_to_csv(sig))
    return OK


def cmd_check(args) -> int:
    r = _positive(args.r, "--r")
    curve, polygon = _load_shape(_shape_spec(args))
    report = check_tgl_curve(curve, r, args.n) if curve is not None else check_tcgl(polygon, r, args.n)
    _emit(report.to_json() + "\n", args.out)
    return OK if report.passed else FAIL


def _read_signature(path: str, r: float):
    try:
        return read_signature_csv(path, r)
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(f"cannot read {path}: {exc}", IO_ERROR) from exc
    except ValueError as exc:
        raise CliError(f"corrupt signature CSV: {exc}", IO_ERROR) from exc


def _read_polygon(path: str) -> Polygon:
    try:
        return read_polygon_json(path)
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(f"cannot read {path}: {exc}", IO_ERROR) from exc
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise CliError(f"corrupt polygon JSON {path}: {exc}", IO_ERROR) from exc
    except (ValueError, errors.AreaSignatureError) as exc:
        raise CliError(f"invalid polygon {path}: {exc}", BAD_INPUT) from exc


def cmd_reconstruct_poly(args) -> int:
    r = _positive(args.r, "--r")
    sig = _read_signature(args.sig, r)
    if len(sig) < 3:
        raise CliError("signature needs at least three rows", BAD_INPUT)
    try:
        rec = reconstruct_polygon(sig)
    except (errors.NoVerticesDetected, errors.ClosureFailure, errors.AngleSolveFailed, errors.TwoArcViolation) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return FAIL
    result = {
        "vertex_s": rec.vertex_s.tolist(),
        "side_lengths": rec.side_lengths.tolist(),
        "interior_angles": rec.interior_angles.tolist(),
        "vertices": rec.vertices.tolist(),
        "closure_residual": rec.closure_residual,
    }
    _emit(json.dumps(result, indent=2) + "\n", args.out)
    if args.svg:
        if args.target:
            target = _read_polygon(args.target)
            pts = rec.vertices
            if len(pts) == target.n:
                pts = rigid_align(pts, target)[0].apply(pts)
            text = overlay(target.vertices, pts, result_label="reconstruction")
        else:
            text = render([Layer(rec.vertices, "reconstruction")])
        write_svg(args.svg, text)
    return OK


def _reference_in_tdata_frame(curve, polygon: Polygon) -> np.ndarray:
    """Reference outline moved so that s = 0 is the origin with tangent +x."""
    if curve is not None:
        origin = curve.point(0.0)
        d = curve.tangent_at_t(curve.t_of_s(0.0))
        pts = curve.polygon(8192).vertices
    else:
        origin, d, pts = polygon.vertices[0], polygon.directions[0], polygon.vertices
    c, s = np.asarray(d) / np.hypot(*d)
    rot = np.array([[c, s], [-s, c]])
    return (pts - origin) @ rot.T


def cmd_reconstruct_tlike(args) -> int:
    step = args.step
    if step is None or not step > 0:
        raise CliError("--step must be positive", BAD_INPUT)
    try:
        data = read_tdata_csv(args.tdata)
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(f"cannot read {args.tdata}: {exc}", IO_ERROR) from exc
    except errors.TwoArcViolation as exc:
        raise CliError(str(exc), BAD_INPUT) from exc
    except ValueError as exc:
        raise CliError(f"corrupt T-data CSV: {exc}", IO_ERROR) from exc
    try:
        pts = reconstruct_tlike(data, step, args.length)
    except (errors.FrameLoss, errors.TwoArcViolation, errors.AngleSolveFailed, errors.NoSolution) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return FAIL
    summary = {"points": len(pts)}
    layers = [Layer(pts, "reconstruction", closed=False)]
    if args.kind:
        curve, polygon = _load_shape(_shape_spec(args))
        ref = _reference_in_tdata_frame(curve, polygon)
        summary["max_deviation"] = max_deviation(pts, validate_polygon(ref))
        layers.insert(0, Layer(ref, "reference", dashed=True, color="gray"))
    print(json.dumps(summary))
    if args.svg:
        write_svg(args.svg, render(layers))
    if args.out:
        np.savetxt(args.out, pts, delimiter=",", header="x,y", comments="", fmt="%.17g")
    return OK


def cmd_tdata(args) -> int:
    r = _positive(args.r, "--r")
    curve, polygon = _load_shape(_shape_spec(args))
    data = tlike_data(curve if curve is not None else polygon, r, 0.0, n_boundary=args.n, n_radial=args.n_radial)
    if not args.out:
        raise CliError("--out is required", BAD_INPUT)
    write_tdata_csv(args.out, data)
    return OK


def _parse_s_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise CliError(f"bad --s list: {exc}", BAD_INPUT) from exc


def cmd_curvature(args) -> int:
    curve, polygon = _load_shape(_shape_spec(args))
    shape = curve if curve is not None else polygon
    if args.all:
        s_list = _samples(curve, polygon, args.n).tolist()
    elif args.s:
        s_list = _parse_s_list(args.s)
    else:
        raise CliError("give --s or --all", BAD_INPUT)
    radii = sorted(_parse_s_list(args.radii), reverse=True)
    if args.method == "small_r_limit":
        if len(radii) < 3 or radii[-1] <= 0:
            raise CliError("--radii needs at least three positive radii", BAD_INPUT)
    else:
        r = _positive(args.r, "--r")
    rows = []
    for s in s_list:
        try:
            if args.method == "small_r_limit":
                rows.append(curvature_small_r(shape, s, radii))
            else:
                rows.extend(curvature_exit_points(shape, s, r))
        except (errors.VertexPoint, errors.SingularSystem, errors.TwoArcViolation) as exc:
            which = "center" if args.method == "small_r_limit" else "both"
            rows.append((s, args.method, which, type(exc).__name__))
    if args.out:
        write_curvature_csv(args.out, rows)
    else:
        sys.stdout.write(curvature_rows_to_csv(rows))
    return OK


def cmd_fit(args) -> int:
    try:
        cfg = read_fit_config(args.config)
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(f"cannot read {args.config}: {exc}", IO_ERROR) from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"corrupt config JSON: {exc}", IO_ERROR) from exc
    except (ValueError, TypeError) as exc:
        raise CliError(f"invalid config: {exc}", BAD_INPUT) from exc
    seed = cfg["seed"] if args.seed is None else args.seed
    r = float(cfg["r"])
    target = _read_signature(args.target, r)
    if len(target) != cfg["N"]:
        raise CliError(f"target has {len(target)} rows, config N={cfg['N']}", BAD_INPUT)
    target_poly = _read_polygon(args.target_polygon) if args.target_polygon else None
    out = Path(args.out or ".")
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create {out}: {exc}", IO_ERROR) from exc
    mean_g = float(np.mean(target.g))
    summary = []

    def on_level(m, state):
        shape = state.incumbent
        poly = fourier_to_polygon(shape)
        stem = out / f"level_{m:02d}"
        write_shape_json(stem.with_suffix(".json"), shape, state.incumbent_value)
        write_signature_csv(f"{stem}_signature.csv", signature(poly, r, poly.s_vertices))
        pts = poly.vertices
        row = {
            "m": m,
            "objective": state.incumbent_value,
            "rms_misfit": rms_misfit(state.incumbent_value, target),
            "relative_misfit": rms_misfit(state.incumbent_value, target) / mean_g,
            "evaluations": state.evaluation_count,
        }
        if target_poly is not None:
            if target_poly.n == poly.n:
                transform, residual = rigid_align(pts, target_poly)
                pts = transform.apply(pts)
                row["align_residual"] = residual
            write_svg(f"{stem}.svg", overlay(target_poly.vertices, pts, result_label=f"fit m={m}"))
        else:
            write_svg(f"{stem}.svg", render([Layer(pts, f"fit m={m}")]))
        summary.append(row)
        print(json.dumps(row), flush=True)

    try:
        coarse_to_fine_fit(target, cfg["m_max"], cfg["budget_per_level"], seed, N=cfg["N"], workers=args.workers, callback=on_level)
    except errors.NoSolution as exc:
        print(f"NoSolution: {exc}", file=sys.stderr)
        return FAIL
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return OK


def cmd_align(args) -> int:
    a, b = _read_polygon(args.a), _read_polygon(args.b)
    try:
        transform, residual = rigid_align(a, b)
    except errors.VertexCountMismatch as exc:
        raise CliError(str(exc), BAD_INPUT) from exc
    print(f"{residual:.17g}")
    if args.out:
        write_polygon_json(args.out, transform.apply(a.vertices))
    return OK


# parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="areasig", description="Integral area invariant signatures of planar shapes.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, r_help="disk radius"):
        p.add_argument("--r", type=float, help=r_help)
        p.add_argument("--n", type=int, default=512, help="sample count")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out")

    p = sub.add_parser("signature", help="sampled g and its first partials as CSV")
    _add_shape_args(p)
    common(p)
    p.set_defaults(func=cmd_signature)

    p = sub.add_parser("check", help="TCGL check with a JSON report")
    _add_shape_args(p)
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reconstruct-poly", help="polygon from its signature CSV")
    p.add_argument("--sig", required=True)
    p.add_argument("--svg")
    p.add_argument("--target", help="polygon JSON drawn dashed under the reconstruction")
    common(p)
    p.set_defaults(func=cmd_reconstruct_poly)

    p = sub.add_parser("reconstruct-tlike", help="march a curve from T-data CSV")
    p.add_argument("--tdata", required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--length", type=float, help="perimeter, if known")
    p.add_argument("--svg")
    _add_shape_args(p, required=False)
    common(p)
    p.set_defaults(func=cmd_reconstruct_tlike)

    p = sub.add_parser("tdata", help="write T-data CSV for a shape")
    _add_shape_args(p)
    common(p, "r_hat")
    p.add_argument("--n-radial", type=int, default=256)
    p.set_defaults(func=cmd_tdata)

    p = sub.add_parser("curvature", help="curvature estimates as CSV")
    _add_shape_args(p)
    p.add_argument("--s", help="comma-separated arc-length positions")
    p.add_argument("--all", action="store_true", help="use --n uniform samples")
    p.add_argument("--method", choices=("small_r_limit", "exit_point"), default="small_r_limit")
    p.add_argument("--radii", default="0.1,0.05,0.025", help="radii for the small-r limit")
    common(p)
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("fit", help="coarse-to-fine Fourier fit to a target signature")
    p.add_argument("--target", required=True, help="target signature CSV")
    p.add_argument("--config", required=True, help="fit config JSON")
    p.add_argument("--target-polygon", help="polygon JSON of the target, for overlays and alignment")
    p.add_argument("--workers", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("align", help="rigid alignment residual of two polygons")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    common(p)
    p.set_defaults(func=cmd_align)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return BAD_INPUT if exc.code else OK
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return IO_ERROR
    except (ValueError, errors.AreaSignatureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
