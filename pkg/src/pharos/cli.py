"""Command-line front end.

Exit codes: 0 success, 2 usage or invalid parameters, 3 input/IO failures.
Data goes to stdout (or ``-o PATH``); diagnostics go to stderr, filtered by
the ``PHAROS_LOG`` environment variable (error, warn or info).
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys

from . import detection, instructions, route, terrain, visibility
from .errors import PharosError
from .geodesy import GeoPoint

log = logging.getLogger("pharos")

EXIT_USAGE = 2
EXIT_INPUT = 3

_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "warning": logging.WARNING,
               "info": logging.INFO}


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


def _add_output(p):
    p.add_argument("-o", "--output", metavar="PATH", help="write data here instead of stdout")


def _add_landmark(p, need_height):
    p.add_argument("--landmark-lat", type=float, help="landmark latitude (degrees)")
    p.add_argument("--landmark-lon", type=float, help="landmark longitude (degrees)")
    p.add_argument("--landmark-height", type=float, required=need_height,
                   default=None if need_height else 1.0, help="landmark height above its base (m)")
    p.add_argument("--landmark-base-elev", type=float, default=None,
                   help="elevation of the landmark base (m); default: terrain height there, else 0")
    p.add_argument("--landmark-name", default="the landmark", help="name used in instructions")
    p.add_argument("--landmark-id", default="landmark")


def _add_grid(p):
    p.add_argument("--radius", type=float, default=2000.0, help="sampling radius (m)")
    p.add_argument("--spacing", type=float, default=100.0, help="lattice spacing (m)")
    p.add_argument("--clip", choices=[c.value for c in visibility.Clip], default="square")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pharos", description="Landmark visibility maps and landmark-enriched navigation instructions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("grid", help="sampling lattice around a point as GeoJSON")
    p.add_argument("--lat", "--landmark-lat", dest="landmark_lat", type=float, required=True)
    p.add_argument("--lon", "--landmark-lon", dest="landmark_lon", type=float, required=True)
    _add_grid(p)
    _add_output(p)

    p = sub.add_parser("viewshed", help="visibility map from a terrain height grid")
    p.add_argument("--terrain", required=True, metavar="ASC", help="ESRI ASCII grid")
    _add_landmark(p, need_height=True)
    _add_grid(p)
    p.add_argument("--eye-height", type=float, default=visibility.DEFAULT_EYE_HEIGHT_M)
    _add_output(p)

    p = sub.add_parser("ingest", help="visibility map from a classification manifest CSV")
    p.add_argument("--manifest", required=True, metavar="CSV")
    p.add_argument("--landmark-id", default="landmark")
    p.add_argument("--spacing", type=float, default=100.0,
                   help="declared sample spacing (m), sets the lookup radius")
    _add_output(p)

    p = sub.add_parser("instructions", help="instruction sequence (JSON Lines) for a route")
    p.add_argument("--route", required=True, metavar="PATH", help="GeoJSON or GPX route")
    p.add_argument("--map", metavar="GEOJSON", help="visibility map (not needed with --plain-tbt)")
    _add_landmark(p, need_height=False)
    p.add_argument("--trigger-offset", type=float, default=instructions.DEFAULT_TRIGGER_OFFSET_M)
    p.add_argument("--plain-tbt", action="store_true",
                   help="omit every landmark hint (turn-by-turn baseline)")
    _add_output(p)

    p = sub.add_parser("eval", help="precision/recall/f1 of predictions against truth")
    p.add_argument("--truth", required=True, metavar="CSV", help="image_id,truth")
    p.add_argument("--predictions", required=True, metavar="CSV",
                   help="image_id,predicted (true/false or a score)")
    p.add_argument("--threshold", type=float, default=0.5,
                   help="score threshold for numeric predictions (inclusive)")
    _add_output(p)
    return parser


def _require(cond, flag, message):
    if not cond:
        raise UsageError(f"{flag} {message}")


def _finite(v):
    return v is not None and math.isfinite(v)


def _validate(args):
    if hasattr(args, "radius"):
        _require(_finite(args.radius) and args.radius > 0, "--radius", "must be > 0")
    if hasattr(args, "spacing"):
        _require(_finite(args.spacing) and args.spacing > 0, "--spacing", "must be > 0")
        if hasattr(args, "radius"):
            _require(args.spacing <= args.radius, "--spacing", "must not exceed --radius")
    if args.command in ("grid", "viewshed", "instructions"):
        _require(args.landmark_lat is not None, "--landmark-lat", "is required")
        _require(args.landmark_lon is not None, "--landmark-lon", "is required")
        _require(_finite(args.landmark_lat) and -90 <= args.landmark_lat <= 90,
                 "--landmark-lat", "must lie in [-90, 90]")
        _require(_finite(args.landmark_lon), "--landmark-lon", "must be finite")
    if hasattr(args, "landmark_height"):
        _require(_finite(args.landmark_height) and args.landmark_height > 0,
                 "--landmark-height", "must be > 0")
        _require(args.landmark_name != "", "--landmark-name", "must be non-empty")
        if args.landmark_base_elev is not None:
            _require(_finite(args.landmark_base_elev), "--landmark-base-elev", "must be finite")
    if hasattr(args, "eye_height"):
        _require(_finite(args.eye_height) and args.eye_height >= 0, "--eye-height", "must be >= 0")
    if hasattr(args, "trigger_offset"):
        _require(_finite(args.trigger_offset) and args.trigger_offset >= 0,
                 "--trigger-offset", "must be >= 0")
        _require(args.plain_tbt or args.map, "--map", "is required unless --plain-tbt is given")
    if hasattr(args, "threshold"):
        _require(_finite(args.threshold) and 0 <= args.threshold <= 1,
                 "--threshold", "must lie in [0, 1]")


def _read(path):
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _emit(args, text):
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {args.output}: {exc.strerror}") from None
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _landmark(args, grid=None):
    loc = GeoPoint(args.landmark_lat, args.landmark_lon)
    base = args.landmark_base_elev
    if base is None:
        base = 0.0
        if grid is not None:
            h = terrain.sample_height(grid, loc)
            if isinstance(h, float):
                base = h
    return visibility.Landmark(args.landmark_id, args.landmark_name, loc, base,
                               args.landmark_height)


def cmd_grid(args):
    pts = visibility.generate_grid(GeoPoint(args.landmark_lat, args.landmark_lon),
                                   args.radius, args.spacing, args.clip)
    _emit(args, visibility.dumps_geojson(visibility.grid_to_geojson(pts)))


def cmd_viewshed(args):
    grid = terrain.load_ascii_grid(_read(args.terrain))
    vmap = visibility.build_visibility_map_viewshed(
        _landmark(args, grid), grid, args.radius, args.spacing, args.clip, args.eye_height)
    log.info("viewshed map: %d samples", len(vmap.samples))
    _emit(args, visibility.dumps_geojson(visibility.map_to_geojson(vmap)))


def cmd_ingest(args):
    records = visibility.read_classification_manifest(_read(args.manifest))
    vmap = visibility.ingest_classifications(records, args.landmark_id, args.spacing)
    _emit(args, visibility.dumps_geojson(visibility.map_to_geojson(vmap)))


def cmd_instructions(args):
    r = route.parse_route(_read(args.route))
    vmap = None if args.plain_tbt else visibility.map_from_geojson(_read(args.map))
    seq = instructions.generate_route_instructions(
        r, _landmark(args), vmap, args.trigger_offset, landmark_phrases=not args.plain_tbt)
    _emit(args, instructions.dumps_jsonl(seq))


def cmd_eval(args):
    truth = detection.read_truth_csv(_read(args.truth))
    preds = detection.read_predictions_csv(_read(args.predictions), args.threshold)
    counts = detection.evaluate(detection.align_records(preds, truth))
    _emit(args, counts.report_json())


COMMANDS = {"grid": cmd_grid, "viewshed": cmd_viewshed, "ingest": cmd_ingest,
            "instructions": cmd_instructions, "eval": cmd_eval}


def _configure_logging():
    level = _LOG_LEVELS.get(os.environ.get("PHAROS_LOG", "warn").strip().lower(), logging.WARNING)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("pharos: %(levelname)s: %(message)s"))
    root = logging.getLogger("pharos")
    root.handlers[:] = [handler]
    root.setLevel(level)
    root.propagate = False


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _validate(args)
    except UsageError as exc:
        print(f"pharos {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        COMMANDS[args.command](args)
    except (InputError, PharosError, UnicodeDecodeError) as exc:
        msg = " ".join(str(exc).split())
        print(f"pharos {args.command}: error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return EXIT_INPUT
    return 0


if __name__ == "__main__":
    sys.exit(main())
