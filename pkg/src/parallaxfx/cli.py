"""Command-line interface.

    parallaxfx synth --out scene/
    parallaxfx generate scene/image.png scene/depth.pfm --masks scene/labels.png --out frames/
    parallaxfx layers scene/image.png scene/depth.pfm --masks scene/labels.png --out debug/

Exit codes: 0 success, 1 input error, 2 pipeline error, 3 output error.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import sys
from pathlib import Path

from . import __version__, io
from .errors import InputError, OutputError, ParallaxError, PipelineError
from .layering import PipelineConfig
from .motion import Movement, MotionSpec
from .pipeline import animate, build_layers, load_inputs, ranking_rows
from .synth import make_scene, write_scene

log = logging.getLogger("parallaxfx")

EXIT_OK, EXIT_INPUT, EXIT_PIPELINE, EXIT_OUTPUT = 0, 1, 2, 3
RANKING_FILE = "ranking.tsv"
MANIFEST_FILE = "manifest.json"


class StageError(Exception):
    def __init__(self, stage: str, cause: ParallaxError):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ParallaxError as exc:
        raise StageError(name, exc) from exc


def _odd(text: str) -> int:
    v = int(text)
    if v < 1 or v % 2 == 0:
        raise argparse.ArgumentTypeError(f"{text} is not a positive odd integer")
    return v


def _add_pipeline_args(p: argparse.ArgumentParser) -> None:
    d = PipelineConfig()
    p.add_argument("image", help="RGB image (PNG, JPEG or PPM)")
    p.add_argument("depth", help="depth/disparity map (PNG-8/16, PGM or PFM)")
    p.add_argument("--masks", help="label map image or directory of per-instance masks")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--invert-depth", action="store_true", help="input depth grows with distance")
    p.add_argument("--min-area", type=float, default=d.min_relative_area, help="relative area below which objects are background")
    p.add_argument("--join-tolerance", type=float, default=d.join_tolerance)
    p.add_argument("--two-layer", action="store_true", help="split objects at the depth-map median")
    p.add_argument("--inpaint-radius", type=float, default=d.inpaint_radius)
    p.add_argument("--feather", action="store_true", help="soft foreground alpha")
    p.add_argument("--depth-kernel", type=_odd, default=d.depth_kernel)
    p.add_argument("--blur-kernel", type=_odd, default=d.blur_kernel)
    p.add_argument("--dilate-kernel", type=_odd, default=d.dilate_kernel)
    p.add_argument("--threshold", type=float, default=d.binarize_threshold, help="binarization level after blur")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="parallaxfx", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="render a parallax frame sequence")
    _add_pipeline_args(gen)
    m = MotionSpec()
    gen.add_argument("--movement", choices=[mv.value for mv in Movement], default=m.movement.value)
    gen.add_argument("--frames", type=int, default=m.n)
    gen.add_argument("--fore1", type=float, default=m.fore_1)
    gen.add_argument("--back1", type=float, default=m.back_1)
    gen.add_argument("--c-fore", type=float, default=m.c_fore)
    gen.add_argument("--c-back", type=float, default=m.c_back)

    lay = sub.add_parser("layers", help="write intermediate layers and the depth ranking")
    _add_pipeline_args(lay)

    syn = sub.add_parser("synth", help="write a synthetic test scene")
    syn.add_argument("--out", required=True)
    syn.add_argument("--seed", type=int, default=0)
    return parser


def _config(args) -> PipelineConfig:
    return PipelineConfig(
        depth_kernel=args.depth_kernel,
        blur_kernel=args.blur_kernel,
        dilate_kernel=args.dilate_kernel,
        min_relative_area=args.min_area,
        join_tolerance=args.join_tolerance,
        binarize_threshold=args.threshold,
        inpaint_radius=args.inpaint_radius,
        two_layer_mode=args.two_layer,
        feather=args.feather,
    )


def _layers(args):
    config = _stage("config", _config, args)
    image, depth, instances = _stage("load", load_inputs, args.image, args.depth, args.masks, args.invert_depth)
    result = _stage("layering", build_layers, image, depth, instances, config)
    return config, result


def run_generate(args) -> int:
    config, result = _layers(args)
    spec = _stage(
        "motion",
        MotionSpec,
        movement=Movement(args.movement),
        n=args.frames,
        fore_1=args.fore1,
        back_1=args.back1,
        c_fore=args.c_fore,
        c_back=args.c_back,
    )
    seq = _stage("motion", animate, result, spec)
    inputs = {
        "image": _stage("load", io.file_digest, args.image),
        "depth": _stage("load", io.file_digest, args.depth),
        "masks": _stage("load", io.file_digest, args.masks) if args.masks else None,
    }
    motion = dataclasses.asdict(spec)
    motion["movement"] = spec.movement.value
    manifest = io.RunManifest(
        config=dataclasses.asdict(config),
        motion=motion,
        inputs=inputs,
        offsets=seq.offsets,
        ranking=ranking_rows(result.assignment),
        fallback_segmenter=result.fallback_segmenter,
        version=__version__,
        options={"invert_depth": bool(args.invert_depth)},
        viewport=dataclasses.asdict(seq.viewport),
    )
    out = Path(args.out)
    written = _stage("write", io.write_frames, seq, out)
    try:
        io.write_manifest(manifest, out / MANIFEST_FILE)
    except OutputError as exc:
        for p in written:
            p.unlink(missing_ok=True)
        raise StageError("write", exc) from exc
    log.info("wrote %d frames and %s to %s", len(written), MANIFEST_FILE, out)
    return EXIT_OK


def write_ranking(rows, path) -> Path:
    path = Path(path)
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
            writer.writerow(["id", "area", "mean_depth", "layer"])
            for row in rows:
                writer.writerow([row["id"], row["area"], f"{row['mean_depth']:.5f}", row["layer"]])
    except OSError as exc:
        raise OutputError(f"{path}: {exc}") from None
    return path


def run_layers(args) -> int:
    _, result = _layers(args)
    out = Path(args.out)
    written = []
    try:
        written += io.write_layers_debug(result.layers, result.inpainted, out)
        written.append(write_ranking(ranking_rows(result.assignment), out / RANKING_FILE))
    except OutputError as exc:
        for p in written:
            p.unlink(missing_ok=True)
        raise StageError("write", exc) from exc
    for row in ranking_rows(result.assignment):
        log.info("instance %(id)d area %(area)d mean depth %(mean_depth).5f -> %(layer)s", row)
    return EXIT_OK


def run_synth(args) -> int:
    paths = _stage("write", write_scene, make_scene(args.seed), args.out)
    log.info("synthetic scene written: %s", ", ".join(str(p) for p in paths.values()))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    handlers = {"generate": run_generate, "layers": run_layers, "synth": run_synth}
    try:
        return handlers[args.command](args)
    except StageError as exc:
        print(f"parallaxfx {args.command}: error in stage {exc}", file=sys.stderr)
        if isinstance(exc.cause, InputError):
            return EXIT_INPUT
        if isinstance(exc.cause, OutputError):
            return EXIT_OUTPUT
        if isinstance(exc.cause, PipelineError):
            return EXIT_PIPELINE
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
