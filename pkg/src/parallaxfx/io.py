"""File ingestion and output serialization.

Depth maps are min-max normalized per file to nearness in [0, 1]; pass
``invert=True`` for maps where larger values mean farther away. Label maps use
0 for unlabeled pixels and value ``k`` for instance ``k``.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import EmptyInputError, FormatError, InputError, OutputError
from .layering import Instance, InstanceSet

__all__ = [
    "load_rgb",
    "load_depth",
    "read_pfm",
    "write_pfm",
    "load_labelmap",
    "write_png",
    "write_frames",
    "RunManifest",
    "write_manifest",
    "read_manifest",
    "write_layers_debug",
    "file_digest",
    "DEBUG_FILES",
]

log = logging.getLogger(__name__)

# fixed encoder settings so equal pixels give equal bytes
PNG_OPTIONS = {"compress_level": 6, "optimize": False}
MASK_SUFFIXES = (".png", ".pgm", ".pbm")
DEBUG_FILES = ("foreground.png", "background_with_hole.png", "hole_mask.png", "background_inpainted.png")


def _open(path) -> Image.Image:
    path = Path(path)
    try:
        img = Image.open(path)
        img.load()
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    except (UnidentifiedImageError, OSError, ValueError, SyntaxError) as exc:
        raise InputError(f"{path}: cannot decode image ({exc})") from None
    return img


def load_rgb(path) -> np.ndarray:
    img = _open(path)
    if img.mode in ("RGBA", "LA", "PA") or (img.mode == "P" and "transparency" in img.info):
        log.warning("%s: dropping alpha channel", path)
    if img.mode in ("I;16", "I;16B", "I;16L", "I"):
        arr = np.asarray(img, dtype=np.float64)
        img = Image.fromarray(np.clip(arr / 257.0 + 0.5, 0, 255).astype(np.uint8), "L")
    return np.array(img.convert("RGB"), dtype=np.uint8)


def read_pfm(path) -> np.ndarray:
    """Read a single-channel PFM (``Pf``) into a float64 array, top row first."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from None
    m = re.match(rb"(P[fF])\s+(\d+)\s+(\d+)\s+(\S+)\s", data)
    if m is None:
        raise FormatError(f"{path}: not a PFM file")
    if m.group(1) == b"PF":
        raise FormatError(f"{path}: multi-channel PFM is not a depth map")
    width, height = int(m.group(2)), int(m.group(3))
    try:
        scale = float(m.group(4))
    except ValueError:
        raise FormatError(f"{path}: bad PFM scale line") from None
    dtype = "<f4" if scale < 0 else ">f4"
    body = data[m.end():]
    need = width * height * 4
    if width < 1 or height < 1 or len(body) < need:
        raise InputError(f"{path}: truncated PFM data")
    arr = np.frombuffer(body[:need], dtype=dtype).reshape(height, width)
    return np.flipud(arr).astype(np.float64)


def write_pfm(path, values) -> None:
    arr = np.asarray(values, dtype="<f4")
    if arr.ndim != 2:
        raise OutputError("PFM depth output must be 2-D")
    h, w = arr.shape
    try:
        with open(path, "wb") as fh:
            fh.write(f"Pf\n{w} {h}\n-1.0\n".encode("ascii"))
            fh.write(np.ascontiguousarray(np.flipud(arr)).tobytes())
    except OSError as exc:
        raise OutputError(f"{path}: {exc}") from None


def _gray_values(path) -> np.ndarray:
    img = _open(path)
    if img.mode in ("1", "L", "I", "I;16", "I;16B", "I;16L", "F"):
        return np.asarray(img, dtype=np.float64)
    if img.mode == "LA":
        return np.asarray(img.getchannel("L"), dtype=np.float64)
    raise FormatError(f"{path}: expected a single-channel image, got mode {img.mode}")


def load_depth(path, invert: bool = False) -> np.ndarray:
    path = Path(path)
    if path.suffix.lower() == ".pfm":
        raw = read_pfm(path)
    else:
        raw = _gray_values(path)
    if not np.all(np.isfinite(raw)):
        raise FormatError(f"{path}: depth contains non-finite values")
    lo, hi = raw.min(), raw.max()
    if hi == lo:
        depth = np.full(raw.shape, 0.5)
    else:
        depth = (raw - lo) / (hi - lo)
    return 1.0 - depth if invert else depth


def _labelmap_values(path) -> np.ndarray:
    img = _open(path)
    if img.mode == "P":
        return np.asarray(img, dtype=np.int64)
    if img.mode in ("1", "L", "I", "I;16", "I;16B", "I;16L"):
        return np.asarray(img).astype(np.int64)
    raise FormatError(f"{path}: label map must be an indexed or grayscale image, got mode {img.mode}")


def load_labelmap(path) -> InstanceSet:
    """Instances from a label image, or from a directory of per-instance masks.

    In directory mode ids follow sorted filename order and later masks win
    where masks overlap.
    """
    path = Path(path)
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.suffix.lower() in MASK_SUFFIXES)
        if not files:
            raise EmptyInputError(f"{path}: no mask images in directory")
        labels = None
        for i, f in enumerate(files):
            m = _gray_values(f) > 0
            if labels is None:
                labels = np.full(m.shape, -1, dtype=np.int64)
            elif m.shape != labels.shape:
                raise FormatError(f"{f}: mask size {m.shape} differs from {labels.shape}")
            if np.any(m & (labels >= 0)):
                log.warning("%s overlaps earlier masks; later mask wins", f)
            labels[m] = i
        ids = range(len(files))
        unlabeled = -1
    elif path.exists():
        labels = _labelmap_values(path)
        ids = [int(v) for v in np.unique(labels) if v != 0]
        unlabeled = 0
    else:
        raise InputError(f"{path}: no such file or directory")
    insts = []
    for k in ids:
        if k == unlabeled:
            continue
        m = labels == k
        area = int(np.count_nonzero(m))
        if area:
            insts.append(Instance(int(k), m, area))
    if not insts:
        raise EmptyInputError(f"{path}: no labeled instances")
    return InstanceSet(insts)


def write_png(path, array) -> Path:
    path = Path(path)
    try:
        Image.fromarray(np.ascontiguousarray(array)).save(path, format="PNG", **PNG_OPTIONS)
    except OSError as exc:
        raise OutputError(f"{path}: {exc}") from None
    return path


def write_frames(seq, directory) -> list[Path]:
    """Write ``frame_0001.png`` ... into ``directory``; on failure nothing written is left behind."""
    directory = Path(directory)
    written = []
    try:
        directory.mkdir(parents=True, exist_ok=True)
        for k, frame in enumerate(seq.frames, start=1):
            written.append(write_png(directory / f"frame_{k:04d}.png", frame))
    except (OSError, OutputError) as exc:
        for p in written:
            p.unlink(missing_ok=True)
        if isinstance(exc, OutputError):
            raise
        raise OutputError(f"{directory}: {exc}") from None
    return written


def file_digest(path) -> str:
    """SHA-256 hex of a file, or of a directory's sorted (name, content) pairs."""
    path = Path(path)
    h = hashlib.sha256()
    try:
        if path.is_dir():
            for p in sorted(path.iterdir()):
                if p.is_file():
                    h.update(p.name.encode() + b"\0")
                    h.update(p.read_bytes())
        else:
            h.update(path.read_bytes())
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from None
    return h.hexdigest()


@dataclass
class RunManifest:
    config: dict
    motion: dict
    inputs: dict
    offsets: list
    ranking: list
    fallback_segmenter: bool
    version: str
    options: dict = field(default_factory=dict)
    viewport: dict = field(default_factory=dict)

    def __post_init__(self):
        self.offsets = [list(map(float, pair)) for pair in self.offsets]
        if "n" in self.motion and len(self.offsets) != self.motion["n"]:
            raise ValueError(f"{len(self.offsets)} offsets for {self.motion['n']} frames")

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        return cls(**json.loads(text))


def write_manifest(manifest: RunManifest, path) -> Path:
    path = Path(path)
    try:
        path.write_text(manifest.to_json())
    except OSError as exc:
        raise OutputError(f"{path}: {exc}") from None
    return path


def read_manifest(path) -> RunManifest:
    path = Path(path)
    try:
        return RunManifest.from_json(path.read_text())
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    except (ValueError, TypeError) as exc:
        raise FormatError(f"{path}: malformed manifest ({exc})") from None


def write_layers_debug(layers, inpainted, directory) -> list[Path]:
    directory = Path(directory)
    try:
        os.makedirs(directory, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"{directory}: {exc}") from None
    images = (
        layers.foreground,
        layers.background_with_hole,
        np.where(layers.hole, 255, 0).astype(np.uint8),
        inpainted,
    )
    return [write_png(directory / name, img) for name, img in zip(DEBUG_FILES, images)]
