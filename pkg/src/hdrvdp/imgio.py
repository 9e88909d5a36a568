"""Reading frames and writing heat maps.

PNG decoding goes through OpenCV, which keeps 16-bit RGB intact. The PNG
header is parsed by hand first so that bit depth and colour type can be
validated before decoding (OpenCV silently expands palettes and grey).

Heat-map colour ramp
--------------------
A map value ``v`` in [0, 1] is quantised to level ``i = round(255 * v)``
and drawn with the RGB colour::

    (R, G, B) = (i, 255 - |2 i - 255|, 255 - i)

so 0 is pure blue (0, 0, 255), 0.5 is (128, 254, 127) and 1 is pure red
(255, 0, 0). The red channel equals the level, so the ramp is invertible
for all 256 levels (:func:`decode_heatmap`).
"""

from __future__ import annotations

import os
import re
import struct
from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np

ENCODINGS = ("pq", "srgb", "linear")
FRAME_PATTERN = re.compile(r"^frame_(\d{6})\.png$")

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_PNG_RGB = 2


class ImageIOError(OSError):
    pass


@dataclass
class DisplayEncodedFrame:
    """An RGB frame as it is sent to the display.

    ``data`` has shape (height, width, 3). For ``pq`` and ``srgb`` frames
    the values are normalised to [0, 1]; ``linear`` frames hold absolute
    cd/m^2.
    """

    data: np.ndarray
    encoding: str

    def __post_init__(self):
        if self.encoding not in ENCODINGS:
            raise ValueError(f"unknown encoding {self.encoding!r}; expected one of {ENCODINGS}")
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 3 or self.data.shape[2] != 3:
            raise ValueError(f"expected an (H, W, 3) array, got shape {self.data.shape}")
        if self.data.shape[0] == 0 or self.data.shape[1] == 0:
            raise ValueError("frame must be non-empty")

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


def _png_header(path):
    with open(path, "rb") as fh:
        head = fh.read(33)
    if len(head) < 33 or head[:8] != _PNG_SIGNATURE or head[12:16] != b"IHDR":
        raise ImageIOError(f"{path}: not a PNG file")
    width, height, bit_depth, color_type = struct.unpack(">IIBB", head[16:26])
    return width, height, bit_depth, color_type


def _load_png(path):
    _, _, bit_depth, color_type = _png_header(path)
    if bit_depth not in (8, 16):
        raise ImageIOError(f"{path}: unsupported bit depth {bit_depth} (need 8 or 16)")
    if color_type != _PNG_RGB:
        channels = {0: 1, 3: 1, 4: 2, 6: 4}.get(color_type, "?")
        raise ImageIOError(f"{path}: expected 3 channels (RGB), found {channels}")
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise ImageIOError(f"{path}: could not decode")
    scale = 65535.0 if bit_depth == 16 else 255.0
    return raw[..., ::-1].astype(np.float64) / scale


def _load_exr(path):
    try:
        import OpenEXR
    except ImportError as exc:  # pragma: no cover
        raise ImageIOError("reading OpenEXR files requires the OpenEXR package") from exc
    try:
        with OpenEXR.File(str(path)) as f:
            channels = f.channels()
            if "RGB" in channels:
                rgb = np.asarray(channels["RGB"].pixels, dtype=np.float64)
            elif all(c in channels for c in "RGB"):
                rgb = np.stack([np.asarray(channels[c].pixels, dtype=np.float64) for c in "RGB"], -1)
            else:
                raise ImageIOError(f"{path}: expected R, G, B channels, found {sorted(channels)}")
    except ImageIOError:
        raise
    except Exception as exc:
        raise ImageIOError(f"{path}: could not read OpenEXR file ({exc})") from exc
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ImageIOError(f"{path}: expected 3 channels")
    return rgb


def load_image(path, encoding="pq") -> DisplayEncodedFrame:
    """Load an 8/16-bit RGB PNG, or an OpenEXR file when ``encoding='linear'``."""
    path = Path(path)
    if encoding not in ENCODINGS:
        raise ValueError(f"unknown encoding {encoding!r}")
    if not path.is_file():
        raise ImageIOError(f"{path}: no such file")
    if encoding == "linear":
        data = _load_exr(path)
    else:
        data = _load_png(path)
    return DisplayEncodedFrame(data, encoding)


def list_frames(directory):
    """Return the ``frame_%06d.png`` files of a directory in frame order."""
    directory = Path(directory)
    if not directory.is_dir():
        raise ImageIOError(f"{directory}: not a directory")
    found = []
    for name in os.listdir(directory):
        m = FRAME_PATTERN.match(name)
        if m:
            found.append((int(m.group(1)), directory / name))
    if not found:
        raise ImageIOError(f"{directory}: no frame_%06d.png files")
    return [p for _, p in sorted(found)]


def save_png(data, path, bit_depth=16):
    """Write a normalised (H, W, 3) RGB array as a PNG. Used to prepare inputs."""
    data = np.clip(np.asarray(data, dtype=np.float64), 0.0, 1.0)
    if bit_depth == 16:
        raw = np.round(data * 65535).astype(np.uint16)
    elif bit_depth == 8:
        raw = np.round(data * 255).astype(np.uint8)
    else:
        raise ValueError("bit_depth must be 8 or 16")
    if not cv2.imwrite(str(path), raw[..., ::-1]):
        raise ImageIOError(f"{path}: could not write")


HEATMAP_RAMP = np.stack(
    [
        np.arange(256),
        255 - np.abs(2 * np.arange(256) - 255),
        255 - np.arange(256),
    ],
    axis=1,
).astype(np.uint8)


def heatmap_colors(values):
    """Map values in [0, 1] to ramp colours, shape (..., 3) uint8 RGB."""
    values = np.asarray(values, dtype=np.float64)
    if np.any(~np.isfinite(values)) or values.min(initial=0) < 0 or values.max(initial=0) > 1:
        raise ValueError("heat-map values must lie in [0, 1]")
    return HEATMAP_RAMP[np.round(values * 255).astype(np.intp)]


def write_heatmap(values, path):
    rgb = heatmap_colors(values)
    try:
        ok = cv2.imwrite(str(path), np.ascontiguousarray(rgb[..., ::-1]))
    except cv2.error as exc:
        raise ImageIOError(f"{path}: could not write heat map ({exc})") from exc
    if not ok:
        raise ImageIOError(f"{path}: could not write heat map")
    return Path(path)


def decode_heatmap(path):
    """Recover the quantised levels (0..255) of a heat map written by :func:`write_heatmap`."""
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise ImageIOError(f"{path}: could not read heat map")
    rgb = raw[..., ::-1]
    levels = rgb[..., 0].astype(np.intp)
    if not np.array_equal(HEATMAP_RAMP[levels], rgb):
        raise ImageIOError(f"{path}: pixels do not belong to the heat-map ramp")
    return levels
