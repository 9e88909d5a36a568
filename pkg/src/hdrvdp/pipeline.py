"""End-to-end evaluation of a test/reference pair and of frame sequences."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .csf import band_difference, normalize_by_csf
from .display import apply_display_model
from .heads import CivdmResult, civdm, detection_probability, quality_jod, visibility_map
from .imgio import DisplayEncodedFrame, load_image
from .optics import OpticsConfig, retinal_response
from .pyramid import decompose

VIDEO_TASKS = ("quality", "detection")
MAP_TASKS = ("side-by-side", "flicker")


class TaskError(ValueError):
    pass


class NumericError(ArithmeticError):
    pass


@dataclass
class TaskResult:
    """Outcome of one task.

    ``payload`` is the JOD score (quality), the detection probability
    (detection), a visibility map (side-by-side, flicker) or a
    :class:`~hdrvdp.heads.CivdmResult` (civdm). Video runs also fill
    ``per_frame`` and ``frame_indices``.
    """

    task: str
    payload: object
    per_frame: list = field(default_factory=list)
    frame_indices: list = field(default_factory=list)
    bands: object = None

    def __post_init__(self):
        if self.task in VIDEO_TASKS:
            ok = isinstance(self.payload, float)
        elif self.task in MAP_TASKS:
            ok = isinstance(self.payload, np.ndarray)
        else:
            ok = isinstance(self.payload, CivdmResult)
        if not ok:
            raise TaskError(f"payload of type {type(self.payload).__name__} does not fit task {self.task!r}")

    @property
    def score(self):
        return self.payload if self.task in VIDEO_TASKS else None

    def maps(self):
        if self.task in MAP_TASKS:
            return {"visibility": self.payload}
        if self.task == "civdm":
            return self.payload.as_dict()
        return {}


def _band_pyramid(frame, config, calib):
    radiance = apply_display_model(frame, config.display)
    optics = OpticsConfig(glare_mode=config.glare_mode, age=config.age, ppd=config.ppd)
    retina = retinal_response(radiance, optics, calib)
    pyr = decompose(retina.response, config.ppd, int(calib.pyramid_params["orientations"]))
    return normalize_by_csf(pyr, retina.adaptation_luminance, calib.csf_params)


def _check_finite(values, what):
    if not np.all(np.isfinite(values)):
        raise NumericError(f"non-finite values in {what}")


def run_task(test: DisplayEncodedFrame, reference: DisplayEncodedFrame, config, calib, keep_bands=False):
    """Run the full model on one pair of frames."""
    if test.data.shape != reference.data.shape:
        raise TaskError(f"test {test.data.shape[:2]} and reference {reference.data.shape[:2]} differ in size")
    if calib.task_name != config.task:
        raise TaskError(f"calibration is for task {calib.task_name!r}, run is for {config.task!r}")

    t = _band_pyramid(test, config, calib)
    r = _band_pyramid(reference, config, calib)
    psych = calib.psychometric_params

    if config.task == "civdm":
        result = civdm(t, r, psych)
        for name, plane in result.as_dict().items():
            _check_finite(plane, f"{name} map")
        return TaskResult(config.task, result, bands=(t, r) if keep_bands else None)

    diff = band_difference(t, r, calib.masking_params)
    if config.task == "quality":
        payload = quality_jod(diff, calib.pooling_params, calib.jod_regression)
    elif config.task == "detection":
        payload = detection_probability(diff, psych, bool(calib.pooling_params["spatial_max"]))
    else:
        payload = visibility_map(diff, psych)
    _check_finite(payload, "task output")
    return TaskResult(config.task, payload, bands=diff if keep_bands else None)


def select_frames(count, step):
    return list(range(0, count, step))


def _as_frame(item, encoding):
    if isinstance(item, DisplayEncodedFrame):
        return item
    path = Path(item)
    return load_image(path, "linear" if path.suffix.lower() == ".exr" else encoding)


def run_video(test_frames, reference_frames, config, calib, workers=1):
    """Evaluate every ``frame_step``-th frame and average the scores.

    Frames may be :class:`DisplayEncodedFrame` objects or paths (loaded on
    demand). Frames 0, step, 2*step, ... are used; the score is their
    arithmetic mean. Results are collected in frame order whatever the
    number of workers, so serial and parallel runs agree bit for bit.
    """
    if config.task not in VIDEO_TASKS:
        raise TaskError(f"video evaluation supports {VIDEO_TASKS}, not {config.task!r}")
    test_frames = list(test_frames)
    reference_frames = list(reference_frames)
    if len(test_frames) != len(reference_frames):
        raise TaskError(f"{len(test_frames)} test frames but {len(reference_frames)} reference frames")
    indices = select_frames(len(test_frames), config.frame_step)
    if not indices:
        raise TaskError("no frames selected")

    enc = config.frame_encoding

    def one(i):
        t = _as_frame(test_frames[i], enc)
        r = _as_frame(reference_frames[i], enc)
        return run_task(t, r, config, calib).payload

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_frame = list(pool.map(one, indices))
    else:
        per_frame = [one(i) for i in indices]
    score = float(np.mean(per_frame))
    return TaskResult(config.task, score, per_frame=per_frame, frame_indices=indices)


def result_document(result: TaskResult, config, map_paths=None):
    doc = {
        "task": result.task,
        "per_frame": [float(v) for v in result.per_frame],
        "frame_indices": list(result.frame_indices),
        "maps": {k: str(v) for k, v in (map_paths or {}).items()},
        "config_echo": config.to_dict(),
    }
    if result.score is not None:
        doc["score"] = float(result.score)
    return doc


def result_to_json(result: TaskResult, config, map_paths=None) -> str:
    return json.dumps(result_document(result, config, map_paths), indent=2, sort_keys=True)
