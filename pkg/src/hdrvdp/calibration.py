"""Per-task calibration files.

A calibration file is an INI document with one section per parameter
group. Every key listed in :data:`SCHEMA` must be present; unknown keys
and sections are accepted with a warning so newer files load in older
code. Shipped defaults live in ``hdrvdp/calib/<task>.cfg``.

The shipped constants are uncalibrated approximations chosen for
plausible behaviour; replace them when fitted values are available.
"""

from __future__ import annotations

import configparser
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

TASKS = ("quality", "side-by-side", "flicker", "detection", "civdm")

SCHEMA = {
    "csf_params": (
        "peak_sensitivity",
        "peak_frequency",
        "low_freq_slope",
        "high_freq_slope",
        "lum_saturation",
        "lum_exponent",
        "peak_freq_lum_exponent",
    ),
    "masking_params": (
        "p",
        "q",
        "gamma",
        "sigma",
        "self_weight",
        "orientation_weight",
        "scale_weight",
        "pool_sigma",
        "mutual",
    ),
    "pooling_params": ("kappa", "band_weight", "spatial_max"),
    "psychometric_params": ("alpha", "beta"),
    "jod_regression": ("a", "b"),
    "optics_params": (
        "mtf_a1",
        "mtf_a2",
        "mtf_a3",
        "mtf_b1",
        "mtf_b2",
        "mtf_b3",
        "pigmentation",
        "pupil_field_deg",
        "pupil_reference_age",
        "adaptation_sigma_deg",
        "response_compression",
        "response_knee",
    ),
    "pyramid_params": ("orientations",),
}


class CalibrationError(ValueError):
    pass


@dataclass
class CalibrationSet:
    task_name: str
    csf_params: dict = field(default_factory=dict)
    masking_params: dict = field(default_factory=dict)
    pooling_params: dict = field(default_factory=dict)
    psychometric_params: dict = field(default_factory=dict)
    jod_regression: dict = field(default_factory=dict)
    optics_params: dict = field(default_factory=dict)
    pyramid_params: dict = field(default_factory=dict)

    def to_dict(self):
        out = {"task_name": self.task_name}
        for section in SCHEMA:
            out[section] = dict(getattr(self, section))
        return out


def parse_calibration(text, source="<string>") -> CalibrationSet:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=str(source))
    except configparser.Error as exc:
        raise CalibrationError(f"{source}: {exc}") from exc

    if not parser.has_option("task", "name"):
        raise CalibrationError(f"{source}: missing key 'task.name'")
    task = parser.get("task", "name").strip()
    if task not in TASKS:
        raise CalibrationError(f"{source}: unknown task name {task!r}; expected one of {TASKS}")

    for section in parser.sections():
        if section != "task" and section not in SCHEMA:
            warnings.warn(f"{source}: ignoring unknown section [{section}]", UserWarning, stacklevel=2)
    for key in parser.options("task"):
        if key != "name":
            warnings.warn(f"{source}: ignoring unknown key 'task.{key}'", UserWarning, stacklevel=2)

    values = {}
    for section, keys in SCHEMA.items():
        got = {}
        for key in keys:
            if not parser.has_option(section, key):
                raise CalibrationError(f"{source}: missing key '{section}.{key}'")
            raw = parser.get(section, key)
            try:
                got[key] = float(raw)
            except ValueError:
                raise CalibrationError(
                    f"{source}: malformed number for '{section}.{key}': {raw!r}"
                ) from None
        if parser.has_section(section):
            for key in parser.options(section):
                if key not in keys:
                    warnings.warn(
                        f"{source}: ignoring unknown key '{section}.{key}'", UserWarning, stacklevel=2
                    )
        values[section] = got
    return CalibrationSet(task_name=task, **values)


def load_calibration(path) -> CalibrationSet:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CalibrationError(f"{path}: cannot read calibration file ({exc})") from exc
    return parse_calibration(text, source=path)


def default_calibration_path(task):
    if task not in TASKS:
        raise CalibrationError(f"unknown task name {task!r}")
    return resources.files("hdrvdp") / "calib" / f"{task}.cfg"


def default_calibration(task) -> CalibrationSet:
    path = default_calibration_path(task)
    return parse_calibration(path.read_text(), source=f"calib/{task}.cfg")
