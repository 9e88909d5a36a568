"""Command-line entry points ``vdp`` and ``vdp-bench``.

Exit codes: 0 success, 1 usage error, 2 I/O or input error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .calibration import TASKS, CalibrationError, default_calibration, load_calibration
from .config import ConfigError, RunConfig
from .display import DisplayModelError, DisplayParams
from .imgio import ImageIOError, list_frames, load_image, write_heatmap
from .optics import GLARE_MODES
from .pipeline import NumericError, TaskError, result_to_json, run_task, run_video
from .stats import BenchmarkRow, plcc, srocc

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3

_DISPLAYS = {"pq": "pq", "gamma": "gamma22_srgb"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_run_options(p, task_required=True):
    p.add_argument("--task", choices=TASKS, required=task_required, default=None if task_required else "quality")
    p.add_argument("--ppd", type=float, required=True, help="pixels per visual degree")
    p.add_argument("--display", choices=sorted(_DISPLAYS), default="pq", help="display EOTF")
    p.add_argument("--peak", type=float, default=100.0, help="peak luminance of a gamma display, cd/m^2")
    p.add_argument("--black", type=float, default=0.0, help="black level of a gamma display, cd/m^2")
    p.add_argument("--ambient", type=float, default=200.0, help="ambient illuminance, lux")
    p.add_argument("--refl", type=float, default=0.005, help="screen reflectivity")
    p.add_argument("--age", type=float, default=24.0, help="observer age, years")
    p.add_argument("--glare", choices=GLARE_MODES, default="mtf")
    p.add_argument("--frame-step", type=int, default=30, help="evaluate every n-th video frame")
    p.add_argument("--calib", type=Path, help="calibration file (default: the shipped one for the task)")
    p.add_argument("--workers", type=int, default=1, help="frames evaluated in parallel")


def build_parser():
    p = _Parser(prog="vdp", description="Predict visible differences between a test and a reference image or video.")
    _add_run_options(p)
    p.add_argument("--test", type=Path, required=True, help="test image, or directory of frame_%%06d.png")
    p.add_argument("--ref", type=Path, required=True, help="reference image, or directory of frames")
    p.add_argument("--out", type=Path, help="JSON result file (default: stdout)")
    p.add_argument("--dump-maps", type=Path, metavar="DIR", help="write heat-map PNGs here")
    return p


def build_bench_parser():
    p = _Parser(prog="vdp-bench", description="Correlate predicted scores with mean opinion scores.")
    _add_run_options(p, task_required=False)
    p.add_argument("--manifest", type=Path, required=True, help="CSV with content_id,test_dir,ref_dir,mos")
    p.add_argument("--out", type=Path, required=True, help="output prefix; writes <out>.csv and <out>.json")
    return p


def _run_config(args):
    display = DisplayParams(
        eotf=_DISPLAYS[args.display],
        peak_luminance=args.peak,
        black_level=args.black,
        ambient=args.ambient,
        reflectivity=args.refl,
    )
    return RunConfig(
        task=args.task,
        ppd=args.ppd,
        age=args.age,
        display=display,
        frame_step=args.frame_step,
        glare_mode=args.glare,
    )


def _calibration(args):
    calib = load_calibration(args.calib) if args.calib else default_calibration(args.task)
    if calib.task_name != args.task:
        raise UsageError(f"calibration file is for task {calib.task_name!r}, not {args.task!r}")
    return calib


def _encoding_for(path, config):
    return "linear" if path.suffix.lower() == ".exr" else config.frame_encoding


def evaluate(test, ref, config, calib, workers=1):
    """Run one image pair or one pair of frame directories."""
    if test.is_dir() != ref.is_dir():
        raise UsageError("--test and --ref must both be files or both be directories")
    if test.is_dir():
        return run_video(list_frames(test), list_frames(ref), config, calib, workers=workers)
    t = load_image(test, _encoding_for(test, config))
    r = load_image(ref, _encoding_for(ref, config))
    return run_task(t, r, config, calib)


def _dump_maps(result, directory):
    directory.mkdir(parents=True, exist_ok=True)
    return {name: write_heatmap(plane, directory / f"{name}.png") for name, plane in result.maps().items()}


def _guarded(fn, prog):
    try:
        return fn()
    except (UsageError, ConfigError) as exc:
        print(f"{prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericError, FloatingPointError) as exc:
        print(f"{prog}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, CalibrationError, DisplayModelError, TaskError, ValueError) as exc:
        print(f"{prog}: error: {exc}", file=sys.stderr)
        return EXIT_IO


def main(argv=None):
    args = build_parser().parse_args(argv)

    def go():
        config = _run_config(args)
        calib = _calibration(args)
        result = evaluate(args.test, args.ref, config, calib, args.workers)
        paths = _dump_maps(result, args.dump_maps) if args.dump_maps else {}
        text = result_to_json(result, config, paths)
        if args.out:
            args.out.write_text(text + "\n")
        else:
            print(text)
        return EXIT_OK

    return _guarded(go, "vdp")


def read_manifest(path):
    """Rows of a benchmark manifest; relative paths resolve against its folder."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"content_id", "test_dir", "ref_dir", "mos"} - set(reader.fieldnames or ())
        if missing:
            raise UsageError(f"{path}: manifest lacks column(s) {sorted(missing)}")
        rows = []
        for rec in reader:
            try:
                mos = float(rec["mos"])
            except ValueError:
                raise UsageError(f"{path}: bad mos value {rec['mos']!r}") from None
            rows.append((rec["content_id"], path.parent / rec["test_dir"], path.parent / rec["ref_dir"], mos))
    if len(rows) < 2:
        raise UsageError(f"{path}: need at least 2 manifest rows")
    return rows


def bench_main(argv=None):
    args = build_bench_parser().parse_args(argv)

    def go():
        config = _run_config(args)
        if config.task not in ("quality", "detection"):
            raise UsageError("benchmarking needs a task with a scalar score (quality or detection)")
        calib = _calibration(args)
        rows = []
        for content_id, test, ref, mos in read_manifest(args.manifest):
            score = evaluate(test, ref, config, calib, args.workers).score
            rows.append(BenchmarkRow(content_id, score, mos))

        out = args.out.with_suffix("") if args.out.suffix in (".csv", ".json") else args.out
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(f"{out}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["content_id", "predicted", "mos"])
            for r in rows:
                w.writerow([r.content_id, repr(r.predicted), repr(r.mos)])
        summary = {
            "srocc": srocc(rows),
            "plcc": plcc(rows),
            "rows": [{"content_id": r.content_id, "predicted": r.predicted, "mos": r.mos} for r in rows],
            "config_echo": config.to_dict(),
        }
        Path(f"{out}.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
        print(f"SROCC {summary['srocc']:.4f}  PLCC {summary['plcc']:.4f}  ({len(rows)} rows)")
        return EXIT_OK

    return _guarded(go, "vdp-bench")
