import warnings

import pytest

from hdrvdp.calibration import (
    SCHEMA,
    TASKS,
    CalibrationError,
    default_calibration,
    default_calibration_path,
    load_calibration,
)


@pytest.mark.parametrize("task", TASKS)
def test_shipped_files_load(task):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        calib = default_calibration(task)
    assert calib.task_name == task
    for section, keys in SCHEMA.items():
        assert set(getattr(calib, section)) == set(keys)


def _quality_text():
    return default_calibration_path("quality").read_text()


def test_complete_file(tmp_path):
    (tmp_path / "q.cfg").write_text(_quality_text())
    assert load_calibration(tmp_path / "q.cfg").task_name == "quality"


def test_missing_key_is_named(tmp_path):
    text = "\n".join(
        line for line in _quality_text().splitlines() if not line.startswith("beta")
    )
    (tmp_path / "q.cfg").write_text(text)
    with pytest.raises(CalibrationError, match=r"psychometric_params\.beta"):
        load_calibration(tmp_path / "q.cfg")


def test_unknown_key_warns(tmp_path):
    text = _quality_text().replace("[jod_regression]", "[jod_regression]\nc = 3.0")
    (tmp_path / "q.cfg").write_text(text + "\n[future]\nthing = 1\n")
    with pytest.warns(UserWarning) as record:
        calib = load_calibration(tmp_path / "q.cfg")
    messages = " ".join(str(w.message) for w in record)
    assert "jod_regression.c" in messages and "[future]" in messages
    assert "c" not in calib.jod_regression


def test_malformed_number(tmp_path):
    (tmp_path / "q.cfg").write_text(_quality_text().replace("alpha = 1.0", "alpha = one"))
    with pytest.raises(CalibrationError, match="alpha"):
        load_calibration(tmp_path / "q.cfg")


def test_unknown_task(tmp_path):
    (tmp_path / "q.cfg").write_text(_quality_text().replace("name = quality", "name = beauty"))
    with pytest.raises(CalibrationError, match="beauty"):
        load_calibration(tmp_path / "q.cfg")


def test_unreadable(tmp_path):
    with pytest.raises(CalibrationError):
        load_calibration(tmp_path / "none.cfg")
