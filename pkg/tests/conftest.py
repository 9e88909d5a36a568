from pathlib import Path

import numpy as np
import pytest

from hdrvdp.display import pq_eotf_inverse_check
from hdrvdp.imgio import DisplayEncodedFrame

DATA = Path(__file__).parent / "data"

_acceptance_lines = []


def pq_frame(luminance):
    """Achromatic PQ frame showing the given luminance plane (cd/m^2)."""
    lum = np.clip(np.asarray(luminance, dtype=np.float64), 0.0, 10000.0)
    return DisplayEncodedFrame(pq_eotf_inverse_check(np.repeat(lum[..., None], 3, axis=-1)), "pq")


@pytest.fixture
def acceptance_report():
    def report(criterion, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
        _acceptance_lines.append(line)
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
