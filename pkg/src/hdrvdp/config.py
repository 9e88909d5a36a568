from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .calibration import TASKS
from .display import DisplayParams
from .optics import GLARE_MODES


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Everything about a run that is not an image or a calibration constant.

    ``ppd`` (pixels per visual degree) has no default: the viewing
    geometry must always be stated. The default observer is 24 years old.
    """

    task: str
    ppd: float
    age: float = 24.0
    display: DisplayParams = field(default_factory=DisplayParams)
    frame_step: int = 30
    glare_mode: str = "mtf"

    def __post_init__(self):
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}; expected one of {TASKS}")
        if self.ppd is None or not self.ppd > 0:
            raise ConfigError("ppd must be given and > 0")
        if self.age < 0:
            raise ConfigError("age must be >= 0")
        if int(self.frame_step) != self.frame_step or self.frame_step < 1:
            raise ConfigError("frame_step must be an integer >= 1")
        if self.glare_mode not in GLARE_MODES:
            raise ConfigError(f"unknown glare mode {self.glare_mode!r}")

    @property
    def frame_encoding(self) -> str:
        return "pq" if self.display.eotf == "pq" else "srgb"

    def to_dict(self):
        return asdict(self)
