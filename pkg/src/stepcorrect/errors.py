"""Error taxonomy shared by the library and the CLI exit-code mapping."""

from __future__ import annotations


class StepCorrectError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class InputError(StepCorrectError):
    """Malformed or unreadable input data (files, JSON payloads)."""

    exit_code = 1


class ParameterError(StepCorrectError):
    """Parameter outside its documented admissible range."""

    exit_code = 2


class ScanError(StepCorrectError):
    """A numerical scan failed an internal consistency check."""

    exit_code = 3


class ScheduleSearchError(StepCorrectError):
    """Correction schedule search exhausted its caps.

    Carries the name of the violated condition and the best margin seen,
    so failures are diagnosable rather than silent.
    """

    exit_code = 4

    def __init__(self, condition: str, stage: int, detail: str, best_margin: float | None = None):
        self.condition = condition
        self.stage = stage
        self.best_margin = best_margin
        msg = f"schedule search failed at stage {stage}: condition {condition} ({detail})"
        if best_margin is not None:
            msg += f"; best margin {best_margin:.3e}"
        super().__init__(msg)
