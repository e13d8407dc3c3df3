"""Exception types raised by the carbon model."""

from __future__ import annotations

from typing import Optional


class CarbonModelError(Exception):
    """Base error; `stage` names the evaluation step that failed, if known."""

    def __init__(self, message: str, stage: Optional[str] = None) -> None:
        super().__init__(message)
        self.message = message
        self.stage = stage

    def __str__(self) -> str:
        if self.stage:
            return f"[{self.stage}] {self.message}"
        return self.message


class DatabaseParseError(CarbonModelError):
    """A configuration file is missing, unreadable, or does not match its schema."""


class ParameterValidationError(CarbonModelError):
    """A parameter lies outside its admissible range."""

    def __init__(
        self,
        field: str,
        value: object,
        allowed: str,
        stage: Optional[str] = None,
    ) -> None:
        super().__init__(f"{field}={value!r} out of range {allowed}", stage)
        self.field = field
        self.value = value
        self.allowed = allowed


class ResolutionError(ParameterValidationError):
    """A referenced node, density entry, or chiplet does not exist."""

    def __init__(self, message: str, stage: Optional[str] = None) -> None:
        CarbonModelError.__init__(self, message, stage)
        self.field = None
        self.value = None
        self.allowed = None


class FloorplanError(CarbonModelError):
    """Invalid input to the floorplanner."""


class InfeasibleConfigurationError(CarbonModelError):
    """The configuration cannot be built, e.g. linked dies that do not touch."""
