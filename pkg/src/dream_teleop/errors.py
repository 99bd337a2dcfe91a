"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A configuration value or file is invalid; the message names the field."""


class LogFormatError(ValueError):
    """A flight-log file is malformed. Carries the 1-based offending line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SchemaVersionError(LogFormatError):
    """The flight-log schema version is not one this reader understands."""


class UndefinedBearingError(ValueError):
    """Bearing requested from a point to itself."""


class EmptyReportError(ValueError):
    """A journey report was requested for zero journeys."""


class DegenerateTestError(ValueError):
    """Paired differences have zero variance; the t statistic is undefined."""


class InsufficientDataError(ValueError):
    """Too few paired observations to run a test."""


class UnpairedParticipantError(ValueError):
    """A participant is missing one of the two conditions."""
