"""Exception hierarchy shared across the pipeline.

CLI exit codes: ValidationError and subclasses map to 2, FetchError to 3,
InsufficientDataError to 4.
"""


class BuzzcastError(Exception):
    """Base class for all library errors."""


class ValidationError(BuzzcastError):
    """Bad input: schema, row, spec, state, or shape problems."""


class SchemaError(ValidationError):
    """A CSV header does not match the required schema."""


class RowError(ValidationError):
    """A CSV row failed to parse; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DecodeError(ValidationError):
    """An archive response or fixture record could not be decoded."""

    def __init__(self, message: str, record_index: int | None = None):
        if record_index is not None:
            message = f"record {record_index}: {message}"
        super().__init__(message)
        self.record_index = record_index


class FetchError(BuzzcastError):
    """Transport failure talking to the archive API, after retries."""

    def __init__(self, message: str, attempts: int):
        super().__init__(f"{message} (after {attempts} attempts)")
        self.attempts = attempts


class InsufficientDataError(BuzzcastError):
    """Too few rows for the requested operation."""


class ShapeError(ValidationError):
    """Array or feature-width mismatch."""


class StateError(ValidationError):
    """A fitted-state object was used before fitting."""


class FeasibilityError(ValidationError):
    """Exact enumeration is infeasible at this dimensionality."""


class R2UndefinedError(BuzzcastError):
    """R^2 is undefined (zero-variance targets); MAE/RMSE are still carried.

    The computed MAE and RMSE are available as attributes so callers can
    report partial metrics.
    """

    def __init__(self, mae: float, rmse: float):
        super().__init__("R^2 undefined: y_true has zero variance")
        self.mae = mae
        self.rmse = rmse
