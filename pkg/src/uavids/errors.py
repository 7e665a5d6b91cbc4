"""Exception hierarchy. Each family maps onto one CLI exit code."""


class UavIdsError(Exception):
    exit_code = 1


class ConfigError(UavIdsError, ValueError):
    """Invalid configuration or usage (exit 1)."""

    exit_code = 1


class DataError(UavIdsError):
    """Problems with input data or persisted artifacts (exit 2)."""

    exit_code = 2


class ShapeError(DataError, ValueError):
    pass


class MissingFileError(DataError, FileNotFoundError):
    pass


class RaggedRowError(DataError):
    def __init__(self, line: int, expected: int, got: int):
        super().__init__(f"line {line}: expected {expected} cells, got {got}")
        self.line = line


class MissingLabelColumnError(DataError, KeyError):
    def __str__(self):
        return str(self.args[0])


class AllNullColumnError(DataError):
    def __init__(self, column: str):
        super().__init__(f"column {column!r} has no non-null values")
        self.column = column


class UnknownLabelError(DataError):
    def __init__(self, values):
        values = sorted(set(values))
        super().__init__(f"unknown class label(s): {', '.join(map(repr, values))}")
        self.values = values


class ModelFileError(DataError):
    """Corrupt or incompatible model container."""


class BaselinesParseError(DataError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"baselines file line {line}: {reason}")
        self.line = line


class TrainingError(UavIdsError):
    """Training diverged or could not proceed (exit 3)."""

    exit_code = 3
