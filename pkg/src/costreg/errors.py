"""Exception hierarchy.

The CLI maps each family onto an exit status: configuration and usage
problems exit 1, data problems exit 2, numeric failures exit 3.
"""


class CostregError(Exception):
    exit_code = 1


class ConfigError(CostregError, ValueError):
    exit_code = 1


class UnsupportedPenalty(ConfigError):
    pass


class NotQuantified(ConfigError):
    """Raised when an unquantifiable or negligible cost model is used as a number."""


class BothZero(ConfigError):
    pass


class BadRange(ConfigError):
    pass


class DataError(CostregError, ValueError):
    exit_code = 2


class MissingLabelColumn(DataError):
    def __init__(self, label, header):
        super().__init__(f"label column {label!r} not in header {list(header)}")
        self.label = label


class NonNumericCell(DataError):
    """``row`` is the 1-based data row (header excluded), ``col`` the 0-based file column."""

    def __init__(self, row, col, text=""):
        super().__init__(f"non-numeric cell at row {row}, column {col}: {text!r}")
        self.row = row
        self.col = col


class EmptyFile(DataError):
    pass


class RaggedRow(DataError):
    def __init__(self, row, found, expected):
        super().__init__(f"row {row} has {found} cells, expected {expected}")
        self.row = row


class TooFewRows(DataError):
    pass


class BadFoldCount(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class BadLabels(DataError):
    pass


class NumericError(CostregError, ArithmeticError):
    exit_code = 3


class IllPosed(NumericError):
    pass


class NotConverged(NumericError):
    """Carries the best iterate found so far in ``best``."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
