"""Exception hierarchy shared by every ddosdetect module.

All domain errors derive from :class:`DdosError`, which the CLI maps to
exit code 1. Most also subclass ``ValueError`` so callers that only know
the standard library can still catch them.
"""


class DdosError(Exception):
    """Base class for all ddosdetect errors."""


# -- ingestion --------------------------------------------------------------

class MissingColumn(DdosError, KeyError):
    """``name`` is the expected header, ``field`` the record attribute it feeds."""

    def __init__(self, name, field=None):
        super().__init__(name)
        self.name = name
        self.field = field

    def __str__(self):
        return f"required column missing from header: {self.name!r}"


class ParseError(DdosError, ValueError):
    """A malformed value in an input file.

    ``row`` is the 1-based data row number (the header is row 0) and
    ``column`` the header name as written in the file, when known.
    """

    def __init__(self, row, column, message="malformed value"):
        super().__init__(row, column, message)
        self.row = row
        self.column = column
        self.message = message

    def __str__(self):
        where = f"row {self.row}" if self.row is not None else "input"
        if self.column is not None:
            where += f", column {self.column!r}"
        return f"{where}: {self.message}"


class EmptyDataset(DdosError, ValueError):
    def __str__(self):
        return "dataset contains no data rows"


class InvalidRecord(DdosError, ValueError):
    pass


# -- preprocessing ----------------------------------------------------------

class AllRecordsDropped(DdosError, ValueError):
    def __str__(self):
        return "cleaning removed every record"


class UnknownFeature(DdosError, KeyError):
    def __init__(self, name):
        super().__init__(name)
        self.name = name

    def __str__(self):
        return f"unknown feature: {self.name!r}"


class NonFiniteFeature(DdosError, ValueError):
    pass


class DimensionMismatch(DdosError, ValueError):
    pass


class ClassTooSmall(DdosError, ValueError):
    pass


# -- classifiers ------------------------------------------------------------

class SingleClass(DdosError, ValueError):
    def __str__(self):
        return "training data must contain both BENIGN and DDoS samples"


class UnsupportedVersion(DdosError, ValueError):
    pass


class CorruptModel(DdosError, ValueError):
    pass


# -- evaluation -------------------------------------------------------------

class LengthMismatch(DdosError, ValueError):
    pass


class EmptyInput(DdosError, ValueError):
    pass


class NoBenignSamples(DdosError, ZeroDivisionError):
    def __str__(self):
        return "fp rate undefined: no benign samples"


class NoAttackSamples(DdosError, ZeroDivisionError):
    def __str__(self):
        return "fn rate undefined: no DDoS samples"


# -- synthesis / cli --------------------------------------------------------

class InvalidConfig(DdosError, ValueError):
    pass


class ModelDataMismatch(DdosError, ValueError):
    pass
