"""Exception hierarchy.

Every error carries the CLI exit code it maps to: 2 for precondition
violations, 3 for unparseable input, 4 for numerical failures.
"""


class SketchUQError(Exception):
    exit_code = 4


class PreconditionError(SketchUQError, ValueError):
    exit_code = 2


class InvalidInput(PreconditionError):
    pass


class DimensionMismatch(PreconditionError):
    pass


class RankDeficientDesign(PreconditionError):
    pass


class InvalidSketchDim(PreconditionError):
    pass


class InsufficientDraws(PreconditionError):
    pass


class AllDrawsRankDeficient(PreconditionError):
    pass


class BoundUndefined(PreconditionError):
    pass


class InvalidConfig(PreconditionError):
    pass


class ParseError(SketchUQError, ValueError):
    exit_code = 3

    def __init__(self, message, path=None, row=None, col=None):
        loc = []
        if path is not None:
            loc.append(str(path))
        if row is not None:
            loc.append(f"row {row}")
        if col is not None:
            loc.append(f"column {col}")
        super().__init__(f"{', '.join(loc)}: {message}" if loc else message)
        self.path = path
        self.row = row
        self.col = col


class NumericalFailure(SketchUQError, ArithmeticError):
    exit_code = 4
