"""Exception hierarchy. CLI exit codes are keyed off these classes."""


class SlmrError(Exception):
    exit_code = 1


class ValidationError(SlmrError, ValueError):
    exit_code = 2


class ShapeError(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


class FormatError(ValidationError):
    """Malformed file contents (CSV, manifest, model)."""


class NumericError(SlmrError, ArithmeticError):
    exit_code = 3


class DivergenceError(NumericError):
    def __init__(self, block, iteration, detail=""):
        self.block = block
        self.iteration = iteration
        msg = f"non-finite values in {block} at iteration {iteration}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class DataIOError(SlmrError, OSError):
    exit_code = 4
