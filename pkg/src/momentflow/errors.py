"""Structured errors raised by the solver suite."""


class AdmissibilityError(RuntimeError):
    """A cell's extracted density or temperature became nonpositive."""

    def __init__(self, cell, detail="", level=None):
        self.cell = cell
        self.level = level
        where = f"cell {cell}"
        if level is not None:
            where += f" on level {level}"
        msg = f"admissibility lost at {where}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class DivergenceError(RuntimeError):
    """Residual blew up past the divergence guard."""


class ConfigError(ValueError):
    """Configuration file or CLI flag problem; message names the key."""
