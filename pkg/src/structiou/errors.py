"""Shared exception types with CLI exit-code semantics."""


class UsageError(ValueError):
    """Bad arguments or option combinations (CLI exit code 1)."""


class DataError(ValueError):
    """Malformed or inconsistent input data (CLI exit code 2)."""


class TreeSyntaxError(DataError):
    """Bracketed-tree syntax error, carrying the character offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at character {offset})")
        self.offset = offset


class CapacityError(RuntimeError):
    """A size guard was exceeded (e.g. oracle problem too large)."""
