"""Exception types shared across the toolkit."""


class CivbError(Exception):
    """Base class for all civb errors."""


class FileError(CivbError):
    """Missing, unreadable, or unwritable file."""


class FormatError(CivbError):
    """File exists but its encoding is not supported."""


class ConfigError(CivbError):
    """Bad configuration value or config-file syntax."""


class NumericError(CivbError):
    """Non-finite values detected at a pipeline stage boundary."""

    def __init__(self, stage, message=""):
        self.stage = stage
        super().__init__(message or f"non-finite values after stage '{stage}'")


class StageError(CivbError):
    """A pipeline stage failed; carries the stage name and the original error."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")
