"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1, ArtifactError (and its
checkpoint subclasses) -> 2, NumericalError -> 3.
"""


class ConfigError(ValueError):
    """Bad or inconsistent run configuration."""


class ArtifactError(RuntimeError):
    """Missing, malformed or corrupted on-disk run artifact."""


class CheckpointError(ArtifactError):
    """Base for checkpoint file problems."""


class CheckpointFormatError(CheckpointError):
    """Wrong magic or unparsable header."""


class CheckpointTruncatedError(CheckpointError):
    """File ends before the declared payload."""


class CheckpointDigestError(CheckpointError):
    """Payload digest does not verify."""


class NumericalError(ArithmeticError):
    """A forward/backward pass or loss came out non-finite."""
