"""Exception types shared across the package."""


class EemsError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(EemsError):
    """Invalid configuration; carries one message per violated field."""

    def __init__(self, messages):
        if isinstance(messages, str):
            messages = [messages]
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))


class OddSizeError(EemsError):
    """Spatial size must be even for a 2x2 block transform."""


class ShapeMismatchError(EemsError):
    """Tensor shapes are inconsistent."""


class ChannelMismatchError(EemsError):
    """Channel counts of two branches differ."""


class DivisibilityError(EemsError):
    """Spatial size is not divisible by the required factor."""


class NonBinaryError(EemsError):
    """Mask values are outside {0, 1}."""


class MissingMaskError(EemsError):
    """An image file has no matching mask file."""


class EmptyDatasetError(EemsError):
    """Dataset directory contains no usable samples."""


class CheckpointMismatchError(EemsError):
    """Checkpoint config does not match the expected config."""


class DivergenceError(EemsError):
    """Training loss became NaN/Inf."""
