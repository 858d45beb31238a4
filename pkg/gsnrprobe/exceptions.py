"""Exceptions raised by gsnrprobe."""

from typing import Optional


class ChannelProbeError(Exception):
    """Base class for all gsnrprobe errors."""


class DomainError(ChannelProbeError, ValueError):
    """An input lies outside the physical domain of a model."""


class ZeroDispersionError(DomainError):
    """A span with zero group-velocity dispersion was given to the GN closed form."""

    def __init__(self, message: str = "zero-dispersion span unsupported") -> None:
        super().__init__(message)


class ConfigurationError(ChannelProbeError, ValueError):
    """Settings are individually valid but inconsistent with each other."""


class SchemaError(ConfigurationError):
    """An input document is malformed or carries unknown fields."""

    def __init__(self, message: str, location: Optional[str] = None) -> None:
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class FitError(ChannelProbeError, ValueError):
    """A back-to-back characterization cannot be fitted."""


class NonMonotonicFitError(FitError):
    """The fitted Q-over-OSNR polynomial is not increasing on its valid range."""

    def __init__(self, crossing_db: float, osnr_min_db: float, osnr_max_db: float) -> None:
        self.crossing_db = crossing_db
        self.osnr_min_db = osnr_min_db
        self.osnr_max_db = osnr_max_db
        super().__init__(
            f"fit is not monotonic on [{osnr_min_db:.2f}, {osnr_max_db:.2f}] dB: "
            f"derivative changes sign at {crossing_db:.3f} dB OSNR"
        )


class ExtrapolationError(ChannelProbeError, ValueError):
    """A Q value falls outside the Q interval covered by a fit."""

    def __init__(self, q_db: float, q_min_db: float, q_max_db: float,
                 nearest_osnr_db: float) -> None:
        self.q_db = q_db
        self.q_min_db = q_min_db
        self.q_max_db = q_max_db
        self.nearest_osnr_db = nearest_osnr_db
        super().__init__(
            f"Q {q_db:.3f} dB outside fitted interval [{q_min_db:.3f}, {q_max_db:.3f}] dB "
            f"(nearest boundary {nearest_osnr_db:.2f} dB OSNR)"
        )
