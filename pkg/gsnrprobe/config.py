"""Constants and default settings shared across gsnrprobe."""

from dataclasses import dataclass, replace
from typing import Any, Optional

from scipy.constants import h as PLANCK_J_S

B_REF_GHZ = 12.5
C_BAND_THZ = (191.0, 196.0)

MIN_NOISE_FIGURE_DB = 3.0
TRANSPARENCY_TOLERANCE_DB = 0.05

DEFAULT_FEC_BER = 2e-2
Q_DB_FLOOR = -20.0
WORST_CASE_OFFSET_DB = 1.0
DEFAULT_IMPL_PENALTY_DB = 1.0

DEFAULT_SLOT_WIDTH_GHZ = 100.0
DEFAULT_SPAN_LENGTH_KM = 80.0
DEFAULT_ADD_DROP_LOSS_DB = 7.0

# constant PSD: -1 dBm over 69 GHz
DEFAULT_LAUNCH_POWER_DBM = -1.0
DEFAULT_LAUNCH_REFERENCE_GHZ = 69.0

MAX_SYMBOL_RATE_GBD = 69.0

__all__ = [
    "B_REF_GHZ",
    "C_BAND_THZ",
    "DEFAULT_ADD_DROP_LOSS_DB",
    "DEFAULT_FEC_BER",
    "DEFAULT_IMPL_PENALTY_DB",
    "DEFAULT_LAUNCH_POWER_DBM",
    "DEFAULT_LAUNCH_REFERENCE_GHZ",
    "DEFAULT_SLOT_WIDTH_GHZ",
    "DEFAULT_SPAN_LENGTH_KM",
    "MAX_SYMBOL_RATE_GBD",
    "MIN_NOISE_FIGURE_DB",
    "PLANCK_J_S",
    "ProbeSettings",
    "Q_DB_FLOOR",
    "TRANSPARENCY_TOLERANCE_DB",
    "WORST_CASE_OFFSET_DB",
]


@dataclass(frozen=True)
class ProbeSettings:
    """Tunables of a probing campaign.

    The characterized PLT (module A) runs with ``plt_penalty_db``; probing is
    done with a second module whose penalty is ``plt_penalty_db +
    module_offset_db``. ``module_bias_db`` is added to every GOSNR estimate.
    """

    q_noise_sigma_db: float = 0.2
    plt_penalty_db: float = DEFAULT_IMPL_PENALTY_DB
    module_offset_db: float = 0.1
    module_bias_db: float = 0.0
    b2b_osnr_min_db: float = 8.0
    b2b_osnr_max_db: float = 30.0
    b2b_step_db: float = 1.0
    clamp_extrapolation: bool = False
    txrx_backout_snr_db: Optional[float] = None

    def __post_init__(self) -> None:
        if self.q_noise_sigma_db < 0:
            raise ValueError("q_noise_sigma_db must be >= 0")
        if self.b2b_step_db <= 0:
            raise ValueError("b2b_step_db must be > 0")
        if self.b2b_osnr_max_db <= self.b2b_osnr_min_db:
            raise ValueError("b2b OSNR range is empty")

    @property
    def probe_penalty_db(self) -> float:
        """Implementation penalty of the module used for probing."""
        return self.plt_penalty_db + self.module_offset_db

    def with_overrides(self, **changes: Any) -> "ProbeSettings":
        """Return a copy with the non-None ``changes`` applied."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})
