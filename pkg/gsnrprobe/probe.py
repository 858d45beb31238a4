"""Probe execution: Q readout to GOSNR to symbol-rate normalized GSNR."""

import logging
import math
from dataclasses import dataclass
from typing import Optional

from gsnrprobe.b2b_fit import QuadraticFit, invert_fit
from gsnrprobe.exceptions import ConfigurationError, DomainError
from gsnrprobe.link_model import LaunchSpec, Lightpath, SpectrumSlot, true_gosnr_db
from gsnrprobe.transponder import TransponderConfig, rx_q_readout
from gsnrprobe.utils import normalize_to_gsnr

logger = logging.getLogger(__name__)

__all__ = [
    "ProbeResult",
    "back_out_transceiver_noise",
    "estimate_gosnr",
    "normalize_to_gsnr",
    "run_probe",
]

CONSISTENCY_TOLERANCE_DB = 1e-9


@dataclass(frozen=True)
class ProbeResult:
    """Everything one probe run produced, from readout to normalized GSNR."""

    probe: TransponderConfig
    slot: SpectrumSlot
    measured_q_db: float
    estimated_gosnr_db: float
    estimated_gsnr_db: float
    seed: int
    path_id: Optional[str] = None
    true_gsnr_db: Optional[float] = None

    def __post_init__(self) -> None:
        expected = normalize_to_gsnr(self.estimated_gosnr_db, self.probe.symbol_rate_gbd)
        if abs(expected - self.estimated_gsnr_db) > CONSISTENCY_TOLERANCE_DB:
            raise DomainError(
                f"estimated GSNR {self.estimated_gsnr_db} dB inconsistent with GOSNR "
                f"{self.estimated_gosnr_db} dB at {self.probe.symbol_rate_gbd:g} GBd"
            )

    @property
    def error_db(self) -> Optional[float]:
        """Estimated minus true GSNR, when the ground truth is known."""
        if self.true_gsnr_db is None:
            return None
        return self.estimated_gsnr_db - self.true_gsnr_db


def back_out_transceiver_noise(gosnr_db: float, txrx_snr_db: float) -> float:
    """Remove a known transceiver SNR contribution from a GOSNR estimate.

    Raises:
        DomainError: If the transceiver term alone is noisier than the estimate.
    """
    if math.isinf(txrx_snr_db):
        return gosnr_db
    inverse = 10 ** (-gosnr_db / 10) - 10 ** (-txrx_snr_db / 10)
    if inverse <= 0:
        raise DomainError(
            f"transceiver SNR {txrx_snr_db} dB does not exceed estimate {gosnr_db} dB"
        )
    return -10 * math.log10(inverse)


def estimate_gosnr(fit: QuadraticFit, measured_q_db: float, module_bias_db: float = 0.0,
                   clamp: bool = False, txrx_snr_db: Optional[float] = None) -> float:
    """Invert the B2B characterization; the OSNR axis is read as GOSNR.

    ``module_bias_db`` shifts the estimate by exactly its value. With
    ``txrx_snr_db`` set the transceiver contribution is backed out.
    """
    gosnr = invert_fit(fit, measured_q_db, clamp=clamp)
    if txrx_snr_db is not None:
        gosnr = back_out_transceiver_noise(gosnr, txrx_snr_db)
    return gosnr + module_bias_db


def run_probe(
    path: Lightpath,
    probe: TransponderConfig,
    slot: SpectrumSlot,
    launch: LaunchSpec,
    fit: QuadraticFit,
    q_noise_sigma_db: float,
    seed: int,
    impl_penalty_db: float = 0.0,
    module_bias_db: float = 0.0,
    txrx_backout_snr_db: Optional[float] = None,
    clamp: bool = False,
) -> ProbeResult:
    """Insert the probe into ``slot`` on ``path`` and estimate the GSNR.

    Raises:
        ConfigurationError: The probe does not fit in the slot, or the launch
            bandwidth is not the probe's symbol rate.
    """
    if not slot.fits(probe.symbol_rate_gbd):
        raise ConfigurationError(
            f"probe {probe.name} ({probe.symbol_rate_gbd:g} GBd) does not fit "
            f"in a {slot.width_ghz:g} GHz slot"
        )
    if not math.isclose(launch.signal_bandwidth_ghz, probe.symbol_rate_gbd):
        raise ConfigurationError(
            f"launch bandwidth {launch.signal_bandwidth_ghz:g} GHz differs from "
            f"probe {probe.name} symbol rate {probe.symbol_rate_gbd:g} GBd"
        )
    true_gsnr = true_gosnr_db(path, launch, slot)
    q_db = rx_q_readout(probe, true_gsnr, impl_penalty_db, q_noise_sigma_db, seed)
    gosnr = estimate_gosnr(
        fit, q_db, module_bias_db=module_bias_db, clamp=clamp, txrx_snr_db=txrx_backout_snr_db
    )
    result = ProbeResult(
        probe=probe,
        slot=slot,
        measured_q_db=q_db,
        estimated_gosnr_db=gosnr,
        estimated_gsnr_db=normalize_to_gsnr(gosnr, probe.symbol_rate_gbd),
        seed=seed,
        path_id=path.id,
        true_gsnr_db=true_gsnr,
    )
    logger.debug(
        "probe %s on %s seed %d: Q %.3f dB -> GSNR %.3f dB (true %.3f dB)",
        probe.name, path.id, seed, q_db, result.estimated_gsnr_db, true_gsnr,
    )
    return result
