"""Transponder configurations, receiver Q model and format catalog.

The receiver Q is derived from the pre-FEC BER of a rectangular I x J QAM
constellation at a given SNR per symbol. Half-integer bits/symbol formats are
realized by shifting the next lower integer format by the difference of the
required SNRs at the FEC limit, with the required SNR interpolated in dB.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import erfcinv, log_ndtr, ndtri_exp

from gsnrprobe.config import (
    DEFAULT_FEC_BER,
    DEFAULT_IMPL_PENALTY_DB,
    MAX_SYMBOL_RATE_GBD,
    Q_DB_FLOOR,
    WORST_CASE_OFFSET_DB,
)
from gsnrprobe.exceptions import ConfigurationError, DomainError
from gsnrprobe.utils import lin2db, normalize_to_gsnr

logger = logging.getLogger(__name__)

# bits per symbol (both quadratures) -> rectangular constellation levels (I, J)
QAM_LEVELS: dict[int, tuple[int, int]] = {
    2: (2, 2),
    3: (4, 2),
    4: (4, 4),
    5: (8, 4),
    6: (8, 8),
}

FORMAT_NAMES: dict[int, str] = {
    2: "QPSK",
    3: "8QAM",
    4: "16QAM",
    5: "32QAM",
    6: "64QAM",
}

MIN_BITS_PER_SYMBOL = min(QAM_LEVELS)
MAX_BITS_PER_SYMBOL = max(QAM_LEVELS)

_LOG_HALF = math.log(0.5)


def _is_half_step(value: float) -> bool:
    return value > 0 and float(value * 2).is_integer()


@dataclass(frozen=True)
class TransponderConfig:
    """A dual-polarization modulation format at a given symbol rate."""

    name: str
    bits_per_symbol: float
    symbol_rate_gbd: float
    line_rate_gbps: float

    def __post_init__(self) -> None:
        if not _is_half_step(self.bits_per_symbol):
            raise DomainError(
                f"{self.name}: bits_per_symbol must be a positive multiple of 0.5, "
                f"got {self.bits_per_symbol}"
            )
        if not self.symbol_rate_gbd > 0:
            raise DomainError(f"{self.name}: symbol rate must be > 0 GBd")
        if not self.line_rate_gbps > 0:
            raise DomainError(f"{self.name}: line rate must be > 0 Gbit/s")
        if self.line_rate_gbps > self.raw_rate_gbps:
            raise DomainError(
                f"{self.name}: line rate {self.line_rate_gbps} Gbit/s exceeds raw rate "
                f"{self.raw_rate_gbps:g} Gbit/s"
            )

    @property
    def raw_rate_gbps(self) -> float:
        """Two polarizations times bits/symbol times symbol rate."""
        return 2 * self.bits_per_symbol * self.symbol_rate_gbd

    @property
    def format_label(self) -> str:
        if float(self.bits_per_symbol).is_integer() and int(self.bits_per_symbol) in FORMAT_NAMES:
            return FORMAT_NAMES[int(self.bits_per_symbol)]
        return f"{self.bits_per_symbol:g}b"


@dataclass(frozen=True)
class ModFormatSpec:
    """A configuration plus the GSNR it needs, typical and worst case."""

    config: TransponderConfig
    required_gsnr_typical_db: float
    required_gsnr_worst_db: float

    def __post_init__(self) -> None:
        if self.required_gsnr_worst_db < self.required_gsnr_typical_db:
            raise DomainError(
                f"{self.config.name}: worst-case threshold "
                f"{self.required_gsnr_worst_db} dB below typical "
                f"{self.required_gsnr_typical_db} dB"
            )

    @property
    def name(self) -> str:
        return self.config.name


@dataclass(frozen=True)
class QOverOsnrSample:
    osnr_db: float
    q_db: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.osnr_db) and math.isfinite(self.q_db)):
            raise DomainError(f"sample values must be finite, got ({self.osnr_db}, {self.q_db})")


def _levels(bits: int) -> tuple[int, int]:
    try:
        return QAM_LEVELS[bits]
    except KeyError:
        raise DomainError(
            f"no constellation for {bits} bits/symbol "
            f"(supported {MIN_BITS_PER_SYMBOL}-{MAX_BITS_PER_SYMBOL})"
        ) from None


def _check_bits(bits_per_symbol: float) -> None:
    if not _is_half_step(bits_per_symbol):
        raise DomainError(f"bits_per_symbol must be a multiple of 0.5, got {bits_per_symbol}")
    if not MIN_BITS_PER_SYMBOL <= bits_per_symbol <= MAX_BITS_PER_SYMBOL:
        raise DomainError(
            f"bits_per_symbol {bits_per_symbol} outside "
            f"[{MIN_BITS_PER_SYMBOL}, {MAX_BITS_PER_SYMBOL}]"
        )


def _qam_constants(bits: int) -> tuple[float, float]:
    i_levels, j_levels = _levels(bits)
    prefactor = (1 / math.log2(i_levels * j_levels)) * (
        (i_levels - 1) / i_levels + (j_levels - 1) / j_levels
    )
    scale = math.sqrt(3 / (i_levels ** 2 + j_levels ** 2 - 2))
    return prefactor, scale


def _log_ber_qam(bits: int, snr_lin: float) -> float:
    """Natural log of the rectangular-QAM BER.

    BER = C * erfc(k * sqrt(snr)) and erfc(z) = 2 * Phi(-sqrt(2) z), evaluated
    through ``log_ndtr`` so high SNRs do not underflow.
    """
    prefactor, scale = _qam_constants(bits)
    return math.log(prefactor) + math.log(2) + float(
        log_ndtr(-math.sqrt(2) * scale * math.sqrt(max(snr_lin, 0.0)))
    )


def _q_db_from_log_ber(log_ber: float) -> float:
    if log_ber >= _LOG_HALF:
        return Q_DB_FLOOR
    q_lin = -float(ndtri_exp(log_ber))
    if not q_lin > 0:
        return Q_DB_FLOOR
    return max(20 * math.log10(q_lin), Q_DB_FLOOR)


def q_db_from_ber(ber: float) -> float:
    """Q in dB from a BER: Q_lin = sqrt(2) * erfcinv(2 * BER).

    BER >= 0.5 maps to the ``Q_DB_FLOOR`` sentinel.
    """
    if not ber > 0:
        raise DomainError(f"BER must be > 0, got {ber}")
    if ber >= 0.5:
        return Q_DB_FLOOR
    return max(20 * math.log10(math.sqrt(2) * float(erfcinv(2 * ber))), Q_DB_FLOOR)


def _integer_required_snr_db(bits: int, ber: float) -> float:
    prefactor, scale = _qam_constants(bits)
    if not 0 < ber < prefactor:
        raise DomainError(f"BER {ber} unreachable for {bits} bits/symbol")
    return lin2db(float(erfcinv(ber / prefactor)) ** 2 / scale ** 2)


def required_snr_db(bits_per_symbol: float, ber: float = DEFAULT_FEC_BER) -> float:
    """SNR per symbol at which a format reaches ``ber``.

    Integer formats use the closed-form inverse; halves are interpolated in dB
    between the neighbouring integer formats.
    """
    _check_bits(bits_per_symbol)
    low = math.floor(bits_per_symbol)
    if low == bits_per_symbol:
        return _integer_required_snr_db(low, ber)
    low_db = _integer_required_snr_db(low, ber)
    high_db = _integer_required_snr_db(low + 1, ber)
    return low_db + (bits_per_symbol - low) * (high_db - low_db)


def theoretical_q_db(bits_per_symbol: float, snr_db: float,
                     fec_ber: float = DEFAULT_FEC_BER) -> float:
    """Receiver Q in dB (20*log10 of linear Q) at an SNR per symbol.

    Returns ``Q_DB_FLOOR`` where the BER reaches 0.5 or Q falls below the floor.
    """
    _check_bits(bits_per_symbol)
    base = math.floor(bits_per_symbol)
    if base != bits_per_symbol:
        snr_db -= required_snr_db(bits_per_symbol, fec_ber) - required_snr_db(base, fec_ber)
    return _q_db_from_log_ber(_log_ber_qam(base, 10 ** (snr_db / 10)))


def rx_q_readout(config: TransponderConfig, true_gsnr_db: float, impl_penalty_db: float,
                 q_noise_sigma_db: float, seed: int) -> float:
    """Q readout of a receiver, with Gaussian measurement noise seeded by ``seed``."""
    if q_noise_sigma_db < 0:
        raise DomainError(f"Q noise sigma must be >= 0, got {q_noise_sigma_db}")
    q_db = theoretical_q_db(config.bits_per_symbol, true_gsnr_db - impl_penalty_db)
    if q_noise_sigma_db == 0:
        return q_db
    rng = np.random.default_rng(seed)
    return q_db + float(rng.normal(0.0, q_noise_sigma_db))


def synthesize_b2b(
    config: TransponderConfig,
    impl_penalty_db: float = DEFAULT_IMPL_PENALTY_DB,
    osnr_min_db: float = 8.0,
    osnr_max_db: float = 30.0,
    step_db: float = 1.0,
    q_noise_sigma_db: float = 0.0,
    seed: Optional[int] = None,
) -> list[QOverOsnrSample]:
    """Back-to-back Q-over-OSNR sweep of a transponder through a noise loader.

    Each OSNR point is converted to the SNR at the configuration's symbol rate
    before the Q map, so only ASE reaches the receiver.
    """
    if step_db <= 0:
        raise DomainError("step must be > 0 dB")
    count = int(round((osnr_max_db - osnr_min_db) / step_db)) + 1
    osnr_axis = osnr_min_db + step_db * np.arange(count)
    noise = np.zeros(count)
    if q_noise_sigma_db > 0:
        noise = np.random.default_rng(seed).normal(0.0, q_noise_sigma_db, size=count)
    samples = []
    for osnr_db, extra in zip(osnr_axis, noise):
        snr_db = normalize_to_gsnr(float(osnr_db), config.symbol_rate_gbd)
        q_db = theoretical_q_db(config.bits_per_symbol, snr_db - impl_penalty_db)
        samples.append(QOverOsnrSample(float(osnr_db), q_db + float(extra)))
    logger.debug("synthesized %d B2B samples for %s", len(samples), config.name)
    return samples


def make_spec(config: TransponderConfig, impl_penalty_db: float = DEFAULT_IMPL_PENALTY_DB,
              fec_ber: float = DEFAULT_FEC_BER) -> ModFormatSpec:
    """Thresholds from the FEC rule: required SNR plus implementation penalty."""
    typical = required_snr_db(config.bits_per_symbol, fec_ber) + impl_penalty_db
    return ModFormatSpec(config, typical, typical + WORST_CASE_OFFSET_DB)


def config_name(line_rate_gbps: float, bits_per_symbol: float, symbol_rate_gbd: float) -> str:
    label = (
        FORMAT_NAMES[int(bits_per_symbol)]
        if float(bits_per_symbol).is_integer()
        else f"{bits_per_symbol:g}b"
    )
    return f"{line_rate_gbps:g}G-DP-{label}-{symbol_rate_gbd:g}GBd"


def default_catalog(impl_penalty_db: float = DEFAULT_IMPL_PENALTY_DB,
                    fec_ber: float = DEFAULT_FEC_BER) -> list[ModFormatSpec]:
    """100G to 400G configurations in 0.5 bit/symbol steps, symbol rate <= 69 GBd."""
    catalog = []
    for line_rate in (100.0, 200.0, 300.0, 400.0):
        for bits in np.arange(MIN_BITS_PER_SYMBOL, 4.0 + 0.25, 0.5):
            bits = float(bits)
            symbol_rate = round(MAX_SYMBOL_RATE_GBD * (line_rate / 200) * (2 / bits), 2)
            if symbol_rate > MAX_SYMBOL_RATE_GBD:
                continue
            config = TransponderConfig(
                config_name(line_rate, bits, symbol_rate), bits, symbol_rate, line_rate
            )
            catalog.append(make_spec(config, impl_penalty_db, fec_ber))
    return catalog


def validate_catalog(catalog: Sequence[ModFormatSpec]) -> None:
    """Check names are unique and thresholds grow with bits/symbol per symbol rate.

    Raises:
        ConfigurationError: If the catalog is empty or violates an ordering rule.
    """
    if not catalog:
        raise ConfigurationError("catalog is empty")
    seen: set[str] = set()
    by_rate: dict[float, list[ModFormatSpec]] = {}
    for spec in catalog:
        if spec.name in seen:
            raise ConfigurationError(f"duplicate catalog entry '{spec.name}'")
        seen.add(spec.name)
        by_rate.setdefault(spec.config.symbol_rate_gbd, []).append(spec)
    for rate, specs in by_rate.items():
        ordered = sorted(specs, key=lambda s: s.config.bits_per_symbol)
        for lower, higher in zip(ordered, ordered[1:]):
            if (higher.config.bits_per_symbol > lower.config.bits_per_symbol
                    and higher.required_gsnr_typical_db < lower.required_gsnr_typical_db):
                raise ConfigurationError(
                    f"at {rate:g} GBd '{higher.name}' requires less GSNR than '{lower.name}'"
                )


def default_probes() -> list[TransponderConfig]:
    """Probing-light settings PL1 to PL4."""
    return [
        TransponderConfig("PL1", 2.0, 34.0, 100.0),
        TransponderConfig("PL2", 2.0, 69.0, 200.0),
        TransponderConfig("PL3", 3.0, 69.0, 300.0),
        TransponderConfig("PL4", 4.0, 69.0, 400.0),
    ]


def find_probe(probes: Sequence[TransponderConfig], name: str) -> TransponderConfig:
    for probe in probes:
        if probe.name == name:
            return probe
    known = ", ".join(p.name for p in probes)
    raise ConfigurationError(f"unknown probe '{name}' (known: {known})")
