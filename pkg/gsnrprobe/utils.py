"""Unit conversions."""

import math

import numpy as np

from gsnrprobe.config import B_REF_GHZ
from gsnrprobe.exceptions import DomainError


def db2lin(value_db: float) -> float:
    return float(10 ** (value_db / 10))


def lin2db(value: float) -> float:
    return float(10 * np.log10(value))


def dbm2watt(power_dbm: float) -> float:
    return 1e-3 * db2lin(power_dbm)


def watt2dbm(power_w: float) -> float:
    return lin2db(power_w / 1e-3)


def normalize_to_gsnr(gosnr_db: float, symbol_rate_gbd: float) -> float:
    """Re-reference an OSNR-scale value (12.5 GHz) to the symbol rate.

    GSNR_dB = GOSNR_dB + 10*log10(B_ref / R_s). Single factor, no
    dual-polarization term; the same convention is used by the link model.

    Raises:
        DomainError: If ``symbol_rate_gbd`` is not positive.
    """
    if not symbol_rate_gbd > 0 or math.isinf(symbol_rate_gbd):
        raise DomainError(f"symbol rate must be positive, got {symbol_rate_gbd}")
    return gosnr_db + 10 * math.log10(B_REF_GHZ / symbol_rate_gbd)


def parallel_snr_db(*snr_db: float) -> float:
    """Combine SNR terms by summing their reciprocals in linear units.

    Infinite terms contribute no noise. With no finite term the result is +inf.
    """
    inverse = sum(10 ** (-value / 10) for value in snr_db if not math.isinf(value))
    if inverse == 0:
        return math.inf
    return -10 * math.log10(inverse)
