"""Numerical GN-model reference for the self-channel NLI PSD.

Integrates the GN reference integrand over a single rectangular channel at
the channel center, with the four-wave-mixing efficiency of one lumped
amplified span. Used to check the closed form in ``link_model``; it is orders
of magnitude slower and is not on any hot path.
"""

import logging
import math
from functools import lru_cache
from typing import Callable

from scipy.integrate import nquad

from gsnrprobe.exceptions import ZeroDispersionError
from gsnrprobe.link_model import NO_NLI_SNR_DB, FiberSpan, LaunchSpec, Lightpath, SpectrumSlot
from gsnrprobe.utils import lin2db

logger = logging.getLogger(__name__)

NQUAD_OPTS = {"limit": 200}


def _fwm_efficiency(span: FiberSpan, half_band_hz: float) -> Callable[[float, float], float]:
    """|H|^2 scaled by (2 alpha)^2, as a function of normalized (x2, x1)."""
    two_alpha = 2 * span.alpha_per_m
    length_m = span.length_km * 1e3
    decay = math.exp(-two_alpha * length_m)
    beta_term = 4 * math.pi ** 2 * span.beta2_s2_per_m * half_band_hz ** 2

    def integrand(x2: float, x1: float) -> float:
        delta = beta_term * x1 * x2
        numerator = 1 - 2 * decay * math.cos(delta * length_m) + decay ** 2
        return numerator / (1 + (delta / two_alpha) ** 2)

    return integrand


@lru_cache(maxsize=64)
def _normalized_integral(span: FiberSpan, bandwidth_hz: float) -> float:
    if span.beta2_ps2_per_km == 0:
        raise ZeroDispersionError()
    integrand = _fwm_efficiency(span, bandwidth_hz / 2)
    # f1, f2 of equal sign: |f1 + f2| <= B/2 cuts the quadrant to a triangle
    triangle, _ = nquad(integrand, [lambda x1: [0.0, 1.0 - x1], [0.0, 1.0]], opts=NQUAD_OPTS)
    # opposite signs: the whole quadrant is inside the band
    square, _ = nquad(integrand, [[0.0, 1.0], [0.0, 1.0]], opts=NQUAD_OPTS)
    return 2 * triangle + 2 * square


def gn_integral_nli_psd(span: FiberSpan, psd_w_per_hz: float, bandwidth_hz: float) -> float:
    """NLI PSD of one span at the channel center by 2-D numerical integration."""
    two_alpha = 2 * span.alpha_per_m
    total = _normalized_integral(span, bandwidth_hz) / two_alpha ** 2
    g_nli = (
        (16 / 27) * span.gamma_per_w_m ** 2 * psd_w_per_hz ** 3
        * (bandwidth_hz / 2) ** 2 * total
    )
    logger.debug("numerical NLI PSD %.4g W/Hz for %.1f km span", g_nli, span.length_km)
    return g_nli + span.extra_nli_psd_w_per_hz


def numerical_snr_nli_db(path: Lightpath, launch: LaunchSpec, slot: SpectrumSlot) -> float:
    """Signal-to-NLI ratio with every span integrated numerically, summed incoherently."""
    per_pass = sum(
        gn_integral_nli_psd(span, launch.psd_w_per_hz, launch.signal_bandwidth_hz)
        for span in path.spans
    )
    total = per_pass * (path.loopback_count + 1)
    if total == 0:
        return NO_NLI_SNR_DB
    return lin2db(launch.psd_w_per_hz / total)
