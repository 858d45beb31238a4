"""Synthetic ground-truth physical layer.

Computes the GOSNR of a spectrum slot over a lightpath from span parameters:
ASE accumulated span by span plus self-channel NLI from the closed-form GN
model, accumulated incoherently. Amplifier gain restores the launch power at
every span, so the PSD stays constant along the path.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

from gsnrprobe.config import (
    B_REF_GHZ,
    C_BAND_THZ,
    DEFAULT_SLOT_WIDTH_GHZ,
    MIN_NOISE_FIGURE_DB,
    PLANCK_J_S,
    TRANSPARENCY_TOLERANCE_DB,
)
from gsnrprobe.exceptions import ConfigurationError, DomainError, ZeroDispersionError
from gsnrprobe.utils import db2lin, dbm2watt, lin2db, normalize_to_gsnr, parallel_snr_db

logger = logging.getLogger(__name__)

NO_NLI_SNR_DB = math.inf


@dataclass(frozen=True)
class FiberSpan:
    """One fiber span followed by the amplifier that compensates it."""

    length_km: float
    attenuation_db_per_km: float
    gamma_per_w_km: float
    beta2_ps2_per_km: float
    amp_gain_db: float
    amp_noise_figure_db: float
    extra_nli_psd_w_per_hz: float = 0.0
    allow_low_noise_figure: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        if not self.length_km > 0:
            raise DomainError(f"span length must be > 0 km, got {self.length_km}")
        if not self.attenuation_db_per_km > 0:
            raise DomainError(
                f"attenuation must be > 0 dB/km, got {self.attenuation_db_per_km}"
            )
        if self.gamma_per_w_km < 0:
            raise DomainError(f"gamma must be >= 0, got {self.gamma_per_w_km}")
        if self.amp_gain_db < 0:
            raise DomainError(f"amplifier gain must be >= 0 dB, got {self.amp_gain_db}")
        if not self.amp_noise_figure_db > 0:
            raise DomainError(
                f"noise figure must be > 0 dB, got {self.amp_noise_figure_db}"
            )
        if self.amp_noise_figure_db < MIN_NOISE_FIGURE_DB and not self.allow_low_noise_figure:
            raise DomainError(
                f"noise figure {self.amp_noise_figure_db} dB is below the "
                f"{MIN_NOISE_FIGURE_DB} dB high-gain EDFA limit "
                "(set allow_low_noise_figure to override)"
            )
        if self.extra_nli_psd_w_per_hz < 0:
            raise DomainError("extra NLI PSD must be >= 0")

    @classmethod
    def transparent(
        cls,
        length_km: float,
        attenuation_db_per_km: float = 0.2,
        gamma_per_w_km: float = 1.3,
        beta2_ps2_per_km: float = -21.3,
        amp_noise_figure_db: float = 5.0,
        extra_nli_psd_w_per_hz: float = 0.0,
    ) -> "FiberSpan":
        """Build a span whose amplifier gain equals the span loss."""
        return cls(
            length_km=length_km,
            attenuation_db_per_km=attenuation_db_per_km,
            gamma_per_w_km=gamma_per_w_km,
            beta2_ps2_per_km=beta2_ps2_per_km,
            amp_gain_db=length_km * attenuation_db_per_km,
            amp_noise_figure_db=amp_noise_figure_db,
            extra_nli_psd_w_per_hz=extra_nli_psd_w_per_hz,
        )

    @property
    def loss_db(self) -> float:
        return self.length_km * self.attenuation_db_per_km

    @property
    def alpha_per_m(self) -> float:
        """Field-amplitude attenuation coefficient in 1/m."""
        return math.log(10) * self.attenuation_db_per_km / 20 / 1e3

    @property
    def effective_length_m(self) -> float:
        two_alpha = 2 * self.alpha_per_m
        return (1 - math.exp(-two_alpha * self.length_km * 1e3)) / two_alpha

    @property
    def asymptotic_length_m(self) -> float:
        return 1 / (2 * self.alpha_per_m)

    @property
    def beta2_s2_per_m(self) -> float:
        return self.beta2_ps2_per_km * 1e-27

    @property
    def gamma_per_w_m(self) -> float:
        return self.gamma_per_w_km * 1e-3


@dataclass(frozen=True)
class Lightpath:
    """Ordered span chain between add and drop, optionally looped back.

    With ``loopback_count = k`` the signal traverses the span chain ``k + 1``
    times. The add/drop loss is restored by an extra amplifier stage on every pass,
    so each pass carries the same ASE.
    """

    id: str
    spans: tuple[FiberSpan, ...]
    add_drop_loss_db: float = 0.0
    loopback_count: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "spans", tuple(self.spans))
        if not self.spans:
            raise DomainError(f"lightpath '{self.id}' has no spans")
        if self.add_drop_loss_db < 0:
            raise DomainError("add/drop loss must be >= 0 dB")
        if self.loopback_count < 0 or int(self.loopback_count) != self.loopback_count:
            raise DomainError("loopback_count must be a non-negative integer")
        for index, span in enumerate(self.spans):
            if abs(span.amp_gain_db - span.loss_db) > TRANSPARENCY_TOLERANCE_DB:
                raise ConfigurationError(
                    f"lightpath '{self.id}' span {index}: amplifier gain "
                    f"{span.amp_gain_db:.2f} dB does not compensate span loss "
                    f"{span.loss_db:.2f} dB"
                )

    @property
    def base_length_km(self) -> float:
        return sum(span.length_km for span in self.spans)

    @property
    def total_length_km(self) -> float:
        return self.base_length_km * (self.loopback_count + 1)

    @property
    def traversed_spans(self) -> tuple[FiberSpan, ...]:
        return self.spans * (self.loopback_count + 1)

    def with_loopbacks(self, loopback_count: int) -> "Lightpath":
        return replace(self, loopback_count=loopback_count)


@dataclass(frozen=True)
class SpectrumSlot:
    center_freq_thz: float
    width_ghz: float = DEFAULT_SLOT_WIDTH_GHZ

    def __post_init__(self) -> None:
        low, high = C_BAND_THZ
        if not low <= self.center_freq_thz <= high:
            raise DomainError(
                f"slot center {self.center_freq_thz} THz outside C-band [{low}, {high}]"
            )
        if not self.width_ghz > 0:
            raise DomainError(f"slot width must be > 0 GHz, got {self.width_ghz}")

    @property
    def center_freq_hz(self) -> float:
        return self.center_freq_thz * 1e12

    def fits(self, bandwidth_ghz: float) -> bool:
        return bandwidth_ghz <= self.width_ghz


@dataclass(frozen=True)
class LaunchSpec:
    """Launch condition of one signal: PSD and occupied bandwidth."""

    psd_w_per_hz: float
    signal_bandwidth_ghz: float

    def __post_init__(self) -> None:
        if not self.signal_bandwidth_ghz > 0:
            raise DomainError(
                f"signal bandwidth must be > 0 GHz, got {self.signal_bandwidth_ghz}"
            )
        if not self.psd_w_per_hz > 0 or not self.channel_power_w > 0:
            raise DomainError(f"channel power must be > 0 W, got PSD {self.psd_w_per_hz}")

    @classmethod
    def from_power_dbm(cls, power_dbm: float, bandwidth_ghz: float) -> "LaunchSpec":
        return cls(dbm2watt(power_dbm) / (bandwidth_ghz * 1e9), bandwidth_ghz)

    @property
    def signal_bandwidth_hz(self) -> float:
        return self.signal_bandwidth_ghz * 1e9

    @property
    def channel_power_w(self) -> float:
        return self.psd_w_per_hz * self.signal_bandwidth_hz

    def with_bandwidth(self, bandwidth_ghz: float) -> "LaunchSpec":
        """Same PSD, different occupied bandwidth."""
        return LaunchSpec(self.psd_w_per_hz, bandwidth_ghz)


def ase_noise_power_w(noise_figure_db: float, gain_db: float, frequency_hz: float,
                      bandwidth_hz: float = B_REF_GHZ * 1e9) -> float:
    """ASE power of one amplifier in ``bandwidth_hz``: NF * h * nu * B * (G - 1)."""
    return db2lin(noise_figure_db) * PLANCK_J_S * frequency_hz * bandwidth_hz * (
        db2lin(gain_db) - 1
    )


def path_ase_power_w(path: Lightpath, slot: SpectrumSlot) -> float:
    """Total ASE power in 12.5 GHz collected over all traversed amplifiers."""
    nu = slot.center_freq_hz
    per_pass = sum(
        ase_noise_power_w(span.amp_noise_figure_db, span.amp_gain_db, nu)
        for span in path.spans
    )
    if path.add_drop_loss_db > 0:
        per_pass += ase_noise_power_w(path.spans[0].amp_noise_figure_db, path.add_drop_loss_db, nu)
    return per_pass * (path.loopback_count + 1)


def osnr_ase_db(path: Lightpath, launch: LaunchSpec, slot: SpectrumSlot) -> float:
    """OSNR from accumulated ASE, referenced to 12.5 GHz.

    Raises:
        DomainError: If the channel power is not positive.
    """
    power_w = launch.channel_power_w
    if not power_w > 0:
        raise DomainError(f"channel power must be > 0 W, got {power_w}")
    noise_w = path_ase_power_w(path, slot)
    if noise_w <= 0:
        return math.inf
    return lin2db(power_w / noise_w)


def span_nli_psd_w_per_hz(span: FiberSpan, psd_w_per_hz: float, bandwidth_hz: float) -> float:
    """Self-channel NLI PSD generated in one span (closed-form GN model).

    Raises:
        ZeroDispersionError: If the span has beta2 = 0.
    """
    if span.beta2_ps2_per_km == 0:
        raise ZeroDispersionError()
    beta2 = abs(span.beta2_s2_per_m)
    l_eff = span.effective_length_m
    l_eff_a = span.asymptotic_length_m
    gamma = span.gamma_per_w_m
    spread = math.asinh((math.pi ** 2 / 2) * beta2 * l_eff_a * bandwidth_hz ** 2)
    g_nli = (
        (8 / 27) * gamma ** 2 * psd_w_per_hz ** 3 * l_eff ** 2 * spread
        / (math.pi * beta2 * l_eff_a)
    )
    return g_nli + span.extra_nli_psd_w_per_hz


def snr_nli_db(path: Lightpath, launch: LaunchSpec, slot: SpectrumSlot) -> float:
    """Signal-to-NLI ratio; ``NO_NLI_SNR_DB`` (+inf) when no span generates NLI.

    Raises:
        ZeroDispersionError: If any span has beta2 = 0.
    """
    per_pass = sum(
        span_nli_psd_w_per_hz(span, launch.psd_w_per_hz, launch.signal_bandwidth_hz)
        for span in path.spans
    )
    total = per_pass * (path.loopback_count + 1)
    if total == 0:
        return NO_NLI_SNR_DB
    return lin2db(launch.psd_w_per_hz / total)


def true_gosnr_db(path: Lightpath, launch: LaunchSpec, slot: SpectrumSlot,
                  txrx_snr_db: Optional[float] = None) -> float:
    """Ground-truth GSNR at the signal bandwidth.

    ASE is taken from ``osnr_ase_db`` and re-referenced to the signal
    bandwidth with ``normalize_to_gsnr``, then combined with the NLI and the
    optional transceiver term by summing reciprocals.
    """
    snr_ase = normalize_to_gsnr(osnr_ase_db(path, launch, slot), launch.signal_bandwidth_ghz)
    terms = [snr_ase, snr_nli_db(path, launch, slot)]
    if txrx_snr_db is not None:
        terms.append(txrx_snr_db)
    gsnr = parallel_snr_db(*terms)
    logger.debug(
        "path %s @ %.2f THz, %.1f GHz: ASE %.3f dB, NLI %.3f dB -> GSNR %.3f dB",
        path.id, slot.center_freq_thz, launch.signal_bandwidth_ghz, terms[0], terms[1], gsnr,
    )
    return gsnr
