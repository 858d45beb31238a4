"""Tests for the synthetic ASE + GN link model."""

import math
from typing import Optional

import pytest

from gsnrprobe.exceptions import ConfigurationError, DomainError, ZeroDispersionError
from gsnrprobe.link_model import (
    NO_NLI_SNR_DB,
    FiberSpan,
    LaunchSpec,
    Lightpath,
    SpectrumSlot,
    ase_noise_power_w,
    osnr_ase_db,
    path_ase_power_w,
    snr_nli_db,
    true_gosnr_db,
)
from gsnrprobe.utils import normalize_to_gsnr, parallel_snr_db


def _path(count: int, add_drop_loss_db: float = 0.0, loopbacks: int = 0,
          span: Optional[FiberSpan] = None) -> Lightpath:
    span = span or FiberSpan.transparent(80.0)
    return Lightpath("test", (span,) * count, add_drop_loss_db, loopbacks)


SLOT = SpectrumSlot(193.4)
LAUNCH_0DBM = LaunchSpec.from_power_dbm(0.0, 69.0)


def test_single_span_osnr_reference_value():
    """Test 80 km, 16 dB gain, NF 5 dB at 0 dBm gives about 37.1 dB OSNR."""
    assert osnr_ase_db(_path(1), LAUNCH_0DBM, SLOT) == pytest.approx(37.06, abs=0.05)


def test_osnr_drops_with_span_count():
    """Test N identical spans cost exactly 10*log10(N)."""
    single = osnr_ase_db(_path(1), LAUNCH_0DBM, SLOT)
    for count in (2, 5, 10, 40):
        expected = single - 10 * math.log10(count)
        assert osnr_ase_db(_path(count), LAUNCH_0DBM, SLOT) == pytest.approx(expected, abs=1e-9)


def test_osnr_tracks_launch_power():
    """Test doubling the channel power adds 3.01 dB of OSNR."""
    path = _path(10)
    low = osnr_ase_db(path, LaunchSpec.from_power_dbm(0.0, 69.0), SLOT)
    high = osnr_ase_db(path, LaunchSpec.from_power_dbm(10 * math.log10(2), 69.0), SLOT)
    assert high - low == pytest.approx(10 * math.log10(2), abs=1e-9)


def test_loopback_multiplies_span_ase():
    """Test every loopback pass adds the full span-chain ASE again."""
    base = path_ase_power_w(_path(12), SLOT)
    looped = path_ase_power_w(_path(12, loopbacks=2), SLOT)
    assert looped == pytest.approx(3 * base, rel=1e-12)


@pytest.mark.parametrize("loopbacks", [1, 2, 5])
def test_loopback_ase_scales_with_add_drop_stage(loopbacks: int):
    """Test k loopbacks give exactly k + 1 times the ASE with an add/drop stage."""
    base = path_ase_power_w(_path(12, add_drop_loss_db=7.0), SLOT)
    looped = path_ase_power_w(_path(12, add_drop_loss_db=7.0, loopbacks=loopbacks), SLOT)
    assert looped == pytest.approx((loopbacks + 1) * base, rel=1e-12)


def test_add_drop_stage_counted_per_pass():
    """Test the add/drop compensating amplifier repeats on every pass."""
    span = FiberSpan.transparent(80.0)
    stage = ase_noise_power_w(span.amp_noise_figure_db, 7.0, SLOT.center_freq_hz)
    without = path_ase_power_w(_path(10, loopbacks=1), SLOT)
    with_stage = path_ase_power_w(_path(10, add_drop_loss_db=7.0, loopbacks=1), SLOT)
    assert with_stage - without == pytest.approx(2 * stage, rel=1e-9)


def test_lightpath_lengths():
    """Test base and total length with loopbacks."""
    path = _path(10, loopbacks=2)
    assert path.base_length_km == pytest.approx(800.0)
    assert path.total_length_km == pytest.approx(2400.0)
    assert len(path.traversed_spans) == 30
    assert path.with_loopbacks(0).total_length_km == pytest.approx(800.0)


def test_lightpath_rejects_empty_and_opaque_spans():
    """Test an empty chain and an uncompensated span are rejected."""
    with pytest.raises(DomainError):
        Lightpath("empty", ())

    lossy = FiberSpan(80.0, 0.2, 1.3, -21.3, 14.0, 5.0)
    with pytest.raises(ConfigurationError, match="does not compensate"):
        Lightpath("lossy", (lossy,))


def test_span_validation():
    """Test span fields outside their physical domain."""
    with pytest.raises(DomainError):
        FiberSpan.transparent(0.0)
    with pytest.raises(DomainError):
        FiberSpan.transparent(80.0, attenuation_db_per_km=0.0)
    with pytest.raises(DomainError, match="high-gain EDFA"):
        FiberSpan.transparent(80.0, amp_noise_figure_db=2.5)


def test_low_noise_figure_override():
    """Test the low-NF override admits NF < 3 dB but never NF <= 0."""
    span = FiberSpan(80.0, 0.2, 1.3, -21.3, 16.0, 2.5, allow_low_noise_figure=True)
    assert span.amp_noise_figure_db == 2.5

    with pytest.raises(DomainError):
        FiberSpan(80.0, 0.2, 1.3, -21.3, 16.0, 0.0, allow_low_noise_figure=True)


def test_slot_and_launch_validation():
    """Test the C-band slot range and a positive launch power."""
    with pytest.raises(DomainError):
        SpectrumSlot(190.0)
    with pytest.raises(DomainError):
        SpectrumSlot(193.4, width_ghz=0.0)
    with pytest.raises(DomainError):
        LaunchSpec(0.0, 69.0)
    with pytest.raises(DomainError):
        LaunchSpec(1e-14, 0.0)

    assert SpectrumSlot(193.4).fits(69.0)
    assert not SpectrumSlot(193.4, width_ghz=50.0).fits(69.0)


def test_launch_with_bandwidth_keeps_psd():
    """Test re-banding a launch keeps its PSD and scales its power."""
    launch = LaunchSpec.from_power_dbm(-1.0, 69.0)
    narrow = launch.with_bandwidth(34.5)
    assert narrow.psd_w_per_hz == launch.psd_w_per_hz
    assert narrow.channel_power_w == pytest.approx(launch.channel_power_w / 2)


def test_nli_disabled_without_nonlinearity():
    """Test gamma = 0 gives no NLI and an ASE-only GSNR."""
    span = FiberSpan.transparent(80.0, gamma_per_w_km=0.0)
    path = _path(20, span=span)
    assert snr_nli_db(path, LAUNCH_0DBM, SLOT) == NO_NLI_SNR_DB

    expected = normalize_to_gsnr(osnr_ase_db(path, LAUNCH_0DBM, SLOT), 69.0)
    assert true_gosnr_db(path, LAUNCH_0DBM, SLOT) == pytest.approx(expected, abs=1e-12)


def test_nli_scales_with_cube_of_psd():
    """Test +3 dB of PSD costs 6 dB of signal-to-NLI ratio."""
    path = _path(10)
    low = snr_nli_db(path, LaunchSpec(1e-14, 69.0), SLOT)
    high = snr_nli_db(path, LaunchSpec(2e-14, 69.0), SLOT)
    assert low - high == pytest.approx(2 * 10 * math.log10(2), abs=1e-9)


def test_zero_dispersion_span_raises():
    """Test the closed form refuses a zero-dispersion span."""
    span = FiberSpan.transparent(80.0, beta2_ps2_per_km=0.0)
    with pytest.raises(ZeroDispersionError):
        snr_nli_db(_path(3, span=span), LAUNCH_0DBM, SLOT)


def test_extra_nli_lowers_snr():
    """Test an extra NLI floor adds to the span's own NLI."""
    clean = _path(10)
    dirty = _path(10, span=FiberSpan.transparent(80.0, extra_nli_psd_w_per_hz=1e-20))
    assert snr_nli_db(dirty, LAUNCH_0DBM, SLOT) < snr_nli_db(clean, LAUNCH_0DBM, SLOT)


def test_gsnr_below_every_contribution():
    """Test GSNR never exceeds its ASE, NLI or transceiver terms."""
    path = _path(20, add_drop_loss_db=7.0)
    launch = LaunchSpec.from_power_dbm(-1.0, 69.0)
    snr_ase = normalize_to_gsnr(osnr_ase_db(path, launch, SLOT), 69.0)
    snr_nli = snr_nli_db(path, launch, SLOT)
    gsnr = true_gosnr_db(path, launch, SLOT)
    assert gsnr < min(snr_ase, snr_nli)
    assert gsnr == pytest.approx(parallel_snr_db(snr_ase, snr_nli), abs=1e-12)

    with_txrx = true_gosnr_db(path, launch, SLOT, txrx_snr_db=20.0)
    assert with_txrx < gsnr
    assert with_txrx < 20.0


def test_gsnr_strictly_decreases_with_length():
    """Test each additional span lowers the GSNR."""
    launch = LaunchSpec.from_power_dbm(-1.0, 69.0)
    values = [true_gosnr_db(_path(n, 7.0), launch, SLOT) for n in range(1, 80)]
    assert all(later < earlier for earlier, later in zip(values, values[1:]))


def test_launch_power_has_single_optimum():
    """Test GSNR over launch power rises, peaks once, then falls."""
    path = _path(20, 7.0)
    powers = [p / 2 for p in range(-20, 21)]
    values = [true_gosnr_db(path, LaunchSpec.from_power_dbm(p, 69.0), SLOT) for p in powers]
    peak = values.index(max(values))
    assert 0 < peak < len(values) - 1
    assert all(b > a for a, b in zip(values[:peak], values[1:peak + 1]))
    assert all(b < a for a, b in zip(values[peak:], values[peak + 1:]))


def test_narrower_signal_sees_less_nli():
    """Test at constant PSD a narrower signal has the higher GSNR."""
    path = _path(20, 7.0)
    launch = LaunchSpec.from_power_dbm(-1.0, 69.0)
    wide = true_gosnr_db(path, launch, SLOT)
    narrow = true_gosnr_db(path, launch.with_bandwidth(34.0), SLOT)
    assert narrow > wide
