"""Tests for the receiver Q model, B2B synthesis and the format catalog."""

import numpy as np
import pytest

from gsnrprobe.config import Q_DB_FLOOR
from gsnrprobe.exceptions import ConfigurationError, DomainError
from gsnrprobe.transponder import (
    ModFormatSpec,
    QOverOsnrSample,
    TransponderConfig,
    default_catalog,
    default_probes,
    find_probe,
    q_db_from_ber,
    required_snr_db,
    rx_q_readout,
    synthesize_b2b,
    theoretical_q_db,
    validate_catalog,
)
from gsnrprobe.utils import normalize_to_gsnr


def test_q_from_ber_reference_values():
    """Test BER 1e-3 maps to Q of about 9.80 dB and BER 0.5 to the floor."""
    assert q_db_from_ber(1e-3) == pytest.approx(9.80, abs=0.01)
    assert q_db_from_ber(0.5) == Q_DB_FLOOR
    assert q_db_from_ber(0.7) == Q_DB_FLOOR
    with pytest.raises(DomainError):
        q_db_from_ber(0.0)


def test_qpsk_q_equals_snr():
    """Test for QPSK the linear Q is the square root of the SNR."""
    for snr_db in np.linspace(0.0, 20.0, 41):
        assert theoretical_q_db(2.0, float(snr_db)) == pytest.approx(float(snr_db), abs=1e-6)


@pytest.mark.parametrize(
    "bits, expected",
    [(2.0, 6.251), (3.0, 10.693), (4.0, 12.710)],
)
def test_required_snr_at_fec_limit(bits, expected):
    """Test required SNR per symbol at BER 2e-2 for QPSK, 8QAM and 16QAM."""
    assert required_snr_db(bits) == pytest.approx(expected, abs=0.01)


@pytest.mark.parametrize("bits", [2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0])
def test_q_at_required_snr_hits_fec_limit(bits):
    """Test the Q map and the required-SNR inverse agree at the FEC BER."""
    snr_db = required_snr_db(bits)
    assert theoretical_q_db(bits, snr_db) == pytest.approx(q_db_from_ber(2e-2), abs=1e-6)


def test_half_step_interpolates_required_snr():
    """Test 2.5 b/symbol lies halfway between QPSK and 8QAM in dB."""
    assert required_snr_db(2.5) == pytest.approx(
        (required_snr_db(2.0) + required_snr_db(3.0)) / 2, abs=1e-12
    )


def test_q_orders_formats_and_increases_with_snr():
    """Test denser formats read lower Q, and Q grows with SNR."""
    assert theoretical_q_db(2.0, 12.0) > theoretical_q_db(3.0, 12.0) > theoretical_q_db(4.0, 12.0)
    for bits in (2.0, 3.0, 4.0):
        values = [theoretical_q_db(bits, float(s)) for s in np.linspace(0.0, 25.0, 51)]
        assert all(b > a for a, b in zip(values, values[1:]))


def test_q_floor_at_vanishing_snr():
    """Test Q never drops below the floor sentinel."""
    assert theoretical_q_db(2.0, -60.0) == Q_DB_FLOOR
    assert theoretical_q_db(4.0, -60.0) >= Q_DB_FLOOR


def test_unsupported_bits_per_symbol():
    """Test formats outside 2..6 b/symbol or off the 0.5 grid are rejected."""
    with pytest.raises(DomainError):
        theoretical_q_db(1.0, 10.0)
    with pytest.raises(DomainError):
        required_snr_db(2.3)
    with pytest.raises(DomainError):
        required_snr_db(7.0)


def test_transponder_config_validation():
    """Test half-step bits and a line rate within the raw rate."""
    config = TransponderConfig("ok", 2.5, 55.2, 200.0)
    assert config.raw_rate_gbps == pytest.approx(276.0)
    assert config.format_label == "2.5b"
    assert TransponderConfig("q", 2.0, 69.0, 200.0).format_label == "QPSK"

    with pytest.raises(DomainError):
        TransponderConfig("bad-bits", 2.3, 69.0, 200.0)
    with pytest.raises(DomainError, match="exceeds raw rate"):
        TransponderConfig("too-fast", 2.0, 34.0, 200.0)


def test_spec_thresholds_ordered():
    """Test the worst-case threshold can never be below the typical one."""
    config = TransponderConfig("q", 2.0, 69.0, 200.0)
    with pytest.raises(DomainError):
        ModFormatSpec(config, 8.0, 7.5)


def test_sample_values_must_be_finite():
    """Test a B2B sample rejects NaN and infinities."""
    with pytest.raises(DomainError):
        QOverOsnrSample(float("nan"), 10.0)
    with pytest.raises(DomainError):
        QOverOsnrSample(15.0, float("inf"))


def test_rx_readout_noiseless_is_theoretical():
    """Test with no readout noise the Q is the theoretical value minus the penalty."""
    probe = find_probe(default_probes(), "PL3")
    expected = theoretical_q_db(3.0, 14.0 - 1.1)
    assert rx_q_readout(probe, 14.0, 1.1, 0.0, seed=5) == expected


def test_rx_readout_noise_statistics():
    """Test readout noise has zero mean and the configured sigma."""
    probe = find_probe(default_probes(), "PL2")
    base = rx_q_readout(probe, 14.0, 1.0, 0.0, seed=0)
    draws = np.array([rx_q_readout(probe, 14.0, 1.0, 0.2, seed=s) for s in range(10000)])
    assert abs(np.mean(draws) - base) < 0.01
    assert np.std(draws) == pytest.approx(0.2, rel=0.05)


def test_rx_readout_is_deterministic():
    """Test the same seed reproduces the same readout."""
    probe = find_probe(default_probes(), "PL4")
    assert rx_q_readout(probe, 15.0, 1.0, 0.2, 42) == rx_q_readout(probe, 15.0, 1.0, 0.2, 42)
    with pytest.raises(DomainError):
        rx_q_readout(probe, 15.0, 1.0, -0.1, 42)


def test_synthesize_b2b_sweep():
    """Test the default sweep covers 8 to 30 dB in 1 dB steps."""
    probe = find_probe(default_probes(), "PL2")
    samples = synthesize_b2b(probe, impl_penalty_db=1.0)
    assert len(samples) == 23
    assert samples[0].osnr_db == 8.0
    assert samples[-1].osnr_db == 30.0
    for sample in samples:
        expected = normalize_to_gsnr(sample.osnr_db, 69.0) - 1.0
        assert sample.q_db == pytest.approx(expected, abs=1e-6)


def test_synthesize_b2b_noise_is_seeded():
    """Test noisy sweeps repeat with a seed and differ across seeds."""
    probe = find_probe(default_probes(), "PL4")
    first = synthesize_b2b(probe, q_noise_sigma_db=0.1, seed=3)
    again = synthesize_b2b(probe, q_noise_sigma_db=0.1, seed=3)
    other = synthesize_b2b(probe, q_noise_sigma_db=0.1, seed=4)
    assert first == again
    assert first != other


def test_default_catalog_contents():
    """Test the 100G-400G catalog: 14 entries, rates capped at 69 GBd."""
    catalog = default_catalog()
    names = {spec.name for spec in catalog}
    assert len(catalog) == 14
    assert {"200G-DP-QPSK-69GBd", "100G-DP-2.5b-27.6GBd", "400G-DP-16QAM-69GBd"} <= names
    assert all(spec.config.symbol_rate_gbd <= 69.0 for spec in catalog)
    for spec in catalog:
        assert spec.required_gsnr_worst_db == pytest.approx(spec.required_gsnr_typical_db + 1.0)
    validate_catalog(catalog)

    qpsk = next(s for s in catalog if s.name == "200G-DP-QPSK-69GBd")
    assert qpsk.required_gsnr_typical_db == pytest.approx(7.251, abs=0.01)


def test_validate_catalog_errors():
    """Test empty, duplicate and misordered catalogs are rejected."""
    with pytest.raises(ConfigurationError):
        validate_catalog([])

    qpsk = TransponderConfig("a", 2.0, 69.0, 200.0)
    qam16 = TransponderConfig("b", 4.0, 69.0, 400.0)
    with pytest.raises(ConfigurationError, match="duplicate"):
        validate_catalog([ModFormatSpec(qpsk, 7.0, 8.0), ModFormatSpec(qpsk, 7.0, 8.0)])
    with pytest.raises(ConfigurationError, match="requires less GSNR"):
        validate_catalog([ModFormatSpec(qpsk, 10.0, 11.0), ModFormatSpec(qam16, 9.0, 10.0)])


def test_probe_lookup():
    """Test the four probe settings and an unknown name."""
    probes = default_probes()
    assert [p.name for p in probes] == ["PL1", "PL2", "PL3", "PL4"]
    pl1 = find_probe(probes, "PL1")
    assert (pl1.bits_per_symbol, pl1.symbol_rate_gbd, pl1.line_rate_gbps) == (2.0, 34.0, 100.0)
    with pytest.raises(ConfigurationError, match="unknown probe"):
        find_probe(probes, "PL9")
