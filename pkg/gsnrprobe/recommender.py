"""GSNR margins per configuration, best-configuration selection and verification."""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Optional, Sequence

from gsnrprobe.exceptions import ConfigurationError, DomainError
from gsnrprobe.link_model import LaunchSpec, Lightpath, SpectrumSlot, true_gosnr_db
from gsnrprobe.transponder import ModFormatSpec

logger = logging.getLogger(__name__)


class Classification(str, Enum):
    TRUE_POSITIVE = "true-positive"
    FALSE_POSITIVE = "false-positive"
    TRUE_NEGATIVE = "true-negative"
    FALSE_NEGATIVE = "false-negative"
    UNVERIFIED = "unverified"

    @classmethod
    def of(cls, predicted: bool, actual: Optional[bool]) -> "Classification":
        if actual is None:
            return cls.UNVERIFIED
        if predicted:
            return cls.TRUE_POSITIVE if actual else cls.FALSE_POSITIVE
        return cls.FALSE_NEGATIVE if actual else cls.TRUE_NEGATIVE


class ThresholdKind(str, Enum):
    TYPICAL = "typical"
    WORST_CASE = "worst-case"

    def of(self, spec: ModFormatSpec) -> float:
        if self is ThresholdKind.WORST_CASE:
            return spec.required_gsnr_worst_db
        return spec.required_gsnr_typical_db


@dataclass(frozen=True)
class MarginEntry:
    """Margin of one configuration: estimated GSNR minus its typical requirement."""

    spec: ModFormatSpec
    estimated_gsnr_db: float
    margin_db: float
    operating_margin_db: float
    predicted_feasible: bool
    actual_feasible: Optional[bool] = None
    classification: Classification = Classification.UNVERIFIED

    def __post_init__(self) -> None:
        if self.margin_db != self.estimated_gsnr_db - self.spec.required_gsnr_typical_db:
            raise DomainError(f"{self.spec.name}: margin does not match its inputs")
        if self.predicted_feasible != (self.margin_db >= self.operating_margin_db):
            raise DomainError(f"{self.spec.name}: predicted feasibility inconsistent")
        if self.classification is not Classification.of(
            self.predicted_feasible, self.actual_feasible
        ):
            raise DomainError(f"{self.spec.name}: classification inconsistent")

    def with_outcome(self, actual_feasible: bool) -> "MarginEntry":
        return replace(
            self,
            actual_feasible=actual_feasible,
            classification=Classification.of(self.predicted_feasible, actual_feasible),
        )

    def at_operating_margin(self, operating_margin_db: float) -> "MarginEntry":
        """Same estimate and outcome, re-judged against another operating margin."""
        predicted = self.margin_db >= operating_margin_db
        return replace(
            self,
            operating_margin_db=operating_margin_db,
            predicted_feasible=predicted,
            classification=Classification.of(predicted, self.actual_feasible),
        )


@dataclass(frozen=True)
class Recommendation:
    chosen: Optional[ModFormatSpec]
    operating_margin_db: float
    ranking: tuple[MarginEntry, ...]

    @property
    def chosen_entry(self) -> Optional[MarginEntry]:
        if self.chosen is None:
            return None
        return next(e for e in self.ranking if e.spec == self.chosen)


def selection_key(spec: ModFormatSpec) -> tuple[float, float, float]:
    """Line rate first, then bits/symbol, then the lower symbol rate."""
    config = spec.config
    return (config.line_rate_gbps, config.bits_per_symbol, -config.symbol_rate_gbd)


def compute_margins(estimated_gsnr_db: float, catalog: Sequence[ModFormatSpec],
                    operating_margin_db: float = 0.0) -> list[MarginEntry]:
    """One margin entry per catalog configuration.

    Raises:
        ConfigurationError: The catalog is empty.
        DomainError: The operating margin is negative.
    """
    if not catalog:
        raise ConfigurationError("catalog is empty")
    if operating_margin_db < 0:
        raise DomainError(f"operating margin must be >= 0 dB, got {operating_margin_db}")
    entries = []
    for spec in catalog:
        margin = estimated_gsnr_db - spec.required_gsnr_typical_db
        entries.append(
            MarginEntry(
                spec=spec,
                estimated_gsnr_db=estimated_gsnr_db,
                margin_db=margin,
                operating_margin_db=operating_margin_db,
                predicted_feasible=margin >= operating_margin_db,
            )
        )
    return entries


def recommend(entries: Sequence[MarginEntry], operating_margin_db: float) -> Recommendation:
    """Pick the best predicted-feasible configuration.

    The ranking lists predicted-feasible entries by descending selection key,
    followed by the rest by descending margin.
    """
    entries = [
        e if e.operating_margin_db == operating_margin_db else e.at_operating_margin(
            operating_margin_db
        )
        for e in entries
    ]
    feasible = sorted(
        (e for e in entries if e.predicted_feasible),
        key=lambda e: selection_key(e.spec),
        reverse=True,
    )
    infeasible = sorted(
        (e for e in entries if not e.predicted_feasible),
        key=lambda e: e.margin_db,
        reverse=True,
    )
    chosen = feasible[0].spec if feasible else None
    if chosen is None:
        logger.info("no configuration clears operating margin %.2f dB", operating_margin_db)
    return Recommendation(chosen, operating_margin_db, tuple(feasible + infeasible))


def verify(path: Lightpath, spec: ModFormatSpec, slot: SpectrumSlot, launch: LaunchSpec,
           threshold: ThresholdKind = ThresholdKind.TYPICAL,
           txrx_snr_db: Optional[float] = None) -> bool:
    """Transmit the configuration at the probe's PSD and check it against its threshold."""
    if not slot.fits(spec.config.symbol_rate_gbd):
        raise ConfigurationError(
            f"{spec.name} ({spec.config.symbol_rate_gbd:g} GBd) does not fit "
            f"in a {slot.width_ghz:g} GHz slot"
        )
    signal = launch.with_bandwidth(spec.config.symbol_rate_gbd)
    true_gsnr = true_gosnr_db(path, signal, slot, txrx_snr_db)
    return true_gsnr >= threshold.of(spec)


def verify_entries(path: Lightpath, entries: Sequence[MarginEntry], slot: SpectrumSlot,
                   launch: LaunchSpec,
                   threshold: ThresholdKind = ThresholdKind.TYPICAL) -> list[MarginEntry]:
    return [e.with_outcome(verify(path, e.spec, slot, launch, threshold)) for e in entries]


def fine_tune(recommendation: Recommendation,
              verifier: Callable[[ModFormatSpec], bool]) -> Optional[MarginEntry]:
    """Step down the predicted-feasible ranking until a configuration verifies.

    Tries at most one attempt per ranking entry; returns None when every
    predicted-feasible configuration fails.
    """
    for attempt, entry in enumerate(recommendation.ranking, start=1):
        if not entry.predicted_feasible:
            break
        if verifier(entry.spec):
            if attempt > 1:
                logger.info("fine-tuning stepped down to %s after %d attempts",
                            entry.spec.name, attempt)
            return entry.with_outcome(True)
        logger.debug("%s failed verification", entry.spec.name)
    return None


def false_positive_count(entries: Sequence[MarginEntry],
                         operating_margin_db: Optional[float] = None) -> int:
    """Verified entries predicted feasible that failed, optionally re-judged."""
    if operating_margin_db is not None:
        entries = [e.at_operating_margin(operating_margin_db) for e in entries]
    return sum(1 for e in entries if e.classification is Classification.FALSE_POSITIVE)
