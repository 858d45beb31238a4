"""Second-order fit of back-to-back Q over OSNR, and its inversion."""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from gsnrprobe.exceptions import ExtrapolationError, FitError, NonMonotonicFitError
from gsnrprobe.transponder import QOverOsnrSample

logger = logging.getLogger(__name__)

MIN_SAMPLES = 4
MIN_OSNR_SPREAD_DB = 3.0


@dataclass(frozen=True)
class QuadraticFit:
    """q_db = a*x^2 + b*x + c over x = OSNR in [osnr_min_db, osnr_max_db].

    Construction rejects coefficients that are not strictly increasing on
    the valid range.
    """

    a: float
    b: float
    c: float
    osnr_min_db: float
    osnr_max_db: float
    residual_rms_db: float = 0.0
    max_abs_residual_db: float = 0.0

    def __post_init__(self) -> None:
        if not self.osnr_max_db > self.osnr_min_db:
            raise FitError(
                f"empty valid range [{self.osnr_min_db}, {self.osnr_max_db}] dB"
            )
        if self.slope(self.osnr_min_db) <= 0 or self.slope(self.osnr_max_db) <= 0:
            crossing = -self.b / (2 * self.a) if self.a != 0 else math.nan
            raise NonMonotonicFitError(crossing, self.osnr_min_db, self.osnr_max_db)

    def evaluate(self, osnr_db: float) -> float:
        return self.a * osnr_db ** 2 + self.b * osnr_db + self.c

    def slope(self, osnr_db: float) -> float:
        """dQ/dOSNR; the OSNR error from Q noise scales by its inverse."""
        return 2 * self.a * osnr_db + self.b

    @property
    def q_interval(self) -> tuple[float, float]:
        return self.evaluate(self.osnr_min_db), self.evaluate(self.osnr_max_db)

    @property
    def coefficients(self) -> tuple[float, float, float]:
        return self.a, self.b, self.c


def _design_matrix(osnr: np.ndarray) -> np.ndarray:
    return np.vander(osnr, 3)


def fit_b2b(samples: Sequence[QOverOsnrSample]) -> QuadraticFit:
    """Least-squares quadratic through the B2B samples.

    Raises:
        FitError: Fewer than four samples, OSNR spread below 3 dB or a
            rank-deficient design.
        NonMonotonicFitError: The fitted curve is not increasing on the
            sample range.
    """
    if len(samples) < MIN_SAMPLES:
        raise FitError(f"need at least {MIN_SAMPLES} samples, got {len(samples)}")
    osnr = np.array([s.osnr_db for s in samples], dtype=float)
    q = np.array([s.q_db for s in samples], dtype=float)
    spread = float(osnr.max() - osnr.min())
    if spread == 0:
        raise FitError("rank-deficient design: all samples share one OSNR")
    if spread < MIN_OSNR_SPREAD_DB:
        raise FitError(
            f"OSNR spread {spread:.2f} dB below the {MIN_OSNR_SPREAD_DB} dB minimum"
        )
    if np.unique(osnr).size < 3:
        raise FitError("rank-deficient design: fewer than three distinct OSNR values")

    a, b, c = np.polyfit(osnr, q, 2)
    residuals = q - np.polyval([a, b, c], osnr)
    fit = QuadraticFit(
        a=float(a),
        b=float(b),
        c=float(c),
        osnr_min_db=float(osnr.min()),
        osnr_max_db=float(osnr.max()),
        residual_rms_db=float(np.sqrt(np.mean(residuals ** 2))),
        max_abs_residual_db=float(np.max(np.abs(residuals))),
    )
    logger.debug(
        "fit a=%.6g b=%.6g c=%.6g on [%.1f, %.1f] dB, rms %.3g dB",
        fit.a, fit.b, fit.c, fit.osnr_min_db, fit.osnr_max_db, fit.residual_rms_db,
    )
    return fit


def coefficient_covariance(samples: Sequence[QOverOsnrSample],
                           q_sigma_db: Optional[float] = None) -> np.ndarray:
    """Covariance of (a, b, c) for a least-squares fit of ``samples``.

    With ``q_sigma_db`` omitted the noise variance is estimated from the fit
    residuals with n - 3 degrees of freedom.
    """
    osnr = np.array([s.osnr_db for s in samples], dtype=float)
    q = np.array([s.q_db for s in samples], dtype=float)
    design = _design_matrix(osnr)
    if q_sigma_db is None:
        if len(samples) <= 3:
            raise FitError("need more than three samples to estimate the noise variance")
        coeffs, *_ = np.linalg.lstsq(design, q, rcond=None)
        residuals = q - design @ coeffs
        variance = float(residuals @ residuals) / (len(samples) - 3)
    else:
        variance = q_sigma_db ** 2
    try:
        return variance * np.linalg.inv(design.T @ design)
    except np.linalg.LinAlgError as exc:
        raise FitError(f"rank-deficient design: {exc}") from exc


def standard_errors(samples: Sequence[QOverOsnrSample],
                    q_sigma_db: Optional[float] = None) -> tuple[float, float, float]:
    se = np.sqrt(np.diag(coefficient_covariance(samples, q_sigma_db)))
    return float(se[0]), float(se[1]), float(se[2])


def invert_fit(fit: QuadraticFit, q_db: float, clamp: bool = False) -> float:
    """OSNR at which the fit reaches ``q_db``.

    Picks the root on the increasing branch with the numerically stable form
    of the quadratic formula.

    Raises:
        ExtrapolationError: ``q_db`` lies outside the fit's Q interval and
            ``clamp`` is off. With ``clamp`` the nearest range boundary is
            returned instead.
    """
    q_low, q_high = fit.q_interval
    if not q_low <= q_db <= q_high:
        nearest = fit.osnr_min_db if q_db < q_low else fit.osnr_max_db
        if clamp:
            logger.debug("Q %.3f dB outside fit interval, clamped to %.2f dB", q_db, nearest)
            return nearest
        raise ExtrapolationError(q_db, q_low, q_high, nearest)

    a, b, c = fit.a, fit.b, fit.c - q_db
    if a == 0:
        root = -c / b
    else:
        disc = max(b * b - 4 * a * c, 0.0)
        half = -0.5 * (b + math.copysign(math.sqrt(disc), b))
        if half == 0:
            root = -b / (2 * a)
        elif b >= 0:
            root = c / half
        else:
            root = half / a
    return min(max(root, fit.osnr_min_db), fit.osnr_max_db)
