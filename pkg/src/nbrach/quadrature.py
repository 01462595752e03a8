"""Adaptive quadrature with explicit convergence reporting.

Thin wrapper around QUADPACK that turns silent accuracy loss into a
QuadratureError and normalises the tolerance contract: on success the
returned error estimate is at most rel_tol*|value| + abs_tol.  Semi-infinite
domains go through QUADPACK's rational map of (0, 1] onto [a, inf).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ConfigError, QuadratureError


@dataclass(frozen=True)
class QuadratureSettings:
    """Accuracy knobs for every integral evaluated by the analytics."""

    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_subdivisions: int = 200
    pmf_tail_mass: float = 1e-8

    def validate(self) -> "QuadratureSettings":
        if not (self.rel_tol > 0.0):
            raise ConfigError("rel_tol must be positive")
        if not (self.abs_tol > 0.0):
            raise ConfigError("abs_tol must be positive")
        if self.max_subdivisions < 10:
            raise ConfigError("max_subdivisions must be at least 10")
        if not (0.0 < self.pmf_tail_mass < 1e-2):
            raise ConfigError("pmf_tail_mass must lie in (0, 1e-2)")
        return self


def improper_integral(func, lower: float, upper: float,
                      settings: QuadratureSettings | None = None) -> tuple[float, float]:
    """Integrate func over [lower, upper], upper may be numpy.inf.

    Returns (value, error_estimate).  Raises QuadratureError with the best
    estimate attached when the adaptive scheme cannot meet the tolerance.
    """
    q = (settings or QuadratureSettings()).validate()
    if not np.isfinite(lower):
        raise ConfigError("lower integration limit must be finite")
    if upper <= lower:
        raise ConfigError("upper integration limit must exceed lower")

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, abserr, info, *tail = integrate.quad(
            func, lower, upper,
            epsabs=q.abs_tol, epsrel=q.rel_tol,
            limit=q.max_subdivisions, full_output=1)
    message = tail[0] if tail else None

    tolerance = q.rel_tol * abs(value) + q.abs_tol
    if message is not None and abserr > tolerance:
        raise QuadratureError(
            f"quadrature did not converge: {message}",
            best_estimate=value, error_estimate=abserr)
    if abserr > tolerance:
        raise QuadratureError(
            f"quadrature error estimate {abserr:.3e} exceeds tolerance {tolerance:.3e}",
            best_estimate=value, error_estimate=abserr)
    return value, abserr
