"""Least-squares power-law fitting shared by the model and FEM studies."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ScalingFit:
    """Result of an ordinary least-squares fit of log y against log x."""

    slope: float
    intercept: float
    r_squared: float
    window: tuple[float, float]
    points: int

    def predict(self, x):
        """Fitted power law exp(intercept) * x^slope."""
        return np.exp(self.intercept) * np.asarray(x, dtype=float) ** self.slope


def fit_loglog(
    x,
    y,
    window: tuple[float, float] | None = None,
    min_points: int = 4,
    min_r_squared: float | None = None,
) -> ScalingFit:
    """Fit y ~ C x^slope by OLS in log-log space.

    window restricts the fit to x in [window[0], window[1]] (inclusive).
    Raises ValueError when fewer than min_points samples survive or data are
    not strictly positive, and ArithmeticError when min_r_squared is given
    and the fit quality falls below it.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"x and y must be equal-length 1-d arrays, got {x.shape}, {y.shape}")
    if window is not None:
        lo, hi = window
        keep = (x >= lo) & (x <= hi)
        x, y = x[keep], y[keep]
    else:
        lo, hi = (float(x.min()), float(x.max())) if x.size else (np.nan, np.nan)
    if x.size < min_points:
        raise ValueError(f"need at least {min_points} samples in window, got {x.size}")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("log-log fit needs strictly positive samples")

    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_res = float(np.dot(resid, resid))
    centered = ly - ly.mean()
    ss_tot = float(np.dot(centered, centered))
    if ss_tot == 0.0:
        r_squared = 1.0 if ss_res < 1e-28 else 0.0
    else:
        r_squared = 1.0 - ss_res / ss_tot

    fit = ScalingFit(
        slope=float(slope),
        intercept=float(intercept),
        r_squared=r_squared,
        window=(float(lo), float(hi)),
        points=int(x.size),
    )
    if min_r_squared is not None and r_squared < min_r_squared:
        raise ArithmeticError(
            f"scaling fit rejected: r^2 = {r_squared:.4f} < {min_r_squared} "
            f"(slope {slope:.4f} over {x.size} points)"
        )
    return fit
