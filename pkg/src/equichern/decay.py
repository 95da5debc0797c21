"""Power-law fits of decay profiles."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.stats

MIN_POINTS = 10


@dataclass(frozen=True)
class DecayFit:
    exponent: float
    stderr: float
    confidence: tuple  # 95% interval for the exponent
    n_points: int
    window: tuple


def final_decade(t) -> tuple[float, float]:
    t = np.asarray(t, dtype=float)
    hi = float(t.max())
    return hi / 10.0, hi


def fit_decay_exponent(series, window=None) -> DecayFit:
    """Least-squares slope of log(norm) against log(t) over ``window = (lo, hi)``.

    ``series`` is a pair (t, norm) of equal-length arrays.  The default
    window is the final decade [t_max/10, t_max].
    """
    t, norm = (np.asarray(a, dtype=float) for a in series)
    if t.shape != norm.shape or t.ndim != 1:
        raise ValueError("series must be two 1-d arrays of equal length")
    lo, hi = final_decade(t) if window is None else (float(window[0]), float(window[1]))
    sel = (t >= lo * (1 - 1e-12)) & (t <= hi * (1 + 1e-12))
    if sel.sum() < MIN_POINTS:
        raise ValueError(f"degenerate window: {int(sel.sum())} points, need at least {MIN_POINTS}")
    if np.any(t[sel] <= 0) or np.any(norm[sel] <= 0):
        raise ValueError("degenerate window: t and norm must be positive")
    res = scipy.stats.linregress(np.log(t[sel]), np.log(norm[sel]))
    q = scipy.stats.t.ppf(0.975, int(sel.sum()) - 2)
    half = q * res.stderr
    return DecayFit(float(res.slope), float(res.stderr), (float(res.slope - half), float(res.slope + half)),
                    int(sel.sum()), (lo, hi))


def window_flags(t, window) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    lo, hi = window
    return (t >= lo * (1 - 1e-12)) & (t <= hi * (1 + 1e-12))
