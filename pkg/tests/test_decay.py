import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equichern.decay import MIN_POINTS, final_decade, fit_decay_exponent, window_flags


def test_power_law_recovered():
    t = np.geomspace(1.0, 100.0, 60)
    fit = fit_decay_exponent((t, 5.0 * t**-3.0))
    assert fit.exponent == pytest.approx(-3.0, abs=0.01)
    assert fit.window == final_decade(t)
    lo, hi = fit.confidence
    assert lo <= fit.exponent <= hi


@given(st.floats(-8.0, 2.0), st.floats(0.1, 10.0))
@settings(max_examples=30, deadline=None)
def test_exact_power_laws(q, c):
    t = np.geomspace(0.5, 50.0, 30)
    assert fit_decay_exponent((t, c * t**q)).exponent == pytest.approx(q, abs=1e-9)


def test_gaussian_decays_faster_than_any_power():
    t = np.geomspace(0.5, 5.0, 40)
    assert fit_decay_exponent((t, np.exp(-(t**2)))).exponent < -6


def test_degenerate_windows_rejected():
    t = np.geomspace(1.0, 10.0, MIN_POINTS - 1)
    with pytest.raises(ValueError, match="degenerate"):
        fit_decay_exponent((t, t**-2), window=(1.0, 10.0))
    t = np.geomspace(1.0, 10.0, 20)
    norm = t**-2
    norm[-1] = 0.0
    with pytest.raises(ValueError, match="positive"):
        fit_decay_exponent((t, norm), window=(1.0, 10.0))
    with pytest.raises(ValueError):
        fit_decay_exponent((t, t[:-1]))


def test_explicit_window_and_flags():
    t = np.geomspace(1.0, 20.0, 41)
    flags = window_flags(t, (2.0, 20.0))
    assert not flags[0] and flags[-1]
    fit = fit_decay_exponent((t, t**-4.0), window=(2.0, 20.0))
    assert fit.n_points == int(flags.sum())
