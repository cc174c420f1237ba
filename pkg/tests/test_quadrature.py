import math

import numpy as np
import pytest

from pulsepair import NumericFailureError
from pulsepair.quadrature import integrate_decaying, tail_horizon


def test_single_exponential():
    res = integrate_decaying(lambda t: np.exp(-0.5 * t))
    assert res.value == pytest.approx(2.0, rel=1e-10)
    assert res.error < 1e-8 * res.value


def test_oscillating_decay():
    # sin^2 = (1 - cos 2wt) / 2 integrates to (1/a - a / (a^2 + 4 w^2)) / 2
    a, w = 0.25, 3.0
    exact = 0.5 / a - 0.5 * a / (a * a + 4 * w * w)
    res = integrate_decaying(lambda t: np.exp(-a * t) * np.sin(w * t) ** 2)
    assert res.value == pytest.approx(exact, rel=1e-9)


def test_slow_decay_extends_horizon():
    res = integrate_decaying(lambda t: np.exp(-0.01 * t), rtol=1e-10)
    assert res.value == pytest.approx(100.0, rel=1e-8)
    assert res.t_max > 1000


def test_horizon_scales_with_gamma22():
    t1, _ = tail_horizon(lambda t: np.exp(-t), 1.0)
    t2, _ = tail_horizon(lambda t: np.exp(-2 * t), 2.0)
    assert t2 == pytest.approx(t1 / 2)


def test_zero_integrand():
    res = integrate_decaying(lambda t: np.zeros_like(np.asarray(t, float)))
    assert res.value == 0.0 and res.n_segments == 0


def test_non_decaying_integrand_raises():
    with pytest.raises(NumericFailureError) as info:
        integrate_decaying(lambda t: np.ones_like(np.asarray(t, float)))
    assert "t_max" in info.value.diagnostics
