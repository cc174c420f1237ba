"""Adaptive quadrature of decaying integrands on [0, infinity).

The integrands met here are sums of decaying (possibly oscillating)
exponentials.  The half-line is truncated at a horizon ``T_max`` found by
doubling from ``20 / gamma22`` until the integrand on the last half of
``[0, T_max]`` stays below ``tail_ratio`` times its peak.  The truncated
range is then integrated segment by segment ([0, T0], [T0, 2 T0], ...) with
QUADPACK's adaptive Gauss-Kronrod rule.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import NumericFailureError

DEFAULT_RTOL = 1e-8
TAIL_RATIO = 1e-10
START_HORIZON = 20.0
MAX_DOUBLINGS = 40
_SAMPLES_PER_SEGMENT = 2049


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    t_max: float
    tail_estimate: float
    n_segments: int


def _peak_and_tail(func, lo, hi):
    ts = np.linspace(lo, hi, _SAMPLES_PER_SEGMENT)
    vals = np.abs(np.asarray(func(ts), dtype=float))
    half = ts >= 0.5 * (lo + hi)
    return float(vals.max()), float(vals[half].max()), float(vals[-1])


def tail_horizon(func, gamma22=1.0, tail_ratio=TAIL_RATIO,
                 start=START_HORIZON):
    """Smallest ``start * 2**k / gamma22`` beyond which ``|func|`` is negligible.

    Returns ``(t_max, peak)``.  ``func`` must accept a numpy array of times.
    """
    t_max = start / gamma22
    peak, tail, _ = _peak_and_tail(func, 0.0, t_max)
    for _ in range(MAX_DOUBLINGS):
        if tail <= tail_ratio * peak:
            return t_max, peak
        p2, tail, _ = _peak_and_tail(func, t_max, 2 * t_max)
        peak = max(peak, p2)
        t_max *= 2
    raise NumericFailureError(
        "integrand does not decay within the doubling budget",
        {"t_max": t_max, "peak": peak, "tail": tail})


def segment_integral(func, lo, hi, rtol=DEFAULT_RTOL, limit=500):
    """Adaptive Gauss-Kronrod integral of a scalar-callable ``func`` on [lo, hi].

    Returns ``(value, abserr, ier, info)``; ``ier`` is nonzero when QUADPACK
    flagged a problem and ``info`` is its diagnostic dict.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(func, lo, hi, epsabs=0.0, epsrel=rtol,
                             limit=limit, full_output=1)
    value, abserr, info = out[0], out[1], out[2]
    ier = 0 if len(out) == 3 else 1
    return value, abserr, ier, info


def integrate_decaying(func, gamma22=1.0, rtol=DEFAULT_RTOL,
                       tail_ratio=TAIL_RATIO) -> QuadResult:
    """Integral of ``func`` over [0, infinity) for a decaying integrand.

    The reported error adds QUADPACK's estimates and an exponential-decay
    estimate of the discarded tail.  Raises ``NumericFailureError`` when the
    combined estimate exceeds the requested relative tolerance by more than
    a factor of ten.
    """
    t_max, peak = tail_horizon(func, gamma22, tail_ratio)
    if peak == 0.0:
        return QuadResult(0.0, 0.0, t_max, 0.0, 0)

    edges = [0.0]
    seg = START_HORIZON / gamma22
    while edges[-1] < t_max * (1 - 1e-12):
        edges.append(min(seg, t_max))
        seg *= 2

    def scalar(t):
        return float(func(np.asarray(t)))

    total = 0.0
    err = 0.0
    failures = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, abserr, ier, _ = segment_integral(scalar, lo, hi, rtol)
        total += val
        err += abserr
        if ier:
            failures.append((lo, hi, abserr))

    # tail beyond t_max, modelled as exponential decay from the last segment
    lo = edges[-2] if len(edges) > 2 else 0.5 * t_max
    f_mid = abs(scalar(0.5 * (lo + t_max)))
    f_end = abs(scalar(t_max))
    if f_end == 0.0:
        tail = 0.0
    elif f_mid > f_end:
        rate = math.log(f_mid / f_end) / (0.5 * (t_max - lo))
        tail = f_end / rate
    else:
        tail = f_end * t_max
    err += tail

    if err > 10 * rtol * abs(total) + 1e-300 and failures:
        raise NumericFailureError(
            "adaptive quadrature did not reach the requested tolerance",
            {"value": total, "error": err, "rtol": rtol, "t_max": t_max,
             "failed_segments": failures})
    return QuadResult(total, err, t_max, tail, len(edges) - 1)
