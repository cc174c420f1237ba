"""Energy channels other than the diffracted pulses.

Three channels are tracked for an equally written grating:

* spontaneous emission from the grating-averaged excited population,
* stimulated emission back into the two read modes,
* emission from the non-phase-matched coherence terms.

All proportionality constants default to 1, so only shapes and ratios are
meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernel import build_kernel, eval_fr, eval_gr
from .model import IntensityParams
from .quadrature import DEFAULT_RTOL, integrate_decaying, segment_integral
from .readout import default_times


@dataclass(frozen=True)
class EmissionBudget:
    u_spont: float
    u_stim_r: float
    u_stim_rp: float
    u_stim_total: float
    u_npm_a: float
    u_npm_b: float
    u_npm_total: float
    intens: IntensityParams

    def as_row(self) -> dict:
        return {"i_r": self.intens.i_r, "i_rp": self.intens.i_rp,
                "i_t": self.intens.i_t, "u_spont": self.u_spont,
                "u_stim_r": self.u_stim_r, "u_stim_rp": self.u_stim_rp,
                "u_stim_total": self.u_stim_total, "u_npm_a": self.u_npm_a,
                "u_npm_b": self.u_npm_b, "u_npm_total": self.u_npm_total}


def excited_population_curve(i_t: float, gamma22: float = 1.0, times=None,
                             rtol: float = DEFAULT_RTOL) -> np.ndarray:
    """Grating-averaged excited population,

        rho22(t) = (gamma22 I_t / 8) * integral_0^t g_r(t') exp(-gamma22 (t - t')) dt'.

    Evaluated in one pass over the (increasing) sample times using the
    recursion rho22(t_k+1) = exp(-gamma22 dt) rho22(t_k) + segment integral,
    which never forms exp(+gamma22 t).
    """
    times = default_times(gamma22) if times is None else np.asarray(times, float)
    if np.any(np.diff(times) < 0) or (times.size and times[0] < 0):
        raise ValueError("times must be non-negative and increasing")
    out = np.zeros_like(times)
    if i_t == 0 or times.size == 0:
        return out
    k = build_kernel(i_t, gamma22)
    pref = gamma22 * i_t / 8.0
    acc = 0.0
    if times[0] > 0:
        acc = _weighted_segment(k, 0.0, times[0], gamma22, rtol)
    out[0] = pref * acc
    for j in range(1, times.size):
        lo, hi = times[j - 1], times[j]
        acc = math.exp(-gamma22 * (hi - lo)) * acc + _weighted_segment(k, lo, hi, gamma22, rtol)
        out[j] = pref * acc
    return out


def _weighted_segment(k, lo, hi, gamma22, rtol):
    if hi == lo:
        return 0.0
    val, _, _, _ = segment_integral(
        lambda s: eval_gr(k, s) * math.exp(-gamma22 * (hi - s)), lo, hi,
        rtol=rtol)
    return val


def _kernel_integral(i_t, gamma22, which, rtol):
    k = build_kernel(i_t, gamma22)
    if which == "g2":
        def fn(t):
            g = eval_gr(k, t)
            return g * g
    elif which == "fmg2":
        def fn(t):
            d = eval_fr(k, t) - eval_gr(k, t)
            return d * d
    elif which == "g":
        def fn(t):
            return eval_gr(k, t)
    else:
        raise ValueError(which)
    return integrate_decaying(fn, gamma22, rtol).value


def stimulated_energies(intens: IntensityParams, scale: float = 1.0,
                        rtol: float = DEFAULT_RTOL):
    """``(u_r, u_rp, u_total)``: stimulated emission into R, R' and their sum.

    Each is proportional to its read intensity times the integral of g_r^2,
    so the total depends on ``i_t`` alone.
    """
    if intens.i_t == 0:
        return 0.0, 0.0, 0.0
    g2 = scale * _kernel_integral(intens.i_t, intens.gamma22, "g2", rtol)
    return intens.i_r * g2, intens.i_rp * g2, intens.i_t * g2


def nonphasematched_energies(intens: IntensityParams, b_a: float = 1.0,
                             rtol: float = DEFAULT_RTOL):
    """``(u_a, u_b, u_total)`` radiated by the non-phase-matched terms.

    Uses ``b_a == b_b``; the total is ``b_a I_R I_R' / I_t`` times the
    integral of (f_r - g_r)^2.
    """
    i_r, i_rp, i_t = intens.i_r, intens.i_rp, intens.i_t
    if i_r == 0 or i_rp == 0:
        return 0.0, 0.0, 0.0
    fg = b_a * _kernel_integral(i_t, intens.gamma22, "fmg2", rtol)
    u_a = i_rp**2 * i_r / i_t**2 * fg
    u_b = i_rp * i_r**2 / i_t**2 * fg
    return u_a, u_b, i_r * i_rp / i_t * fg


def spontaneous_energy(i_t: float, gamma22: float = 1.0,
                       rtol: float = DEFAULT_RTOL) -> float:
    """gamma22 times the time integral of the grating-averaged excited population.

    Swapping the order of integration collapses the double integral to
    ``gamma22 * (I_t / 8) * integral_0^inf g_r dt``.
    """
    if i_t == 0:
        return 0.0
    return gamma22 * i_t / 8.0 * _kernel_integral(i_t, gamma22, "g", rtol)


def full_budget(intens: IntensityParams, rtol: float = DEFAULT_RTOL) -> EmissionBudget:
    """All three channels at one read configuration."""
    u_r, u_rp, u_stim = stimulated_energies(intens, rtol=rtol)
    u_a, u_b, u_npm = nonphasematched_energies(intens, rtol=rtol)
    return EmissionBudget(
        u_spont=spontaneous_energy(intens.i_t, intens.gamma22, rtol),
        u_stim_r=u_r, u_stim_rp=u_rp, u_stim_total=u_stim,
        u_npm_a=u_a, u_npm_b=u_b, u_npm_total=u_npm, intens=intens)
