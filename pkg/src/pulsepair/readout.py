"""Closed-form readout: symmetrized variables, coherences, pulses and energies.

The read-stage Bloch equations split, in the variables

    P = Omega_R' sigma_{1a,2},   Q = Omega_R sigma_{1b,2},
    T = Omega_R' Omega_R^* rho_{1a,1b},

into a block for the imaginary parts (solved by ``f_r``) and a block for the
real parts and populations (solved by ``f_r`` and ``g_r``).  Imaginary parts
are carried as real numbers ``X_i = (X - X^*) / i = 2 Im X`` so every
returned quantity is real; the usual ``X - X^*`` is ``1j * X_i``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .errors import UnsupportedRegimeError
from .kernel import build_kernel, eval_fr, eval_gr
from .model import IntensityParams, StoredState
from .quadrature import DEFAULT_RTOL, integrate_decaying

DEFAULT_TRACE_POINTS = 2001
DEFAULT_TRACE_SPAN = 20.0


def default_times(gamma22: float = 1.0) -> np.ndarray:
    return np.linspace(0.0, DEFAULT_TRACE_SPAN / gamma22, DEFAULT_TRACE_POINTS)


@dataclass(frozen=True)
class PQState:
    """Symmetrized readout variables sampled at one or more times.

    ``t_r0``, ``t_i0``, ``pop_a`` and ``pop_b`` are the values at the start of
    the readout that the trajectories were computed from.
    """

    p_r: np.ndarray
    p_i: np.ndarray
    q_r: np.ndarray
    q_i: np.ndarray
    t_r0: float
    t_i0: float
    pop_a: float
    pop_b: float


@dataclass
class PulseTrace:
    """Sampled D and D' signals."""

    times: np.ndarray
    s_d: np.ndarray
    s_dp: np.ndarray
    intens: IntensityParams
    stored: StoredState
    detector_tau: float = 0.0
    extra: dict = field(default_factory=dict)

    def energies(self) -> tuple[float, float]:
        """Trapezoid integrals of both channels over the sampled window."""
        return (float(np.trapezoid(self.s_d, self.times)),
                float(np.trapezoid(self.s_dp, self.times)))

    def scaled(self, c: float) -> "PulseTrace":
        return PulseTrace(self.times.copy(), c * self.s_d, c * self.s_dp,
                          self.intens, self.stored, self.detector_tau,
                          dict(self.extra))


@dataclass(frozen=True)
class EnergyReport:
    u_d: float
    u_dp: float
    u_t: float
    quadrature_error: float


def _kernel(intens: IntensityParams):
    return build_kernel(intens.i_t, intens.gamma22)


def solve_system1(intens: IntensityParams, t_i0: float, t):
    """Imaginary-part block: ``p_i = t_i0 f_r / gamma22`` and ``q_i = -p_i``."""
    t = np.asarray(t, dtype=float)
    if intens.i_t == 0 or t_i0 == 0:
        p_i = np.zeros_like(t)
    else:
        p_i = t_i0 * np.asarray(eval_fr(_kernel(intens), t)) / intens.gamma22
    return p_i, -p_i


def solve_system2(intens: IntensityParams, stored: StoredState,
                  t_r0: float, t):
    """Real-part block: ``(p_r, q_r)`` for populations taken from ``stored``.

    Exact for any ground-population imbalance; ``t_r0`` is ``T + T^*`` at the
    start of the readout.
    """
    t = np.asarray(t, dtype=float)
    if intens.i_t == 0:
        zero = np.zeros_like(t)
        return zero, zero.copy()
    g22 = intens.gamma22
    i_t, i_r, i_rp, i_d = intens.i_t, intens.i_r, intens.i_rp, intens.i_d
    diff = stored.population_difference
    k = _kernel(intens)
    f = np.asarray(eval_fr(k, t))
    g = np.asarray(eval_gr(k, t))
    tn = t_r0 / g22**2
    f_part = g22 * f * (i_r * i_rp / (4 * i_t) * diff + i_d / i_t * tn)
    bracket = i_t - i_d * diff + 16 * tn
    p_r = f_part + g22 * g * i_rp / (8 * i_t) * bracket
    q_r = -f_part + g22 * g * i_r / (8 * i_t) * bracket
    return p_r, q_r


def initial_t(intens: IntensityParams, stored: StoredState,
              grating_phase: float = 0.0) -> complex:
    """``T(0) = Omega_R' Omega_R^* rho_{1a,1b}(0)`` with both fields ``i |Omega|``."""
    coh = stored.coh * np.exp(1j * grating_phase)
    return complex(intens.omega_rp * intens.omega_r * coh)


def pq_state(intens: IntensityParams, stored: StoredState, t,
             grating_phase: float = 0.0) -> PQState:
    """Analytic real/imaginary parts of P and Q at times ``t``."""
    t = np.asarray(t, dtype=float)
    t0 = initial_t(intens, stored, grating_phase)
    t_r0, t_i0 = 2 * t0.real, 2 * t0.imag
    p_i, q_i = solve_system1(intens, t_i0, t)
    p_r, q_r = solve_system2(intens, stored, t_r0, t)
    return PQState(p_r, p_i, q_r, q_i, t_r0, t_i0, stored.pop_a, stored.pop_b)


def coherences(intens: IntensityParams, stored: StoredState, t,
               grating_phase: float = 0.0):
    """Optical coherences ``(sigma_{1a,2}, sigma_{1b,2})`` from the closed forms.

    A coherence whose driving read field is off is reported as zero.
    """
    if intens.i_r == 0 and intens.i_rp == 0:
        raise ValueError("at least one read field must be on")
    t = np.asarray(t, dtype=float)
    st = pq_state(intens, stored, t, grating_phase)
    p = 0.5 * (st.p_r + 1j * st.p_i)
    q = 0.5 * (st.q_r + 1j * st.q_i)
    sig_a = p / (1j * intens.omega_rp) if intens.omega_rp > 0 else 0 * p
    sig_b = q / (1j * intens.omega_r) if intens.omega_r > 0 else 0 * q
    return sig_a, sig_b


def _require_equal_writing(stored: StoredState):
    if not stored.equal_populations:
        raise UnsupportedRegimeError(
            "pulse shapes and energies assume equal ground populations "
            "(equal writing drives); use solve_system2 for the general case")


def _grating_visibility(stored: StoredState) -> float:
    # 4|coh|^2 = exp(-2 gamma t_s) for an equally written grating
    return 4.0 * abs(stored.coh) ** 2


def _channel_amplitude(f, g, i_own, i_other):
    return f * i_own + g * i_other


def pulse_signals(intens: IntensityParams, stored: StoredState, times=None,
                  a_d: float = 1.0, a_dp: float = 1.0) -> PulseTrace:
    """Fast-detector signals of the two diffracted pulses."""
    _require_equal_writing(stored)
    times = default_times(intens.gamma22) if times is None else np.asarray(times, float)
    if intens.i_t == 0:
        zero = np.zeros_like(times)
        return PulseTrace(times, zero, zero.copy(), intens, stored)
    k = _kernel(intens)
    f = np.asarray(eval_fr(k, times))
    g = np.asarray(eval_gr(k, times))
    vis = _grating_visibility(stored)
    i_t2 = intens.i_t**2
    s_d = a_d * vis * intens.i_r / i_t2 * _channel_amplitude(f, g, intens.i_r, intens.i_rp) ** 2
    s_dp = a_dp * vis * intens.i_rp / i_t2 * _channel_amplitude(f, g, intens.i_rp, intens.i_r) ** 2
    return PulseTrace(times, s_d, s_dp, intens, stored)


@functools.lru_cache(maxsize=1024)
def kernel_moments(i_t: float, gamma22: float = 1.0, rtol: float = DEFAULT_RTOL):
    """``((F2, FG, G2), errors)``: integrals of f_r^2, f_r g_r and g_r^2 over [0, inf).

    Every channel energy is a quadratic form in these three numbers, so a
    whole split scan at fixed ``i_t`` costs three quadratures.
    """
    k = build_kernel(i_t, gamma22)

    def f2(t):
        f = eval_fr(k, t)
        return f * f

    def fg(t):
        return eval_fr(k, t) * eval_gr(k, t)

    def g2(t):
        g = eval_gr(k, t)
        return g * g

    res = [integrate_decaying(fn, gamma22, rtol) for fn in (f2, fg, g2)]
    return tuple(r.value for r in res), tuple(r.error for r in res)


def _channel_energy(moments, errors, i_own, i_other, i_t):
    """``i_own / i_t^2`` times the integral of ``(f i_own + g i_other)^2``."""
    if i_own == 0:
        return 0.0, 0.0
    (f2, fg, g2), (e_f2, e_fg, e_g2) = moments, errors
    pref = i_own / i_t**2
    val = i_own**2 * f2 + 2 * i_own * i_other * fg + i_other**2 * g2
    err = i_own**2 * e_f2 + 2 * i_own * i_other * e_fg + i_other**2 * e_g2
    return pref * val, pref * err


def pulse_energies(intens: IntensityParams, stored: StoredState,
                   b_d: float = 1.0, b_dp: float = 1.0,
                   rtol: float = DEFAULT_RTOL) -> EnergyReport:
    """Time-integrated D and D' signals and their sum.

    ``b_d`` and ``b_dp`` default to the symmetric choice ``b_d == b_dp == 1``.
    The squared amplitudes are expanded over :func:`kernel_moments`, so the
    result is exactly symmetric under exchanging the two read intensities.
    """
    _require_equal_writing(stored)
    if intens.i_t == 0:
        return EnergyReport(0.0, 0.0, 0.0, 0.0)
    mom, mom_err = kernel_moments(intens.i_t, intens.gamma22, rtol)
    vis = _grating_visibility(stored)
    e_d, err_d = _channel_energy(mom, mom_err, intens.i_r, intens.i_rp, intens.i_t)
    e_dp, err_dp = _channel_energy(mom, mom_err, intens.i_rp, intens.i_r, intens.i_t)
    u_d = b_d * vis * e_d
    u_dp = b_dp * vis * e_dp
    err = vis * (abs(b_d) * err_d + abs(b_dp) * err_dp)
    return EnergyReport(u_d, u_dp, u_d + u_dp, err)
