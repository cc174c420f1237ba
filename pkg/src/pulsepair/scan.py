"""Parameter scans: energy split, the dip, I_t fitting and detector smoothing."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.signal import lfilter

from .errors import DegenerateFitError, ResampleRequiredError
from .model import IntensityParams, StoredState, equal_writing_state
from .quadrature import DEFAULT_RTOL
from .readout import PulseTrace, pulse_energies

# excited-state decay of the cesium D2 line, rad/s
GAMMA22_CESIUM = 2 * math.pi * 5.2e6
# an interior dip shallower than this fraction of U_T(I_R = 0) counts as flat
FLAT_TOLERANCE = 1e-2
FIT_GRID_POINTS = 51
FIT_XTOL = 1e-4


def microseconds_to_units(t_us: float, gamma22_si: float = GAMMA22_CESIUM) -> float:
    """Convert a physical time in microseconds to units of 1/gamma22."""
    return t_us * 1e-6 * gamma22_si


def units_to_microseconds(t: np.ndarray, gamma22_si: float = GAMMA22_CESIUM):
    return np.asarray(t) / gamma22_si * 1e6


@dataclass
class ScanCurve:
    """Total diffracted energy against I_R at fixed I_t.

    ``points`` rows are ``(i_r, u_t, u_d, u_dp)`` with ``u_t`` normalised by
    ``normalization`` (the un-normalised U_T at I_R = 0).
    """

    i_t: float
    points: np.ndarray
    normalization: float
    quadrature_error: float = 0.0

    @property
    def i_r(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def u_t(self) -> np.ndarray:
        return self.points[:, 1]


@dataclass(frozen=True)
class MinimumResult:
    i_r_star: float
    u_t_star: float
    has_interior_min: bool


@dataclass
class FitResult:
    i_t_hat: float
    scale_d: float
    scale_dp: float
    residual_norm: float
    iterations: int
    at_boundary: bool = False
    metadata: dict = field(default_factory=dict)


def _energies(i_r, i_rp, stored, rtol):
    return pulse_energies(IntensityParams(i_r, i_rp), stored, rtol=rtol)


def energy_scan(i_t: float, n_points: int = 101, stored: StoredState | None = None,
                rtol: float = DEFAULT_RTOL) -> ScanCurve:
    """U_T on a uniform I_R grid over [0, I_t] with I_R' = I_t - I_R.

    The grid is built so mirrored points carry exactly swapped intensities.
    """
    if n_points < 3 or n_points % 2 == 0:
        raise ValueError("n_points must be odd and at least 3")
    if not i_t > 0:
        raise ValueError("i_t must be positive")
    stored = equal_writing_state() if stored is None else stored
    n = n_points - 1
    rows = []
    err = 0.0
    for j in range(n_points):
        rep = _energies(i_t * j / n, i_t * (n - j) / n, stored, rtol)
        rows.append((i_t * j / n, rep.u_t, rep.u_d, rep.u_dp))
        err += rep.quadrature_error
    pts = np.array(rows)
    norm = pts[0, 1]
    pts[:, 1] = pts[:, 1] / norm
    return ScanCurve(i_t=i_t, points=pts, normalization=norm,
                     quadrature_error=err / norm)


def find_minimum(curve: ScanCurve, flat_tol: float = FLAT_TOLERANCE) -> MinimumResult:
    """Grid argmin of the normalised U_T refined by a three-point parabola.

    ``has_interior_min`` requires the minimum to sit strictly inside the grid
    and below both endpoints by more than ``flat_tol``.
    """
    x, y = curve.i_r, curve.u_t
    j = int(np.argmin(y))
    x_star, y_star = float(x[j]), float(y[j])
    interior = 0 < j < len(y) - 1
    if interior:
        y0, y1, y2 = y[j - 1], y[j], y[j + 1]
        curv = y0 - 2 * y1 + y2
        if curv > 0:
            h = x[j + 1] - x[j]
            off = 0.5 * h * (y0 - y2) / curv
            x_star = float(x[j] + off)
            y_star = float(y1 - 0.125 * (y0 - y2) ** 2 / curv)
    depth = min(y[0], y[-1]) - y_star
    return MinimumResult(x_star, y_star, bool(interior and depth > flat_tol))


def dip_ratio(i_t: float, stored: StoredState | None = None,
              rtol: float = DEFAULT_RTOL) -> float:
    """U_T at the balanced split over U_T with all light in R'."""
    stored = equal_writing_state() if stored is None else stored
    mid = _energies(0.5 * i_t, 0.5 * i_t, stored, rtol).u_t
    end = _energies(0.0, i_t, stored, rtol).u_t
    return mid / end


def asymptote_curve(i_t_list, stored: StoredState | None = None,
                    rtol: float = DEFAULT_RTOL) -> list[tuple[float, float]]:
    """``(i_t, U_T(I_t/2) / U_T(0))`` for each total intensity."""
    out = []
    for i_t in i_t_list:
        if not i_t > 0:
            raise ValueError("total intensities must be positive")
        out.append((float(i_t), dip_ratio(float(i_t), stored, rtol)))
    return out


def _model_channels(i_t, x, stored, rtol):
    md = np.empty(len(x))
    mdp = np.empty(len(x))
    for j, frac in enumerate(x):
        rep = _energies(i_t * frac, i_t * (1.0 - frac), stored, rtol)
        md[j], mdp[j] = rep.u_d, rep.u_dp
    return md, mdp


def _linear_scale(y, m):
    den = float(m @ m)
    return float(y @ m) / den if den > 0 else 0.0


def fit_it(data, i_t_bounds=(0.05, 20.0), stored: StoredState | None = None,
           rtol: float = DEFAULT_RTOL, grid_points: int = FIT_GRID_POINTS,
           xtol: float = FIT_XTOL) -> FitResult:
    """Best-fit total intensity for measured (I_R/I_t, U_D, U_D') triples.

    The two channel scales enter linearly and are eliminated in closed form
    at every candidate I_t; the remaining one-dimensional problem is scanned
    on a log grid and refined by bounded Brent search in log I_t.
    """
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError("data must be rows of (i_r_over_it, u_d, u_dp)")
    if arr.shape[0] < 4:
        raise DegenerateFitError("need at least four data points")
    if not np.all(np.isfinite(arr)):
        raise ValueError("data contain non-finite values")
    if np.all(arr[:, 1:] == 0):
        raise DegenerateFitError("all energies are zero")
    lo, hi = i_t_bounds
    if not (0 < lo < hi):
        raise ValueError("i_t_bounds must be positive and increasing")
    if np.any((arr[:, 0] < 0) | (arr[:, 0] > 1)):
        raise ValueError("i_r_over_it must lie in [0, 1]")
    stored = equal_writing_state() if stored is None else stored
    x, yd, ydp = arr[:, 0], arr[:, 1], arr[:, 2]
    evals = 0

    def objective(log_it):
        nonlocal evals
        evals += 1
        md, mdp = _model_channels(math.exp(log_it), x, stored, rtol)
        sd, sdp = _linear_scale(yd, md), _linear_scale(ydp, mdp)
        r = np.concatenate([yd - sd * md, ydp - sdp * mdp])
        return float(r @ r), sd, sdp

    grid = np.linspace(math.log(lo), math.log(hi), grid_points)
    values = [objective(g)[0] for g in grid]
    j = int(np.argmin(values))
    at_boundary = j in (0, grid_points - 1)
    a = grid[max(j - 1, 0)]
    b = grid[min(j + 1, grid_points - 1)]
    res = minimize_scalar(lambda g: objective(g)[0], bounds=(a, b),
                          method="bounded", options={"xatol": xtol})
    best = float(res.x)
    if res.fun > values[j]:
        best = float(grid[j])
    ssr, sd, sdp = objective(best)
    i_t_hat = math.exp(best)
    at_boundary = at_boundary and (abs(best - grid[0]) < 2 * xtol
                                   or abs(best - grid[-1]) < 2 * xtol)
    return FitResult(
        i_t_hat=i_t_hat, scale_d=sd, scale_dp=sdp,
        residual_norm=math.sqrt(ssr), iterations=evals,
        at_boundary=at_boundary,
        metadata={"scales": "independent linear scale per channel",
                  "bounds": [lo, hi], "grid_points": grid_points})


def synthetic_fit_data(i_t: float, fractions=None, noise: float = 0.0,
                       seed: int | None = 0, scale_d: float = 1.0,
                       scale_dp: float = 1.0,
                       stored: StoredState | None = None) -> np.ndarray:
    """Model energies at ``fractions`` of I_t with optional multiplicative noise."""
    fractions = np.linspace(0.0, 1.0, 11) if fractions is None else np.asarray(fractions, float)
    stored = equal_writing_state() if stored is None else stored
    md, mdp = _model_channels(i_t, fractions, stored, DEFAULT_RTOL)
    md, mdp = scale_d * md, scale_dp * mdp
    if noise:
        rng = np.random.default_rng(seed)
        md = md * (1 + noise * rng.standard_normal(md.shape))
        mdp = mdp * (1 + noise * rng.standard_normal(mdp.shape))
    return np.column_stack([fractions, md, mdp])


def _lowpass(x, h, tau):
    """Exact single-pole response to the piecewise-linear interpolant of ``x``.

    Solving y' = (x - y) / tau across one step with x linear gives
    y[k+1] = a y[k] + (1 - c) x[k+1] + (c - a) x[k], a = exp(-h/tau),
    c = tau (1 - a) / h.  The filter starts settled on x[0].
    """
    one_minus_a = -math.expm1(-h / tau)
    a = 1.0 - one_minus_a
    c = tau * one_minus_a / h
    b = [1.0 - c, c - a]
    y, _ = lfilter(b, [1.0, -a], x, zi=[c * x[0]])
    return y


def detector_convolve(trace: PulseTrace, tau_d: float,
                      settle: float = 1e-13) -> PulseTrace:
    """Pass both channels through a unit-gain single-pole low-pass.

    ``tau_d`` is the detector time constant in units of 1/gamma22.  The input
    is taken as switched off after its last sample; the grid is extended with
    the same spacing until the free decay falls below ``settle``, so the
    integrated energy of each channel is kept.
    """
    if tau_d < 0:
        raise ValueError("tau_d must be non-negative")
    t = np.asarray(trace.times, float)
    if t.size < 2:
        raise ResampleRequiredError("need at least two samples")
    h = t[1] - t[0]
    if h <= 0 or not np.allclose(np.diff(t), h, rtol=1e-9, atol=0):
        raise ResampleRequiredError("detector_convolve needs a uniform time grid")
    if tau_d == 0:
        return PulseTrace(t.copy(), trace.s_d.copy(), trace.s_dp.copy(),
                          trace.intens, trace.stored, 0.0, dict(trace.extra))
    n_extra = int(math.ceil(tau_d * math.log(1.0 / settle) / h))
    decay = np.exp(-h / tau_d * np.arange(1, n_extra + 1))
    times = t[0] + h * np.arange(t.size + n_extra)

    def run(x):
        y = _lowpass(np.asarray(x, float), h, tau_d)
        return np.concatenate([y, y[-1] * decay])

    extra = dict(trace.extra)
    extra["detector_tau"] = tau_d
    return PulseTrace(times, run(trace.s_d), run(trace.s_dp), trace.intens,
                      trace.stored, tau_d, extra)


def full_width(times, signal, level: float = math.exp(-1)) -> float:
    """Width of the region where ``signal`` exceeds ``level`` times its peak."""
    signal = np.asarray(signal)
    peak = signal.max()
    if peak <= 0:
        return 0.0
    above = np.nonzero(signal >= level * peak)[0]
    return float(times[above[-1]] - times[above[0]])
