"""Acceptance criteria, one test each, at their stated tolerances.

Every test prints a single PASS/FAIL line; the lines are repeated in the
terminal summary of the run.
"""

import contextlib
import csv
import io
import json
import math
import os
import time

import numpy as np
import pytest

from acceptance_log import record
from pulsepair import (DriveConfig, IntensityParams, asymptote_curve,
                       build_kernel, cubic_roots, degenerate_intensity,
                       detector_convolve, dip_ratio, energy_scan,
                       equal_writing_state, eval_fr, eval_gr,
                       excited_population_curve, find_minimum, fit_it,
                       full_budget, integrate_bloch, nonphasematched_energies,
                       phase_sweep, pq_state, pulse_signals,
                       stimulated_energies, synthetic_fit_data)
from pulsepair.cli import main
from pulsepair.kernel import fr_complex, gr_complex
from pulsepair.scan import microseconds_to_units

DATA = os.path.join(os.path.dirname(__file__), "data")

# max_t |f_r - g_r| / max_t |f_r| at I_t = 0.01 is 7.247e-3 by the 50-digit oracle
SMALL_INTENSITY_KERNEL_GAP = 7.3e-3


def test_criterion_01_oracle_equivalence():
    stored = equal_writing_state()
    times = np.linspace(0.0, 20.0, 200)
    worst = 0.0
    start = time.perf_counter()
    for i_t in (0.05, 0.5, 1.3, 10.0, 100.0):
        for frac in (0.0, 0.25, 0.5, 0.9):
            intens = IntensityParams(frac * i_t, i_t - frac * i_t)
            # chi = 0 as stated, plus a generic phase so the imaginary block is driven
            for phase in (0.0, math.pi / 3):
                drive = DriveConfig(omega_r=intens.omega_r, omega_rp=intens.omega_rp,
                                    grating_phase=phase)
                num = integrate_bloch(drive, stored, 20.0, 1e-10, times).symmetrized()
                ana = pq_state(intens, stored, times, phase)
                for key in ("p_r", "p_i", "q_r", "q_i"):
                    worst = max(worst, float(np.max(np.abs(num[key] - getattr(ana, key)))))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-8 and elapsed < 60
    assert record(1, "oracle equivalence", ok,
                  f"max abs error {worst:.2e} < 1e-8, {elapsed:.1f} s < 60 s")


def test_criterion_02_minimum_location():
    details, ok = [], True
    for i_t in (1.3, 10.0, 100.0):
        curve = energy_scan(i_t, 101)
        res = find_minimum(curve)
        step = i_t / 100
        good = abs(res.i_r_star - i_t / 2) <= step and res.has_interior_min
        ok &= good
        details.append(f"I_t={i_t:g}: i_r*={res.i_r_star:.4g}")
    flat = find_minimum(energy_scan(0.01, 101))
    ok &= not flat.has_interior_min
    details.append(f"I_t=0.01 interior={flat.has_interior_min}")
    assert record(2, "minimum location", ok, "; ".join(details))


def test_criterion_03_asymptote():
    start = time.perf_counter()
    grid = np.logspace(-3, 4, 25)
    curve = asymptote_curve(grid)
    ratios = np.array([r for _, r in curve])
    elapsed = time.perf_counter() - start
    top = ratios[-1]
    monotone = bool(np.all(np.diff(ratios) <= 0))
    ok = 0.267 <= top <= 0.287 and monotone and elapsed < 120
    assert record(3, "asymptote", ok,
                  f"ratio(1e4)={top:.5f} in [0.267, 0.287], monotone={monotone}, "
                  f"{elapsed:.1f} s < 120 s")


def test_criterion_04_thirty_percent_dip():
    dip = 1 - dip_ratio(1.3)
    ok = 0.25 <= dip <= 0.35
    assert record(4, "30% dip at I_t=1.3", ok, f"1 - U_T(I_t/2)/U_T(0) = {dip:.4f}")


def test_criterion_05_small_intensity_degeneracy():
    k = build_kernel(0.01)
    t = np.linspace(0.0, 2000.0, 200001)
    f, g = eval_fr(k, t), eval_gr(k, t)
    gap = float(np.max(np.abs(f - g)) / np.max(np.abs(f)))
    u = energy_scan(0.01, 101).u_t
    spread = float(u.max() - u.min())
    ok = gap < SMALL_INTENSITY_KERNEL_GAP and spread < 0.01
    assert record(5, "small-intensity degeneracy", ok,
                  f"kernel gap {gap:.3e} < {SMALL_INTENSITY_KERNEL_GAP}, "
                  f"U_T spread {spread:.4f} < 0.01")


def test_criterion_06_total_intensity_dependence():
    t = np.linspace(0.0, 20.0, 401)
    curves = [excited_population_curve(IntensityParams(a * 10, 10 - a * 10).i_t, times=t)
              for a in (0.0, 0.3, 0.5)]
    spread = max(float(np.max(np.abs(c - curves[0]))) for c in curves)

    intens = IntensityParams.from_ratio(1.3, 0.57)
    drive = DriveConfig(omega_r=intens.omega_r, omega_rp=intens.omega_rp)
    h = phase_sweep(drive, equal_writing_state(), t_end=20.0, times=t)
    rho = excited_population_curve(1.3, times=t)
    scale = float(rho @ h.rho22_mean / (rho @ rho))
    resid = float(np.max(np.abs(scale * rho - h.rho22_mean)) / np.max(h.rho22_mean))

    stim = [stimulated_energies(IntensityParams(a * 10, 10 - a * 10))[2] for a in (0.0, 0.3, 0.5)]
    stim_spread = (max(stim) - min(stim)) / stim[0]
    ok = spread < 1e-12 and resid < 1e-6 and stim_spread < 1e-12
    assert record(6, "total-intensity dependence", ok,
                  f"rho22 spread {spread:.1e}, oracle residual {resid:.1e} "
                  f"(scale {scale:.10f}), U_stim spread {stim_spread:.1e}")


def test_criterion_07_nonphasematched_maximum():
    ok, details = True, []
    for i_t in (1.3, 10.0):
        n = 100
        u = np.array([nonphasematched_energies(IntensityParams(i_t * j / n, i_t * (n - j) / n))[2]
                      for j in range(n + 1)])
        j_max = int(np.argmax(u))
        concave = bool(np.all(np.diff(u, 2) <= 1e-12 * u.max()))
        good = j_max == n // 2 and i_t * j_max / n == i_t / 2 and concave
        ok &= good
        details.append(f"I_t={i_t:g}: argmax i_r={i_t * j_max / n:g}, concave={concave}")
    assert record(7, "non-phase-matched maximum", ok, "; ".join(details))


def test_criterion_08_kernel_correctness():
    grid = np.concatenate([[0.0], np.logspace(-6, 4, 400)])
    root_sum = max(abs(sum(cubic_roots(x)) + 1.5) for x in grid)
    t = np.linspace(0.0, 50.0, 501)
    imag = 0.0
    for x in (0.01, 0.3, 0.5, 0.7, 1.3, 10.0, 100.0):
        k = build_kernel(x)
        for vals in (fr_complex(k, t), gr_complex(k, t)):
            imag = max(imag, float(np.max(np.abs(vals.imag))))
    zero = sorted(r.real for r in cubic_roots(0.0))
    zero_err = float(np.max(np.abs(np.array(zero) - [-1.0, -0.5, 0.0])))
    i_c = degenerate_intensity()
    xs = i_c + np.spacing(i_c) * np.arange(-64, 65)
    kernels = [build_kernel(float(x)) for x in xs]
    exercised = any(k.perturbed for k in kernels)
    g = np.array([eval_gr(k, t[::25]) for k in kernels])
    jump = float(np.max(np.abs(np.diff(g, axis=0))))
    ok = root_sum < 1e-10 and imag < 1e-12 and zero_err < 1e-9 and exercised and jump < 1e-6
    assert record(8, "kernel correctness", ok,
                  f"root sum {root_sum:.1e}, imag {imag:.1e}, zero roots {zero_err:.1e}, "
                  f"guard exercised={exercised}, g_r jump {jump:.1e}")


def test_criterion_09_fit_round_trip():
    clean = fit_it(synthetic_fit_data(1.3)).i_t_hat
    noisy = fit_it(synthetic_fit_data(1.3, noise=0.02, seed=0)).i_t_hat
    ok = abs(clean - 1.3) <= 1e-3 and abs(noisy - 1.3) <= 0.1
    assert record(9, "fit round trip", ok,
                  f"noiseless {clean:.6f}, 2% noise seed 0 {noisy:.4f}")


def _pulse_shape_defaults():
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        assert main(["pulse-shape"]) == 0
    rows = csv.DictReader(l for l in buf.getvalue().splitlines() if not l.startswith("#"))
    panels = {}
    for r in rows:
        panels.setdefault(float(r["ratio"]), []).append(
            (float(r["time"]), float(r["s_d"]), float(r["s_dp"])))
    return {k: np.array(v) for k, v in panels.items()}


def test_criterion_10_figure_regeneration():
    with open(os.path.join(DATA, "pulse_shape_regression.json")) as fh:
        ref = json.load(fh)
    panels = _pulse_shape_defaults()
    stride = ref["stride"]
    worst = 0.0
    for p in ref["panels"]:
        got = panels[p["ratio"]][::stride]
        for col, key in ((0, "time"), (1, "s_d"), (2, "s_dp")):
            worst = max(worst, float(np.max(np.abs(got[:, col] - p[key]))))
    same_panels = sorted(panels) == [0.02, 0.57, 1.04, 1.76]

    tau = microseconds_to_units(0.5)
    drift = 0.0
    for ratio, arr in panels.items():
        tr = pulse_signals(IntensityParams.from_ratio(1.3, ratio), equal_writing_state(), arr[:, 0])
        out = detector_convolve(tr, tau)
        for raw, smooth in zip(tr.energies(), out.energies()):
            drift = max(drift, abs(smooth - raw) / raw)
    ok = same_panels and worst < 1e-12 and drift < 1e-9
    assert record(10, "figure regeneration", ok,
                  f"panels {sorted(panels)}, regression max diff {worst:.1e}, "
                  f"detector energy drift {drift:.1e} < 1e-9")
