import numpy as np
import pytest

from pulsepair import (DriveConfig, IntensityParams, StiffnessError,
                       equal_writing_state, excited_population_curve,
                       integrate_bloch, oracle_energies, phase_sweep,
                       pq_state, pulse_energies, pulse_signals)

T = np.linspace(0.0, 20.0, 201)


def _drive(intens, **kw):
    return DriveConfig(omega_r=intens.omega_r, omega_rp=intens.omega_rp, **kw)


def _max_error(intens, tol, phase=0.4):
    stored = equal_writing_state()
    num = integrate_bloch(_drive(intens, grating_phase=phase), stored, 20.0,
                          tol, T).symmetrized()
    ana = pq_state(intens, stored, T, phase)
    return max(np.max(np.abs(num[k] - getattr(ana, k)))
               for k in ("p_r", "p_i", "q_r", "q_i"))


@pytest.mark.parametrize("tol", [1e-14, 1e-5])
def test_tolerance_range_is_enforced(tol):
    with pytest.raises(ValueError):
        integrate_bloch(DriveConfig(omega_r=0.3), equal_writing_state(), 10.0, tol)


def test_error_tracks_tolerance():
    intens = IntensityParams(1.0, 0.3)
    loose, tight = _max_error(intens, 1e-6), _max_error(intens, 1e-10)
    assert tight < 1e-8
    assert tight < loose


def test_probability_is_conserved_and_positive():
    traj = integrate_bloch(_drive(IntensityParams(5.0, 2.0)), equal_writing_state(), 20.0)
    assert np.all(traj.rho_22 > -1e-10)
    assert np.all(traj.rho_aa > -1e-10) and np.all(traj.rho_bb > -1e-10)
    # ground-state coherence bounded by populations
    assert np.all(np.abs(traj.rho_ab) ** 2 <= traj.rho_aa * traj.rho_bb + 1e-10)


def test_dark_state_does_not_evolve():
    traj = integrate_bloch(_drive(IntensityParams(0.65, 0.65)), equal_writing_state(), 20.0)
    np.testing.assert_allclose(traj.rho_22, 0.0, atol=1e-12)


def test_step_failure_raises_stiffness_error(monkeypatch):
    import pulsepair.oracle as mod

    class Failed:
        status = -1
        message = "forced"
        t = np.array([0.0, 1.0])
        y = np.zeros((8, 2))

    monkeypatch.setattr(mod, "solve_ivp", lambda *a, **k: Failed())
    with pytest.raises(StiffnessError) as info:
        mod.integrate_bloch(DriveConfig(omega_r=0.3), equal_writing_state(), 10.0)
    assert info.value.t == 1.0
    assert "tolerance" in info.value.diagnostics


@pytest.fixture(scope="module")
def sweep():
    intens = IntensityParams.from_ratio(1.3, 0.57)
    t = np.linspace(0.0, 40.0, 801)
    return intens, phase_sweep(_drive(intens), equal_writing_state(),
                               t_end=40.0, times=t)


def test_phase_matched_harmonics_reproduce_pulses(sweep):
    intens, h = sweep
    tr = pulse_signals(intens, equal_writing_state(), h.times)
    np.testing.assert_allclose(32 * np.abs(h.d_amplitude) ** 2, tr.s_d, atol=1e-9)
    np.testing.assert_allclose(32 * np.abs(h.dp_amplitude) ** 2, tr.s_dp, atol=1e-9)


def test_only_three_harmonics_are_present(sweep):
    _, h = sweep
    assert abs(h.parseval_gap()) < 1e-12


def test_nonphasematched_terms_are_nonzero(sweep):
    _, h = sweep
    assert np.max(np.abs(h.npm_a)) > 1e-3
    assert np.max(np.abs(h.npm_b)) > 1e-3


def test_phase_averaged_excited_population(sweep):
    _, h = sweep
    rho = excited_population_curve(1.3, times=h.times)
    np.testing.assert_allclose(rho, h.rho22_mean, atol=1e-9)


def test_oracle_energies_agree_with_quadrature(sweep):
    intens, h = sweep
    oe = oracle_energies(h, intens)
    pe = pulse_energies(intens, equal_writing_state())
    assert oe.u_d == pytest.approx(pe.u_d, rel=1e-5)
    assert oe.u_dp == pytest.approx(pe.u_dp, rel=1e-5)


def test_phase_sweep_needs_enough_phases():
    with pytest.raises(ValueError):
        phase_sweep(DriveConfig(omega_r=0.3), equal_writing_state(), n_phases=4)
