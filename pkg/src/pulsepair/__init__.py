"""Read-out of a stored ground-state coherence grating by two counter-propagating fields."""

__version__ = "0.1.0"

from .errors import (DegenerateFitError, NumericFailureError, PulsePairError,
                     ResampleRequiredError, SteadyStateError, StiffnessError,
                     UnsupportedRegimeError)
from .model import (DriveConfig, IntensityParams, PreparedEnsemble,
                    StoredState, decay_to_storage, equal_writing_state,
                    intensity_params, prepare_steady_state, stored_from_drive)
from .kernel import (ReadoutKernel, build_kernel, cubic_roots,
                     degenerate_intensity, eval_fr, eval_gr)
from .quadrature import QuadResult, integrate_decaying
from .readout import (EnergyReport, PQState, PulseTrace, coherences,
                      pq_state, pulse_energies, pulse_signals, solve_system1,
                      solve_system2)
from .oracle import (BlochTrajectory, PhaseHarmonics, integrate_bloch,
                     oracle_energies, phase_sweep)
from .budget import (EmissionBudget, excited_population_curve, full_budget,
                     nonphasematched_energies, spontaneous_energy,
                     stimulated_energies)
from .scan import (FitResult, MinimumResult, ScanCurve, asymptote_curve,
                   detector_convolve, dip_ratio, energy_scan, find_minimum,
                   fit_it, full_width, synthetic_fit_data)
