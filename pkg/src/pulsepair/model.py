"""Shared domain types, the writing-stage steady state and storage decay.

Conventions used throughout the package:

* Rates and Rabi magnitudes are in units of the excited-state decay rate
  ``gamma22`` (default 1), so times are in units of ``1/gamma22``.
* Every optical field carries the phase factor ``i`` at the spatial origin,
  ``Omega_X = i |Omega_X|``.  With this choice the stored ground coherence of
  an equally driven ensemble is ``-1/2`` (times the storage decay).  All
  observables depend on ``|coh|`` only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SteadyStateError

# gamma_ground / gamma22 above this is outside the weak-decoherence regime
WEAK_DECOHERENCE_RATIO = 1e-2


def _check_finite_nonneg(name, value):
    if not math.isfinite(value) or value < 0:
        raise ValueError(f"{name} must be finite and non-negative, got {value!r}")


@dataclass(frozen=True)
class DriveConfig:
    """Rabi magnitudes of the four fields plus the relaxation rates.

    ``grating_phase`` is the phase applied to the stored coherence when the
    full Bloch equations are integrated; the closed-form readout ignores it.
    """

    omega_w: float = 1.0
    omega_wp: float = 1.0
    omega_r: float = 0.0
    omega_rp: float = 0.0
    gamma22: float = 1.0
    gamma_ground: float = 0.0
    t_storage: float = 0.0
    grating_phase: float = 0.0

    def __post_init__(self):
        for name in ("omega_w", "omega_wp", "omega_r", "omega_rp",
                     "gamma_ground", "t_storage"):
            _check_finite_nonneg(name, getattr(self, name))
        if not (math.isfinite(self.gamma22) and self.gamma22 > 0):
            raise ValueError(f"gamma22 must be positive, got {self.gamma22!r}")
        if not math.isfinite(self.grating_phase):
            raise ValueError("grating_phase must be finite")
        object.__setattr__(self, "grating_phase",
                           self.grating_phase % (2 * math.pi))

    @property
    def weak_decoherence(self) -> bool:
        """True inside the model's validity regime gamma_ground << gamma22."""
        return self.gamma_ground <= WEAK_DECOHERENCE_RATIO * self.gamma22

    @classmethod
    def from_intensities(cls, i_r, i_rp, gamma22=1.0, **kwargs):
        """Build a drive whose read fields have the given saturation intensities."""
        return cls(omega_r=gamma22 * math.sqrt(i_r / 8.0),
                   omega_rp=gamma22 * math.sqrt(i_rp / 8.0),
                   gamma22=gamma22, **kwargs)

    def intensities(self) -> "IntensityParams":
        return intensity_params(self.omega_r, self.omega_rp, self.gamma22)

    def metadata(self) -> dict:
        return {
            "omega_w": self.omega_w, "omega_wp": self.omega_wp,
            "omega_r": self.omega_r, "omega_rp": self.omega_rp,
            "gamma22": self.gamma22, "gamma_ground": self.gamma_ground,
            "t_storage": self.t_storage, "grating_phase": self.grating_phase,
            "weak_decoherence": self.weak_decoherence,
        }


@dataclass(frozen=True)
class PreparedEnsemble:
    """Ground-state density matrix at the end of the writing stage."""

    pop_a: float
    pop_b: float
    coh: complex


@dataclass(frozen=True)
class StoredState:
    """Ground-state density matrix when the read fields switch on."""

    pop_a: float
    pop_b: float
    coh: complex

    @property
    def population_difference(self) -> float:
        return self.pop_a - self.pop_b

    @property
    def equal_populations(self) -> bool:
        return abs(self.pop_a - self.pop_b) <= 1e-12


@dataclass(frozen=True)
class IntensityParams:
    """Read intensities in saturation units, ``I = 8 |Omega|^2 / gamma22^2``.

    ``i_t`` and ``i_d`` are derived on construction so the sum/difference
    identities hold exactly.
    """

    i_r: float
    i_rp: float
    gamma22: float = 1.0
    i_t: float = field(init=False)
    i_d: float = field(init=False)

    def __post_init__(self):
        _check_finite_nonneg("i_r", self.i_r)
        _check_finite_nonneg("i_rp", self.i_rp)
        if not (math.isfinite(self.gamma22) and self.gamma22 > 0):
            raise ValueError(f"gamma22 must be positive, got {self.gamma22!r}")
        object.__setattr__(self, "i_t", self.i_r + self.i_rp)
        object.__setattr__(self, "i_d", self.i_r - self.i_rp)

    @classmethod
    def from_split(cls, i_t, i_r, gamma22=1.0):
        """``i_r`` out of a total ``i_t``; the remainder goes to R'."""
        if i_r < 0 or i_r > i_t:
            raise ValueError(f"i_r={i_r} outside [0, i_t={i_t}]")
        return cls(i_r, i_t - i_r, gamma22)

    @classmethod
    def from_ratio(cls, i_t, ratio, gamma22=1.0):
        """Split ``i_t`` so that ``i_rp / i_r == ratio``."""
        if not ratio >= 0:
            raise ValueError(f"ratio must be non-negative, got {ratio!r}")
        i_r = i_t / (1.0 + ratio)
        return cls(i_r, i_t - i_r, gamma22)

    @property
    def omega_r(self) -> float:
        return self.gamma22 * math.sqrt(self.i_r / 8.0)

    @property
    def omega_rp(self) -> float:
        return self.gamma22 * math.sqrt(self.i_rp / 8.0)

    def swapped(self) -> "IntensityParams":
        return IntensityParams(self.i_rp, self.i_r, self.gamma22)

    def metadata(self) -> dict:
        return {"i_r": self.i_r, "i_rp": self.i_rp, "i_t": self.i_t,
                "i_d": self.i_d, "gamma22": self.gamma22}


def prepare_steady_state(omega_w: float, omega_wp: float) -> PreparedEnsemble:
    """Steady state left by two resonant writing fields.

    Populations follow the optical-pumping ratio; the coherence is
    ``-Omega_W^* Omega_W' / (|Omega_W|^2 + |Omega_W'|^2)`` with both fields
    carrying the phase ``i``.
    """
    _check_finite_nonneg("omega_w", omega_w)
    _check_finite_nonneg("omega_wp", omega_wp)
    norm = omega_w**2 + omega_wp**2
    if norm == 0:
        raise SteadyStateError("at least one writing field must be on")
    w = 1j * omega_w
    wp = 1j * omega_wp
    coh = -(np.conj(w) * wp) / norm
    pop_a = omega_w**2 / norm
    return PreparedEnsemble(pop_a=pop_a, pop_b=1.0 - pop_a, coh=complex(coh))


def decay_to_storage(prep: PreparedEnsemble, gamma_ground: float,
                     t_storage: float) -> StoredState:
    """Let the excited state empty and the ground coherence decay for ``t_storage``."""
    _check_finite_nonneg("gamma_ground", gamma_ground)
    _check_finite_nonneg("t_storage", t_storage)
    diff = prep.pop_a - prep.pop_b
    return StoredState(pop_a=0.5 + 0.5 * diff,
                       pop_b=0.5 - 0.5 * diff,
                       coh=prep.coh * math.exp(-gamma_ground * t_storage))


def intensity_params(omega_r: float, omega_rp: float,
                     gamma22: float = 1.0) -> IntensityParams:
    """Saturation-unit intensities of the two read fields."""
    if not gamma22 > 0:
        raise ValueError(f"gamma22 must be positive, got {gamma22!r}")
    _check_finite_nonneg("omega_r", omega_r)
    _check_finite_nonneg("omega_rp", omega_rp)
    return IntensityParams(8.0 * omega_r**2 / gamma22**2,
                           8.0 * omega_rp**2 / gamma22**2, gamma22)


def stored_from_drive(drive: DriveConfig) -> StoredState:
    """Writing steady state followed by storage decay, both taken from ``drive``."""
    prep = prepare_steady_state(drive.omega_w, drive.omega_wp)
    return decay_to_storage(prep, drive.gamma_ground, drive.t_storage)


def equal_writing_state(gamma_ground: float = 0.0,
                        t_storage: float = 0.0) -> StoredState:
    """Stored state of a maximum-visibility grating (equal writing drives)."""
    return decay_to_storage(prepare_steady_state(1.0, 1.0),
                            gamma_ground, t_storage)
