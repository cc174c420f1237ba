"""The two universal readout kernels f_r(t) and g_r(t).

``f_r`` solves the two-variable oscillator block (imaginary parts of the
symmetrized coherences); ``g_r`` is built from the three roots of

    r^3 + (3/2) r^2 + (1/2 + I_t/2) r + I_t/8 = 0

obtained with Cardano's formula.  Both depend only on the total read
intensity ``I_t`` and on ``gamma22``.  Roots are expressed in units of
``gamma22`` so the exponentials are ``exp(r * gamma22 * t)``.

Everything is evaluated in complex arithmetic.  For small ``I_t`` the cubic
has three real roots but Cardano's radicand is negative, and for
``I_t > 1/2`` the square root in ``f_r`` is imaginary; the realness of both
kernels is checked by tests rather than assumed.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

# |r2 - r3| below this fraction of max|r| is treated as a double root
DEGENERATE_ROOT_TOL = 1e-8
DEGENERATE_NUDGE = 1e-9
SINHC_SERIES_CUTOFF = 1e-4

_SQRT3_2 = math.sqrt(3.0) / 2.0


@dataclass(frozen=True)
class ReadoutKernel:
    """Roots and coefficients needed to evaluate f_r and g_r at one ``I_t``.

    ``i_t_eval`` differs from ``i_t`` only when the double-root guard
    nudged the intensity (``perturbed`` is then True).
    """

    i_t: float
    gamma22: float
    roots: tuple
    aux: tuple
    i_t_eval: float
    perturbed: bool
    kappa: complex
    g_coeffs: tuple

    @property
    def slowest_rate(self) -> float:
        """Smallest decay rate (in units of gamma22) among all exponentials."""
        rates = [-r.real for r in self.roots]
        rates += [(1.0 - self.kappa.real) / 4.0, (1.0 + self.kappa.real) / 4.0]
        return min(rates)

    def metadata(self) -> dict:
        return {
            "i_t": self.i_t, "gamma22": self.gamma22,
            "roots": [[r.real, r.imag] for r in self.roots],
            "perturbed": self.perturbed,
        }


def cardano_aux(i_t: float) -> tuple[complex, complex]:
    """Cardano's ``s`` and ``v`` for the readout cubic.

    ``s`` is the principal cube root of its radicand.  ``v`` is taken from
    the pairing ``s * v = -p/3`` rather than from its own principal root:
    once the radicand turns positive, the second radicand is a negative real
    and its principal root lies on the wrong branch.
    """
    # depressed cubic y^3 + p y + q with y = r + 1/2
    p = (i_t - 0.5) / 2.0
    disc = (i_t / 3.0 - 1.0 / 6.0) ** 3 / 8.0 + i_t**2 / 256.0
    root_disc = np.sqrt(complex(disc))
    s = complex(np.power(complex(i_t / 16.0 + root_disc), 1.0 / 3.0))
    if s == 0:
        v = complex(np.power(complex(i_t / 16.0 - root_disc), 1.0 / 3.0))
    else:
        v = -p / (3.0 * s)
    return s, v


def cubic_roots(i_t: float) -> tuple[complex, complex, complex]:
    s, v = cardano_aux(i_t)
    r1 = s + v - 0.5
    r2 = -(s + v) / 2.0 - 0.5 + _SQRT3_2 * (s - v) * 1j
    r3 = -(s + v) / 2.0 - 0.5 - _SQRT3_2 * (s - v) * 1j
    return r1, r2, r3


def _is_degenerate(roots) -> bool:
    scale = max(abs(r) for r in roots)
    return abs(roots[1] - roots[2]) < DEGENERATE_ROOT_TOL * max(scale, 1e-300)


@functools.lru_cache(maxsize=4096)
def build_kernel(i_t: float, gamma22: float = 1.0) -> ReadoutKernel:
    """Precompute everything f_r and g_r need at total intensity ``i_t``."""
    i_t = float(i_t)
    gamma22 = float(gamma22)
    if not (math.isfinite(i_t) and i_t >= 0):
        raise ValueError(f"i_t must be finite and non-negative, got {i_t!r}")
    if not (math.isfinite(gamma22) and gamma22 > 0):
        raise ValueError(f"gamma22 must be positive, got {gamma22!r}")

    i_eval = i_t
    roots = cubic_roots(i_eval)
    perturbed = False
    if _is_degenerate(roots):
        # removable singularity in g_r; step off it
        i_eval = i_t * (1.0 + DEGENERATE_NUDGE)
        roots = cubic_roots(i_eval)
        perturbed = True
    s, v = cardano_aux(i_eval)
    r1, r2, r3 = roots
    coeff_a = (2 * r3 + 2 * r1 + 1) / (2 * (r2 - r1) * (r2 - r3))
    coeff_b = (2 * r2 + 2 * r1 + 1) / (2 * (r3 - r1) * (r3 - r2))
    kappa = complex(np.sqrt(complex(1.0 - 2.0 * i_t)))
    return ReadoutKernel(
        i_t=i_t, gamma22=gamma22, roots=(r1, r2, r3), aux=(s, v),
        i_t_eval=i_eval, perturbed=perturbed, kappa=kappa,
        g_coeffs=(coeff_a, coeff_b),
    )


def _sinhc_scaled(x):
    """exp(-x) sinh(x) / x = (1 - exp(-2x)) / (2x), by series near zero.

    The scaling keeps the value bounded for Re(x) >= 0.
    """
    x = np.asarray(x, dtype=complex)
    out = np.empty_like(x)
    small = np.abs(x) < SINHC_SERIES_CUTOFF
    xs = x[small]
    out[small] = 1.0 + xs * (-1.0 + xs * (2.0 / 3.0 + xs * (-1.0 / 3.0 + xs * 2.0 / 15.0)))
    xl = x[~small]
    out[~small] = -np.expm1(-2.0 * xl) / (2.0 * xl)
    return out


def fr_complex(kernel: ReadoutKernel, t) -> np.ndarray:
    """f_r evaluated in complex arithmetic (imaginary part is round-off)."""
    tau = kernel.gamma22 * np.asarray(t, dtype=float)
    x = kernel.kappa * tau / 4.0
    # e^{-tau/4} sinh(x) / (kappa/4) = tau * e^{x - tau/4} * e^{-x} sinh(x)/x
    return tau * np.exp(x - tau / 4.0) * _sinhc_scaled(x)


def gr_complex(kernel: ReadoutKernel, t) -> np.ndarray:
    """g_r evaluated in complex arithmetic (imaginary part is round-off)."""
    tau = kernel.gamma22 * np.asarray(t, dtype=float)
    r1, r2, r3 = kernel.roots
    coeff_a, coeff_b = kernel.g_coeffs
    e1 = np.exp(r1 * tau)
    return coeff_a * (e1 - np.exp(r2 * tau)) + coeff_b * (e1 - np.exp(r3 * tau))


def eval_fr(kernel: ReadoutKernel, t) -> np.ndarray | float:
    """f_r(t); scalar in, scalar out."""
    out = fr_complex(kernel, t).real
    return float(out) if np.ndim(t) == 0 else out


def eval_gr(kernel: ReadoutKernel, t) -> np.ndarray | float:
    """g_r(t); scalar in, scalar out."""
    out = gr_complex(kernel, t).real
    return float(out) if np.ndim(t) == 0 else out


def degenerate_intensity() -> float:
    """The ``I_t`` at which Cardano's radicand vanishes and r2 == r3."""
    from scipy.optimize import brentq

    def disc(i_t):
        return (i_t / 3.0 - 1.0 / 6.0) ** 3 / 8.0 + i_t**2 / 256.0

    return brentq(disc, 0.05, 0.5, xtol=1e-18, rtol=4 * np.finfo(float).eps)
