"""Master-equation generator and the instantaneous energy levels."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import SweepParams
from .pulses import amplitude, detuning, profile_kind_code


def _kernel_args(params: SweepParams) -> tuple:
    """Flatten SweepParams into the scalar argument pack the kernels take."""
    relax = params.relaxation
    return (
        profile_kind_code(params.profile.kind),
        params.profile.omega1,
        params.peak_amplitude,
        params.beta if params.beta is not None else 1.0,
        params.duration,
        params.rate,
        params.delta_omega,
        params.tau_c,
        relax.rate_feed_excited,
        relax.rate_feed_ground,
        relax.rate_coherence,
    )


def build_generator(t: float, params: SweepParams) -> np.ndarray:
    """4x4 generator G(t) with d/dt (rho11, rho12, rho21, rho22) = G y.

    Drive-induced dissipation enters through omega1(t)^2 * tau_c / 2 terms,
    the coherent part through +-i*omega1/2 and +-i*detuning entries, and
    thermal relaxation through the (1 +- m0)/t1 and 2/t2 rates.  The
    Gaussian profile uses its instantaneous envelope value.
    """
    out = np.empty((4, 4), dtype=np.complex128)
    (kind, omega1, peak, beta, duration, rate, delta_omega,
     tau_c, rfe, rfg, r2) = _kernel_args(params)
    _kernels.fill_generator(float(t), kind, omega1, peak, beta, duration,
                            rate, delta_omega, tau_c, rfe, rfg, r2, out)
    return out


@dataclass(frozen=True)
class EnergyPair:
    """Instantaneous adiabatic energies and the bare (diabatic) levels."""

    e_plus: float
    e_minus: float
    diabat_g: float
    diabat_e: float

    @property
    def gap(self) -> float:
        return self.e_plus - self.e_minus


def adiabats(t: float, params: SweepParams) -> EnergyPair:
    """Adiabatic energies +-sqrt(detuning^2 + omega1(t)^2)/2 at time t.

    The diabats are the drive-free levels +-detuning/2, which the adiabats
    approach far from resonance.  Uses the windowed amplitude, so outside
    [0, duration] the adiabats coincide with the diabats.
    """
    dw = detuning(t, params)
    w = amplitude(t, params.profile, params.duration)
    e = 0.5 * math.sqrt(dw * dw + w * w)
    return EnergyPair(e_plus=e, e_minus=-e, diabat_g=0.5 * dw, diabat_e=-0.5 * dw)
