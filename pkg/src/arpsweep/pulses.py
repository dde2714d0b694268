"""Drive envelope shapes and the swept detuning."""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import _kernels
from .core import GAUSS, RECT, PulseProfile, SweepParams

_KIND_CODES = {RECT: _kernels.KIND_RECT, GAUSS: _kernels.KIND_GAUSS}


def profile_kind_code(kind: str) -> int:
    """Map a profile kind name to the integer code used by the kernels."""
    try:
        return _KIND_CODES[kind]
    except KeyError:
        raise ValueError(f"unknown profile kind {kind!r}") from None


def detuning(t: float, params: SweepParams) -> float:
    """Instantaneous detuning rate*t - delta_omega.

    Runs from -delta_omega at t=0 to +delta_omega at t=duration and keeps
    growing linearly outside that window.  Accepts arrays for t.
    """
    return params.rate * t - params.delta_omega


def gaussian_width(duration: float, cutoff_fraction: float) -> float:
    """Envelope width beta = (duration/2)^2 / ln(1/cutoff_fraction).

    cutoff_fraction is the envelope value at the window edges relative to
    the peak, so smaller fractions give narrower pulses.
    """
    if not (math.isfinite(duration) and duration > 0.0):
        raise ValueError(f"duration must be finite and > 0, got {duration}")
    if not 0.0 < cutoff_fraction < 1.0:
        raise ValueError(
            f"cutoff_fraction must lie strictly inside (0, 1), got {cutoff_fraction}")
    half = 0.5 * duration
    return half * half / math.log(1.0 / cutoff_fraction)


def equal_area_peak(omega1: float, duration: float, beta: float) -> float:
    """Gaussian peak amplitude matching the area of a constant omega1 drive.

    peak = omega1 * duration / (sqrt(pi*beta) * erf(duration / (2 sqrt(beta)))).
    math.erf is exact to double precision, far inside the 1e-10 relative
    accuracy this quantity is required to meet.
    """
    if not (math.isfinite(omega1) and omega1 >= 0.0):
        raise ValueError(f"omega1 must be finite and >= 0, got {omega1}")
    if not (math.isfinite(duration) and duration > 0.0):
        raise ValueError(f"duration must be finite and > 0, got {duration}")
    if not (math.isfinite(beta) and beta > 0.0):
        raise ValueError(f"beta must be finite and > 0, got {beta}")
    root = math.sqrt(beta)
    return omega1 * duration / (math.sqrt(math.pi * beta)
                                * math.erf(duration / (2.0 * root)))


@dataclass(frozen=True)
class GaussianShape:
    """Precomputed Gaussian envelope: width beta, peak value, center time."""

    beta: float
    peak: float
    center: float


def gaussian_shape(omega1: float, duration: float,
                   cutoff_fraction: float = 0.1) -> GaussianShape:
    beta = gaussian_width(duration, cutoff_fraction)
    peak = equal_area_peak(omega1, duration, beta)
    return GaussianShape(beta=beta, peak=peak, center=0.5 * duration)


def amplitude(t: float, profile: PulseProfile, duration: float) -> float:
    """Instantaneous drive amplitude, zero outside the [0, duration] window.

    Convenience accessor; the propagator precomputes the envelope constants
    once per run instead of calling this per evaluation.
    """
    if not (math.isfinite(duration) and duration > 0.0):
        raise ValueError(f"duration must be finite and > 0, got {duration}")
    if t < 0.0 or t > duration:
        return 0.0
    if profile.kind == RECT:
        return profile.omega1
    shape = gaussian_shape(profile.omega1, duration, profile.cutoff_fraction)
    return float(_kernels.amp_envelope(t, _kernels.KIND_GAUSS, profile.omega1,
                                       shape.peak, shape.beta, duration))
