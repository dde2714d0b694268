"""Shared parameter and state types.

Unit convention used everywhere in this package: time in ms, angular
frequencies (amplitudes, detunings) in rad/ms, sweep rate in rad/ms^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

RECT = "rect"
GAUSS = "gauss"
PROFILE_KINDS = (RECT, GAUSS)

# construction-time tolerances for density states
TRACE_TOL = 1e-9
HERM_TOL = 1e-9
BLOCH_NORM_TOL = 1e-9

_SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if math.isnan(value):
        raise ValueError(f"{name} must not be NaN")
    return value


@dataclass(frozen=True)
class RelaxationParams:
    """Thermal relaxation toward equilibrium polarization m0.

    t1 and t2 are time constants in ms; math.inf disables the corresponding
    channel, in which case the derived rate is exactly 0.0.  The default
    m0 = 1 corresponds to a fully polarized cold equilibrium; it only
    matters when t1 is finite.
    """

    m0: float = 1.0
    t1: float = math.inf
    t2: float = math.inf

    def __post_init__(self) -> None:
        m0 = _check_finite("m0", self.m0)
        if not -1.0 <= m0 <= 1.0:
            raise ValueError(f"m0 must lie in [-1, 1], got {m0}")
        for name in ("t1", "t2"):
            v = float(getattr(self, name))
            if math.isnan(v) or v <= 0.0:
                raise ValueError(f"{name} must be positive (or inf), got {v}")
        object.__setattr__(self, "m0", m0)
        object.__setattr__(self, "t1", float(self.t1))
        object.__setattr__(self, "t2", float(self.t2))

    @classmethod
    def disabled(cls) -> "RelaxationParams":
        return cls()

    @property
    def enabled(self) -> bool:
        return math.isfinite(self.t1) or math.isfinite(self.t2)

    @property
    def rate_feed_excited(self) -> float:
        """(1 + m0)/t1: gain rate of the excited level (index 1, M_z = +1)."""
        return (1.0 + self.m0) / self.t1

    @property
    def rate_feed_ground(self) -> float:
        """(1 - m0)/t1: gain rate of the ground level (index 2, M_z = -1)."""
        return (1.0 - self.m0) / self.t1

    @property
    def rate_coherence(self) -> float:
        """2/t2 decay rate of the off-diagonal elements."""
        return 2.0 / self.t2


@dataclass(frozen=True)
class PulseProfile:
    """Drive envelope selector: constant ("rect") or Gaussian ("gauss").

    omega1 is the nominal amplitude in rad/ms.  For the Gaussian shape the
    actual peak is renormalized so both profiles deposit the same area over
    the sweep window; cutoff_fraction sets the relative envelope value at
    the window edges and is ignored for the rectangular profile.
    """

    kind: str
    omega1: float
    cutoff_fraction: float = 0.1

    def __post_init__(self) -> None:
        if self.kind not in PROFILE_KINDS:
            raise ValueError(
                f"profile kind must be one of {PROFILE_KINDS}, got {self.kind!r}")
        omega1 = _check_finite("omega1", self.omega1)
        if not math.isfinite(omega1) or omega1 < 0.0:
            raise ValueError(f"omega1 must be finite and >= 0, got {omega1}")
        f = _check_finite("cutoff_fraction", self.cutoff_fraction)
        if not 0.0 < f < 1.0:
            raise ValueError(
                f"cutoff_fraction must lie strictly inside (0, 1), got {f}")
        object.__setattr__(self, "omega1", omega1)
        object.__setattr__(self, "cutoff_fraction", f)

    @classmethod
    def rectangular(cls, omega1: float) -> "PulseProfile":
        return cls(RECT, omega1)

    @classmethod
    def gaussian(cls, omega1: float, cutoff_fraction: float = 0.1) -> "PulseProfile":
        return cls(GAUSS, omega1, cutoff_fraction)


@dataclass(frozen=True)
class SweepParams:
    """Full configuration of one linear frequency sweep.

    Use make_sweep_params to construct: it enforces the exact coupling
    rate = 2*delta_omega/duration and precomputes the Gaussian envelope
    width beta and peak amplitude.  beta is None for the rectangular
    profile; peak_amplitude then equals profile.omega1.
    """

    delta_omega: float
    duration: float
    rate: float
    profile: PulseProfile
    tau_c: float
    relaxation: RelaxationParams
    beta: float | None
    peak_amplitude: float

    @property
    def omega1(self) -> float:
        return self.profile.omega1


def make_sweep_params(
    delta_omega: float,
    profile: PulseProfile,
    *,
    duration: float | None = None,
    rate: float | None = None,
    tau_c: float = 0.0,
    relaxation: RelaxationParams | None = None,
) -> SweepParams:
    """Build SweepParams from delta_omega plus exactly one of duration/rate.

    The detuning runs linearly from -delta_omega to +delta_omega over the
    sweep, so rate = 2*delta_omega/duration.  When rate is supplied, the
    stored rate is re-derived from the computed duration so that
    2*delta_omega/duration - rate == 0.0 holds bit-exactly (the stored
    value can differ from the argument by one ulp).
    """
    delta_omega = _check_finite("delta_omega", delta_omega)
    if not math.isfinite(delta_omega) or delta_omega <= 0.0:
        raise ValueError(f"delta_omega must be finite and > 0, got {delta_omega}")
    if (duration is None) == (rate is None):
        raise ValueError("exactly one of duration or rate must be given")
    if duration is not None:
        duration = _check_finite("duration", duration)
        if not math.isfinite(duration) or duration <= 0.0:
            raise ValueError(f"duration must be finite and > 0, got {duration}")
    else:
        rate = _check_finite("rate", rate)
        if not math.isfinite(rate) or rate <= 0.0:
            raise ValueError(f"rate must be finite and > 0, got {rate}")
        duration = 2.0 * delta_omega / rate
    rate = 2.0 * delta_omega / duration

    tau_c = _check_finite("tau_c", tau_c)
    if not math.isfinite(tau_c) or tau_c < 0.0:
        raise ValueError(f"tau_c must be finite and >= 0, got {tau_c}")
    if relaxation is None:
        relaxation = RelaxationParams.disabled()

    if profile.kind == GAUSS:
        # local import keeps core importable before pulses is loaded
        from .pulses import equal_area_peak, gaussian_width

        beta = gaussian_width(duration, profile.cutoff_fraction)
        peak = equal_area_peak(profile.omega1, duration, beta)
    else:
        beta = None
        peak = profile.omega1

    return SweepParams(
        delta_omega=delta_omega,
        duration=duration,
        rate=rate,
        profile=profile,
        tau_c=tau_c,
        relaxation=relaxation,
        beta=beta,
        peak_amplitude=peak,
    )


@dataclass(frozen=True)
class BlochVector:
    mx: float
    my: float
    mz: float

    @property
    def norm(self) -> float:
        return math.sqrt(self.mx ** 2 + self.my ** 2 + self.mz ** 2)

    def as_array(self) -> np.ndarray:
        return np.array([self.mx, self.my, self.mz])


@dataclass(frozen=True)
class DensityState:
    """Two-level density operator stored as (rho11, rho12, rho21, rho22).

    Index 1 is the excited level (M_z = +1), index 2 the ground level.
    Construction validates unit trace, rho21 == conj(rho12) and a Bloch
    norm of at most 1 (each within small tolerances); the stored vector is
    an immutable copy.
    """

    vec: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.vec, dtype=complex)
        if v.shape != (4,):
            raise ValueError(f"state vector must have shape (4,), got {v.shape}")
        if not np.all(np.isfinite(v.view(float))):
            raise ValueError("state vector must be finite")
        tr = v[0] + v[3]
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace must be 1 within {TRACE_TOL}, got {tr}")
        if abs(v[2] - np.conj(v[1])) > HERM_TOL:
            raise ValueError("rho21 must equal conj(rho12) within tolerance")
        mx = 2.0 * v[1].real
        my = -2.0 * v[1].imag
        mz = (v[0] - v[3]).real
        norm = math.sqrt(mx * mx + my * my + mz * mz)
        if norm > 1.0 + BLOCH_NORM_TOL:
            raise ValueError(f"Bloch norm must be <= 1, got {norm}")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "vec", v)

    @classmethod
    def ground(cls) -> "DensityState":
        return cls(np.array([0.0, 0.0, 0.0, 1.0], dtype=complex))

    @classmethod
    def excited(cls) -> "DensityState":
        return cls(np.array([1.0, 0.0, 0.0, 0.0], dtype=complex))

    @classmethod
    def from_matrix(cls, rho: np.ndarray) -> "DensityState":
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (2, 2):
            raise ValueError(f"density matrix must be 2x2, got {rho.shape}")
        return cls(np.array([rho[0, 0], rho[0, 1], rho[1, 0], rho[1, 1]]))

    @classmethod
    def from_bloch(cls, bloch: BlochVector) -> "DensityState":
        m = 0.5 * (np.eye(2, dtype=complex)
                   + bloch.mx * _SIGMA_X + bloch.my * _SIGMA_Y + bloch.mz * _SIGMA_Z)
        return cls.from_matrix(m)

    @property
    def rho11(self) -> complex:
        return complex(self.vec[0])

    @property
    def rho12(self) -> complex:
        return complex(self.vec[1])

    @property
    def rho21(self) -> complex:
        return complex(self.vec[2])

    @property
    def rho22(self) -> complex:
        return complex(self.vec[3])

    @property
    def matrix(self) -> np.ndarray:
        return self.vec.reshape(2, 2).copy()


def bloch_from_state(state: DensityState) -> BlochVector:
    """Bloch components: mx = 2 Re rho12, my = -2 Im rho12, mz = rho11 - rho22."""
    v = state.vec
    return BlochVector(
        mx=2.0 * v[1].real,
        my=-2.0 * v[1].imag,
        mz=(v[0] - v[3]).real,
    )
