"""Time propagation of the master equation and its unitary cross-check."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import DensityState, SweepParams
from .liouvillian import _kernel_args


class IntegrationError(RuntimeError):
    """Propagation failed; .time holds the sweep time of the failure."""

    def __init__(self, message: str, time: float, reason: str):
        super().__init__(message)
        self.time = time
        self.reason = reason


@dataclass(frozen=True)
class IntegratorSettings:
    """Adaptive step control (Dormand-Prince 5(4)) and output sampling.

    max_step is an upper bound on top of the built-in cap of
    0.05 / max(omega_eff) that keeps the sampled output resolving the
    nutation; leave it at inf to use the cap alone.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-11
    max_step: float = math.inf
    sample_count: int = 2000

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0.0 and math.isfinite(self.rel_tol)):
            raise ValueError(f"rel_tol must be finite and > 0, got {self.rel_tol}")
        if not (self.abs_tol > 0.0 and math.isfinite(self.abs_tol)):
            raise ValueError(f"abs_tol must be finite and > 0, got {self.abs_tol}")
        if not self.max_step > 0.0:
            raise ValueError(f"max_step must be > 0, got {self.max_step}")
        if int(self.sample_count) != self.sample_count or self.sample_count < 2:
            raise ValueError(
                f"sample_count must be an integer >= 2, got {self.sample_count}")


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution plus summary statistics.

    states rows are (rho11, rho12, rho21, rho22) at the matching t entry.
    error_estimate is the accumulated local truncation error of the two
    population components, a conservative bound on the global error of
    p_excited.
    """

    t: np.ndarray
    states: np.ndarray
    params: SweepParams
    tail: float
    p_max: float
    t_peak: float
    p_final: float
    error_estimate: float
    n_steps: int

    def __len__(self) -> int:
        return self.t.shape[0]

    @property
    def p_excited(self) -> np.ndarray:
        return self.states[:, 0].real.copy()

    @property
    def bloch(self) -> np.ndarray:
        """(n, 3) array of (mx, my, mz) samples."""
        out = np.empty((self.t.shape[0], 3))
        out[:, 0] = 2.0 * self.states[:, 1].real
        out[:, 1] = -2.0 * self.states[:, 1].imag
        out[:, 2] = (self.states[:, 0] - self.states[:, 3]).real
        return out

    @property
    def amplitude(self) -> np.ndarray:
        """Drive amplitude actually applied at each sample time."""
        (kind, omega1, peak, beta, duration, *_rest) = _kernel_args(self.params)
        out = np.empty_like(self.t)
        for i, ti in enumerate(self.t):
            out[i] = _kernels.amp_envelope(ti, kind, omega1, peak, beta, duration)
        return out

    def state_at(self, index: int) -> DensityState:
        return DensityState(self.states[index])


def max_transfer(trajectory: Trajectory) -> tuple[float, float]:
    """(p_max, t_peak): sampled maximum of p_excited and the earliest time
    attaining it within 1e-9."""
    p = trajectory.states[:, 0].real
    p_max = float(p.max())
    idx = int(np.argmax(p >= p_max - 1e-9))
    return p_max, float(trajectory.t[idx])


def _stats_from(t: np.ndarray, states: np.ndarray) -> tuple[float, float, float]:
    p = states[:, 0].real
    p_max = float(p.max())
    idx = int(np.argmax(p >= p_max - 1e-9))
    return p_max, float(t[idx]), float(p[-1])


def _omega_eff_max(params: SweepParams, t_end: float) -> float:
    dw = max(abs(-params.delta_omega),
             abs(params.rate * t_end - params.delta_omega))
    return math.hypot(dw, params.peak_amplitude)


def _sample_grid(params: SweepParams, tail: float, sample_count: int) -> np.ndarray:
    if not (math.isfinite(tail) and tail >= 0.0):
        raise ValueError(f"tail must be finite and >= 0, got {tail}")
    return np.linspace(0.0, params.duration + tail, sample_count)


def evolve(initial: DensityState, params: SweepParams,
           settings: IntegratorSettings | None = None, *,
           tail: float = 0.0) -> Trajectory:
    """Propagate initial through the sweep and tail, sampling uniformly.

    The drive envelope keeps running during the tail (constant for the
    rectangular profile, the natural Gaussian decay otherwise) so that
    drive-induced saturation can be observed past the sweep window; the
    detuning keeps ramping linearly.  The trace is never renormalized.

    Raises IntegrationError on step-size underflow or when the sampled
    trace/hermiticity drift exceeds ten times the 1e-8 budget.
    """
    if settings is None:
        settings = IntegratorSettings()
    t_grid = _sample_grid(params, tail, settings.sample_count)
    t_end = float(t_grid[-1])
    om = _omega_eff_max(params, t_end)
    cap = 0.05 / om if om > 0.0 else t_end
    max_step = min(settings.max_step, cap)

    out = np.empty((settings.sample_count, 4), dtype=np.complex128)
    y0 = np.ascontiguousarray(initial.vec, dtype=np.complex128)
    status, t_fail, err_accum, n_steps = _kernels.integrate(
        y0, t_grid, settings.rel_tol, settings.abs_tol, max_step,
        *_kernel_args(params), out)

    if status == _kernels.STATUS_UNDERFLOW:
        raise IntegrationError(
            f"step size underflow at t = {t_fail:.6g} ms", t_fail, "step-underflow")
    if status == _kernels.STATUS_INVARIANT:
        raise IntegrationError(
            f"trace/hermiticity drift exceeded 1e-7 at t = {t_fail:.6g} ms",
            t_fail, "invariant")

    out.flags.writeable = False
    t_grid.flags.writeable = False
    p_max, t_peak, p_final = _stats_from(t_grid, out)
    return Trajectory(t=t_grid, states=out, params=params, tail=tail,
                      p_max=p_max, t_peak=t_peak, p_final=p_final,
                      error_estimate=err_accum, n_steps=n_steps)


def unitary_oracle(initial: DensityState, params: SweepParams,
                   settings: IntegratorSettings | None = None, *,
                   tail: float = 0.0) -> Trajectory:
    """Reference propagation for the dissipation-free case.

    Fixed-step fourth-order Magnus evolution of the von Neumann equation
    with exact 2x2 exponentials; an independent integration scheme used to
    validate evolve().  Requires tau_c = 0 and disabled relaxation.
    """
    if params.tau_c != 0.0:
        raise ValueError("unitary_oracle requires tau_c = 0")
    if params.relaxation.enabled:
        raise ValueError("unitary_oracle requires disabled relaxation")
    if settings is None:
        settings = IntegratorSettings()
    t_grid = _sample_grid(params, tail, settings.sample_count)
    t_end = float(t_grid[-1])
    om = _omega_eff_max(params, t_end)
    h_target = 0.01 / om if om > 0.0 else t_end

    (kind, omega1, peak, beta, duration, rate, delta_omega,
     *_relax) = _kernel_args(params)
    out = np.empty((settings.sample_count, 4), dtype=np.complex128)
    y0 = np.ascontiguousarray(initial.vec, dtype=np.complex128)
    _kernels.magnus_trajectory(y0, t_grid, h_target, kind, omega1, peak, beta,
                               duration, rate, delta_omega, out)

    out.flags.writeable = False
    t_grid.flags.writeable = False
    p_max, t_peak, p_final = _stats_from(t_grid, out)
    dt = float(t_grid[1] - t_grid[0]) if len(t_grid) > 1 else 0.0
    n_sub = int(math.ceil(dt / h_target)) if h_target > 0 else 1
    return Trajectory(t=t_grid, states=out, params=params, tail=tail,
                      p_max=p_max, t_peak=t_peak, p_final=p_final,
                      error_estimate=0.0, n_steps=n_sub * (len(t_grid) - 1))
