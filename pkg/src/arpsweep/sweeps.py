"""Amplitude/rate grid scans, ridge extraction and the parabola fit."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import (GAUSS, RECT, DensityState, PulseProfile, RelaxationParams,
                   make_sweep_params)
from .lz import arp_probability, phenom_max
from .propagator import IntegrationError, IntegratorSettings, evolve

DEFAULT_OMEGA1_GRID = np.linspace(0.1, 5.0, 50)
DEFAULT_RATE_GRID = np.linspace(0.1, 5.0, 50)


class RidgeError(RuntimeError):
    """Raised when a contour has too few usable interior maxima."""


def _grid_axis(name: str, values) -> np.ndarray:
    arr = np.asarray(values, dtype=float).copy()
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-d array")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise ValueError(f"{name} values must be finite and > 0")
    if arr.size > 1 and not np.all(np.diff(arr) > 0.0):
        raise ValueError(f"{name} values must be strictly increasing")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class GridSpec:
    """A sweep grid: every (omega1, rate) cell runs one full sweep with
    duration 2*delta_omega/rate; the Gaussian envelope is renormalized per
    cell from that cell's duration."""

    omega1_values: np.ndarray
    rate_values: np.ndarray
    delta_omega: float
    tau_c: float
    profile_kind: str = RECT
    cutoff_fraction: float = 0.1
    relaxation: RelaxationParams = field(default_factory=RelaxationParams.disabled)

    def __post_init__(self) -> None:
        object.__setattr__(self, "omega1_values",
                           _grid_axis("omega1_values", self.omega1_values))
        object.__setattr__(self, "rate_values",
                           _grid_axis("rate_values", self.rate_values))
        if not (math.isfinite(self.delta_omega) and self.delta_omega > 0.0):
            raise ValueError(
                f"delta_omega must be finite and > 0, got {self.delta_omega}")
        if not (math.isfinite(self.tau_c) and self.tau_c >= 0.0):
            raise ValueError(f"tau_c must be finite and >= 0, got {self.tau_c}")
        if self.profile_kind not in (RECT, GAUSS):
            raise ValueError(f"unknown profile kind {self.profile_kind!r}")

    def cell_params(self, omega1: float, rate: float):
        if self.profile_kind == GAUSS:
            profile = PulseProfile.gaussian(omega1, self.cutoff_fraction)
        else:
            profile = PulseProfile.rectangular(omega1)
        return make_sweep_params(self.delta_omega, profile, rate=rate,
                                 tau_c=self.tau_c, relaxation=self.relaxation)


@dataclass(frozen=True)
class ContourDataset:
    """Per-cell sweep results on the (omega1, rate) grid.

    Arrays are indexed [i_omega1, j_rate]; cells whose integration failed
    hold NaN and contribute one entry to warnings.
    """

    omega1_values: np.ndarray
    rate_values: np.ndarray
    p_max: np.ndarray
    t_peak: np.ndarray
    p_final: np.ndarray
    warnings: tuple[str, ...]

    @property
    def n_cells(self) -> int:
        return self.p_max.size

    @property
    def n_failed(self) -> int:
        return int(np.count_nonzero(~np.isfinite(self.p_max)))


def grid_sweep(spec: GridSpec, settings: IntegratorSettings | None = None,
               threads: int = 1) -> ContourDataset:
    """Run one sweep per grid cell and collect (p_max, t_peak, p_final).

    Cells are independent; results are written by index, so the outcome is
    bit-identical for any thread count.  A failing cell is recorded as NaN
    plus a warning instead of aborting the scan.
    """
    if settings is None:
        settings = IntegratorSettings()
    threads = int(threads)
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")

    n_w = spec.omega1_values.size
    n_r = spec.rate_values.size
    p_max = np.full((n_w, n_r), np.nan)
    t_peak = np.full((n_w, n_r), np.nan)
    p_final = np.full((n_w, n_r), np.nan)
    failures: list[tuple[int, int, str]] = []
    initial = DensityState.ground()

    def run_cell(idx: tuple[int, int]) -> None:
        i, j = idx
        omega1 = float(spec.omega1_values[i])
        rate = float(spec.rate_values[j])
        try:
            params = spec.cell_params(omega1, rate)
            traj = evolve(initial, params, settings)
        except (IntegrationError, ValueError) as exc:
            failures.append((i, j, f"omega1={omega1:g} rate={rate:g}: {exc}"))
            return
        p_max[i, j] = traj.p_max
        t_peak[i, j] = traj.t_peak
        p_final[i, j] = traj.p_final

    cells = [(i, j) for i in range(n_w) for j in range(n_r)]
    if threads == 1:
        for idx in cells:
            run_cell(idx)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run_cell, cells))

    warnings = tuple(msg for _, _, msg in sorted(failures))
    for arr in (p_max, t_peak, p_final):
        arr.flags.writeable = False
    return ContourDataset(omega1_values=spec.omega1_values,
                          rate_values=spec.rate_values,
                          p_max=p_max, t_peak=t_peak, p_final=p_final,
                          warnings=warnings)


@dataclass(frozen=True)
class RidgePoint:
    rate: float
    omega1_star: float


def extract_ridge(dataset: ContourDataset) -> list[RidgePoint]:
    """Per-rate argmax of p_max over omega1, interior maxima only.

    Rows whose maximum sits on the omega1 grid boundary are excluded (the
    true optimum is not bracketed there); ties resolve to the smaller
    omega1.  Fewer than three usable rows raise RidgeError.
    """
    n_w = dataset.omega1_values.size
    points: list[RidgePoint] = []
    for j, rate in enumerate(dataset.rate_values):
        column = dataset.p_max[:, j]
        if not np.any(np.isfinite(column)):
            continue
        i = int(np.nanargmax(column))
        if i == 0 or i == n_w - 1:
            continue
        points.append(RidgePoint(rate=float(rate),
                                 omega1_star=float(dataset.omega1_values[i])))
    if len(points) < 3:
        raise RidgeError(
            f"insufficient ridge: only {len(points)} rows with an interior "
            f"maximum (need at least 3)")
    return points


@dataclass(frozen=True)
class RidgeFit:
    """One-parameter fit rate = k * omega1_star^2 through the origin."""

    k: float
    stderr: float
    n_points: int


def fit_parabola(points: list[RidgePoint]) -> RidgeFit:
    """Least-squares slope of rate against omega1_star^2 with no intercept.

    k = sum(R*x)/sum(x^2) for x = omega1_star^2; stderr comes from the
    residual variance.  Identical omega1_star everywhere is rejected: the
    design is degenerate in the sense that one point determines k and the
    residuals carry no information about curvature.
    """
    if len(points) < 2:
        raise ValueError(f"need at least 2 ridge points, got {len(points)}")
    x = np.array([p.omega1_star ** 2 for p in points])
    y = np.array([p.rate for p in points])
    if np.all(x == x[0]):
        raise ValueError("degenerate ridge: all omega1_star values identical")
    sxx = float(np.dot(x, x))
    k = float(np.dot(x, y)) / sxx
    resid = y - k * x
    var = float(np.dot(resid, resid)) / (len(points) - 1)
    return RidgeFit(k=k, stderr=math.sqrt(var / sxx), n_points=len(points))


@dataclass(frozen=True)
class TaucFamily:
    """p_max versus omega1 for several tau_c values at one fixed rate,
    with the closed-form model overlay.

    sim and model are indexed [i_tauc, j_omega1].  model rows use
    phenom_max, except tau_c = 0 rows which use the decay-free asymptote
    arp_probability.  peak_omega1_* hold the per-row argmax locations.
    """

    omega1_values: np.ndarray
    tau_c_values: np.ndarray
    sim: np.ndarray
    model: np.ndarray
    peak_omega1_sim: np.ndarray
    peak_omega1_model: np.ndarray
    warnings: tuple[str, ...]


def tauc_family(omega1_values, tau_c_values, delta_omega: float = 10.0,
                rate: float = 0.1, profile_kind: str = RECT,
                cutoff_fraction: float = 0.1,
                settings: IntegratorSettings | None = None,
                threads: int = 1) -> TaucFamily:
    """Scan drive amplitude at fixed rate for each correlation time."""
    omega1_values = _grid_axis("omega1_values", omega1_values)
    tau_c = np.asarray(tau_c_values, dtype=float).copy()
    if tau_c.ndim != 1 or tau_c.size == 0:
        raise ValueError("tau_c_values must be a non-empty 1-d array")
    if not np.all(np.isfinite(tau_c)) or np.any(tau_c < 0.0):
        raise ValueError("tau_c_values must be finite and >= 0")
    tau_c.flags.writeable = False

    sim = np.full((tau_c.size, omega1_values.size), np.nan)
    model = np.full_like(sim, np.nan)
    all_warnings: list[str] = []
    for it, tc in enumerate(tau_c):
        spec = GridSpec(omega1_values=omega1_values,
                        rate_values=np.array([rate]),
                        delta_omega=delta_omega, tau_c=float(tc),
                        profile_kind=profile_kind,
                        cutoff_fraction=cutoff_fraction)
        data = grid_sweep(spec, settings, threads=threads)
        sim[it, :] = data.p_max[:, 0]
        all_warnings.extend(data.warnings)
        for jw, w1 in enumerate(omega1_values):
            if tc == 0.0:
                model[it, jw] = arp_probability(float(w1), rate)
            else:
                model[it, jw] = phenom_max(float(w1), rate, delta_omega, float(tc))

    peak_sim = np.array([omega1_values[int(np.nanargmax(sim[it]))]
                         for it in range(tau_c.size)])
    peak_model = np.array([omega1_values[int(np.nanargmax(model[it]))]
                           for it in range(tau_c.size)])
    for arr in (sim, model, peak_sim, peak_model):
        arr.flags.writeable = False
    return TaucFamily(omega1_values=omega1_values, tau_c_values=tau_c,
                      sim=sim, model=model, peak_omega1_sim=peak_sim,
                      peak_omega1_model=peak_model,
                      warnings=tuple(all_warnings))
