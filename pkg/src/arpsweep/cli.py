"""Command-line front end.

Subcommands orchestrate the library and write deterministic artifacts:
identical flags produce byte-identical CSV/JSON files.  All numeric output
uses 12 significant digits.  Units follow the library convention: times in
ms, amplitudes and detunings in rad/ms, sweep rates in rad/ms^2.

Exit codes: 0 success, 2 bad flags or inputs, 3 integration failure,
4 ridge extraction failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import (GAUSS, RECT, DensityState, PulseProfile, RelaxationParams,
                   make_sweep_params)
from .lz import phenom_max, phenom_tmax, phenom_transfer
from .propagator import IntegrationError, IntegratorSettings, evolve
from .sweeps import (ContourDataset, GridSpec, RidgeError, extract_ridge,
                     fit_parabola, grid_sweep, tauc_family)


class CliError(Exception):
    """User-facing failure; .code is the process exit code."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# deterministic formatting

def fmt(x: float) -> str:
    """Canonical 12-significant-digit rendering used in every CSV cell."""
    return f"{float(x):.12g}"


def _jnum(x) -> float | None:
    """JSON-safe number: round to 12 significant digits, None if not finite."""
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.12g}")


def _write_text(path: str, text: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _write_csv(path: str, header: str, rows) -> None:
    lines = [header]
    lines.extend(",".join(cells) for cells in rows)
    _write_text(path, "\n".join(lines) + "\n")


def _write_json(path: str, obj) -> None:
    _write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# flag conversion.  Converters take (flag, raw-string) so that values coming
# from a config file produce the same diagnostics as command-line values.

def _conv_float(flag: str, raw: str) -> float:
    try:
        v = float(raw)
    except ValueError:
        raise CliError(2, f"--{flag}: not a number: {raw!r}") from None
    if math.isnan(v):
        raise CliError(2, f"--{flag}: not a number: {raw!r}")
    return v


def _conv_pos(flag: str, raw: str) -> float:
    v = _conv_float(flag, raw)
    if not (math.isfinite(v) and v > 0.0):
        raise CliError(2, f"--{flag} must be finite and > 0, got {raw}")
    return v


def _conv_nonneg(flag: str, raw: str) -> float:
    v = _conv_float(flag, raw)
    if not (math.isfinite(v) and v >= 0.0):
        raise CliError(2, f"--{flag} must be finite and >= 0, got {raw}")
    return v


def _conv_time_constant(flag: str, raw: str) -> float:
    # inf is meaningful here: it switches the corresponding channel off
    v = _conv_float(flag, raw)
    if v <= 0.0:
        raise CliError(2, f"--{flag} must be > 0 (inf allowed), got {raw}")
    return v


def _conv_m0(flag: str, raw: str) -> float:
    v = _conv_float(flag, raw)
    if not (math.isfinite(v) and -1.0 <= v <= 1.0):
        raise CliError(2, f"--{flag} must lie in [-1, 1], got {raw}")
    return v


def _conv_fraction(flag: str, raw: str) -> float:
    v = _conv_float(flag, raw)
    if not (math.isfinite(v) and 0.0 < v < 1.0):
        raise CliError(2, f"--{flag} must lie strictly inside (0, 1), got {raw}")
    return v


def _conv_int(minimum: int) -> Callable[[str, str], int]:
    def conv(flag: str, raw: str) -> int:
        try:
            v = int(raw)
        except ValueError:
            raise CliError(2, f"--{flag}: not an integer: {raw!r}") from None
        if v < minimum:
            raise CliError(2, f"--{flag} must be >= {minimum}, got {raw}")
        return v
    return conv


def _conv_choice(*allowed: str) -> Callable[[str, str], str]:
    def conv(flag: str, raw: str) -> str:
        if raw not in allowed:
            raise CliError(2, f"--{flag} must be one of {', '.join(allowed)}, "
                              f"got {raw!r}")
        return raw
    return conv


def _conv_range(flag: str, raw: str) -> np.ndarray:
    """lo:hi:n -> n equally spaced values from lo to hi inclusive."""
    parts = raw.split(":")
    if len(parts) != 3:
        raise CliError(2, f"--{flag} must look like lo:hi:n, got {raw!r}")
    lo = _conv_float(flag, parts[0])
    hi = _conv_float(flag, parts[1])
    n = _conv_int(1)(flag, parts[2])
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise CliError(2, f"--{flag}: need finite lo <= hi, got {raw!r}")
    if n > 1 and lo == hi:
        raise CliError(2, f"--{flag}: lo == hi only makes sense with n=1, "
                          f"got {raw!r}")
    return np.linspace(lo, hi, n)


def _conv_float_list(flag: str, raw: str) -> list[float]:
    items = [s for s in (part.strip() for part in raw.split(",")) if s]
    if not items:
        raise CliError(2, f"--{flag}: empty list")
    return [_conv_float(flag, s) for s in items]


def _conv_str(flag: str, raw: str) -> str:
    return raw


@dataclass(frozen=True)
class _Opt:
    flag: str
    convert: Callable[[str, str], object]
    help: str
    required: bool = False
    default: object = None
    metavar: str = "VALUE"


_PHYSICS_OPTS = [
    _Opt("profile", _conv_choice(RECT, GAUSS),
         "drive envelope: rect or gauss", required=True, metavar="KIND"),
    _Opt("delta-omega", _conv_pos,
         "sweep half-width in rad/ms; detuning runs -dw..+dw",
         required=True, metavar="DW"),
    _Opt("tauc", _conv_nonneg,
         "bath correlation time tau_c in ms (0 disables drive-induced decay)",
         required=True, metavar="TC"),
    _Opt("t1", _conv_time_constant,
         "longitudinal relaxation time in ms (default inf: off)",
         default=math.inf, metavar="T1"),
    _Opt("t2", _conv_time_constant,
         "transverse relaxation time in ms (default inf: off)",
         default=math.inf, metavar="T2"),
    _Opt("m0", _conv_m0,
         "equilibrium polarization toward the upper level (default 1)",
         default=1.0, metavar="M0"),
    _Opt("cutoff-fraction", _conv_fraction,
         "gaussian envelope value at the window edges relative to its peak "
         "(default 0.1)", default=0.1, metavar="F"),
]

_OUT_OPT = _Opt("out", _conv_str, "output directory (default .)",
                default=".", metavar="DIR")

_SUBCOMMAND_OPTS: dict[str, list[_Opt]] = {
    "simulate": _PHYSICS_OPTS + [
        _Opt("omega1", _conv_nonneg, "drive amplitude in rad/ms",
             required=True, metavar="W1"),
        _Opt("duration", _conv_pos, "sweep duration T in ms "
             "(exactly one of --duration/--rate)", metavar="T"),
        _Opt("rate", _conv_pos, "sweep rate R in rad/ms^2 "
             "(exactly one of --duration/--rate)", metavar="R"),
        _Opt("tail", _conv_nonneg,
             "extra integration time past the sweep in ms (default 0); the "
             "drive envelope keeps running", default=0.0, metavar="MS"),
        _Opt("samples", _conv_int(2), "number of output samples (default 2000)",
             default=2000, metavar="N"),
        _OUT_OPT,
    ],
    "sweep": _PHYSICS_OPTS + [
        _Opt("omega1-range", _conv_range,
             "amplitude grid lo:hi:n in rad/ms", required=True,
             metavar="LO:HI:N"),
        _Opt("rate-range", _conv_range,
             "rate grid lo:hi:n in rad/ms^2; each cell runs a sweep of "
             "duration 2*delta_omega/rate", required=True, metavar="LO:HI:N"),
        _Opt("threads", _conv_int(1),
             "worker threads for grid cells (default 1; output is "
             "thread-count independent)", default=1, metavar="N"),
        _Opt("samples", _conv_int(2),
             "output samples per cell (default 2000)", default=2000,
             metavar="N"),
        _OUT_OPT,
    ],
    "ridge-fit": [
        _Opt("contour", _conv_str, "contour.csv produced by the sweep command",
             required=True, metavar="CSV"),
        _OUT_OPT,
    ],
    "model": [
        _Opt("scan", _conv_choice("time", "omega1"),
             "scan variable: transfer versus time at fixed amplitude, or "
             "peak transfer versus amplitude", required=True, metavar="VAR"),
        _Opt("omega1", _conv_float, "drive amplitude in rad/ms (time scan)",
             metavar="W1"),
        _Opt("delta-omega", _conv_pos, "sweep half-width in rad/ms",
             required=True, metavar="DW"),
        _Opt("duration", _conv_pos, "sweep duration T in ms "
             "(exactly one of --duration/--rate)", metavar="T"),
        _Opt("rate", _conv_pos, "sweep rate R in rad/ms^2 "
             "(exactly one of --duration/--rate)", metavar="R"),
        _Opt("tauc", _conv_pos,
             "bath correlation time in ms; must be > 0 here", required=True,
             metavar="TC"),
        _Opt("omega1-range", _conv_range,
             "amplitude axis lo:hi:n for the omega1 scan "
             "(default 0.1:5:200)", metavar="LO:HI:N"),
        _Opt("samples", _conv_int(2),
             "points in the time scan (default 400)", default=400,
             metavar="N"),
        _OUT_OPT,
    ],
    "plot": [
        _Opt("kind", _conv_choice("population", "bloch", "contour", "family"),
             "which plot script to emit", required=True, metavar="KIND"),
        _Opt("trajectory", _conv_str,
             "trajectory.csv (population and bloch kinds)", metavar="CSV"),
        _Opt("contour", _conv_str, "contour.csv (contour kind)",
             metavar="CSV"),
        _Opt("ridge", _conv_str, "ridge.csv (contour kind)", metavar="CSV"),
        _Opt("family", _conv_str, "family.csv (family kind)", metavar="CSV"),
        _OUT_OPT,
    ],
    "family": [
        _Opt("profile", _conv_choice(RECT, GAUSS),
             "drive envelope: rect or gauss", default=RECT, metavar="KIND"),
        _Opt("delta-omega", _conv_pos, "sweep half-width in rad/ms",
             required=True, metavar="DW"),
        _Opt("rate", _conv_pos, "fixed sweep rate in rad/ms^2",
             required=True, metavar="R"),
        _Opt("tauc-list", _conv_float_list,
             "comma-separated correlation times in ms, e.g. 0,0.005,0.01",
             required=True, metavar="TC,TC,..."),
        _Opt("omega1-range", _conv_range,
             "amplitude axis lo:hi:n (default 0.1:3:30)", metavar="LO:HI:N"),
        _Opt("cutoff-fraction", _conv_fraction,
             "gaussian edge fraction (default 0.1)", default=0.1, metavar="F"),
        _Opt("threads", _conv_int(1), "worker threads (default 1)",
             default=1, metavar="N"),
        _Opt("samples", _conv_int(2),
             "output samples per cell (default 2000)", default=2000,
             metavar="N"),
        _OUT_OPT,
    ],
}

_SUBCOMMAND_HELP = {
    "simulate": "run one sweep and write trajectory.csv + summary.json",
    "sweep": "scan an (omega1, rate) grid and write contour.csv",
    "ridge-fit": "extract the optimal-amplitude ridge from a contour and "
                 "fit rate = k * omega1^2",
    "model": "evaluate the closed-form transfer model and write model.csv",
    "plot": "emit a gnuplot script for previously written CSV files",
    "family": "scan amplitude at fixed rate for several tau_c values",
}


def _load_config(path: str) -> dict[str, str]:
    """Flat key = value file; keys equal long flag names.

    Unknown keys are ignored so one file can serve several subcommands.
    """
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise CliError(2, f"--config: cannot read {path}: {exc}") from None
    values: dict[str, str] = {}
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith(("#", ";")):
            continue
        if "=" not in stripped:
            raise CliError(2, f"--config: {path}:{lineno}: expected key = "
                              f"value, got {stripped!r}")
        key, _, raw = stripped.partition("=")
        values[key.strip()] = raw.strip()
    return values


def _resolve(opts: list[_Opt], ns: argparse.Namespace) -> dict[str, object]:
    """Merge command line over config file over defaults."""
    cfg = _load_config(ns.config) if ns.config else {}
    # --duration on the command line retires a config-file rate and vice
    # versa, otherwise switching between the two would need a file edit
    pair = {"duration", "rate"}
    cli_pair = {f for f in pair
                if getattr(ns, f.replace("-", "_"), None) is not None}
    values: dict[str, object] = {}
    for opt in opts:
        raw = getattr(ns, opt.flag.replace("-", "_"))
        if raw is None and opt.flag in cfg:
            if not (opt.flag in pair and cli_pair):
                raw = cfg[opt.flag]
        if raw is None:
            if opt.required:
                raise CliError(2, f"missing required flag --{opt.flag}")
            values[opt.flag] = opt.default
        else:
            values[opt.flag] = opt.convert(opt.flag, raw)
    return values


def _require_duration_xor_rate(v: dict[str, object]) -> None:
    have = [f for f in ("duration", "rate") if v.get(f) is not None]
    if len(have) != 1:
        raise CliError(2, "exactly one of --duration or --rate is required")


def _outdir(v: dict[str, object]) -> str:
    out = str(v["out"])
    os.makedirs(out, exist_ok=True)
    return out


def _relaxation(v: dict[str, object]) -> RelaxationParams:
    return RelaxationParams(m0=v["m0"], t1=v["t1"], t2=v["t2"])


def _profile(v: dict[str, object], omega1: float) -> PulseProfile:
    if v["profile"] == GAUSS:
        return PulseProfile.gaussian(omega1, v["cutoff-fraction"])
    return PulseProfile.rectangular(omega1)


def _params_echo(params, v: dict[str, object]) -> dict:
    echo = {
        "profile": params.profile.kind,
        "delta_omega": _jnum(params.delta_omega),
        "omega1": _jnum(params.omega1),
        "duration": _jnum(params.duration),
        "rate": _jnum(params.rate),
        "tau_c": _jnum(params.tau_c),
        "t1": _jnum(params.relaxation.t1),
        "t2": _jnum(params.relaxation.t2),
        "m0": _jnum(params.relaxation.m0),
        "cutoff_fraction": _jnum(params.profile.cutoff_fraction),
        "beta": _jnum(params.beta) if params.profile.kind == GAUSS else None,
        "peak_amplitude": (_jnum(params.peak_amplitude)
                           if params.profile.kind == GAUSS else None),
        "tail": _jnum(v.get("tail", 0.0)),
        "samples": v["samples"],
    }
    return echo


# ---------------------------------------------------------------------------
# subcommands

def _cmd_simulate(v: dict[str, object]) -> int:
    _require_duration_xor_rate(v)
    out = _outdir(v)
    profile = _profile(v, v["omega1"])
    params = make_sweep_params(
        v["delta-omega"], profile, duration=v["duration"], rate=v["rate"],
        tau_c=v["tauc"], relaxation=_relaxation(v))
    settings = IntegratorSettings(sample_count=v["samples"])
    traj = evolve(DensityState.ground(), params, settings, tail=v["tail"])

    amp = traj.amplitude
    bloch = traj.bloch
    rows = []
    for i, t in enumerate(traj.t):
        r11 = traj.states[i, 0].real
        r22 = traj.states[i, 3].real
        r12 = traj.states[i, 1]
        rows.append((fmt(t), fmt(r11), fmt(r22), fmt(r12.real), fmt(r12.imag),
                     fmt(bloch[i, 0]), fmt(bloch[i, 1]), fmt(bloch[i, 2]),
                     fmt(amp[i])))
    _write_csv(os.path.join(out, "trajectory.csv"),
               "t_ms,rho11,rho22,re_rho12,im_rho12,mx,my,mz,amplitude", rows)
    _write_json(os.path.join(out, "summary.json"), {
        "p_max": _jnum(traj.p_max),
        "t_peak_ms": _jnum(traj.t_peak),
        "p_final": _jnum(traj.p_final),
        "params": _params_echo(params, v),
    })
    return 0


def _cmd_sweep(v: dict[str, object]) -> int:
    out = _outdir(v)
    spec = GridSpec(omega1_values=v["omega1-range"],
                    rate_values=v["rate-range"],
                    delta_omega=v["delta-omega"], tau_c=v["tauc"],
                    profile_kind=v["profile"],
                    cutoff_fraction=v["cutoff-fraction"],
                    relaxation=_relaxation(v))
    settings = IntegratorSettings(sample_count=v["samples"])
    data = grid_sweep(spec, settings, threads=v["threads"])

    rows = []
    for i, w1 in enumerate(data.omega1_values):
        for j, rate in enumerate(data.rate_values):
            rows.append((fmt(w1), fmt(rate), fmt(data.p_max[i, j]),
                         fmt(data.t_peak[i, j]), fmt(data.p_final[i, j])))
    _write_csv(os.path.join(out, "contour.csv"),
               "omega1,rate,p_max,t_peak_ms,p_final", rows)
    _write_json(os.path.join(out, "warnings.json"),
                {"warnings": list(data.warnings)})
    return 0


def _read_contour(path: str) -> ContourDataset:
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            fields = reader.fieldnames or []
            needed = ("omega1", "rate", "p_max", "t_peak_ms", "p_final")
            missing = [c for c in needed if c not in fields]
            if missing:
                raise CliError(2, f"--contour: {path} lacks column(s) "
                                  f"{', '.join(missing)}")
            triples = [(float(row["omega1"]), float(row["rate"]),
                        float(row["p_max"]), float(row["t_peak_ms"]),
                        float(row["p_final"])) for row in reader]
    except OSError as exc:
        raise CliError(2, f"--contour: cannot read {path}: {exc}") from None
    except ValueError as exc:
        raise CliError(2, f"--contour: {path}: bad numeric cell: {exc}") \
            from None
    if not triples:
        raise CliError(2, f"--contour: {path} holds no data rows")

    omega1_values = np.unique([row[0] for row in triples])
    rate_values = np.unique([row[1] for row in triples])
    iw = {w: i for i, w in enumerate(omega1_values)}
    jr = {r: j for j, r in enumerate(rate_values)}
    shape = (omega1_values.size, rate_values.size)
    p_max = np.full(shape, np.nan)
    t_peak = np.full(shape, np.nan)
    p_final = np.full(shape, np.nan)
    for w, r, pm, tp, pf in triples:
        p_max[iw[w], jr[r]] = pm
        t_peak[iw[w], jr[r]] = tp
        p_final[iw[w], jr[r]] = pf
    return ContourDataset(omega1_values=omega1_values,
                          rate_values=rate_values, p_max=p_max,
                          t_peak=t_peak, p_final=p_final, warnings=())


def _cmd_ridge_fit(v: dict[str, object]) -> int:
    out = _outdir(v)
    data = _read_contour(v["contour"])
    points = extract_ridge(data)
    try:
        fit = fit_parabola(points)
    except ValueError as exc:
        raise RidgeError(str(exc)) from None
    _write_csv(os.path.join(out, "ridge.csv"), "rate,omega1_star",
               [(fmt(p.rate), fmt(p.omega1_star)) for p in points])
    _write_json(os.path.join(out, "fit.json"), {
        "k": _jnum(fit.k),
        "stderr": _jnum(fit.stderr),
        "n_points": fit.n_points,
    })
    return 0


def _cmd_model(v: dict[str, object]) -> int:
    _require_duration_xor_rate(v)
    out = _outdir(v)
    delta_omega = v["delta-omega"]
    rate = v["rate"] if v["rate"] is not None \
        else 2.0 * delta_omega / v["duration"]
    duration = 2.0 * delta_omega / rate
    tau_c = v["tauc"]

    if v["scan"] == "time":
        if v["omega1"] is None:
            raise CliError(2, "missing required flag --omega1 (time scan)")
        omega1 = v["omega1"]
        if omega1 <= 0.0:
            raise CliError(2, "--omega1 must be > 0 for the model command")
        t_grid = np.linspace(0.0, duration, v["samples"])
        values = [phenom_transfer(float(t), omega1, rate, delta_omega, tau_c)
                  for t in t_grid]
        t_max = phenom_tmax(omega1, rate, delta_omega, tau_c)
        extra = {"t_max_ms": _jnum(t_max),
                 "p_at_t_max": _jnum(phenom_max(omega1, rate, delta_omega,
                                                tau_c)),
                 "peak_omega1": None}
        rows = [(fmt(t), fmt(p)) for t, p in zip(t_grid, values)]
    else:
        axis = v["omega1-range"]
        if axis is None:
            axis = np.linspace(0.1, 5.0, 200)
        if np.any(axis <= 0.0):
            raise CliError(2, "--omega1-range must be > 0 for the model "
                              "command")
        values = [phenom_max(float(w), rate, delta_omega, tau_c)
                  for w in axis]
        peak = float(axis[int(np.argmax(values))])
        extra = {"t_max_ms": None, "p_at_t_max": None,
                 "peak_omega1": _jnum(peak)}
        rows = [(fmt(w), fmt(p)) for w, p in zip(axis, values)]

    _write_csv(os.path.join(out, "model.csv"), "x,value", rows)
    _write_json(os.path.join(out, "model.json"), {
        **extra,
        "scan": v["scan"],
        "rate": _jnum(rate),
        "duration": _jnum(duration),
        "delta_omega": _jnum(delta_omega),
        "tau_c": _jnum(tau_c),
    })
    return 0


def _need_input(v: dict[str, object], flag: str) -> str:
    path = v.get(flag)
    if path is None:
        raise CliError(2, f"missing required flag --{flag} for this plot kind")
    if not os.path.isfile(str(path)):
        raise CliError(2, f"--{flag}: file not found: {path}")
    return str(path)


def _unique_column(path: str, column: str) -> list[str]:
    """Distinct raw strings of one CSV column, first-appearance order."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if not reader.fieldnames or column not in reader.fieldnames:
            raise CliError(2, f"{path} lacks column {column!r}")
        seen: list[str] = []
        for row in reader:
            raw = row[column]
            if raw not in seen:
                seen.append(raw)
    return seen


_GP_PROLOGUE = "set datafile separator ','\nset key autotitle columnhead\n"


def _cmd_plot(v: dict[str, object]) -> int:
    out = _outdir(v)
    kind = v["kind"]

    if kind == "population":
        src = os.path.relpath(_need_input(v, "trajectory"), out)
        script = (
            "# Ground/excited populations against time.\n"
            + _GP_PROLOGUE +
            "set xlabel 't (ms)'\n"
            "set ylabel 'population'\n"
            "set yrange [0:1.05]\n"
            f"plot '{src}' using 1:2 with lines title 'rho11', \\\n"
            f"     '{src}' using 1:3 with lines title 'rho22', \\\n"
            f"     '{src}' using 1:9 with lines dashtype 2 "
            "title 'amplitude'\n")
        name = "population.gp"
    elif kind == "bloch":
        src = os.path.relpath(_need_input(v, "trajectory"), out)
        script = (
            "# State trajectory on the unit sphere.\n"
            + _GP_PROLOGUE +
            "set parametric\n"
            "set urange [0:2*pi]\n"
            "set vrange [-pi/2:pi/2]\n"
            "set isosamples 24,12\n"
            "set view equal xyz\n"
            "set xlabel 'mx'\nset ylabel 'my'\nset zlabel 'mz'\n"
            "splot cos(u)*cos(v),sin(u)*cos(v),sin(v) with lines "
            "lc rgb '#d0d0d0' notitle, \\\n"
            f"      '{src}' using 6:7:8 with lines lw 2 title 'trajectory'\n")
        name = "bloch.gp"
    elif kind == "contour":
        contour = os.path.relpath(_need_input(v, "contour"), out)
        ridge = os.path.relpath(_need_input(v, "ridge"), out)
        script = (
            "# Peak transfer over the (omega1, rate) grid with the ridge\n"
            "# points and the one-parameter parabola fitted here.\n"
            + _GP_PROLOGUE +
            "set xlabel 'omega1 (rad/ms)'\n"
            "set ylabel 'R (rad/ms^2)'\n"
            "k = 0.5\n"
            f"fit k*x**2 '{ridge}' using 2:1 via k\n"
            f"plot '{contour}' using 1:2:3 with image notitle, \\\n"
            f"     '{ridge}' using 2:1 with points pt 7 ps 0.6 "
            "lc rgb 'white' title 'ridge', \\\n"
            "     k*x**2 with lines lc rgb 'white' "
            "title sprintf('R = %.3g omega1^2', k)\n")
        name = "contour.gp"
    else:
        src_path = _need_input(v, "family")
        src = os.path.relpath(src_path, out)
        clauses = []
        for raw in _unique_column(src_path, "tau_c"):
            cond = f"($2=={raw}?$1:1/0)"
            clauses.append(f"'{src}' using {cond}:3 with points "
                           f"title 'tau_c={raw} sim'")
            clauses.append(f"'{src}' using {cond}:4 with lines "
                           f"title 'tau_c={raw} model'")
        script = (
            "# Peak transfer against amplitude, one curve per tau_c,\n"
            "# with the closed-form model overlaid.\n"
            + _GP_PROLOGUE +
            "set xlabel 'omega1 (rad/ms)'\n"
            "set ylabel 'max transfer'\n"
            "set yrange [0:1.05]\n"
            "plot " + ", \\\n     ".join(clauses) + "\n")
        name = "family.gp"

    _write_text(os.path.join(out, name), script)
    return 0


def _cmd_family(v: dict[str, object]) -> int:
    out = _outdir(v)
    omega1_values = v["omega1-range"]
    if omega1_values is None:
        omega1_values = np.linspace(0.1, 3.0, 30)
    tau_c_values = v["tauc-list"]
    for tc in tau_c_values:
        if tc < 0.0 or not math.isfinite(tc):
            raise CliError(2, f"--tauc-list entries must be finite and >= 0, "
                              f"got {tc}")
    settings = IntegratorSettings(sample_count=v["samples"])
    fam = tauc_family(omega1_values, tau_c_values,
                      delta_omega=v["delta-omega"], rate=v["rate"],
                      profile_kind=v["profile"],
                      cutoff_fraction=v["cutoff-fraction"],
                      settings=settings, threads=v["threads"])
    rows = []
    for it, tc in enumerate(fam.tau_c_values):
        for jw, w1 in enumerate(fam.omega1_values):
            rows.append((fmt(w1), fmt(tc), fmt(fam.sim[it, jw]),
                         fmt(fam.model[it, jw])))
    _write_csv(os.path.join(out, "family.csv"),
               "omega1,tau_c,p_max,p_model", rows)
    _write_json(os.path.join(out, "family.json"), {
        "tau_c_values": [_jnum(x) for x in fam.tau_c_values],
        "peak_omega1_sim": [_jnum(x) for x in fam.peak_omega1_sim],
        "peak_omega1_model": [_jnum(x) for x in fam.peak_omega1_model],
        "warnings": list(fam.warnings),
    })
    return 0


_HANDLERS = {
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "ridge-fit": _cmd_ridge_fit,
    "model": _cmd_model,
    "plot": _cmd_plot,
    "family": _cmd_family,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arpsweep",
        description="Chirped-drive two-level sweeps with drive-induced "
                    "dissipation. Units: ms, rad/ms, rad/ms^2.")
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="COMMAND")
    for name, opts in _SUBCOMMAND_OPTS.items():
        p = sub.add_parser(name, help=_SUBCOMMAND_HELP[name])
        for opt in opts:
            p.add_argument(f"--{opt.flag}", dest=opt.flag.replace("-", "_"),
                           default=None, metavar=opt.metavar, help=opt.help)
        p.add_argument("--config", default=None, metavar="FILE",
                       help="flat key = value file; keys equal long flag "
                            "names; command-line flags win")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed the diagnostics; fold into our contract
        return int(exc.code) if exc.code else 0
    try:
        values = _resolve(_SUBCOMMAND_OPTS[ns.command], ns)
        return _HANDLERS[ns.command](values)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except RidgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except IntegrationError as exc:
        print(f"error: integration failed at t={exc.time:g} ms: {exc}",
              file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
