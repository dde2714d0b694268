"""Closed-form transfer estimates: crossing asymptotics and the saturating
peak model used to locate the optimal stopping time."""
from __future__ import annotations

import math


def _check_positive(name: str, value: float) -> float:
    value = float(value)
    if not (math.isfinite(value) and value > 0.0):
        raise ValueError(f"{name} must be finite and > 0, got {value}")
    return value


def lz_probability(omega1: float, rate: float) -> float:
    """Diabatic survival probability exp(-pi*omega1^2 / (2*rate))."""
    rate = _check_positive("rate", rate)
    omega1 = float(omega1)
    if not (math.isfinite(omega1) and omega1 >= 0.0):
        raise ValueError(f"omega1 must be finite and >= 0, got {omega1}")
    return math.exp(-math.pi * omega1 * omega1 / (2.0 * rate))


def arp_probability(omega1: float, rate: float) -> float:
    """Adiabatic transfer probability 1 - lz_probability."""
    return 1.0 - lz_probability(omega1, rate)


def _log_asinh_arg(omega1: float, rate: float, tau_c: float) -> float:
    return (math.log(2.0 * rate) - 3.0 * math.log(omega1) - math.log(tau_c))


def _asinh_ratio(omega1: float, rate: float, tau_c: float) -> float:
    """asinh(2*rate / (omega1^3 * tau_c)) without overflowing the ratio."""
    log_arg = _log_asinh_arg(omega1, rate, tau_c)
    if log_arg > 700.0:
        # asinh(x) -> ln(2x) for huge x; the ratio itself would overflow
        return math.log(2.0) + log_arg
    return math.asinh(math.exp(log_arg))


def phenom_transfer(t: float, omega1: float, rate: float,
                    delta_omega: float, tau_c: float) -> float:
    """Saturating transfer model

        0.5 * arp * (1 + exp(-omega1^2*tau_c*t) * tanh((rate/omega1)*(t - delta_omega/rate)))

    combining the crossing asymptote, a tanh ramp centered on resonance
    and exponential drive-induced decay toward 1/2 of the asymptote.
    """
    omega1 = _check_positive("omega1", omega1)
    rate = _check_positive("rate", rate)
    delta_omega = _check_positive("delta_omega", delta_omega)
    tau_c = float(tau_c)
    if not (math.isfinite(tau_c) and tau_c >= 0.0):
        raise ValueError(f"tau_c must be finite and >= 0, got {tau_c}")
    t = float(t)
    if not (math.isfinite(t) and t >= 0.0):
        raise ValueError(f"t must be finite and >= 0, got {t}")
    envelope = arp_probability(omega1, rate)
    ramp = math.tanh((rate / omega1) * (t - delta_omega / rate))
    decay = math.exp(-omega1 * omega1 * tau_c * t)
    return 0.5 * envelope * (1.0 + decay * ramp)


def phenom_tmax(omega1: float, rate: float, delta_omega: float,
                tau_c: float) -> float:
    """Stationary point of phenom_transfer:

        t = (delta_omega + (omega1/2) * asinh(2*rate/(omega1^3*tau_c))) / rate

    Requires tau_c > 0: without decay the model has no interior maximum.
    """
    omega1 = _check_positive("omega1", omega1)
    rate = _check_positive("rate", rate)
    delta_omega = _check_positive("delta_omega", delta_omega)
    tau_c = float(tau_c)
    if not (math.isfinite(tau_c) and tau_c > 0.0):
        raise ValueError(
            f"tau_c must be > 0 (no interior maximum otherwise), got {tau_c}")
    return (delta_omega + 0.5 * omega1 * _asinh_ratio(omega1, rate, tau_c)) / rate


def phenom_max(omega1: float, rate: float, delta_omega: float,
               tau_c: float) -> float:
    """Model transfer evaluated at its stationary time: the attainable peak
    as a function of drive amplitude."""
    t_star = phenom_tmax(omega1, rate, delta_omega, tau_c)
    return phenom_transfer(t_star, omega1, rate, delta_omega, tau_c)
