"""Hot numerical loops, written in a numba-compatible subset of Python.

Every function here is wrapped by _backend.jit_kernel, so the same source
runs either compiled (default) or as plain Python over numpy scalars when
ARPSWEEP_BACKEND=numpy.  Only scalars and arrays cross these call
boundaries; parameter objects are flattened by the callers.

Profile kind codes: 0 = rectangular, 1 = Gaussian.
"""
import math

import numpy as np

from ._backend import jit_kernel

KIND_RECT = 0
KIND_GAUSS = 1

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_INVARIANT = 2

# hard floor for the step size (ms) and abort threshold for the sampled
# trace/hermiticity drift (10x the documented 1e-8 end-to-end budget)
_H_FLOOR = 1e-12
_INVARIANT_ABORT = 1e-7


@jit_kernel
def amp_envelope(t, kind, omega1, peak, beta, duration):
    """Drive envelope without the [0, duration] window applied."""
    if kind == KIND_GAUSS:
        dt = t - 0.5 * duration
        return peak * math.exp(-(dt * dt) / beta)
    return omega1


@jit_kernel
def detuning_value(t, rate, delta_omega):
    return rate * t - delta_omega


@jit_kernel
def fill_generator(t, kind, omega1, peak, beta, duration, rate, delta_omega,
                   tau_c, rfe, rfg, r2, out):
    """Write the 4x4 master-equation generator for the state vector
    (rho11, rho12, rho21, rho22) at time t into out.

    rfe = (1+m0)/t1, rfg = (1-m0)/t1, r2 = 2/t2 (all 0 when disabled).
    """
    w = amp_envelope(t, kind, omega1, peak, beta, duration)
    a = 0.5 * w * w * tau_c
    xi = 0.5j * w
    xis = -0.5j * w
    chi = 1j * (rate * t - delta_omega)
    out[0, 0] = -a - rfg
    out[0, 1] = xi
    out[0, 2] = xis
    out[0, 3] = a + rfe
    out[1, 0] = xi
    out[1, 1] = -a + chi - r2
    out[1, 2] = a
    out[1, 3] = xis
    out[2, 0] = xis
    out[2, 1] = a
    out[2, 2] = -a - chi - r2
    out[2, 3] = xi
    out[3, 0] = a + rfg
    out[3, 1] = xis
    out[3, 2] = xi
    out[3, 3] = -a - rfe


@jit_kernel
def rhs(t, y, g, out, kind, omega1, peak, beta, duration, rate, delta_omega,
        tau_c, rfe, rfg, r2):
    """dy/dt = G(t) y; the generator is rebuilt on every evaluation."""
    fill_generator(t, kind, omega1, peak, beta, duration, rate, delta_omega,
                   tau_c, rfe, rfg, r2, g)
    for i in range(4):
        acc = 0.0 + 0.0j
        for j in range(4):
            acc = acc + g[i, j] * y[j]
        out[i] = acc


@jit_kernel
def integrate(y0, t_grid, rel_tol, abs_tol, max_step,
              kind, omega1, peak, beta, duration, rate, delta_omega,
              tau_c, rfe, rfg, r2, out_states):
    """Adaptive Dormand-Prince 5(4) propagation sampled at t_grid.

    Integration runs through each sample time exactly (steps are clipped at
    the next sample point), state rows land in out_states.  No trace
    renormalization anywhere: trace conservation is left to the integrator
    and checked at every sample, aborting if the drift exceeds the 1e-7
    threshold.

    Returns (status, t_fail, err_accum, n_steps) where err_accum sums the
    per-step local error estimates of the two population components (a
    conservative global error bound for them) and n_steps counts accepted
    steps.
    """
    n = t_grid.shape[0]
    y = y0.copy()
    g = np.empty((4, 4), np.complex128)
    k = np.empty((7, 4), np.complex128)
    ytmp = np.empty(4, np.complex128)
    ynew = np.empty(4, np.complex128)
    yerr = np.empty(4, np.complex128)

    a21 = 1.0 / 5.0
    a31 = 3.0 / 40.0
    a32 = 9.0 / 40.0
    a41 = 44.0 / 45.0
    a42 = -56.0 / 15.0
    a43 = 32.0 / 9.0
    a51 = 19372.0 / 6561.0
    a52 = -25360.0 / 2187.0
    a53 = 64448.0 / 6561.0
    a54 = -212.0 / 729.0
    a61 = 9017.0 / 3168.0
    a62 = -355.0 / 33.0
    a63 = 46732.0 / 5247.0
    a64 = 49.0 / 176.0
    a65 = -5103.0 / 18656.0
    b1 = 35.0 / 384.0
    b3 = 500.0 / 1113.0
    b4 = 125.0 / 192.0
    b5 = -2187.0 / 6784.0
    b6 = 11.0 / 84.0
    # b - bhat, cross-checked against exact fraction arithmetic
    e1 = 71.0 / 57600.0
    e3 = -71.0 / 16695.0
    e4 = 71.0 / 1920.0
    e5 = -17253.0 / 339200.0
    e6 = 22.0 / 525.0
    e7 = -1.0 / 40.0
    c2 = 1.0 / 5.0
    c3 = 3.0 / 10.0
    c4 = 4.0 / 5.0
    c5 = 8.0 / 9.0

    t = t_grid[0]
    for i in range(4):
        out_states[0, i] = y[i]
    rhs(t, y, g, k[0], kind, omega1, peak, beta, duration, rate, delta_omega,
        tau_c, rfe, rfg, r2)
    h = max_step
    err_accum = 0.0
    n_steps = 0

    for js in range(1, n):
        t_target = t_grid[js]
        while t < t_target:
            clipped = False
            h_step = h
            if t + h_step >= t_target:
                h_step = t_target - t
                clipped = True
            if h_step < _H_FLOOR:
                if clipped:
                    # sub-femtosecond remainder of the interval: snap
                    t = t_target
                    break
                return STATUS_UNDERFLOW, t, err_accum, n_steps

            for i in range(4):
                ytmp[i] = y[i] + h_step * (a21 * k[0, i])
            rhs(t + c2 * h_step, ytmp, g, k[1], kind, omega1, peak, beta,
                duration, rate, delta_omega, tau_c, rfe, rfg, r2)
            for i in range(4):
                ytmp[i] = y[i] + h_step * (a31 * k[0, i] + a32 * k[1, i])
            rhs(t + c3 * h_step, ytmp, g, k[2], kind, omega1, peak, beta,
                duration, rate, delta_omega, tau_c, rfe, rfg, r2)
            for i in range(4):
                ytmp[i] = y[i] + h_step * (a41 * k[0, i] + a42 * k[1, i]
                                           + a43 * k[2, i])
            rhs(t + c4 * h_step, ytmp, g, k[3], kind, omega1, peak, beta,
                duration, rate, delta_omega, tau_c, rfe, rfg, r2)
            for i in range(4):
                ytmp[i] = y[i] + h_step * (a51 * k[0, i] + a52 * k[1, i]
                                           + a53 * k[2, i] + a54 * k[3, i])
            rhs(t + c5 * h_step, ytmp, g, k[4], kind, omega1, peak, beta,
                duration, rate, delta_omega, tau_c, rfe, rfg, r2)
            for i in range(4):
                ytmp[i] = y[i] + h_step * (a61 * k[0, i] + a62 * k[1, i]
                                           + a63 * k[2, i] + a64 * k[3, i]
                                           + a65 * k[4, i])
            rhs(t + h_step, ytmp, g, k[5], kind, omega1, peak, beta,
                duration, rate, delta_omega, tau_c, rfe, rfg, r2)
            for i in range(4):
                ynew[i] = y[i] + h_step * (b1 * k[0, i] + b3 * k[2, i]
                                           + b4 * k[3, i] + b5 * k[4, i]
                                           + b6 * k[5, i])
            rhs(t + h_step, ynew, g, k[6], kind, omega1, peak, beta,
                duration, rate, delta_omega, tau_c, rfe, rfg, r2)
            for i in range(4):
                yerr[i] = h_step * (e1 * k[0, i] + e3 * k[2, i] + e4 * k[3, i]
                                    + e5 * k[4, i] + e6 * k[5, i] + e7 * k[6, i])

            errsq = 0.0
            for i in range(4):
                sc = abs_tol + rel_tol * max(abs(y[i]), abs(ynew[i]))
                q = abs(yerr[i]) / sc
                errsq += q * q
            err = math.sqrt(0.25 * errsq)

            if err <= 1.0:
                if clipped:
                    t = t_target
                else:
                    t = t + h_step
                for i in range(4):
                    y[i] = ynew[i]
                    k[0, i] = k[6, i]  # FSAL
                err_accum += abs(yerr[0]) + abs(yerr[3])
                n_steps += 1
                if err == 0.0:
                    fac = 10.0
                else:
                    fac = 0.9 * err ** -0.2
                    if fac > 10.0:
                        fac = 10.0
                    elif fac < 0.2:
                        fac = 0.2
                if not clipped:
                    h = h_step * fac
                    if h > max_step:
                        h = max_step
                elif fac < 1.0:
                    h = h_step * fac
            else:
                fac = 0.9 * err ** -0.2
                if fac < 0.2:
                    fac = 0.2
                h = h_step * fac
                if h < _H_FLOOR:
                    return STATUS_UNDERFLOW, t, err_accum, n_steps

        for i in range(4):
            out_states[js, i] = y[i]
        drift = (abs(y[0].real + y[3].real - 1.0) + abs(y[0].imag + y[3].imag)
                 + abs(y[2] - y[1].conjugate()))
        if drift > _INVARIANT_ABORT:
            return STATUS_INVARIANT, t, err_accum, n_steps

    return STATUS_OK, t, err_accum, n_steps


@jit_kernel
def magnus_trajectory(y0, t_grid, h_target,
                      kind, omega1, peak, beta, duration, rate, delta_omega,
                      out_states):
    """Unitary reference propagation, used to cross-check integrate().

    Fourth-order Magnus stepping with two-point Gauss-Legendre quadrature
    of the Hamiltonian and the closed-form 2x2 exponential of the
    resulting traceless anti-Hermitian matrix.  Deliberately shares no
    stepping machinery with the Runge-Kutta path.
    """
    n = t_grid.shape[0]
    r11 = y0[0]
    r12 = y0[1]
    r21 = y0[2]
    r22 = y0[3]
    out_states[0, 0] = r11
    out_states[0, 1] = r12
    out_states[0, 2] = r21
    out_states[0, 3] = r22

    gauss_off = math.sqrt(3.0) / 6.0
    c1 = 0.5 - gauss_off
    c2 = 0.5 + gauss_off

    for js in range(1, n):
        t0 = t_grid[js - 1]
        t1 = t_grid[js]
        span = t1 - t0
        n_sub = int(math.ceil(span / h_target))
        if n_sub < 1:
            n_sub = 1
        h = span / n_sub
        for m in range(n_sub):
            t = t0 + m * h
            ta = t + c1 * h
            tb = t + c2 * h
            wa = amp_envelope(ta, kind, omega1, peak, beta, duration)
            wb = amp_envelope(tb, kind, omega1, peak, beta, duration)
            da = rate * ta - delta_omega
            db = rate * tb - delta_omega
            # Omega = -i v.sigma with the commutator correction in v
            vx = 0.25 * h * (wa + wb)
            vy = -(math.sqrt(3.0) / 24.0) * h * h * (wa * db - wb * da)
            vz = -0.25 * h * (da + db)
            theta = math.sqrt(vx * vx + vy * vy + vz * vz)
            if theta > 0.0:
                s = math.sin(theta) / theta
            else:
                s = 1.0
            cth = math.cos(theta)
            u11 = cth - 1j * vz * s
            u12 = (-vy - 1j * vx) * s
            u21 = (vy - 1j * vx) * s
            u22 = cth + 1j * vz * s
            a11 = u11 * r11 + u12 * r21
            a12 = u11 * r12 + u12 * r22
            a21 = u21 * r11 + u22 * r21
            a22 = u21 * r12 + u22 * r22
            c11 = u11.conjugate()
            c12 = u12.conjugate()
            c21 = u21.conjugate()
            c22 = u22.conjugate()
            r11 = a11 * c11 + a12 * c12
            r12 = a11 * c21 + a12 * c22
            r21 = a21 * c11 + a22 * c12
            r22 = a21 * c21 + a22 * c22
        out_states[js, 0] = r11
        out_states[js, 1] = r12
        out_states[js, 2] = r21
        out_states[js, 3] = r22
