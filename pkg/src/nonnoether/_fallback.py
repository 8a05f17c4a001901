"""Pure numpy versions of the compiled kernels (same signatures)."""

import numpy as np


def eval_table(out_idx, coef, tpow, mono, expv, nout, z, t):
    z = np.asarray(z, dtype=float)
    v = coef * np.prod(z ** mono, axis=1)
    if expv.size:
        v = v * np.exp(expv @ z)
    if tpow.any():
        v = v * float(t) ** tpow
    return np.bincount(out_idx, weights=v, minlength=nout)


def rk4(rhs, mon, z0, t0, dt, nsteps):
    ri, rc, rt, rm, re, nr = rhs
    mi, mc, mt, mm, me, nmon = mon
    z = np.array(z0, dtype=float)
    states = np.empty((nsteps + 1, z.size))
    mons = np.zeros((nsteps + 1, nmon))
    f = lambda y, t: eval_table(ri, rc, rt, rm, re, nr, y, t)
    for s in range(nsteps + 1):
        t = t0 + s * dt
        states[s] = z
        if nmon:
            mons[s] = eval_table(mi, mc, mt, mm, me, nmon, z, t)
        if s == nsteps:
            break
        k1 = f(z, t)
        k2 = f(z + 0.5 * dt * k1, t + 0.5 * dt)
        k3 = f(z + 0.5 * dt * k2, t + 0.5 * dt)
        k4 = f(z + dt * k3, t + dt)
        z = z + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return states, mons


def _shift(u, k):
    return np.roll(u, -k)


def d1(u, dx):
    return (-_shift(u, 2) + 8.0 * _shift(u, 1) - 8.0 * _shift(u, -1) + _shift(u, -2)) / (12.0 * dx)


def d2(u, dx):
    return (-_shift(u, 2) + 16.0 * _shift(u, 1) - 30.0 * u
            + 16.0 * _shift(u, -1) - _shift(u, -2)) / (12.0 * dx * dx)


def d3(u, dx):
    return (-_shift(u, 3) + 8.0 * _shift(u, 2) - 13.0 * _shift(u, 1)
            + 13.0 * _shift(u, -1) - 8.0 * _shift(u, -2) + _shift(u, -3)) / (8.0 * dx ** 3)


def pde_rhs(u, dx, equation):
    u = np.asarray(u, dtype=float)
    ux = d1(u, dx)
    if equation == "mkdv":
        return -d3(u, dx) + 6.0 * u * u * ux
    return -d3(u, dx) - u * ux


def pde_rk4(u0, dx, dt, nsteps, equation):
    u = np.array(u0, dtype=float)
    for _ in range(nsteps):
        k1 = pde_rhs(u, dx, equation)
        k2 = pde_rhs(u + 0.5 * dt * k1, dx, equation)
        k3 = pde_rhs(u + 0.5 * dt * k2, dx, equation)
        k4 = pde_rhs(u + dt * k3, dx, equation)
        u = u + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return u
