# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: term-table evaluation, RK4 stepping, periodic stencils."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, pow

cnp.import_array()


cdef void _eval(long nterms, long dim, long[::1] out_idx, double[::1] coef,
                long[::1] tpow, long[:, ::1] mono, double[:, ::1] expv,
                double[::1] z, double t, double[::1] out) noexcept nogil:
    cdef long k, i, m
    cdef double v, s
    for k in range(out.shape[0]):
        out[k] = 0.0
    for k in range(nterms):
        v = coef[k]
        if tpow[k]:
            v *= pow(t, <double>tpow[k])
        s = 0.0
        for i in range(dim):
            m = mono[k, i]
            if m == 1:
                v *= z[i]
            elif m > 1:
                v *= pow(z[i], <double>m)
            if expv[k, i] != 0.0:
                s += expv[k, i] * z[i]
        if s != 0.0:
            v *= exp(s)
        out[out_idx[k]] += v


def eval_table(long[::1] out_idx, double[::1] coef, long[::1] tpow,
               long[:, ::1] mono, double[:, ::1] expv, long nout,
               double[::1] z, double t):
    out = np.zeros(nout)
    cdef double[::1] o = out
    _eval(coef.shape[0], z.shape[0], out_idx, coef, tpow, mono, expv, z, t, o)
    return out


def rk4(tuple rhs, tuple mon, double[::1] z0, double t0, double dt, long nsteps):
    """Classical RK4; returns states (nsteps+1, dim) and monitors (nsteps+1, nmon)."""
    cdef long[::1] ri = rhs[0]
    cdef double[::1] rc = rhs[1]
    cdef long[::1] rt = rhs[2]
    cdef long[:, ::1] rm = rhs[3]
    cdef double[:, ::1] re = rhs[4]
    cdef long[::1] mi = mon[0]
    cdef double[::1] mc = mon[1]
    cdef long[::1] mt = mon[2]
    cdef long[:, ::1] mm = mon[3]
    cdef double[:, ::1] me = mon[4]
    cdef long nmon = mon[5]
    cdef long dim = z0.shape[0]
    cdef long nr = rc.shape[0]
    cdef long nm = mc.shape[0]
    states_a = np.empty((nsteps + 1, dim))
    mons_a = np.zeros((nsteps + 1, nmon))
    cdef double[:, ::1] states = states_a
    cdef double[:, ::1] mons = mons_a
    cdef double[::1] z = np.array(z0, dtype=float)
    cdef double[::1] tmp = np.empty(dim)
    cdef double[::1] k1 = np.empty(dim)
    cdef double[::1] k2 = np.empty(dim)
    cdef double[::1] k3 = np.empty(dim)
    cdef double[::1] k4 = np.empty(dim)
    cdef double[::1] mv = np.empty(nmon if nmon > 0 else 1)
    cdef long s, i, j
    cdef double t
    with nogil:
        for s in range(nsteps + 1):
            t = t0 + s * dt
            for i in range(dim):
                states[s, i] = z[i]
            if nmon > 0:
                _eval(nm, dim, mi, mc, mt, mm, me, z, t, mv)
                for j in range(nmon):
                    mons[s, j] = mv[j]
            if s == nsteps:
                break
            _eval(nr, dim, ri, rc, rt, rm, re, z, t, k1)
            for i in range(dim):
                tmp[i] = z[i] + 0.5 * dt * k1[i]
            _eval(nr, dim, ri, rc, rt, rm, re, tmp, t + 0.5 * dt, k2)
            for i in range(dim):
                tmp[i] = z[i] + 0.5 * dt * k2[i]
            _eval(nr, dim, ri, rc, rt, rm, re, tmp, t + 0.5 * dt, k3)
            for i in range(dim):
                tmp[i] = z[i] + dt * k3[i]
            _eval(nr, dim, ri, rc, rt, rm, re, tmp, t + dt, k4)
            for i in range(dim):
                z[i] = z[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    return states_a, mons_a


cdef void _pde_rhs(double[::1] u, double dx, int mkdv, double[::1] out) noexcept nogil:
    cdef long N = u.shape[0]
    cdef long j
    cdef double ux, uxxx
    cdef double c1 = 1.0 / (12.0 * dx)
    cdef double c3 = 1.0 / (8.0 * dx * dx * dx)
    for j in range(N):
        ux = (-u[(j + 2) % N] + 8.0 * u[(j + 1) % N]
              - 8.0 * u[(j - 1 + N) % N] + u[(j - 2 + N) % N]) * c1
        uxxx = (-u[(j + 3) % N] + 8.0 * u[(j + 2) % N] - 13.0 * u[(j + 1) % N]
                + 13.0 * u[(j - 1 + N) % N] - 8.0 * u[(j - 2 + N) % N]
                + u[(j - 3 + N) % N]) * c3
        if mkdv:
            out[j] = -uxxx + 6.0 * u[j] * u[j] * ux
        else:
            out[j] = -uxxx - u[j] * ux


def pde_rhs(double[::1] u, double dx, str equation):
    out = np.empty(u.shape[0])
    cdef double[::1] o = out
    _pde_rhs(u, dx, 1 if equation == "mkdv" else 0, o)
    return out


def pde_rk4(double[::1] u0, double dx, double dt, long nsteps, str equation):
    """Advance nsteps RK4 steps; returns the final profile."""
    cdef long N = u0.shape[0]
    cdef int mk = 1 if equation == "mkdv" else 0
    u_a = np.array(u0, dtype=float)
    cdef double[::1] u = u_a
    cdef double[::1] tmp = np.empty(N)
    cdef double[::1] k1 = np.empty(N)
    cdef double[::1] k2 = np.empty(N)
    cdef double[::1] k3 = np.empty(N)
    cdef double[::1] k4 = np.empty(N)
    cdef long s, j
    with nogil:
        for s in range(nsteps):
            _pde_rhs(u, dx, mk, k1)
            for j in range(N):
                tmp[j] = u[j] + 0.5 * dt * k1[j]
            _pde_rhs(tmp, dx, mk, k2)
            for j in range(N):
                tmp[j] = u[j] + 0.5 * dt * k2[j]
            _pde_rhs(tmp, dx, mk, k3)
            for j in range(N):
                tmp[j] = u[j] + dt * k3[j]
            _pde_rhs(tmp, dx, mk, k4)
            for j in range(N):
                u[j] = u[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
    return u_a
