"""Floating-point checks: RK4 trajectories, Lax spectra, PDE density drift."""

from dataclasses import dataclass, field
from math import ceil, log2

import numpy as np

from . import geom, kernels
from .expr import Expr, differentiate
from .models import BadGrid, PdeModel, PdeSpec, kdv_soliton


class NonFiniteState(ArithmeticError):
    pass


class EigenSolveFailure(ArithmeticError):
    pass


class Unstable(ArithmeticError):
    pass


# 64-bit linear congruential generator (Knuth's MMIX constants).
_LCG_A = 6364136223846793005
_LCG_C = 1442695040888963407
_MASK = (1 << 64) - 1


class Lcg:
    """Deterministic 64-bit LCG; uniform() uses the top 53 bits."""

    def __init__(self, seed=42):
        self.state = int(seed) & _MASK

    def next_u64(self):
        self.state = (_LCG_A * self.state + _LCG_C) & _MASK
        return self.state

    def uniform(self, lo=0.0, hi=1.0):
        return lo + (hi - lo) * ((self.next_u64() >> 11) * 2.0 ** -53)


def random_points(dim, count, seed=42, lo=-1.0, hi=1.0):
    g = Lcg(seed)
    return [[g.uniform(lo, hi) for _ in range(dim)] for _ in range(count)]


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    monitors: dict = field(default_factory=dict)
    eigenvalues: list = field(default_factory=list)
    dt: float = 0.0


def _steps(T, dt):
    if not (dt > 0):
        raise ValueError("dt must be positive, got %r" % dt)
    if not (T >= 0):
        raise ValueError("T must be non-negative, got %r" % T)
    return int(round(T / dt))


def _names_exprs(monitors):
    if isinstance(monitors, dict):
        return list(monitors), list(monitors.values())
    monitors = list(monitors)
    return ["m%d" % (k + 1) for k in range(len(monitors))], monitors


def integrate_hamiltonian(m, start, T, dt, monitors=(), t0=0.0):
    """Classical RK4 of z' = W(dh) with monitors recorded at every step."""
    if m.h.has_time():
        raise ValueError("the Hamiltonian must not depend on t")
    start = np.asarray(start, dtype=float)
    if start.shape != (m.dim,):
        raise ValueError("start must have %d components" % m.dim)
    nsteps = _steps(T, dt)
    names, exprs = _names_exprs(monitors)
    rhs = kernels.TermTable(geom.components(m.X), m.dim)
    mon = kernels.TermTable(exprs, m.dim)
    states, vals = kernels.rk4(rhs, mon, start, t0, dt, nsteps)
    if not np.all(np.isfinite(states)):
        bad = int(np.argmin(np.all(np.isfinite(states), axis=1)))
        raise NonFiniteState("state became non-finite at step %d" % bad)
    times = t0 + dt * np.arange(nsteps + 1)
    return Trajectory(times, states, {n: vals[:, k] for k, n in enumerate(names)}, dt=dt)


def relative_drift(series):
    """max |F(t) - F(0)| / |F(0)|, absolute when F(0) == 0."""
    s = np.asarray(series, dtype=float)
    if s.size == 0:
        return 0.0
    ref = abs(s[0])
    dev = float(np.max(np.abs(s - s[0])))
    return dev / ref if ref > 0 else dev


def drift_table(traj):
    return {k: relative_drift(v) for k, v in traj.monitors.items()}


def lax_table(lp, dim):
    M = lp.L.M
    return kernels.TermTable([M[a][b] for a in range(dim) for b in range(dim)], dim)


def _match(prev, cur):
    """Greedy nearest-neighbour assignment of cur onto prev; ties by index."""
    cur = list(cur)
    used = [False] * len(cur)
    out = []
    for p in prev:
        best, bj = None, -1
        for j, c in enumerate(cur):
            if used[j]:
                continue
            d = abs(c - p)
            if best is None or d < best:
                best, bj = d, j
        used[bj] = True
        out.append(cur[bj])
    return np.array(out)


def lax_spectra(m, lp, traj, stride=1):
    tab = lax_table(lp, m.dim)
    spectra = []
    prev = None
    for k in range(0, len(traj.times), stride):
        A = tab(traj.states[k], traj.times[k]).reshape(m.dim, m.dim)
        try:
            ev = np.linalg.eigvals(A)
        except np.linalg.LinAlgError as exc:
            raise EigenSolveFailure(str(exc)) from exc
        if not np.all(np.isfinite(ev)):
            raise EigenSolveFailure("non-finite eigenvalues at t=%g" % traj.times[k])
        if prev is None:
            ev = np.array(sorted(ev, key=lambda z: (z.real, z.imag)))
        else:
            ev = _match(prev, ev)
        spectra.append(ev)
        prev = ev
    return spectra


def isospectral_check(m, lp, traj, stride=1):
    """Max absolute drift of the eigenvalues of L along the trajectory."""
    spectra = lax_spectra(m, lp, traj, stride)
    traj.eigenvalues = spectra
    ref = spectra[0]
    return max(float(np.max(np.abs(s - ref))) for s in spectra)


def convergence_order(m, start, T, dts, ref_factor=16):
    """Endpoint errors against a fine reference and the fitted exponent.

    The exponent is the least-squares slope of log2(error) against
    log2(dt) over the ladder.
    """
    dts = [float(h) for h in dts]
    ref = integrate_hamiltonian(m, start, T, min(dts) / ref_factor).states[-1]
    errs = []
    for h in dts:
        z = integrate_hamiltonian(m, start, T, h).states[-1]
        errs.append(float(np.max(np.abs(z - ref))))
    x = np.log2(dts)
    y = np.log2(errs)
    slope = float(np.polyfit(x, y, 1)[0])
    return errs, slope


def gradient_table(f, dim):
    return kernels.TermTable([differentiate(f, a) for a in range(dim)], dim)


def numeric_brackets(m, laws, points, time=0.0):
    """Max |{f_i, f_j}| over points, from evaluated gradients and W."""
    dim = m.dim
    grads = [gradient_table(f, dim) for f in laws]
    Wt = kernels.TermTable([c for row in geom.bivector_matrix(m.W) for c in row], dim)
    out = {}
    for i in range(len(laws)):
        for j in range(i + 1, len(laws)):
            out[(i, j)] = 0.0
    for p in points:
        P = Wt(p, time).reshape(dim, dim)
        g = [G(p, time) for G in grads]
        for (i, j) in out:
            out[(i, j)] = max(out[(i, j)], abs(float(g[i] @ P @ g[j])))
    return out


def numeric_values(exprs, dim, points, time=0.0):
    tab = kernels.TermTable(list(exprs), dim)
    return np.array([tab(p, time) for p in points])


@dataclass
class PdeReport:
    equation: str
    N: int
    dx: float
    dt: float
    nsteps: int
    times: list
    densities: np.ndarray
    drifts: list
    shape_error: float = None
    final: np.ndarray = None


def pde_run(spec, u0, T, dt=None, outputs=50, exact=None, blowup=1e6):
    """RK4 + 4th-order central differences on a periodic grid.

    dt defaults to 0.2 dx^3 and is then shrunk so that an integer number of
    steps lands exactly on T.  Densities are sampled at `outputs` evenly
    spaced times; `exact(x, t)` enables the L2 shape error at T.
    """
    model = spec if isinstance(spec, PdeModel) else PdeModel(spec)
    dx = model.dx
    x = model.grid
    u = np.array(u0(x) if callable(u0) else u0, dtype=float)
    if u.shape != (model.N,):
        raise BadGrid("initial profile has %d points, grid has %d" % (u.size, model.N))
    nominal = 0.2 * dx ** 3 if dt is None else float(dt)
    if not nominal > 0:
        raise ValueError("dt must be positive")
    nsteps = max(1, int(ceil(T / nominal - 1e-9)))
    dt = T / nsteps
    outputs = max(1, min(outputs, nsteps))
    marks = [round(k * nsteps / outputs) for k in range(outputs + 1)]
    norm0 = float(np.sqrt(np.sum(u * u) * dx))
    times = [0.0]
    dens = [model.densities(u)]
    for a, b in zip(marks[:-1], marks[1:]):
        u = kernels.pde_rk4(u, dx, dt, b - a, model.equation)
        norm = float(np.sqrt(np.sum(u * u) * dx))
        if not np.isfinite(norm) or norm > blowup * max(norm0, 1.0):
            raise Unstable("solution blew up before t=%g" % (b * dt))
        times.append(b * dt)
        dens.append(model.densities(u))
    dens = np.array(dens)
    drifts = [relative_drift(dens[:, k]) for k in range(dens.shape[1])]
    err = None
    if exact is not None:
        err = float(np.sqrt(np.sum((u - exact(x, T)) ** 2) * dx))
    return PdeReport(model.equation, model.N, dx, dt, nsteps, times, dens, drifts, err, u)


def soliton_run(kappa=0.5, length=80.0, N=1024, T=5.0, x0=None, dt=None, outputs=50):
    """KdV one-soliton run against the exact travelling wave."""
    x0 = length / 2.0 if x0 is None else x0
    spec = PdeSpec("kdv", length, N, [])
    exact = lambda x, t: kdv_soliton(x, t, kappa, x0)
    return pde_run(spec, lambda x: exact(x, 0.0), T, dt=dt, outputs=outputs, exact=exact)


def refinement_study(kappa=0.5, length=80.0, grids=(512, 1024), T=5.0):
    """Shape errors on successively refined grids and the observed order."""
    runs = [soliton_run(kappa, length, N, T) for N in grids]
    errs = [r.shape_error for r in runs]
    orders = [log2(errs[k] / errs[k + 1]) for k in range(len(errs) - 1)]
    return runs, errs, orders


def mkdv_profile(amplitude=0.2, width=2.0, center=None, length=80.0):
    """Small sech bump for mKdV runs."""
    c = length / 2.0 if center is None else center
    return lambda x: amplitude / np.cosh((np.asarray(x) - c) / width)
