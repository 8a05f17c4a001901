"""Numeric hot loops, dispatched to the compiled extension when it is built.

Set NONNOETHER_PURE=1 to force the numpy fallback.  BACKEND names the
implementation in use.
"""

import os

import numpy as np

from . import _fallback
from .expr import Expr

_ext = None
if not os.environ.get("NONNOETHER_PURE"):
    try:
        from . import _ckernels as _ext
    except ImportError:
        _ext = None

BACKEND = "cython" if _ext is not None else "numpy"
_impl = _ext if _ext is not None else _fallback

d1 = _fallback.d1
d2 = _fallback.d2
d3 = _fallback.d3


class TermTable:
    """A list of Exprs flattened into arrays, one row per term.

    Terms keep the canonical Expr order, so sums are accumulated in a fixed
    order and results are reproducible bit for bit on a given backend.
    """

    def __init__(self, exprs, dim):
        rows = []
        for k, e in enumerate(exprs):
            if not isinstance(e, Expr):
                e = Expr.const(e)
            if e.max_index() >= dim:
                raise ValueError("expression uses z%d beyond dimension %d" % (e.max_index() + 1, dim))
            for (tp, mono, expv), c in e.items():
                rows.append((k, float(c), tp, mono, expv))
        n = len(rows)
        self.nout = len(exprs)
        self.dim = dim
        self.out_idx = np.zeros(n, dtype=np.int64)
        self.coef = np.zeros(n)
        self.tpow = np.zeros(n, dtype=np.int64)
        self.mono = np.zeros((n, dim), dtype=np.int64)
        self.expv = np.zeros((n, dim))
        for r, (k, c, tp, mono, expv) in enumerate(rows):
            self.out_idx[r] = k
            self.coef[r] = c
            self.tpow[r] = tp
            for i, p in mono:
                self.mono[r, i] = p
            for i, w in expv:
                self.expv[r, i] = float(w)

    def args(self):
        return (self.out_idx, self.coef, self.tpow, self.mono, self.expv, self.nout)

    def __call__(self, z, t=0.0):
        z = np.ascontiguousarray(z, dtype=float)
        a = self.args()
        return _impl.eval_table(a[0], a[1], a[2], a[3], a[4], a[5], z, float(t))


def rk4(rhs, monitors, z0, t0, dt, nsteps):
    """Fixed-step RK4 of z' = rhs(z, t), recording monitors at every step."""
    z0 = np.ascontiguousarray(z0, dtype=float)
    return _impl.rk4(rhs.args(), monitors.args(), z0, float(t0), float(dt), int(nsteps))


def pde_rhs(u, dx, equation):
    return _impl.pde_rhs(np.ascontiguousarray(u, dtype=float), float(dx), equation)


def pde_rk4(u0, dx, dt, nsteps, equation):
    return _impl.pde_rk4(np.ascontiguousarray(u0, dtype=float), float(dx), float(dt),
                         int(nsteps), equation)
