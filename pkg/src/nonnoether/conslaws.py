"""Conservation-law families Y, C, I and the secular roots."""

from dataclasses import dataclass, field
from math import comb, factorial
import warnings

import numpy as np

from .expr import Expr, ZERO, exact_divide, NotDivisible, evaluate
from . import geom


class PairingWarning(UserWarning):
    pass


def _top(x, dim):
    if isinstance(x, Expr):
        return x if dim == 0 else ZERO
    return x.comps.get(tuple(range(dim)), ZERO)


def y_laws(m):
    """Y^(k) = top(Ŵ^k ^ W^(n-k)) / top(W^n), k = 1..n."""
    n, dim = m.n, m.dim
    W, Wh = m.W, m.What
    den = _top(geom.wedge_power(W, n), dim)
    out = []
    Wpow = [Expr.const(1)]
    for k in range(1, n + 1):
        Wpow.append(geom.wedge(Wpow[-1], W) if k > 1 else W)
    Whk = None
    for k in range(1, n + 1):
        Whk = Wh if k == 1 else geom.wedge(Whk, Wh)
        vol = Whk if k == n else geom.wedge(Whk, Wpow[n - k])
        out.append(exact_divide(_top(vol, dim), den))
    return out


def c_laws(m):
    """C^(k) = i_{W^k} (L_E omega)^k / (k!)^2, k = 1..n.

    The (k!)^2 turns both wedge powers into divided powers, so that C^(k)
    is the k-th elementary symmetric function of the secular roots.
    """
    W, a = m.W, m.LEomega
    out = []
    Wk = ak = None
    for k in range(1, m.n + 1):
        Wk = W if k == 1 else geom.wedge(Wk, W)
        ak = a if k == 1 else geom.wedge(ak, a)
        out.append(geom.interior(Wk, ak) / (factorial(k) ** 2))
    return out


def i_from_c(C, kmax):
    """Newton recursion I^(m) = (-1)^(m+1) m C^(m) + sum_k (-1)^(k+1) I^(m-k) C^(k)."""
    n = len(C)
    Cx = lambda k: C[k - 1] if k <= n else ZERO
    I = []
    for mm in range(1, kmax + 1):
        v = Cx(mm) * (mm if mm % 2 else -mm)
        for k in range(1, mm):
            term = I[mm - k - 1] * Cx(k)
            v = v + term if k % 2 else v - term
        I.append(v)
    return I


def c_and_i_laws(m, kmax=None):
    C = c_laws(m)
    I = i_from_c(C, kmax or m.n)
    return C, I


def _matrices_at(m, point, time):
    dim = m.dim
    A = np.zeros((dim, dim))
    B = np.zeros((dim, dim))
    for (a, b), c in m.What.comps.items():
        v = evaluate(c, point, time)
        A[a, b], A[b, a] = v, -v
    for (a, b), c in m.W.comps.items():
        v = evaluate(c, point, time)
        B[a, b], B[b, a] = v, -v
    return A, B


def pair_roots(vals, tol=1e-6):
    """Cluster a doubled spectrum into pairs by nearest neighbours."""
    vals = list(sorted(vals, key=lambda z: (z.real, z.imag)))
    out = []
    ambiguous = False
    while vals:
        v = vals.pop(0)
        if not vals:
            out.append(v)
            ambiguous = True
            break
        dists = [abs(v - w) for w in vals]
        j = int(np.argmin(dists))
        if dists[j] > tol * (1 + abs(v)):
            ambiguous = True
        w = vals.pop(j)
        out.append((v + w) / 2)
    if ambiguous:
        warnings.warn("secular spectrum did not pair cleanly", PairingWarning)
    return out


@dataclass
class Roots:
    values: list
    complex_roots: bool
    flags: list = field(default_factory=list)


def secular_roots(m, point, time=0.0):
    """The c_i solving (Ŵ - cW)^n = 0 at a point, ascending by real part."""
    import scipy.linalg
    A, B = _matrices_at(m, point, time)
    if abs(np.linalg.det(B)) < 1e-300:
        raise ValueError("W is degenerate at this point")
    vals = scipy.linalg.eigvals(A, B)
    roots = pair_roots(list(vals))
    roots.sort(key=lambda z: (z.real, z.imag))
    cplx = any(abs(r.imag) > 1e-9 * (1 + abs(r)) for r in roots)
    if cplx:
        return Roots([complex(r) for r in roots], True, ["ComplexRoots"])
    return Roots([float(r.real) for r in roots], False)


def elementary_symmetric(vals):
    """e_1..e_n of a list of numbers."""
    e = [1.0] + [0.0] * len(vals)
    for v in vals:
        for k in range(len(vals), 0, -1):
            e[k] += e[k - 1] * v
    return e[1:]


def y_from_roots(vals):
    n = len(vals)
    e = elementary_symmetric(vals)
    return [e[k - 1] / comb(n, k) for k in range(1, n + 1)]


@dataclass
class ConservedSet:
    Y: list
    C: list
    I: list
    model: object = None

    def roots_at(self, point, time=0.0):
        return secular_roots(self.model, point, time).values

    def all_laws(self):
        return ([("Y%d" % (k + 1), y) for k, y in enumerate(self.Y)]
                + [("C%d" % (k + 1), c) for k, c in enumerate(self.C)]
                + [("I%d" % (k + 1), i) for k, i in enumerate(self.I)])


def conserved_set(m, kmax=None):
    Y = y_laws(m)
    C, I = c_and_i_laws(m, kmax)
    return ConservedSet(Y, C, I, m)


def conservation_residuals(m, laws):
    """Total time derivatives dF/dt for each law (zero iff conserved)."""
    return [m.dt(F) for F in laws]


def involutivity(m, laws, mode="symbolic", points=None):
    """Pairwise Poisson brackets: Exprs (symbolic) or max |value| over points."""
    k = len(laws)
    out = {}
    for i in range(k):
        for j in range(i + 1, k):
            br = m.bracket(laws[i], laws[j])
            if mode == "symbolic":
                out[(i, j)] = br
            else:
                out[(i, j)] = max((abs(evaluate(br, p, t)) for p, t in points), default=0.0)
    return out


def jacobian_rank(m, laws, point, time=0.0):
    from .expr import differentiate
    J = np.array([[evaluate(differentiate(f, a), point, time) for a in range(m.dim)] for f in laws])
    return int(np.linalg.matrix_rank(J))
