"""Symmetry checks, Hojman invariants and orbit families."""

from dataclasses import dataclass, field
from fractions import Fraction

from .expr import Expr, ZERO, differentiate, exact_divide, NotDivisible
from . import geom
from .geom import MultiVec, Form


class NotLiouville(ValueError):
    pass


class NotASymmetry(ValueError):
    pass


class SeedMismatch(ValueError):
    pass


class ModelError(ValueError):
    pass


class PhaseModel:
    """A Hamiltonian system (W, omega, h) with a candidate symmetry E.

    coords are the 2n coordinate names; W is a bivector, omega an optional
    2-form (derived when W is constant), E a vector field that may depend
    on t, s an optional 1-form seed and volume an optional top form.
    """

    def __init__(self, name, coords, W, h, E, omega=None, s=None, volume=None,
                 validate=True):
        self.name = name
        self.coords = list(coords)
        dim = len(self.coords)
        if dim % 2:
            raise ModelError("phase space dimension must be even, got %d" % dim)
        self.n = dim // 2
        self.dim = dim
        self.W = W
        self.h = h
        self.E = E
        self.omega = omega
        self.s = s
        self.volume = volume
        self._cache = {}
        for label, obj, deg, cls in (("W", W, 2, MultiVec), ("E", E, 1, MultiVec)):
            if not isinstance(obj, cls) or obj.degree != deg or obj.dim != dim:
                raise ModelError("%s must be a degree-%d %s of dimension %d" % (label, deg, cls.__name__, dim))
        if validate:
            self.validate()

    def validate(self):
        top = geom.wedge_power(self.W, self.n)
        if isinstance(top, Expr) or top.is_zero():
            raise ModelError("W is degenerate: W^n = 0")
        if self.omega is None:
            try:
                self.omega = geom.constant_symplectic(self.W)
            except geom.GeomError:
                self.omega = None
        if self.omega is not None:
            geom.check_pair(self.W, self.omega)
            if not geom.is_closed(self.omega):
                raise ModelError("omega is not closed")
        return self

    def _memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    @property
    def X(self):
        """Hamiltonian vector field W(dh)."""
        return self._memo("X", lambda: geom.hamiltonian_vector(self.W, self.h))

    @property
    def What(self):
        """Ŵ = [E, W]."""
        return self._memo("What", lambda: geom.schouten(self.E, self.W))

    @property
    def LEomega(self):
        return self._memo("LEomega", lambda: geom.lie_derivative(self.E, self.omega))

    def bracket(self, f, g):
        return geom.poisson_bracket(self.W, f, g)

    def dt(self, F):
        """Total time derivative d/dt = d/dt|explicit + {h, .}."""
        return geom.time_derivative(self.W, self.h, F)

    def d(self, f):
        return geom.d(f, self.dim)

    def with_E(self, E, name=None):
        return PhaseModel(name or self.name, self.coords, self.W, self.h, E,
                          omega=self.omega, s=None, volume=self.volume, validate=False)


@dataclass
class SymmetryReport:
    is_symmetry: bool
    is_noether: bool
    yang_baxter: bool
    residuals: dict = field(default_factory=dict)


def _is_zero(x):
    return x.is_zero() if not isinstance(x, Expr) else x.is_zero()


def symmetry_residual(m):
    """dE/dt|explicit - [E, W(dh)]."""
    dE = m.E.map(lambda c: differentiate(c, "t"))
    return dE - geom.schouten(m.E, m.X)


def check_yang_baxter(m):
    """[[E, [E, W]], W]; zero iff the Yang-Baxter condition holds."""
    return geom.schouten(geom.schouten(m.E, m.What), m.W)


def check_symmetry(m):
    res = symmetry_residual(m)
    yb = check_yang_baxter(m)
    what = m.What
    is_sym = res.is_zero()
    return SymmetryReport(
        is_symmetry=is_sym,
        is_noether=is_sym and _is_zero(what),
        yang_baxter=_is_zero(yb),
        residuals={"symmetry": res, "noether": what, "yang_baxter": yb},
    )


def check_bihamiltonian(m):
    """Residuals of [W,W], [Ŵ,W], [Ŵ,Ŵ] and the witness W^n."""
    W, Wh = m.W, m.What
    return {
        "W_W": geom.schouten(W, W),
        "What_W": geom.schouten(Wh, W),
        "What_What": geom.schouten(Wh, Wh),
        "W_power": geom.wedge_power(W, m.n),
    }


def _top(form):
    if isinstance(form, Expr):
        return form
    if form.degree != form.dim:
        raise ValueError("volume must be a top-degree form")
    return form.comps.get(tuple(range(form.dim)), ZERO)


def hojman_invariant(X, E, volume, depth=0):
    """J = L_E Omega / Omega and J^(k) = (L_E)^k J, each checked conserved."""
    if not _top(geom.lie_derivative(X, volume)).is_zero():
        raise NotLiouville("the flow does not preserve the volume form")
    dE = E.map(lambda c: differentiate(c, "t"))
    if not (dE - geom.schouten(E, X)).is_zero():
        raise NotASymmetry("E does not commute with the flow")
    J = exact_divide(_top(geom.lie_derivative(E, volume)), _top(volume))
    out = [J]
    for _ in range(depth):
        out.append(geom.apply_vector(E, out[-1]))
    for k, Jk in enumerate(out):
        res = differentiate(Jk, "t") + geom.apply_vector(X, Jk)
        if not res.is_zero():
            raise NotASymmetry("J^(%d) is not conserved: %s" % (k, res))
    return out


def exact_ratio(lhs, rhs):
    """c with lhs == c*rhs for a rational constant c, else None."""
    if isinstance(rhs, Expr):
        lc, rc = {(): lhs}, {(): rhs}
    else:
        lc, rc = lhs.comps, rhs.comps
    if not rc:
        return None
    pivot = min(rc)
    try:
        c = exact_divide(lc.get(pivot, ZERO), rc[pivot])
    except NotDivisible:
        return None
    if not c.is_constant():
        return None
    c = c.constant_value()
    if set(lc) - set(rc):
        return None
    for k, v in rc.items():
        if lc.get(k, ZERO) != v * c:
            return None
    return c


@dataclass
class OrbitResult:
    c0: object
    c1: object
    family: list
    brackets: dict
    lhs0: object = None
    rhs0: object = None
    lhs1: object = None
    rhs1: object = None


def seed_field(m):
    """W(s) for the model's seed, checking it reproduces E."""
    if m.s is None:
        raise SeedMismatch("model has no seed 1-form s")
    V = geom.phi_W(m.W, m.s)
    if not (V - m.E).is_zero():
        raise SeedMismatch("E differs from W(s)")
    return V


def orbit_family(m, J, depth=3, brackets=True):
    """Orbit constants c0, c1 and the family (L_{W(s)})^k J.

    W(.) is the Hamiltonian map phi_W.  The bracket-produced bivector
    B = [W(s), W] acts on a 1-form u through its second slot,
    B(u)^a = sum_b B^{ab} u_b, matching the coordinate reading of the
    orbit conditions.
    """
    V = seed_field(m)
    B = geom.schouten(V, m.W)
    Bs = geom.apply_bivector(B, m.s, slot="last")
    lhs0 = geom.schouten(m.W, Bs)
    rhs0 = geom.schouten(V, B)
    c0 = exact_ratio(lhs0, rhs0)
    if c0 == -1:
        c0 = None
    dJ = m.d(J)
    lhs1 = geom.phi_W(m.W, geom.lie_derivative(V, dJ))
    rhs1 = geom.apply_bivector(B, dJ, slot="last")
    c1 = exact_ratio(lhs1, rhs1)
    if c1 == 0:
        c1 = None
    fam = [J]
    for _ in range(depth):
        fam.append(geom.apply_vector(V, fam[-1]))
    br = {}
    if brackets:
        for i in range(len(fam)):
            for j in range(i + 1, len(fam)):
                br[(i, j)] = m.bracket(fam[i], fam[j])
    return OrbitResult(c0, c1, fam, br, lhs0, rhs0, lhs1, rhs1)
