"""Model builders (n-particle Toda, KdV/mKdV) and the reference fixtures."""

from dataclasses import dataclass, field
from fractions import Fraction

from .expr import Expr, ZERO, parse
from . import geom
from .geom import MultiVec, Form
from .symmetry import PhaseModel


def eps(k):
    """Sign function with eps(0) = 0."""
    return (k > 0) - (k < 0)


def toda_names(n):
    return ["z%d" % (a + 1) for a in range(2 * n)]


def build_toda(n):
    """Non-periodic n-particle Toda chain with its non-Noether symmetry.

    Coordinates z_i = p_i and z_{n+i} = q_i (1-based).
    """
    if n < 2:
        raise ValueError("Toda chain needs n >= 2")
    dim = 2 * n
    p = [Expr.coord(i) for i in range(n)]
    t = Expr.time()
    half = Fraction(1, 2)

    def ex(i, j):
        # exp(q_i - q_j), 1-based particle labels
        return Expr.exp_linear({n + i - 1: 1, n + j - 1: -1})

    def left(i):
        return ex(i - 1, i) if i >= 2 else ZERO

    def right(i):
        return ex(i, i + 1) if i <= n - 1 else ZERO

    def pp(i):
        return p[i - 1] if 1 <= i <= n else ZERO

    E = [ZERO] * dim
    for i in range(1, n + 1):
        E[i - 1] = (half * pp(i) ** 2
                    + eps(i - 1) * (n - i + 2) * left(i)
                    - eps(n - i) * (n - i) * right(i)
                    + half * t * (eps(i - 1) * (pp(i - 1) + pp(i)) * left(i)
                                  - eps(n - i) * (pp(i) + pp(i + 1)) * right(i)))
        E[n + i - 1] = ((n - i + 1) * pp(i)
                        - half * sum((pp(k) for k in range(1, i)), ZERO)
                        + half * sum((pp(k) for k in range(i + 1, n + 1)), ZERO)
                        + half * t * (pp(i) ** 2 + eps(i - 1) * left(i) + eps(n - i) * right(i)))
    W = MultiVec(2, dim, {(i, n + i): 1 for i in range(n)})
    omega = Form(2, dim, {(i, n + i): 1 for i in range(n)})
    h = half * sum((x ** 2 for x in p), ZERO) + sum((ex(i, i + 1) for i in range(1, n)), ZERO)
    Ev = geom.vector(E)
    s = geom.phi_omega(omega, Ev)
    vol = Form(dim, dim, {tuple(range(dim)): 1})
    return PhaseModel("toda%d" % n, toda_names(n), W, h, Ev, omega=omega, s=s, volume=vol)


def builtin(name):
    """Resolve toda2..toda5 and toda:<n>."""
    if name.startswith("toda:"):
        try:
            n = int(name[5:])
        except ValueError:
            raise ValueError("bad model name %r" % name)
        return build_toda(n)
    if name.startswith("toda") and name[4:].isdigit():
        return build_toda(int(name[4:]))
    raise ValueError("unknown model %r (expected toda2..toda5 or toda:<n>)" % name)


# fixtures

@dataclass
class Fixture:
    """A printed reference value; corrected is set when the print is an erratum."""
    key: str
    model: str
    what: str
    printed: object
    corrected: object = None
    note: str = ""

    @property
    def expected(self):
        return self.printed if self.corrected is None else self.corrected


E45 = "exp(z4-z5)"
E56 = "exp(z5-z6)"
E34 = "exp(z3-z4)"

_NOTE_TODA3_BLOCK = (
    "constant q-row block has the opposite sign of the bracket [E,W] printed for "
    "three particles, of the n-particle d-bar table and of 1/2 Tr L^2; the printed "
    "matrix also fails the Lax equation with its own P")

FIXTURES = [
    Fixture("toda2-h", "toda2", "h", "1/2*z1^2 + 1/2*z2^2 + exp(z3-z4)"),
    Fixture("toda2-E", "toda2", "E",
            ["1/2*z1^2 - exp(z3-z4) - 1/2*t*(z1+z2)*exp(z3-z4)",
             "1/2*z2^2 + 2*exp(z3-z4) + 1/2*t*(z1+z2)*exp(z3-z4)",
             "2*z1 + 1/2*z2 + 1/2*t*(z1^2 + exp(z3-z4))",
             "z2 - 1/2*z1 + 1/2*t*(z2^2 + exp(z3-z4))"]),
    Fixture("toda2-What", "toda2", "What",
            {(1, 3): "z1", (2, 4): "z2", (1, 2): E34, (3, 4): "1"}),
    Fixture("toda2-wedges", "toda2", "wedges",
            {"W^W": "-2", "What^W": "-(z1+z2)", "What^What": "-2*(z1*z2 - exp(z3-z4))"}),
    Fixture("toda2-Y", "toda2", "Y",
            ["1/2*(z1+z2)", "z1*z2 - exp(z3-z4)"]),
    Fixture("toda3-E", "toda3", "E",
            ["1/2*z1^2 - 2*exp(z4-z5) - 1/2*t*(z1+z2)*exp(z4-z5)",
             "1/2*z2^2 + 3*exp(z4-z5) - exp(z5-z6) + 1/2*t*(z1+z2)*exp(z4-z5)",
             "1/2*z3^2 + 2*exp(z5-z6) + 1/2*t*(z2+z3)*exp(z5-z6)",
             "3*z1 + 1/2*z2 + 1/2*z3 + 1/2*t*(z1^2 + exp(z4-z5))",
             "2*z2 - 1/2*z1 + 1/2*z3 + 1/2*t*(z2^2 + exp(z4-z5) + exp(z5-z6))",
             "z3 - 1/2*z1 - 1/2*z2 + 1/2*t*(z3^2 + exp(z5-z6))"],
            corrected=["1/2*z1^2 - 2*exp(z4-z5) - 1/2*t*(z1+z2)*exp(z4-z5)",
                       "1/2*z2^2 + 3*exp(z4-z5) - exp(z5-z6) + 1/2*t*(z1+z2)*exp(z4-z5)"
                       " - 1/2*t*(z2+z3)*exp(z5-z6)",
                       "1/2*z3^2 + 2*exp(z5-z6) + 1/2*t*(z2+z3)*exp(z5-z6)",
                       "3*z1 + 1/2*z2 + 1/2*z3 + 1/2*t*(z1^2 + exp(z4-z5))",
                       "2*z2 - 1/2*z1 + 1/2*z3 + 1/2*t*(z2^2 + exp(z4-z5) + exp(z5-z6))",
                       "z3 - 1/2*z1 - 1/2*z2 + 1/2*t*(z3^2 + exp(z5-z6))"],
            note="E2 lacks the term -t/2 (z2+z3) exp(z5-z6); without it the symmetry "
                 "condition fails, with it the components agree with the n-particle formula"),
    Fixture("toda3-What", "toda3", "What",
            {(1, 4): "z1", (2, 5): "z2", (3, 6): "z3", (1, 2): E45, (2, 3): E56,
             (3, 4): "1", (4, 5): "1", (5, 6): "1"},
            corrected={(1, 4): "z1", (2, 5): "z2", (3, 6): "z3", (1, 2): E45, (2, 3): E56,
                       (4, 6): "1", (4, 5): "1", (5, 6): "1"},
            note="the term d3^d4 should read d4^d6 (the q-q block sum over i<j)"),
    Fixture("toda3-Y", "toda3", "Y",
            ["1/6*(z1+z2+z3)",
             "1/3*(z1*z2 + z1*z3 + z2*z3 - exp(z4-z5) - exp(z5-z6))",
             "z1*z2*z3 - z3*exp(z4-z5) - z1*exp(z5-z6)"],
            corrected=["1/3*(z1+z2+z3)",
                       "1/3*(z1*z2 + z1*z3 + z2*z3 - exp(z4-z5) - exp(z5-z6))",
                       "z1*z2*z3 - z3*exp(z4-z5) - z1*exp(z5-z6)"],
            note="the coefficient of Y^(1) is printed as 1/6, but the quotient it is set equal "
                 "to evaluates to 2(z1+z2+z3)/6; 1/3 also matches the mean of the secular roots"),
    Fixture("toda2-L", "toda2", "L",
            [["z1", "0", "0", "-" + E34],
             ["0", "z2", E34, "0"],
             ["0", "1", "z1", "0"],
             ["-1", "0", "0", "z2"]]),
    Fixture("toda2-P", "toda2", "P",
            [["0", "0", "1", "0"],
             ["0", "0", "0", "1"],
             ["-" + E34, E34, "0", "0"],
             [E34, "-" + E34, "0", "0"]]),
    Fixture("toda2-I", "toda2", "I", ["z1+z2", "z1^2+z2^2+2*exp(z3-z4)"]),
    Fixture("toda3-L", "toda3", "L",
            [["z1", "0", "0", "0", "-" + E45, "0"],
             ["0", "z2", "0", E45, "0", "-" + E56],
             ["0", "0", "z3", "0", E56, "0"],
             ["0", "-1", "-1", "z1", "0", "0"],
             ["1", "0", "-1", "0", "z2", "0"],
             ["1", "1", "0", "0", "0", "z3"]],
            corrected=[["z1", "0", "0", "0", "-" + E45, "0"],
                       ["0", "z2", "0", E45, "0", "-" + E56],
                       ["0", "0", "z3", "0", E56, "0"],
                       ["0", "1", "1", "z1", "0", "0"],
                       ["-1", "0", "1", "0", "z2", "0"],
                       ["-1", "-1", "0", "0", "0", "z3"]],
            note=_NOTE_TODA3_BLOCK),
    Fixture("toda3-P", "toda3", "P",
            [["0", "0", "0", "1", "0", "0"],
             ["0", "0", "0", "0", "1", "0"],
             ["0", "0", "0", "0", "0", "1"],
             ["-" + E45, E45, "0", "0", "0", "0"],
             [E45, "-" + E45 + "-" + E56, E56, "0", "0", "0"],
             ["0", E56, "-" + E56, "0", "0", "0"]]),
    Fixture("toda3-I", "toda3", "I",
            ["z1+z2",
             "z1^2+z2^2+z3^2+2*exp(z4-z5)+2*exp(z5-z6)",
             "z1^3+z2^3+z3^3+3*(z1+z2)*exp(z4-z5)+3*(z2+z3)*exp(z5-z6)"],
            corrected=["z1+z2+z3",
                       "z1^2+z2^2+z3^2+2*exp(z4-z5)+2*exp(z5-z6)",
                       "z1^3+z2^3+z3^3+3*(z1+z2)*exp(z4-z5)+3*(z2+z3)*exp(z5-z6)"],
            note="I^(1) omits z3; half the trace of the Lax matrix is z1+z2+z3"),
    Fixture("toda2-dbar", "toda2", "dbar",
            [{1: "z1", 4: "-" + E34},
             {2: "z2", 3: E34},
             {3: "z1", 2: "1"},
             {4: "z2", 1: "-1"}]),
    Fixture("toda3-dbar", "toda3", "dbar",
            [{1: "z1", 5: "-" + E45},
             {2: "z2", 4: E45, 6: "-" + E56},
             {3: "z3", 5: E56},
             {4: "z1", 2: "-1", 3: "-1"},
             {5: "z2", 1: "1", 3: "-1"},
             {6: "z3", 1: "1", 2: "1"}],
            corrected=[{1: "z1", 5: "-" + E45},
                       {2: "z2", 4: E45, 6: "-" + E56},
                       {3: "z3", 5: E56},
                       {4: "z1", 2: "1", 3: "1"},
                       {5: "z2", 1: "-1", 3: "1"},
                       {6: "z3", 1: "-1", 2: "-1"}],
            note=_NOTE_TODA3_BLOCK),
    # R_E displays: entries c dz_a (x) d_b stored at [a][b]
    Fixture("toda2-R_E", "toda2", "R_E",
            {(1, 1): "z1", (1, 4): "-1", (2, 2): "z2", (2, 3): "1",
             (3, 3): "z1", (3, 2): E34, (4, 4): "z2", (4, 1): "-" + E34}),
    Fixture("toda3-R_E", "toda3", "R_E",
            {(1, 1): "z1", (5, 1): "-" + E45, (2, 2): "z2", (4, 2): E45, (6, 2): "-" + E56,
             (3, 3): "z3", (5, 3): E56, (4, 4): "z1", (2, 4): "-1", (3, 4): "-1",
             (5, 5): "z2", (1, 5): "1", (3, 5): "-1", (6, 6): "z3", (1, 6): "1", (2, 6): "1"},
            corrected={(1, 1): "z1", (5, 1): "-" + E45, (2, 2): "z2", (4, 2): E45, (6, 2): "-" + E56,
                       (3, 3): "z3", (5, 3): E56, (4, 4): "z1", (2, 4): "1", (3, 4): "1",
                       (5, 5): "z2", (1, 5): "-1", (3, 5): "1", (6, 6): "z3", (1, 6): "-1",
                       (2, 6): "-1"},
            note=_NOTE_TODA3_BLOCK),
    Fixture("toda3-hojman", "toda3", "hojman",
            ["z1+z2+z3", "1/2*(z1^2+z2^2+z3^2) + exp(z4-z5) + exp(z5-z6)"]),
]

FIXTURE_MAP = {f.key: f for f in FIXTURES}


# n-particle tables, generated as strings in the expression grammar

def _e(i, j, n):
    return "exp(z%d-z%d)" % (n + i, n + j)


def _sum(parts):
    parts = [x for x in parts if x]
    return " + ".join("(%s)" % x for x in parts) if parts else "0"


def general_h(n):
    return _sum(["1/2*z%d^2" % i for i in range(1, n + 1)] + [_e(i, i + 1, n) for i in range(1, n)])


def general_What(n):
    """Ŵ for n particles, keys 1-based."""
    out = {}
    for i in range(1, n + 1):
        out[(i, n + i)] = "z%d" % i
    for i in range(1, n):
        out[(i, i + 1)] = _e(i, i + 1, n)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            out[(n + i, n + j)] = "1"
    return out


def general_LEomega(n):
    """L_E omega for n particles."""
    out = {}
    for i in range(1, n + 1):
        out[(i, n + i)] = "z%d" % i
    for i in range(1, n):
        out[(n + i, n + i + 1)] = _e(i, i + 1, n)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            out[(i, j)] = "1"
    return out


def general_I(n, kmax=4, printed=False):
    """Power-sum integrals I^(1..4) for n particles.

    The printed I^(4) carries 2 p_i p_(i+1) in the nearest-neighbour term;
    expanding the power sums gives p_i p_(i+1), which is the default.
    """
    cross = 2 if printed else 1
    ps = lambda k: ["z%d^%d" % (i, k) for i in range(1, n + 1)]
    I1 = _sum(["z%d" % i for i in range(1, n + 1)])
    I2 = _sum(ps(2) + ["2*" + _e(i, i + 1, n) for i in range(1, n)])
    I3 = _sum(ps(3) + ["3*(z%d+z%d)*%s" % (i, i + 1, _e(i, i + 1, n)) for i in range(1, n)])
    I4 = _sum(ps(4)
              + ["4*(z%d^2+%d*z%d*z%d+z%d^2)*%s" % (i, cross, i, i + 1, i + 1, _e(i, i + 1, n)) for i in range(1, n)]
              + ["2*exp(2*z%d-2*z%d)" % (n + i, n + i + 1) for i in range(1, n)]
              + ["4*" + _e(i, i + 2, n) for i in range(1, n - 1)])
    return [I1, I2, I3, I4][:kmax]


def general_dbar(n):
    """d-bar of every coordinate, 1-based: list of {index: coefficient}."""
    rows = []
    for i in range(1, n + 1):
        r = {i: "z%d" % i}
        if i <= n - 1:
            r[n + i + 1] = "-" + _e(i, i + 1, n)
        if i >= 2:
            r[n + i - 1] = _e(i - 1, i, n)
        rows.append(r)
    for i in range(1, n + 1):
        r = {n + i: "z%d" % i}
        for j in range(1, n + 1):
            if j > i:
                r[j] = "1"
            elif j < i:
                r[j] = "-1"
        rows.append(r)
    return rows


def general_RE(n):
    """R_E acting on vectors, entries c dz_a (x) d_b at [a][b], 1-based."""
    out = {}
    for i in range(1, n + 1):
        out[(i, i)] = "z%d" % i
        out[(n + i, n + i)] = "z%d" % i
    for i in range(1, n):
        out[(n + i, i + 1)] = _e(i, i + 1, n)
        out[(n + i + 1, i)] = "-" + _e(i, i + 1, n)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            out[(i, n + j)] = "-1"
            out[(j, n + i)] = "1"
    return out


def general_P(n):
    """Lax P for n particles, [a][b] 1-based."""
    out = {}
    for k in range(1, n + 1):
        out[(k, n + k)] = "1"
        parts = []
        if k >= 2:
            parts.append("-" + _e(k - 1, k, n))
            out[(n + k, k - 1)] = _e(k - 1, k, n)
        if k <= n - 1:
            parts.append("-" + _e(k, k + 1, n))
            out[(n + k, k + 1)] = _e(k, k + 1, n)
        out[(n + k, k)] = "".join(parts)
    return out


def general_J(n):
    """Orbit members J, J^(1), J^(2) of the total momentum."""
    J0 = _sum(["z%d" % i for i in range(1, n + 1)])
    J1 = _sum(["1/2*z%d^2" % i for i in range(1, n + 1)] + [_e(i, i + 1, n) for i in range(1, n)])
    J2 = _sum(["1/2*z%d^3" % i for i in range(1, n + 1)]
              + ["3/2*(z%d+z%d)*%s" % (i, i + 1, _e(i, i + 1, n)) for i in range(1, n)])
    return [J0, J1, J2]


GENERAL_NOTES = {
    "quartic-integral": "the n-particle I^(4) is printed with 2 p_i p_(i+1) in the nearest-neighbour "
          "term; the Newton recursion and Tr L^4 both give p_i p_(i+1)",
    "lax-table": "the n-particle Lax table prints L_{k,n+m} = eps(m-k); at n = 2 this contradicts "
           "the two-particle matrix, the derived generator gives -eps(m-k)",
    "recursion-table": "the n-particle recursion operator is printed with the diagonal p_i terms on the "
           "p-q cross positions and the exponential term attached to dq_i (x) d/dp_i; the "
           "table used here is the two- and three-particle pattern extended to n",
}


def to_bivector(table, dim, cls=MultiVec, names=None):
    comps = {}
    for (a, b), txt in table.items():
        comps[(a - 1, b - 1)] = parse(txt, names)
    return cls.from_sum(2, dim, comps.items())


def to_matrix(table, dim, names=None):
    M = [[ZERO] * dim for _ in range(dim)]
    if isinstance(table, dict):
        for (a, b), txt in table.items():
            M[a - 1][b - 1] = parse(txt, names)
    else:
        for a, row in enumerate(table):
            for b, txt in enumerate(row):
                M[a][b] = parse(txt, names)
    return M


def to_forms(rows, dim, names=None):
    return [Form(1, dim, {(j - 1,): parse(txt, names) for j, txt in r.items()}) for r in rows]


# PDE models

@dataclass
class PdeSpec:
    equation: str = "kdv"
    length: float = 80.0
    N: int = 1024
    densities: list = field(default_factory=list)


class BadGrid(ValueError):
    pass


DENSITY_NAMES = ["u", "u_x", "u_xx", "u_xxx"]

KDV_DENSITIES = [
    "2/3*u",
    "4/9*u^2",
    "8/9*(1/3*u^3 - u_x^2)",
    "64/45*(5/36*u^4 - 5/3*u*u_x^2 + u_xx^2)",
]

MKDV_DENSITIES = [
    "-4*u^2",
    "16*(u^4 + u_x^2)",
    "-32*(2*u^6 + 10*u^2*u_x^2 + u_xx^2)",
    "256/5*(5*u^8 + 70*u^4*u_x^2 - 7*u_x^4 + 14*u^2*u_xx^2 + u_xxx^2)",
]


def _grid_eval(e, cols):
    """Pointwise value of a density Expr over grid columns, canonical term order."""
    import numpy as np
    out = np.zeros_like(cols[0])
    for (tp, mono, ev), c in e.items():
        v = np.full_like(cols[0], float(c))
        for i, m in mono:
            v = v * cols[i] ** m
        if ev:
            v = v * np.exp(sum(float(w) * cols[i] for i, w in ev))
        out = out + v
    return out


class PdeModel:
    """Periodic grid discretization of KdV (u_t + u_xxx + u u_x = 0) or
    mKdV (u_t + u_xxx - 6 u^2 u_x = 0) with 4th-order central differences.

    Densities are expressions in u, u_x, u_xx, u_xxx; their integrals are
    taken with the periodic rectangle rule.
    """

    def __init__(self, spec):
        if spec.equation not in ("kdv", "mkdv"):
            raise ValueError("equation must be kdv or mkdv")
        N = spec.N
        if not isinstance(N, int) or N < 256 or N & (N - 1):
            raise BadGrid("N must be a power of two >= 256, got %r" % (N,))
        if not spec.length > 0:
            raise BadGrid("domain length must be positive")
        self.spec = spec
        self.N = N
        self.L = float(spec.length)
        self.dx = self.L / N
        self.equation = spec.equation
        texts = list(spec.densities) or (
            KDV_DENSITIES if spec.equation == "kdv" else MKDV_DENSITIES)
        self.density_exprs = []
        for k, txt in enumerate(texts):
            e = parse(txt, DENSITY_NAMES) if isinstance(txt, str) else txt
            if e.has_time():
                raise ValueError("density %d depends on t" % (k + 1))
            self.density_exprs.append(e)

    @property
    def grid(self):
        import numpy as np
        return np.arange(self.N) * self.dx

    def rhs(self, u):
        from .kernels import pde_rhs
        return pde_rhs(u, self.dx, self.equation)

    def densities(self, u):
        """Conserved functionals by the periodic rectangle rule."""
        import numpy as np
        from .kernels import d1, d2, d3
        u = np.asarray(u, dtype=float)
        cols = [u, d1(u, self.dx), d2(u, self.dx), d3(u, self.dx)]
        return [float(np.sum(_grid_eval(e, cols)) * self.dx) for e in self.density_exprs]


def build_pde(spec):
    return PdeModel(spec)


def kdv_soliton(x, t, kappa, x0):
    """Exact traveling wave 12 k^2 sech^2(k (x - x0 - 4 k^2 t))."""
    import numpy as np
    return 12.0 * kappa ** 2 / np.cosh(kappa * (np.asarray(x) - x0 - 4.0 * kappa ** 2 * t)) ** 2
