"""Multivector and differential-form calculus in one global chart.

Components live on strictly increasing index tuples (0-based).  A degree-0
object is a bare Expr.

Sign conventions, fixed once and checked by the test-suite:

* interior(d_I, dz_I) = 1 for increasing I; i_{X^Y} = i_Y o i_X.
* phi_omega(X) = -i_X omega, phi_W(u)^b = sum_a u_a W^{ab}, both extended
  multiplicatively.
* The Schouten bracket is the odd-variable bracket built from right
  derivatives, multiplied by -1 whenever one argument has degree >= 2.  On
  vectors and functions it is the ordinary commutator and X(f); for a
  bivector it gives [W, f] = phi_W(df), so that phi_omega([W, phi_W u]) = du.
"""

from functools import lru_cache

from .expr import Expr, ZERO, differentiate


class GeomError(ValueError):
    pass


class DegreeOverflow(GeomError):
    pass


class DegreeMismatch(GeomError):
    pass


class InconsistentPair(GeomError):
    pass


class _Alt:
    """Antisymmetric tensor with Expr components on increasing tuples."""

    __slots__ = ("degree", "dim", "comps")
    kind = None

    def __init__(self, degree, dim, comps=None, check=True):
        self.degree = degree
        self.dim = dim
        out = {}
        if comps:
            for idx, c in comps.items():
                idx = tuple(idx)
                if check:
                    if len(idx) != degree or any(
                            idx[k] >= idx[k + 1] for k in range(len(idx) - 1)):
                        raise GeomError("index tuple %r is not strictly increasing "
                                        "of length %d" % (idx, degree))
                    if idx and (idx[0] < 0 or idx[-1] >= dim):
                        raise GeomError("index out of range in %r" % (idx,))
                if not isinstance(c, Expr):
                    c = Expr.const(c)
                if c:
                    out[idx] = c
        self.comps = out

    @classmethod
    def from_sum(cls, degree, dim, pairs):
        """Accumulate (possibly unsorted) index tuples with antisymmetry."""
        acc = {}
        for idx, c in pairs:
            s, key = _sort_sign(tuple(idx))
            if s == 0:
                continue
            acc[key] = acc.get(key, ZERO) + (c if s > 0 else -c)
        return cls(degree, dim, acc, check=False)

    def __getitem__(self, idx):
        s, key = _sort_sign(tuple(idx))
        if s == 0:
            return ZERO
        c = self.comps.get(key, ZERO)
        return c if s > 0 else -c

    def is_zero(self):
        return not self.comps

    def items(self):
        return sorted(self.comps.items())

    def _same(self, other):
        if type(other) is not type(self) or other.degree != self.degree or other.dim != self.dim:
            raise DegreeMismatch("incompatible operands")

    def __add__(self, other):
        self._same(other)
        d = dict(self.comps)
        for k, c in other.comps.items():
            d[k] = d.get(k, ZERO) + c
        return type(self)(self.degree, self.dim, d, check=False)

    def __neg__(self):
        return type(self)(self.degree, self.dim, {k: -c for k, c in self.comps.items()}, check=False)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, f):
        """Scale by an Expr or rational."""
        if isinstance(f, _Alt):
            return NotImplemented
        return type(self)(self.degree, self.dim, {k: c * f for k, c in self.comps.items()}, check=False)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, _Alt):
            return NotImplemented
        return (type(self) is type(other) and self.degree == other.degree
                and self.dim == other.dim and self.comps == other.comps)

    def __hash__(self):
        return hash((self.kind, self.degree, self.dim, frozenset(self.comps.items())))

    def map(self, fn):
        return type(self)(self.degree, self.dim, {k: fn(c) for k, c in self.comps.items()}, check=False)

    def __repr__(self):
        return "%s(%d, %s)" % (type(self).__name__, self.degree, self.to_string())

    def to_string(self, names=None):
        if not self.comps:
            return "0"
        sym = "d" if self.kind == "vec" else "dz"
        parts = []
        for idx, c in self.items():
            basis = "^".join("%s%d" % (sym, i + 1) for i in idx) or "1"
            parts.append("(%s)*%s" % (c.__str__() if names is None else _tostr(c, names), basis))
        return " + ".join(parts)


def _tostr(e, names):
    from .expr import to_string
    return to_string(e, names)


class MultiVec(_Alt):
    __slots__ = ()
    kind = "vec"


class Form(_Alt):
    __slots__ = ()
    kind = "form"


@lru_cache(maxsize=1 << 16)
def _sort_sign(idx):
    """Sign of the permutation sorting idx (0 if repeated) and the sorted tuple."""
    if len(set(idx)) != len(idx):
        return 0, None
    inv = 0
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                inv += 1
    return (-1 if inv & 1 else 1), tuple(sorted(idx))


@lru_cache(maxsize=1 << 16)
def _merge_sign(a, b):
    """Sign and merged tuple of the wedge of basis a with basis b (0 if overlap)."""
    if set(a) & set(b):
        return 0, None
    inv = 0
    for x in a:
        for y in b:
            if x > y:
                inv += 1
    return (-1 if inv & 1 else 1), tuple(sorted(a + b))


def vector(comps, dim=None):
    """Degree-1 MultiVec from a list of Exprs (or an index->Expr map)."""
    if isinstance(comps, dict):
        return MultiVec(1, dim, {(i,): c for i, c in comps.items()})
    return MultiVec(1, len(comps), {(i,): c for i, c in enumerate(comps)})


def one_form(comps, dim=None):
    if isinstance(comps, dict):
        return Form(1, dim, {(i,): c for i, c in comps.items()})
    return Form(1, len(comps), {(i,): c for i, c in enumerate(comps)})


def components(obj):
    """Dense component list of a degree-1 object."""
    return [obj.comps.get((i,), ZERO) for i in range(obj.dim)]


def bivector_matrix(P):
    """Full antisymmetric matrix M[a][b] = P^{ab} of a degree-2 object."""
    n = P.dim
    M = [[ZERO] * n for _ in range(n)]
    for (a, b), c in P.comps.items():
        M[a][b] = c
        M[b][a] = -c
    return M


def _lift(x, cls, dim):
    if isinstance(x, _Alt):
        return x
    if isinstance(x, (int,)) or isinstance(x, Expr):
        e = x if isinstance(x, Expr) else Expr.const(x)
        return cls(0, dim, {(): e}, check=False)
    raise TypeError("expected a multivector, form or Expr, got %r" % (x,))


def _drop(x):
    if x.degree == 0:
        return x.comps.get((), ZERO)
    return x


def _dim_of(*objs):
    for o in objs:
        if isinstance(o, _Alt):
            return o.dim
    return None


def wedge(a, b):
    """Graded-commutative exterior product."""
    dim = _dim_of(a, b)
    if dim is None:
        return a * b
    cls = type(a) if isinstance(a, _Alt) else type(b)
    a = _lift(a, cls, dim)
    b = _lift(b, cls, dim)
    if type(a) is not type(b):
        raise DegreeMismatch("wedge of a form with a multivector")
    deg = a.degree + b.degree
    if deg > dim:
        raise DegreeOverflow("degree %d exceeds dimension %d" % (deg, dim))
    return _drop(_wedge(a, b, cls, deg, dim))


def _wedge(a, b, cls, deg, dim):
    acc = {}
    for I, x in a.comps.items():
        for J, y in b.comps.items():
            s, K = _merge_sign(I, J)
            if not s:
                continue
            v = x * y
            acc[K] = acc.get(K, ZERO) + (v if s > 0 else -v)
    return cls(deg, dim, acc, check=False)


def wedge_power(a, k):
    """k-fold wedge power (k = 0 gives the constant 1)."""
    if k == 0:
        return Expr.const(1)
    out = a
    for _ in range(k - 1):
        out = wedge(out, a)
    return out


def _contract_one(i, K):
    """i_{d_i} dz_K: sign and remaining tuple (0 if i not in K)."""
    if i not in K:
        return 0, None
    pos = K.index(i)
    return (-1 if pos & 1 else 1), K[:pos] + K[pos + 1:]


def interior(v, f):
    """Contraction of a multivector into a form, i_{X^Y} = i_Y o i_X."""
    if isinstance(v, Expr):
        return f * v
    if not isinstance(v, MultiVec):
        raise DegreeMismatch("interior expects a multivector first")
    if isinstance(f, Expr):
        if v.degree == 0:
            return f * _drop(v)
        raise DegreeMismatch("cannot contract a degree-%d multivector into a function" % v.degree)
    if not isinstance(f, Form):
        raise DegreeMismatch("interior expects a form second")
    p, q = v.degree, f.degree
    if p > q:
        raise DegreeMismatch("multivector degree %d exceeds form degree %d" % (p, q))
    acc = {}
    for I, x in v.comps.items():
        for K, y in f.comps.items():
            s = 1
            R = K
            for i in I:
                s1, R = _contract_one(i, R)
                if not s1:
                    break
                s *= s1
            else:
                w = x * y
                acc[R] = acc.get(R, ZERO) + (w if s > 0 else -w)
    return _drop(Form(q - p, f.dim, acc, check=False))


def _rder(P, a):
    """Right derivative of the odd-variable polynomial P by xi_a."""
    p = P.degree
    acc = {}
    for I, c in P.comps.items():
        if a in I:
            k = I.index(a)
            acc[I[:k] + I[k + 1:]] = c if (p - 1 - k) % 2 == 0 else -c
    return type(P)(p - 1, P.dim, acc, check=False) if acc else None


def _zder(P, a):
    acc = {}
    for I, c in P.comps.items():
        dc = differentiate(c, a)
        if dc:
            acc[I] = dc
    return type(P)(P.degree, P.dim, acc, check=False) if acc else None


def schouten_raw(a, b):
    """Odd-variable Schouten bracket without the degree-dependent sign."""
    dim = _dim_of(a, b)
    if dim is None:
        return ZERO
    a = _lift(a, MultiVec, dim)
    b = _lift(b, MultiVec, dim)
    if not (isinstance(a, MultiVec) and isinstance(b, MultiVec)):
        raise DegreeMismatch("Schouten bracket takes multivectors")
    p, q = a.degree, b.degree
    deg = p + q - 1
    if deg > dim:
        raise DegreeOverflow("degree %d exceeds dimension %d" % (deg, dim))
    if deg < 0:
        return ZERO
    sgn = -1 if ((p - 1) * (q - 1)) % 2 else 1
    acc = MultiVec(deg, dim)
    for i in range(dim):
        ra = _rder(a, i) if p else None
        zb = _zder(b, i) if ra is not None else None
        if ra is not None and zb is not None:
            acc = acc + _wedge(ra, zb, MultiVec, deg, dim)
        rb = _rder(b, i) if q else None
        za = _zder(a, i) if rb is not None else None
        if rb is not None and za is not None:
            t = _wedge(rb, za, MultiVec, deg, dim)
            acc = acc - t if sgn > 0 else acc + t
    return _drop(acc)


def _degree(x):
    return x.degree if isinstance(x, _Alt) else 0


def schouten(a, b):
    """Schouten bracket [a, b] in the frozen sign convention."""
    r = schouten_raw(a, b)
    if max(_degree(a), _degree(b)) >= 2:
        return -r
    return r


def exterior_derivative(f):
    """Coordinate exterior derivative; an Expr is a 0-form."""
    if isinstance(f, Expr):
        raise GeomError("pass the dimension: use d(f, dim)")
    if not isinstance(f, Form):
        raise DegreeMismatch("exterior derivative of a non-form")
    if f.degree + 1 > f.dim:
        raise DegreeOverflow("degree overflow")
    acc = {}
    for I, c in f.comps.items():
        for a in sorted(c.coords()):
            dc = differentiate(c, a)
            if not dc:
                continue
            s, K = _merge_sign((a,), I)
            if not s:
                continue
            acc[K] = acc.get(K, ZERO) + (dc if s > 0 else -dc)
    return Form(f.degree + 1, f.dim, acc, check=False)


def is_closed(f):
    """d f == 0; top-degree forms are closed trivially."""
    return f.degree >= f.dim or exterior_derivative(f).is_zero()


def d(f, dim=None):
    """Exterior derivative accepting an Expr (with dim) or a Form."""
    if isinstance(f, Expr):
        if dim is None:
            raise GeomError("dimension needed for the differential of a function")
        return Form(1, dim, {(a,): differentiate(f, a) for a in f.coords()})
    return exterior_derivative(f)


def apply_vector(X, f):
    """X(f) for a vector field X and function f."""
    out = ZERO
    for (a,), c in X.comps.items():
        df = differentiate(f, a)
        if df:
            out = out + c * df
    return out


def lie_derivative(X, obj):
    """Lie derivative along a vector field.

    Forms use Cartan's formula.  Multivectors use the Schouten bracket
    [X, obj], which is how the bracket Ŵ = [E, W] is read as L_E W.
    """
    if not isinstance(X, MultiVec) or X.degree != 1:
        raise DegreeMismatch("lie_derivative needs a vector field")
    if isinstance(obj, Expr):
        return apply_vector(X, obj)
    if isinstance(obj, Form):
        if obj.degree == 0:
            return _lift(apply_vector(X, _drop(obj)), Form, obj.dim)
        out = interior(X, exterior_derivative(obj)) if obj.degree < obj.dim else None
        ix = interior(X, obj)
        dix = d(ix, obj.dim) if isinstance(ix, Expr) else exterior_derivative(ix)
        return dix if out is None else out + dix
    if isinstance(obj, MultiVec):
        return schouten(X, obj)
    raise TypeError("unsupported object %r" % (obj,))


# musical maps

def _basis_images(M, cls, dim, sign):
    """Images of basis 1-elements under the matrix map row a -> sum_b M[a][b] e_b."""
    imgs = []
    for a in range(dim):
        imgs.append(cls(1, dim, {(b,): (M[a][b] if sign > 0 else -M[a][b])
                                 for b in range(dim) if M[a][b]}, check=False))
    return imgs


def _extend(obj, imgs, cls):
    dim = obj.dim
    cache = {}

    def basis(I):
        if I not in cache:
            out = imgs[I[0]]
            for i in I[1:]:
                out = _wedge(out, imgs[i], cls, out.degree + 1, dim)
            cache[I] = out
        return cache[I]

    acc = {}
    for I, c in obj.comps.items():
        if not I:
            acc[()] = acc.get((), ZERO) + c
            continue
        for K, y in basis(I).comps.items():
            acc[K] = acc.get(K, ZERO) + c * y
    return cls(obj.degree, dim, acc, check=False)


def phi_omega(omega, V):
    """Lower indices: phi(X) = -i_X omega, extended multiplicatively."""
    if isinstance(V, Expr):
        return V
    if not isinstance(V, MultiVec):
        raise DegreeMismatch("phi_omega acts on multivectors")
    M = bivector_matrix(omega)
    return _drop(_extend(V, _basis_images(M, Form, V.dim, -1), Form))


def phi_W(W, u):
    """Raise indices: phi(u)^b = sum_a u_a W^{ab}, extended multiplicatively."""
    if isinstance(u, Expr):
        return u
    if not isinstance(u, Form):
        raise DegreeMismatch("phi_W acts on forms")
    M = bivector_matrix(W)
    return _drop(_extend(u, _basis_images(M, MultiVec, u.dim, 1), MultiVec))


def musical(model, obj, direction):
    """Index lowering ('lower', via omega) or raising ('raise', via W)."""
    if direction == "lower":
        return phi_omega(model.omega, obj)
    if direction == "raise":
        return phi_W(model.W, obj)
    raise ValueError("direction must be 'lower' or 'raise'")


def check_pair(W, omega):
    """Raise InconsistentPair unless phi_omega o phi_W is the identity on 1-forms."""
    dim = W.dim
    for a in range(dim):
        u = Form(1, dim, {(a,): Expr.const(1)})
        back = phi_omega(omega, phi_W(W, u))
        if back != u:
            raise InconsistentPair("phi_omega(phi_W(dz%d)) = %s" % (a + 1, back.to_string()))


def apply_bivector(P, u, slot="first"):
    """Contract a bivector with a 1-form in its first or last slot."""
    M = bivector_matrix(P)
    dim = P.dim
    uc = components(u)
    out = {}
    for b in range(dim):
        acc = ZERO
        for a in range(dim):
            if uc[a]:
                m = M[a][b] if slot == "first" else M[b][a]
                if m:
                    acc = acc + uc[a] * m
        if acc:
            out[(b,)] = acc
    return MultiVec(1, dim, out, check=False)


def poisson_bracket(W, f, g):
    """{f, g} = sum_{a<b} W^{ab} (d_a f d_b g - d_b f d_a g)."""
    out = ZERO
    df = {a: differentiate(f, a) for a in f.coords()}
    dg = {a: differentiate(g, a) for a in g.coords()}
    for (a, b), w in W.comps.items():
        x = ZERO
        if a in df and b in dg:
            x = x + df[a] * dg[b]
        if b in df and a in dg:
            x = x - df[b] * dg[a]
        if x:
            out = out + w * x
    return out


def hamiltonian_vector(W, f):
    """X_f = phi_W(df), so that X_f(g) = {f, g}."""
    return phi_W(W, d(f, W.dim))


def time_derivative(W, h, F):
    """Total derivative dF/dt = dF/dt|explicit + {h, F}, componentwise on tensors."""
    from .expr import differentiate as _diff
    if isinstance(F, Expr):
        return _diff(F, "t") + poisson_bracket(W, h, F)
    return F.map(lambda c: _diff(c, "t") + poisson_bracket(W, h, c))


def constant_symplectic(W):
    """omega = -W^{-1} for a W with rational constant components."""
    import sympy
    n = W.dim
    M = bivector_matrix(W)
    rows = []
    for a in range(n):
        row = []
        for b in range(n):
            if not M[a][b].is_constant():
                raise GeomError("W is not constant; supply omega explicitly")
            row.append(sympy.Rational(str(M[a][b].constant_value())))
        rows.append(row)
    A = sympy.Matrix(rows)
    if A.det() == 0:
        raise InconsistentPair("W is degenerate")
    Om = -A.inv()
    from fractions import Fraction
    comps = {}
    for a in range(n):
        for b in range(a + 1, n):
            v = Om[a, b]
            if v != 0:
                comps[(a, b)] = Expr.const(Fraction(int(v.p), int(v.q)))
    return Form(2, n, comps, check=False)


class Tensor11:
    """Square matrix of Exprs read as a (1,1)-tensor.

    Row a holds the image of the a-th input basis element: for acts='vectors'
    T(d_a) = sum_b M[a][b] d_b, for acts='forms' T(dz_a) = sum_b M[a][b] dz_b.
    As a tensor sum M[a][b] dz_a (x) d_b this is the vector reading; the form
    operator dual to it has the transposed matrix.
    """

    __slots__ = ("M", "acts")

    def __init__(self, M, acts="vectors"):
        if acts not in ("vectors", "forms"):
            raise ValueError("acts must be 'vectors' or 'forms'")
        n = len(M)
        if any(len(r) != n for r in M):
            raise GeomError("Tensor11 needs a square matrix")
        self.M = [[c if isinstance(c, Expr) else Expr.const(c) for c in r] for r in M]
        self.acts = acts

    @property
    def dim(self):
        return len(self.M)

    def __getitem__(self, ab):
        a, b = ab
        return self.M[a][b]

    def dual(self):
        """Same tensor acting on the other variance (transposed matrix)."""
        return Tensor11(transpose(self.M), "forms" if self.acts == "vectors" else "vectors")

    def apply(self, obj):
        n = self.dim
        cls = MultiVec if self.acts == "vectors" else Form
        if not isinstance(obj, cls) or obj.degree != 1:
            raise DegreeMismatch("Tensor11 acting on %s needs a degree-1 %s" % (self.acts, cls.__name__))
        x = components(obj)
        out = {}
        for b in range(n):
            acc = ZERO
            for a in range(n):
                if x[a] and self.M[a][b]:
                    acc = acc + x[a] * self.M[a][b]
            if acc:
                out[(b,)] = acc
        return cls(1, n, out, check=False)

    def nonzero_count(self):
        return sum(1 for r in self.M for c in r if c)

    def __eq__(self, other):
        return isinstance(other, Tensor11) and self.acts == other.acts and self.M == other.M

    def __repr__(self):
        return "Tensor11(%s, %r)" % (self.acts, [[str(c) for c in r] for r in self.M])


def transpose(M):
    return [list(r) for r in zip(*M)]


def matmul(A, B):
    n, m, k = len(A), len(B), len(B[0]) if B else 0
    out = [[ZERO] * k for _ in range(n)]
    for i in range(n):
        Ai = A[i]
        for j in range(m):
            a = Ai[j]
            if not a:
                continue
            Bj = B[j]
            row = out[i]
            for l in range(k):
                if Bj[l]:
                    row[l] = row[l] + a * Bj[l]
    return out


def matsub(A, B):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]


def trace(A):
    out = ZERO
    for i in range(len(A)):
        out = out + A[i][i]
    return out
