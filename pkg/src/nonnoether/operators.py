"""Lax pairs, the bidifferential d-bar and the recursion operator R_E."""

from dataclasses import dataclass

from .expr import Expr, ZERO, differentiate
from . import geom
from .geom import MultiVec, Form, Tensor11, matmul, matsub, transpose


@dataclass
class LaxPair:
    L: Tensor11
    P: Tensor11


@dataclass
class RecursionOperator:
    R_forms: Tensor11
    R_vectors: Tensor11


def _full(obj):
    return geom.bivector_matrix(obj)


def lax_pair(m):
    """Lax pair built from the symmetry generator.

    L is returned as an operator on 1-forms and P as an operator on vectors
    (P[a][b] = d_a X^b for the flow X = W(dh)), each stored with row a the
    image of the a-th basis element.
    """
    dim = m.dim
    Wf = _full(m.W)
    Wp = [[Wf[c][b] for c in range(dim)] for b in range(dim)]  # W_bc = W^{cb}
    om = _full(m.omega)
    E = geom.components(m.E)
    dE = [[differentiate(E[d], c) for c in range(dim)] for d in range(dim)]
    # inner[d][b] = sum_c E_c d_c W_db - W_bc d_c E_d + W_dc d_c E_b
    inner = [[ZERO] * dim for _ in range(dim)]
    for d_ in range(dim):
        for b in range(dim):
            acc = ZERO
            for c in range(dim):
                if E[c] and Wp[d_][b]:
                    dw = differentiate(Wp[d_][b], c)
                    if dw:
                        acc = acc + E[c] * dw
                if Wp[b][c] and dE[d_][c]:
                    acc = acc - Wp[b][c] * dE[d_][c]
                if Wp[d_][c] and dE[b][c]:
                    acc = acc + Wp[d_][c] * dE[b][c]
            inner[d_][b] = acc
    Llit = matmul(om, inner)
    X = geom.components(m.X)
    P = [[differentiate(X[b], a) for b in range(dim)] for a in range(dim)]
    return LaxPair(Tensor11(transpose(Llit), "forms"), Tensor11(P, "vectors"))


def _on_forms(T):
    return T.M if T.acts == "forms" else transpose(T.M)


def lax_residual(m, lp):
    """dL/dt - [L, P] with [L, P] = L o P - P o L as operators on 1-forms.

    Both operators are brought to their action on 1-forms first; with row a
    the image of dz_a, composition A o B has matrix B A.
    """
    L = _on_forms(lp.L)
    P = _on_forms(lp.P)
    dL = [[m.dt(c) for c in row] for row in L]
    comm = matsub(matmul(P, L), matmul(L, P))
    return Tensor11(matsub(dL, comm), "forms")


def dbar(m, u):
    """d-bar u = phi_omega([[E, W], phi_W(u)])."""
    if isinstance(u, Expr):
        v = u
    else:
        if u.degree + 1 > m.dim:
            raise geom.DegreeOverflow("degree overflow")
        v = geom.phi_W(m.W, u)
    r = geom.schouten(m.What, v)
    if isinstance(r, Expr):
        return r
    return geom.phi_omega(m.omega, r)


def d_via_bracket(m, u):
    """du = phi_omega([W, phi_W(u)])."""
    v = u if isinstance(u, Expr) else geom.phi_W(m.W, u)
    r = geom.schouten(m.W, v)
    return r if isinstance(r, Expr) else geom.phi_omega(m.omega, r)


def bicomplex_verify(m, I=()):
    """Residuals of dbar^2 and d dbar + dbar d on coordinates and basis
    1-forms, and of the Lenard chain (k+1) dbar I^(k) - k d I^(k+1)."""
    out = {}
    dim = m.dim
    for a in range(dim):
        za = Expr.coord(a)
        db = dbar(m, za)
        out["dbar2 z%d" % (a + 1)] = dbar(m, db)
        out["d dbar + dbar d z%d" % (a + 1)] = geom.exterior_derivative(db) + dbar(m, m.d(za))
        dza = Form(1, dim, {(a,): 1})
        dbu = dbar(m, dza)
        out["dbar2 dz%d" % (a + 1)] = dbar(m, dbu)
        out["d dbar + dbar d dz%d" % (a + 1)] = (
            geom.exterior_derivative(dbu) + dbar(m, geom.exterior_derivative(dza)))
    for k in range(1, len(I)):
        out["lenard %d" % k] = dbar(m, I[k - 1]) * (k + 1) - m.d(I[k]) * k
    return out


def fn_operator(m):
    """R_E(X) = phi_W(L_E phi_omega X) - [E, X] and its dual on 1-forms.

    The dual is computed as R-bar(u) = L_E u - phi_omega([E, phi_W u]).  The
    opposite overall sign is what the same construction gives when written
    with phi_omega on the outside, but only this sign makes R-bar the
    transpose of R_E (i_{R X} u = i_X R-bar u).
    """
    dim = m.dim
    rv = []
    rf = []
    for a in range(dim):
        da = MultiVec(1, dim, {(a,): 1})
        img = geom.phi_W(m.W, geom.lie_derivative(m.E, geom.phi_omega(m.omega, da))) - geom.schouten(m.E, da)
        rv.append(geom.components(img))
        dza = Form(1, dim, {(a,): 1})
        img = geom.lie_derivative(m.E, dza) - geom.phi_omega(m.omega, geom.schouten(m.E, geom.phi_W(m.W, dza)))
        rf.append(geom.components(img))
    return RecursionOperator(Tensor11(rf, "forms"), Tensor11(rv, "vectors"))


def duality_residual(R):
    """R_forms - transpose(R_vectors); zero iff the two are dual."""
    return matsub(R.R_forms.M, transpose(R.R_vectors.M))


def fn_invariance(m, R):
    """(d/dt|explicit + L_X) R on basis vectors, X = W(dh)."""
    dim = m.dim
    X = m.X
    out = []
    for a in range(dim):
        da = MultiVec(1, dim, {(a,): 1})
        Ra = R.R_vectors.apply(da)
        dRa = Ra.map(lambda c: differentiate(c, "t"))
        term = dRa + geom.schouten(X, Ra)
        XA = geom.schouten(X, da)
        if not isinstance(XA, Expr) and not XA.is_zero():
            term = term - R.R_vectors.apply(XA)
        out.append(term)
    return out


def torsion(Rv, X, Y):
    """[RX, RY] - R([RX, Y] + [X, RY] - R[X, Y]) for vectors X, Y."""
    RX, RY = Rv.apply(X), Rv.apply(Y)
    br = geom.schouten
    XY = br(X, Y)
    inner = br(RX, Y) + br(X, RY)
    if not XY.is_zero():
        inner = inner - Rv.apply(XY)
    return br(RX, RY) - Rv.apply(inner)


def fn_torsion(m, R):
    """T(R)(d_a, d_b) for all a < b."""
    dim = m.dim
    Rv = R.R_vectors if isinstance(R, RecursionOperator) else R
    basis = [MultiVec(1, dim, {(a,): 1}) for a in range(dim)]
    out = {}
    for a in range(dim):
        for b in range(a + 1, dim):
            out[(a, b)] = torsion(Rv, basis[a], basis[b])
    return out


def recursion_check(m, R, I):
    """(k+1) R-bar(dI^(k)) - k dI^(k+1) for consecutive pairs."""
    Rf = R.R_forms
    out = []
    for k in range(1, len(I)):
        out.append(Rf.apply(m.d(I[k - 1])) * (k + 1) - m.d(I[k]) * k)
    return out


def aux_forms(m, R):
    """omega, omega. and omega.. with i_X omega. = i_{R X} omega."""
    dim = m.dim

    def push(alpha):
        A = geom.bivector_matrix(alpha)
        B = matmul(R.R_vectors.M, A)
        comps = {}
        for a in range(dim):
            for b in range(a + 1, dim):
                if B[a][b] != -B[b][a]:
                    raise ValueError("R is not compatible with the 2-form")
                if B[a][b]:
                    comps[(a, b)] = B[a][b]
        return Form(2, dim, comps, check=False)

    w1 = push(m.omega)
    return [m.omega, w1, push(w1)]
