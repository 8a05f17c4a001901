"""Acceptance criteria, one PASS/FAIL line each.

Run under pytest (the lines are repeated in the terminal summary) or
directly with `python tests/test_acceptance.py`.
"""

import time
from math import comb

import numpy as np
import pytest

from nonnoether import conslaws, geom, kernels, numverify, operators, symmetry
from nonnoether.expr import Expr, evaluate, parse
from nonnoether.fixtures import _parse_like, compute, diff, run_suite
from nonnoether.geom import Tensor11
from nonnoether.models import FIXTURE_MAP, build_toda, general_J

LINES = []

_models = {}


def toda(n):
    if n not in _models:
        _models[n] = build_toda(n)
    return _models[n]


def record(k, ok, detail):
    line = "%s criterion %d: %s" % ("PASS" if ok else "FAIL", k, detail)
    LINES.append(line)
    print(line)
    return ok


def _all_zero(xs):
    out = []
    for x in xs:
        if isinstance(x, list):
            out.append(all(not c for row in x for c in row) if x and isinstance(x[0], list)
                       else all(c.is_zero() for c in x))
        else:
            out.append(x.is_zero())
    return all(out)


# 1. reference tables, exact

TABLES = ["toda2-What", "toda2-Y", "toda3-Y", "toda2-L", "toda2-P", "toda3-L", "toda3-P",
          "toda2-dbar", "toda3-dbar", "toda2-R_E", "toda3-R_E"]


def criterion_1():
    t0 = time.perf_counter()
    res, _ = run_suite()
    cache = {}
    printed_bad, corrected_bad = [], []
    for key in TABLES:
        fx = FIXTURE_MAP[key]
        m = toda(int(fx.model[4:]))
        actual = compute(m, fx.what, cache)
        if diff(actual, _parse_like(fx.printed, fx.what, m.dim)):
            printed_bad.append(key)
        if diff(actual, _parse_like(fx.expected, fx.what, m.dim)):
            corrected_bad.append(key)
    counts = [r.nonzero for r in res if r.key in ("toda2-L", "toda3-L")]
    secs = time.perf_counter() - t0
    ok = not printed_bad and not corrected_bad and counts == [8, 16] and secs < 10
    detail = ("%d/%d tables equal the printed values, %d/%d equal after erratum correction "
              "(printed differs: %s); nonzero L entries %s; %.2f s"
              % (len(TABLES) - len(printed_bad), len(TABLES), len(TABLES) - len(corrected_bad),
                 len(TABLES), ", ".join(printed_bad) or "none", counts, secs))
    return ok, detail, corrected_bad, counts, secs


# 2. structural identities, exact

def _identities(m):
    out = {}
    sym = symmetry.check_symmetry(m)
    out["symmetry"] = sym.is_symmetry
    out["yang-baxter"] = sym.yang_baxter
    bi = symmetry.check_bihamiltonian(m)
    out["bi-hamiltonian"] = all(bi[k].is_zero() for k in ("W_W", "What_W", "What_What"))
    I = conslaws.c_and_i_laws(m, m.n + 1)[1]
    bc = operators.bicomplex_verify(m, I)
    out["bicomplex"] = all(v.is_zero() for k, v in bc.items() if not k.startswith("lenard"))
    out["lenard"] = all(v.is_zero() for k, v in bc.items() if k.startswith("lenard"))
    R = operators.fn_operator(m)
    out["torsion"] = all(v.is_zero() for v in operators.fn_torsion(m, R).values())
    out["lax"] = _all_zero([operators.lax_residual(m, operators.lax_pair(m)).M])
    out["recursion"] = all(v.is_zero() for v in operators.recursion_check(m, R, I))
    return out


def criterion_2():
    t0 = time.perf_counter()
    bad = []
    for n in (2, 3):
        for k, ok in _identities(toda(n)).items():
            if not ok:
                bad.append("toda%d %s" % (n, k))
    secs = time.perf_counter() - t0
    ok = not bad and secs < 60
    return ok, "symmetry, Yang-Baxter, bi-Hamiltonian, bicomplex, torsion, Lax, Lenard, recursion " \
               "on toda2/toda3: %s; %.2f s" % ("all zero" if not bad else "nonzero " + ", ".join(bad), secs)


# 3. cross-family identities

def _half_traces(L, kmax):
    out, Lk = [], L
    for _ in range(kmax):
        out.append(np.trace(Lk) / 2)
        Lk = Lk @ L
    return out


def criterion_3():
    bad = []
    worst_trace = worst_roots = 0.0
    for n in (2, 3, 4, 5):
        m = toda(n)
        Y = conslaws.y_laws(m)
        C, I = conslaws.c_and_i_laws(m, n)
        if any(C[k] != Y[k] * comb(n, k + 1) for k in range(n)):
            bad.append("C toda%d" % n)
        L = operators.lax_pair(m).L.M
        pts = numverify.random_points(m.dim, 100, seed=42)
        if n <= 3:
            Lk = L
            for k in range(n):
                tr = sum((Lk[a][a] for a in range(m.dim)), Expr.const(0))
                if tr != I[k] * 2:
                    bad.append("trace toda%d k=%d" % (n, k + 1))
                Lk = geom.matmul(Lk, L)
        else:
            tab = kernels.TermTable([c for row in L for c in row], m.dim)
            itab = kernels.TermTable(I, m.dim)
            for p in pts:
                ht = _half_traces(tab(p).reshape(m.dim, m.dim), n)
                iv = itab(p)
                worst_trace = max(worst_trace, float(np.max(np.abs(ht - iv) / np.maximum(np.abs(iv), 1e-300))))
        ytab = kernels.TermTable(Y, m.dim)
        for p in pts:
            yr = np.array(conslaws.y_from_roots(conslaws.secular_roots(m, p).values))
            yv = ytab(p)
            worst_roots = max(worst_roots, float(np.max(np.abs(yr - yv) / np.maximum(np.abs(yv), 1e-300))))
    ok = not bad and worst_trace < 1e-8 and worst_roots < 1e-8
    return ok, ("C = binom*Y exact n=2..5, half traces exact n=2,3%s; numeric half-trace rel err %.1e "
                "(n=4,5), root rel err %.1e (n=2..5)"
                % ("" if not bad else " [mismatch: %s]" % ", ".join(bad), worst_trace, worst_roots))


# 4. orbit constants and members

def criterion_4():
    bad = []
    worst = 0.0
    for n in (2, 3, 4, 5):
        m = toda(n)
        J = parse(general_J(n)[0])
        r = symmetry.orbit_family(m, J, depth=3, brackets=n <= 3)
        if r.c0 != 3 or r.c1 != -1:
            bad.append("toda%d c0=%s c1=%s" % (n, r.c0, r.c1))
        if n <= 3:
            if r.family[1:3] != [parse(s) for s in general_J(n)[1:]]:
                bad.append("toda%d members" % n)
            if not all(v.is_zero() for v in r.brackets.values()):
                bad.append("toda%d brackets" % n)
        else:
            br = numverify.numeric_brackets(m, r.family, numverify.random_points(m.dim, 100, seed=42))
            worst = max(worst, max(br.values()))
    ok = not bad and worst < 1e-8
    return ok, "c0 = 3 and c1 = -1 for n=2..5; members and brackets exact n<=3%s; numeric brackets %.1e (n=4,5)" % (
        "" if not bad else " [%s]" % ", ".join(bad), worst)


# 5. Hojman

def criterion_5():
    m = toda(3)
    got = symmetry.hojman_invariant(m.X, m.E, m.volume, depth=1)
    want = [parse("z1+z2+z3"), parse("1/2*(z1^2+z2^2+z3^2) + exp(z4-z5) + exp(z5-z6)")]
    ok = got == want
    return ok, "toda3 J = %s, J^(1) = %s" % (got[0], got[1])


# 6. RK4 on toda2/toda3

def criterion_6():
    t0 = time.perf_counter()
    worst_drift = worst_eig = 0.0
    orders = []
    for n in (2, 3):
        m = toda(n)
        cs = conslaws.conserved_set(m)
        mons = dict(cs.all_laws())
        mons["h"] = m.h
        start = numverify.random_points(m.dim, 1, seed=42, lo=-0.5, hi=0.5)[0]
        tr = numverify.integrate_hamiltonian(m, start, 10.0, 1e-3, mons)
        worst_drift = max(worst_drift, max(numverify.drift_table(tr).values()))
        worst_eig = max(worst_eig, numverify.isospectral_check(m, operators.lax_pair(m), tr, stride=10))
        orders.append(numverify.convergence_order(m, start, 10.0, [0.1, 0.05, 0.025, 0.0125])[1])
    secs = time.perf_counter() - t0
    ok = worst_drift < 1e-8 and worst_eig < 1e-6 and all(3.7 <= o <= 4.3 for o in orders) and secs < 30
    return ok, "max drift %.1e, eigenvalue drift %.1e, order %s; %.2f s (%s backend)" % (
        worst_drift, worst_eig, ", ".join("%.2f" % o for o in orders), secs, kernels.BACKEND)


# 7. KdV soliton

def criterion_7():
    t0 = time.perf_counter()
    runs, errs, orders = numverify.refinement_study(kappa=0.5, length=80.0, grids=(512, 1024), T=5.0)
    r = runs[-1]
    secs = time.perf_counter() - t0
    d = r.drifts
    ok = (d[0] < 1e-7 and d[1] < 1e-6 and d[2] < 1e-4 and r.shape_error < 1e-3
          and 3.7 <= orders[0] <= 4.3 and secs < 120)
    return ok, "N=1024 drifts %.1e, %.1e, %.1e; shape error %.1e; order %.2f (512->1024); %.1f s" % (
        d[0], d[1], d[2], r.shape_error, orders[0], secs)


# 8. negative controls

def criterion_8():
    parts = []
    ok = True
    for n in (2, 3):
        m = toda(n)
        comps = geom.components(m.E)
        comps[0] = comps[0] + parse("z1^2")
        rep = symmetry.check_symmetry(m.with_E(geom.vector(comps)))
        flipped = not rep.is_symmetry or not rep.yang_baxter
        nonzero = not rep.residuals["symmetry"].is_zero() or not rep.residuals["yang_baxter"].is_zero()
        lp = operators.lax_pair(m)
        M = [row[:] for row in lp.L.M]
        M[0][1] = M[0][1] + parse("z1")
        res = operators.lax_residual(m, operators.LaxPair(Tensor11(M, "forms"), lp.P)).M
        lax_bad = any(c for row in res for c in row)
        ok = ok and flipped and nonzero and lax_bad
        parts.append("toda%d: is_symmetry=%s yang_baxter=%s, perturbed L residual %s"
                     % (n, rep.is_symmetry, rep.yang_baxter, "nonzero" if lax_bad else "zero"))
    return ok, "; ".join(parts)


def test_criterion_1_printed_tables():
    ok, detail, _, _, _ = criterion_1()
    record(1, ok, detail)
    assert ok, detail


def test_criterion_1_corrected_tables():
    _, _, corrected_bad, counts, secs = criterion_1()
    assert not corrected_bad and counts == [8, 16] and secs < 10


@pytest.mark.parametrize("k", [2, 3, 4, 5, 6, 7, 8])
def test_criterion(k):
    ok, detail = globals()["criterion_%d" % k]()
    record(k, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    results = [record(1, *criterion_1()[:2])]
    for k in range(2, 9):
        results.append(record(k, *globals()["criterion_%d" % k]()))
    raise SystemExit(0 if all(results) else 1)
