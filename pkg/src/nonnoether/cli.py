"""Command-line front end.

Every subcommand builds a Report: a list of named pass/fail checks plus
data tables.  Human output goes to stdout; --json prints the report as
JSON (or writes it to the given path).  Exit codes: 0 all checks pass,
1 some check failed, 2 bad input.
"""

import argparse
import json
import sys
import time
from fractions import Fraction
from math import comb

import numpy as np

from . import __version__, conslaws, fixtures, geom, modelfile, models, numverify, operators, symmetry
from .expr import Expr, ExprError, parse, to_string
from .geom import Form, MultiVec

SCHEMA = "nonnoether/1"
EXACT_MAX_N = 3


class UsageError(ValueError):
    pass


def _ser(obj, names=None):
    """JSON-ready form: expressions become normal-form strings."""
    if isinstance(obj, Expr):
        return to_string(obj, names)
    if isinstance(obj, (MultiVec, Form)):
        return obj.to_string(names)
    if isinstance(obj, geom.Tensor11):
        return _ser(obj.M, names)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return _ser(obj.tolist(), names)
    if isinstance(obj, dict):
        return {str(k): _ser(v, names) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_ser(v, names) for v in obj]
    return obj


def _is_zero(x):
    if isinstance(x, (Expr, MultiVec, Form)):
        return x.is_zero()
    if isinstance(x, geom.Tensor11):
        return all(c.is_zero() for row in x.M for c in row)
    if isinstance(x, dict):
        return all(_is_zero(v) for v in x.values())
    if isinstance(x, (list, tuple)):
        return all(_is_zero(v) for v in x)
    raise TypeError(type(x))


def _nonzero(x):
    """Only the nonzero entries of a residual collection."""
    if isinstance(x, dict):
        return {k: v for k, v in x.items() if not _is_zero(v)}
    if isinstance(x, (list, tuple)):
        return {k: v for k, v in enumerate(x) if not _is_zero(v)}
    return x


class Report:
    def __init__(self, command, options, model=None, seed=None):
        self.command = command
        self.options = options
        self.model = model
        self.seed = seed
        self.names = None
        self.checks = []
        self.data = {}
        self.notes = []

    def check(self, name, ok, residual=None, **info):
        entry = {"name": name, "status": "pass" if ok else "fail"}
        if residual is not None:
            entry["residual"] = _ser(residual, self.names)
        for k, v in info.items():
            entry[k] = _ser(v, self.names)
        self.checks.append(entry)
        return ok

    def symbolic(self, name, residual):
        """Pass iff the residual (or every entry of it) is identically zero."""
        ok = _is_zero(residual)
        return self.check(name, ok, None if ok else _nonzero(residual))

    def numeric(self, name, value, tol, **info):
        return self.check(name, bool(value <= tol), None, value=value, tol=tol, **info)

    @property
    def ok(self):
        return all(c["status"] == "pass" for c in self.checks)

    def to_dict(self):
        return {
            "schema": SCHEMA,
            "tool": "nonnoether",
            "version": __version__,
            "command": {"subcommand": self.command, "options": self.options},
            "model": self.model,
            "seed": self.seed,
            "status": "pass" if self.ok else "fail",
            "checks": self.checks,
            "data": _ser(self.data, self.names),
            "notes": self.notes,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=True) + "\n"

    def to_text(self):
        out = ["nonnoether %s  %s  model=%s" % (__version__, self.command, self.model)]
        data = _ser(self.data, self.names)
        for key, val in data.items():
            lines = _text_lines(val)
            if len(lines) == 1 and not isinstance(val, (dict, list)):
                out.append("%s = %s" % (key, lines[0]))
            else:
                out.append("%s:" % key)
                out.extend("  " + line for line in lines)
        for c in self.checks:
            extra = ""
            if "tol" in c:
                extra = "  (%s, tol %s)" % (_fmt_num(c["value"]), _fmt_num(c["tol"]))
            elif "value" in c:
                extra = "  (%s)" % _fmt_num(c["value"])
            out.append("[%s] %s%s" % (c["status"].upper(), c["name"], extra))
            if c["status"] == "fail" and "residual" in c:
                out.extend("    " + line for line in _text_lines(c["residual"]))
        for n in self.notes:
            out.append("note: " + n)
        out.append("status: %s" % ("pass" if self.ok else "fail"))
        return "\n".join(out) + "\n"


def _fmt_num(v):
    if isinstance(v, float):
        return "%.3e" % v
    return str(v)


def _text_lines(val):
    if isinstance(val, dict):
        lines = []
        for k, v in val.items():
            sub = _text_lines(v)
            if len(sub) == 1:
                lines.append("%s = %s" % (k, sub[0]))
            else:
                lines.append("%s:" % k)
                lines.extend("  " + s for s in sub)
        return lines or ["{}"]
    if isinstance(val, list):
        if all(not isinstance(v, (list, dict)) for v in val):
            if len(val) <= 8 and all(isinstance(v, (int, float)) for v in val):
                return ["[" + ", ".join(_fmt_num(v) for v in val) + "]"]
            return ["[%d] %s" % (k + 1, _fmt_num(v)) for k, v in enumerate(val)] or ["[]"]
        lines = []
        for k, v in enumerate(val):
            sub = _text_lines(v)
            if isinstance(v, list) and all(not isinstance(x, (list, dict)) for x in v):
                lines.append("row %d: %s" % (k + 1, " | ".join(_fmt_num(x) for x in v)))
            else:
                lines.append("[%d]" % (k + 1))
                lines.extend("  " + s for s in sub)
        return lines
    return [_fmt_num(val)]


# model resolution

def _resolve(args):
    if bool(args.model) == bool(args.file):
        raise UsageError("model: give exactly one of --model or --file")
    if args.file:
        return modelfile.load(args.file)
    name = args.model
    if name in ("kdv", "mkdv"):
        raise UsageError("model: %r is a PDE model; use the pde subcommand" % name)
    try:
        return models.builtin(name)
    except ValueError as exc:
        raise UsageError("model: %s" % exc) from None


def _load(args, rep):
    m = _resolve(args)
    rep.names = m.coords
    rep.model = m.name
    return m


def _toda_n(m):
    """n when the model is a built-in Toda chain, else None."""
    name = m.name
    if name.startswith("toda:"):
        name = "toda" + name[5:]
    if name.startswith("toda") and name[4:].isdigit():
        return int(name[4:])
    return None


def _sample(m, args):
    """(point, t) pairs from the seeded generator, z in [-1,1], t in [0,1]."""
    g = numverify.Lcg(args.seed)
    out = []
    for _ in range(args.points):
        z = [g.uniform(-1.0, 1.0) for _ in range(m.dim)]
        out.append((z, g.uniform(0.0, 1.0)))
    return out


def _rel_err(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b)))) if a.size else 0.0


def _numeric_match(m, lhs, rhs, pts):
    """Max relative mismatch (floor 1) of two Expr lists over sample points."""
    tl = numverify.kernels.TermTable(lhs, m.dim)
    tr = numverify.kernels.TermTable(rhs, m.dim)
    return max((_rel_err(tl(p, t), tr(p, t)) for p, t in pts), default=0.0)


def _brackets(rep, m, laws, label, args, pts=None):
    if m.n <= EXACT_MAX_N:
        rep.symbolic("%s involutive" % label, conslaws.involutivity(m, laws))
    else:
        pts = pts or _sample(m, args)
        worst = 0.0
        for p, t in pts:
            vals = numverify.numeric_brackets(m, laws, [p], t)
            worst = max([worst] + list(vals.values()))
        rep.numeric("%s involutive (numeric, %d points)" % (label, len(pts)), worst, args.tol)


def _half_traces(m, lp, kmax, pts):
    """1/2 Tr L^k at sample points, evaluated numerically."""
    tab = numverify.lax_table(lp, m.dim)
    out = []
    for p, t in pts:
        A = tab(p, t).reshape(m.dim, m.dim)
        row, P = [], np.eye(m.dim)
        for _ in range(kmax):
            P = P @ A
            row.append(0.5 * np.trace(P))
        out.append(row)
    return np.array(out)


def _trace_identity(rep, m, lp, I, args):
    if m.n <= EXACT_MAX_N:
        M = lp.L.M
        P = M
        res = []
        for k in range(1, len(I) + 1):
            if k > 1:
                P = geom.matmul(P, M)
            res.append(geom.trace(P) * Fraction(1, 2) - I[k - 1])
        rep.symbolic("I^(k) = 1/2 Tr L^k", res)
    else:
        pts = _sample(m, args)
        tr = _half_traces(m, lp, len(I), pts)
        tab = numverify.kernels.TermTable(I, m.dim)
        ref = np.array([tab(p, t) for p, t in pts])
        rep.numeric("I^(k) = 1/2 Tr L^k (numeric, %d points)" % len(pts), _rel_err(tr, ref), args.tol)


# subcommands

def cmd_symcheck(args, rep):
    m = _load(args, rep)
    r = symmetry.check_symmetry(m)
    rep.data["is_symmetry"] = r.is_symmetry
    rep.data["is_noether"] = r.is_noether
    rep.data["yang_baxter"] = r.yang_baxter
    rep.data["What"] = m.What
    rep.symbolic("symmetry dE/dt - [E, W(dh)] = 0", r.residuals["symmetry"])
    rep.symbolic("Yang-Baxter [[E,[E,W]],W] = 0", r.residuals["yang_baxter"])
    bh = symmetry.check_bihamiltonian(m)
    rep.symbolic("[W, W] = 0", bh["W_W"])
    rep.symbolic("[What, W] = 0", bh["What_W"])
    rep.symbolic("[What, What] = 0", bh["What_What"])
    rep.check("W^n != 0", not bh["W_power"].is_zero())


def cmd_conslaws(args, rep):
    m = _load(args, rep)
    fam = args.family
    Y = conslaws.y_laws(m)
    if fam == "Y":
        laws = Y
    elif fam == "C":
        laws = conslaws.c_laws(m)
        rep.symbolic("C^(k) = binom(n,k) Y^(k)",
                     [c - y * comb(m.n, k + 1) for k, (c, y) in enumerate(zip(laws, Y))])
    elif fam == "I":
        laws = conslaws.c_and_i_laws(m)[1]
        _trace_identity(rep, m, operators.lax_pair(m), laws, args)
    else:
        pts = _sample(m, args)
        worst, ncomplex, first = 0.0, 0, None
        tab = numverify.kernels.TermTable(Y, m.dim)
        for p, t in pts:
            r = conslaws.secular_roots(m, p, t)
            if r.complex_roots:
                ncomplex += 1
                e = conslaws.elementary_symmetric(r.values)
                yr = [(e[k] / comb(m.n, k + 1)).real for k in range(m.n)]
            else:
                yr = conslaws.y_from_roots(r.values)
            if first is None:
                first = {"point": p, "t": t, "roots": r.values}
            worst = max(worst, _rel_err(yr, tab(p, t)))
        rep.data["roots at first sample"] = first
        rep.data["complex samples"] = ncomplex
        rep.numeric("e_k(c)/binom(n,k) = Y^(k) (%d points)" % len(pts), worst, args.tol)
        return
    rep.data[fam] = {"%s%d" % (fam, k + 1): f for k, f in enumerate(laws)}
    rep.symbolic("conserved d%s/dt = 0" % fam, conslaws.conservation_residuals(m, laws))
    _brackets(rep, m, laws, fam, args)


def cmd_lax(args, rep):
    m = _load(args, rep)
    lp = operators.lax_pair(m)
    rep.data["L (row a = image of dz_a)"] = lp.L.M
    rep.data["P (row a = image of d/dz_a)"] = lp.P.M
    rep.data["nonzero entries"] = {"L": lp.L.nonzero_count(), "P": lp.P.nonzero_count()}
    rep.symbolic("dL/dt = [L, P]", operators.lax_residual(m, lp))
    _trace_identity(rep, m, lp, conslaws.c_and_i_laws(m)[1], args)


def cmd_bidiff(args, rep):
    m = _load(args, rep)
    rep.data["dbar z_a"] = {m.coords[a]: operators.dbar(m, Expr.coord(a)) for a in range(m.dim)}
    I = conslaws.c_and_i_laws(m)[1]
    res = operators.bicomplex_verify(m, I)
    rep.symbolic("dbar^2 = 0", {k: v for k, v in res.items() if k.startswith("dbar2")})
    rep.symbolic("d dbar + dbar d = 0", {k: v for k, v in res.items() if k.startswith("d dbar")})
    rep.symbolic("Lenard (k+1) dbar I^(k) = k d I^(k+1)",
                 {k: v for k, v in res.items() if k.startswith("lenard")})


def cmd_fnop(args, rep):
    m = _load(args, rep)
    R = operators.fn_operator(m)
    rep.data["R_E (row a = image of d/dz_a)"] = R.R_vectors.M
    I = conslaws.c_and_i_laws(m)[1]
    rep.symbolic("R-bar is dual to R_E", operators.duality_residual(R))
    rep.symbolic("Frolicher-Nijenhuis torsion = 0",
                 {"(%d,%d)" % (a + 1, b + 1): v for (a, b), v in operators.fn_torsion(m, R).items()})
    rep.symbolic("(k+1) R-bar dI^(k) = k dI^(k+1)", operators.recursion_check(m, R, I))
    rep.symbolic("R_E invariant along the flow", operators.fn_invariance(m, R))


def cmd_orbit(args, rep):
    m = _load(args, rep)
    if m.s is None:
        m.s = geom.phi_omega(m.omega, m.E)
    if args.J:
        try:
            J = parse(args.J, m.coords)
        except ExprError as exc:
            raise UsageError("J: %s" % exc) from None
    else:
        J = conslaws.c_and_i_laws(m, 1)[1][0]
    try:
        res = symmetry.orbit_family(m, J, depth=3, brackets=m.n <= EXACT_MAX_N)
    except symmetry.SeedMismatch as exc:
        rep.check("seed W(s) = E", False, detail=str(exc))
        return
    rep.check("seed W(s) = E", True)
    rep.data["c0"] = res.c0
    rep.data["c1"] = res.c1
    rep.data["family"] = {"J%d" % k: f for k, f in enumerate(res.family)}
    rep.check("c0 extracted", res.c0 is not None, None if res.c0 is not None else res.lhs0)
    rep.check("c1 extracted", res.c1 is not None, None if res.c1 is not None else res.lhs1)
    n = _toda_n(m)
    if n is not None:
        rep.check("c0 = 3", res.c0 == 3, value=res.c0)
        rep.check("c1 = -1", res.c1 == -1, value=res.c1)
        ref = [parse(s) for s in models.general_J(n)]
        rep.symbolic("J^(k) match the closed forms (k <= 2)",
                     [a - b for a, b in zip(res.family[:3], ref)])
    if m.n <= EXACT_MAX_N:
        rep.symbolic("brackets of J^(0..3) vanish", res.brackets)
    else:
        pts = _sample(m, args)
        worst = max((max(numverify.numeric_brackets(m, res.family, [p], t).values()) for p, t in pts),
                    default=0.0)
        rep.numeric("brackets of J^(0..3) vanish (numeric, %d points)" % len(pts), worst, args.tol)


def cmd_hojman(args, rep):
    m = _load(args, rep)
    if m.volume is None:
        raise UsageError("volume: the model has no volume form")
    try:
        J = symmetry.hojman_invariant(m.X, m.E, m.volume, depth=args.depth)
    except (symmetry.NotLiouville, symmetry.NotASymmetry) as exc:
        rep.check("Hojman invariants conserved", False, detail="%s: %s" % (type(exc).__name__, exc))
        return
    rep.data["J"] = {"J%d" % k: j for k, j in enumerate(J)}
    rep.check("Hojman invariants conserved", True)


def cmd_numverify(args, rep):
    m = _load(args, rep)
    T = 10.0 if args.T is None else args.T
    dt = 1e-3 if args.dt is None else args.dt
    if args.start:
        try:
            start = [float(x) for x in args.start.split(",")]
        except ValueError:
            raise UsageError("start: expected comma-separated numbers") from None
        if len(start) != m.dim:
            raise UsageError("start: expected %d numbers" % m.dim)
    else:
        start = numverify.random_points(m.dim, 1, args.seed)[0]
    Y = conslaws.y_laws(m)
    mons = {"h": m.h}
    mons.update({"Y%d" % (k + 1): y for k, y in enumerate(Y)})
    tr = numverify.integrate_hamiltonian(m, start, T, dt, mons)
    drifts = numverify.drift_table(tr)
    rep.data["start"] = start
    rep.data["T"] = T
    rep.data["dt"] = dt
    rep.data["relative drift"] = drifts
    rep.numeric("conserved drift", max(drifts.values()), args.tol)
    lp = operators.lax_pair(m)
    eig = numverify.isospectral_check(m, lp, tr, stride=args.stride)
    rep.data["eigenvalues at t=0"] = tr.eigenvalues[0]
    rep.numeric("Lax eigenvalue drift", eig, args.eig_tol)
    ladder = [0.1, 0.05, 0.025, 0.0125]
    errs, order = numverify.convergence_order(m, start, T, ladder)
    rep.data["convergence"] = {"dt": ladder, "endpoint error": errs, "order": order}
    rep.check("RK4 order in [3.7, 4.3]", 3.7 <= order <= 4.3, value=order)
    pts = [(p, 0.0) for p in numverify.random_points(m.dim, args.points, args.seed)]
    worst = max(numverify.numeric_brackets(m, Y, [p for p, _ in pts]).values(), default=0.0)
    rep.numeric("Y laws involutive (numeric, %d points)" % len(pts), worst, args.tol)


PDE_TOLS = {"kdv": [1e-7, 1e-6, 1e-4], "mkdv": [1e-6, 1e-6]}


def cmd_pde(args, rep):
    eq = args.model
    if args.file or eq not in ("kdv", "mkdv"):
        raise UsageError("model: the pde subcommand needs --model kdv or --model mkdv")
    rep.model = eq
    T = 5.0 if args.T is None else args.T
    N = args.grid
    spec = models.PdeSpec(eq, args.length, N, [])
    try:
        models.PdeModel(spec)
        if args.refine and eq == "kdv":
            models.PdeModel(models.PdeSpec(eq, args.length, N // 2, []))
    except models.BadGrid as exc:
        raise UsageError("grid: %s" % exc) from None
    if eq == "kdv":
        x0 = args.length / 2.0
        exact = lambda x, t: models.kdv_soliton(x, t, args.kappa, x0)
        r = numverify.pde_run(spec, lambda x: exact(x, 0.0), T, dt=args.dt, exact=exact)
    else:
        r = numverify.pde_run(spec, numverify.mkdv_profile(length=args.length), T, dt=args.dt)
    rep.data["grid"] = {"N": N, "dx": r.dx, "dt": r.dt, "steps": r.nsteps, "T": T,
                        "dt rule": "0.2*dx^3" if args.dt is None else "user"}
    rep.data["densities at t=0"] = r.densities[0]
    rep.data["relative drift"] = r.drifts
    for k, tol in enumerate(PDE_TOLS[eq]):
        rep.numeric("I^(%d) drift" % (k + 1), r.drifts[k], tol)
    if eq == "kdv":
        rep.numeric("L2 shape error", r.shape_error, 1e-3)
        if args.refine:
            coarse = numverify.pde_run(models.PdeSpec(eq, args.length, N // 2, []),
                                       lambda x: exact(x, 0.0), T, exact=exact)
            order = float(np.log2(coarse.shape_error / r.shape_error))
            rep.data["refinement"] = {"N": [N // 2, N], "shape error": [coarse.shape_error, r.shape_error],
                                      "order": order}
            rep.check("shape error order in [3.7, 4.3]", 3.7 <= order <= 4.3, value=order)


def cmd_fixtures(args, rep):
    res, _ = fixtures.run_suite()
    table = {}
    for r in res:
        row = {"model": r.model, "quantity": r.what,
               "printed": "matches" if r.printed_ok else "differs"}
        if r.nonzero is not None:
            row["nonzero entries"] = r.nonzero
        if r.erratum:
            row["note"] = r.note
        table[r.key] = row
        rep.check("fixture %s" % r.key, r.ok, None, mismatches=[str(k) for k in r.mismatches])
    rep.data["fixtures"] = table
    rep.notes.append("entries marked 'differs' are misprints; checks compare against the corrected values")


COMMANDS = {
    "symcheck": (cmd_symcheck, "verify the symmetry, Yang-Baxter and bi-Hamiltonian identities"),
    "conslaws": (cmd_conslaws, "conservation-law families Y, C, I or secular roots"),
    "lax": (cmd_lax, "Lax pair and the Lax equation"),
    "bidiff": (cmd_bidiff, "bidifferential d-bar and the Lenard chain"),
    "fnop": (cmd_fnop, "recursion operator R_E and its torsion"),
    "orbit": (cmd_orbit, "orbit constants c0, c1 and the family of J"),
    "hojman": (cmd_hojman, "Hojman invariants from the volume form"),
    "numverify": (cmd_numverify, "RK4 trajectory drift, Lax spectrum and convergence order"),
    "pde": (cmd_pde, "KdV/mKdV density drift runs"),
    "export-model": (None, "write a model as a JSON model file"),
    "fixtures": (cmd_fixtures, "run the reference fixture suite"),
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="built-in model: toda2..toda5, toda:<n>, kdv, mkdv")
    common.add_argument("--file", help="JSON model file")
    common.add_argument("--tol", type=float, default=1e-8, help="numeric tolerance (default 1e-8)")
    common.add_argument("--points", type=int, default=100, help="random sample points (default 100)")
    common.add_argument("--seed", type=int, default=42, help="generator seed (default 42)")
    common.add_argument("--T", type=float, default=None, help="integration time")
    common.add_argument("--dt", type=float, default=None, help="time step")
    common.add_argument("--grid", type=int, default=1024, help="PDE grid points (default 1024)")
    common.add_argument("--json", nargs="?", const="-", default=None, metavar="PATH",
                        help="emit the JSON report (to stdout, or to PATH)")
    p = argparse.ArgumentParser(prog="nonnoether", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version="%(prog)s " + __version__)
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")
    sp = {}
    for name, (_, help_) in COMMANDS.items():
        sp[name] = sub.add_parser(name, parents=[common], help=help_, description=help_)
    sp["conslaws"].add_argument("--family", choices=["Y", "C", "I", "roots"], default="Y")
    sp["orbit"].add_argument("--J", default=None, help="seed function (default: first I-law)")
    sp["hojman"].add_argument("--depth", type=int, default=1, help="number of L_E iterates")
    sp["numverify"].add_argument("--start", default=None, help="initial state, comma separated")
    sp["numverify"].add_argument("--eig-tol", type=float, default=1e-6)
    sp["numverify"].add_argument("--stride", type=int, default=1, help="eigenvalue sampling stride")
    sp["pde"].add_argument("--length", type=float, default=80.0)
    sp["pde"].add_argument("--kappa", type=float, default=0.5)
    sp["pde"].add_argument("--no-refine", dest="refine", action="store_false")
    sp["export-model"].add_argument("--out", default=None, help="output path (default stdout)")
    return p


_OPTION_KEYS = ("tol", "points", "T", "dt", "grid", "family", "J", "depth", "start",
                "eig_tol", "stride", "length", "kappa", "refine")


def _options(args):
    return {k: getattr(args, k) for k in _OPTION_KEYS if hasattr(args, k)}


def _validate_flags(args):
    for name in ("tol", "dt", "T"):
        v = getattr(args, name, None)
        if v is not None and not v > 0:
            raise UsageError("%s: must be positive, got %r" % (name, v))
    if args.points < 1:
        raise UsageError("points: must be at least 1")
    if getattr(args, "stride", 1) < 1:
        raise UsageError("stride: must be at least 1")
    if args.seed < 0:
        raise UsageError("seed: must be non-negative")


def _export(args, out):
    m = _resolve(args)
    text = modelfile.dumps(m)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return 0


def dispatch(argv, out=None, err=None):
    """Run one command; returns the exit code."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    t0 = time.perf_counter()
    try:
        _validate_flags(args)
        if args.command == "export-model":
            return _export(args, out)
        fn = COMMANDS[args.command][0]
        rep = Report(args.command, _options(args), seed=args.seed)
        fn(args, rep)
    except (UsageError, modelfile.ModelFileError, ExprError, symmetry.ModelError,
            models.BadGrid, geom.GeomError) as exc:
        err.write("nonnoether: error: %s\n" % exc)
        return 2
    except (numverify.NonFiniteState, numverify.Unstable, numverify.EigenSolveFailure) as exc:
        err.write("nonnoether: numerical failure: %s: %s\n" % (type(exc).__name__, exc))
        return 1
    if args.json is None:
        out.write(rep.to_text())
        out.write("elapsed: %.2f s\n" % (time.perf_counter() - t0))
    elif args.json == "-":
        out.write(rep.to_json())
    else:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(rep.to_json())
        out.write(rep.to_text())
    return 0 if rep.ok else 1


def main(argv=None):
    sys.exit(dispatch(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
