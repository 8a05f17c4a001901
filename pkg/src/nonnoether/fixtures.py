"""Run the reference fixtures against freshly computed quantities."""

from dataclasses import dataclass, field
import time

from . import conslaws, geom, operators, symmetry
from .expr import Expr, parse
from .models import FIXTURES, builtin, to_bivector, to_forms, to_matrix


@dataclass
class FixtureResult:
    key: str
    model: str
    what: str
    ok: bool
    printed_ok: bool
    erratum: bool
    note: str = ""
    mismatches: list = field(default_factory=list)
    nonzero: int = None


def _parse_like(value, what, dim):
    if what in ("h",):
        return parse(value)
    if what in ("E", "Y", "I", "hojman"):
        return [parse(v) for v in value]
    if what == "What":
        return to_bivector(value, dim)
    if what == "wedges":
        return {k: parse(v) for k, v in value.items()}
    if what in ("L", "P", "R_E"):
        return to_matrix(value, dim)
    if what == "dbar":
        return to_forms(value, dim)
    raise ValueError("unknown fixture quantity %r" % what)


def _top(x, dim):
    return x if isinstance(x, Expr) else x.comps.get(tuple(range(dim)), Expr.const(0))


def compute(m, what, cache):
    """The model's own value for a fixture quantity."""
    dim = m.dim
    if what == "h":
        return m.h
    if what == "E":
        return geom.components(m.E)
    if what == "What":
        return m.What
    if what == "wedges":
        W, Wh = m.W, m.What
        return {"W^W": _top(geom.wedge(W, W), dim),
                "What^W": _top(geom.wedge(Wh, W), dim),
                "What^What": _top(geom.wedge(Wh, Wh), dim)}
    if what == "Y":
        return conslaws.y_laws(m)
    if what == "I":
        return conslaws.c_and_i_laws(m)[1]
    if what == "L":
        return _lax(m, cache).L.M
    if what == "P":
        return _lax(m, cache).P.M
    if what == "dbar":
        return [operators.dbar(m, Expr.coord(a)) for a in range(dim)]
    if what == "R_E":
        return operators.fn_operator(m).R_vectors.M
    if what == "hojman":
        return symmetry.hojman_invariant(m.X, m.E, m.volume, depth=1)
    raise ValueError("unknown fixture quantity %r" % what)


def _lax(m, cache):
    key = ("lax", m.name)
    if key not in cache:
        cache[key] = operators.lax_pair(m)
    return cache[key]


def _items(v):
    if isinstance(v, dict):
        return sorted(v.items())
    if isinstance(v, geom.MultiVec):
        return sorted(v.comps.items())
    if isinstance(v, list) and v and isinstance(v[0], list):
        return [((a, b), c) for a, row in enumerate(v) for b, c in enumerate(row)]
    if isinstance(v, list):
        return list(enumerate(v))
    return [((), v)]


def diff(actual, expected):
    """Positions where the two disagree."""
    a, e = dict(_items(actual)), dict(_items(expected))
    zero = Expr.const(0)
    out = []
    for k in sorted(set(a) | set(e), key=repr):
        if a.get(k, zero) != e.get(k, zero):
            out.append(k)
    return out


def run_fixture(fx, models=None, cache=None):
    models = {} if models is None else models
    cache = {} if cache is None else cache
    if fx.model not in models:
        models[fx.model] = builtin(fx.model)
    m = models[fx.model]
    actual = compute(m, fx.what, cache)
    exp = _parse_like(fx.expected, fx.what, m.dim)
    bad = diff(actual, exp)
    printed_bad = bad if fx.corrected is None else diff(actual, _parse_like(fx.printed, fx.what, m.dim))
    nz = None
    if fx.what in ("L", "P"):
        nz = sum(1 for row in actual for c in row if c)
    return FixtureResult(fx.key, fx.model, fx.what, not bad, not printed_bad,
                         fx.corrected is not None, fx.note, bad, nz)


def run_suite(fixtures=FIXTURES):
    """All fixtures; returns (results, seconds)."""
    t0 = time.perf_counter()
    models, cache = {}, {}
    res = [run_fixture(fx, models, cache) for fx in fixtures]
    return res, time.perf_counter() - t0
