"""JSON model files: load with field-level diagnostics, export built-ins.

Layout (indices are 1-based, matching the default names z1..zN):

    {"name": "toda2", "dim": 4, "coords": ["z1", ...],
     "poisson": [{"i": 1, "j": 3, "expr": "1"}, ...],
     "symplectic": [...],            optional, same shape as poisson
     "hamiltonian": "1/2*z1^2 + ...",
     "symmetry": ["...", ...],       dim expressions, may use t
     "s_form": [{"i": 1, "expr": "..."}],   optional
     "volume": "1"}                  optional coefficient of dz1^...^dzN
"""

import json

from . import geom
from .expr import ExprError, Expr, parse, to_string
from .geom import Form, MultiVec
from .symmetry import ModelError, PhaseModel


class ModelFileError(ValueError):
    """Invalid model file; `field` names the offending entry."""

    def __init__(self, field, message):
        super().__init__("%s: %s" % (field, message))
        self.field = field


def _expr(text, names, field):
    if not isinstance(text, str):
        raise ModelFileError(field, "expected an expression string, got %s" % type(text).__name__)
    try:
        return parse(text, names)
    except ExprError as exc:
        raise ModelFileError(field, str(exc)) from None


def _index(entry, key, dim, field):
    v = entry.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or not 1 <= v <= dim:
        raise ModelFileError("%s.%s" % (field, key), "index must be an integer in 1..%d, got %r" % (dim, v))
    return v - 1


def _pairs(items, dim, names, field, cls):
    if not isinstance(items, list):
        raise ModelFileError(field, "expected a list of {i, j, expr} entries")
    comps = {}
    for k, e in enumerate(items):
        f = "%s[%d]" % (field, k)
        if not isinstance(e, dict):
            raise ModelFileError(f, "expected an object")
        i = _index(e, "i", dim, f)
        j = _index(e, "j", dim, f)
        if i >= j:
            raise ModelFileError(f, "entries must have i < j")
        if (i, j) in comps:
            raise ModelFileError(f, "duplicate entry (%d, %d)" % (i + 1, j + 1))
        comps[(i, j)] = _expr(e.get("expr"), names, f + ".expr")
    return cls(2, dim, comps)


def load_dict(doc):
    if not isinstance(doc, dict):
        raise ModelFileError("<root>", "expected a JSON object")
    for key in ("name", "dim", "coords", "poisson", "hamiltonian", "symmetry"):
        if key not in doc:
            raise ModelFileError(key, "missing required field")
    dim = doc["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 2 or dim % 2:
        raise ModelFileError("dim", "must be a positive even integer, got %r" % (dim,))
    coords = doc["coords"]
    if (not isinstance(coords, list) or len(coords) != dim
            or not all(isinstance(c, str) and c.isidentifier() for c in coords)):
        raise ModelFileError("coords", "expected %d identifier names" % dim)
    if len(set(coords)) != dim:
        raise ModelFileError("coords", "names must be distinct")
    for c in coords:
        if c in ("t", "exp"):
            raise ModelFileError("coords", "%r is reserved" % c)
    W = _pairs(doc["poisson"], dim, coords, "poisson", MultiVec)
    omega = None
    if doc.get("symplectic") is not None:
        omega = _pairs(doc["symplectic"], dim, coords, "symplectic", Form)
    h = _expr(doc["hamiltonian"], coords, "hamiltonian")
    sym = doc["symmetry"]
    if not isinstance(sym, list) or len(sym) != dim:
        raise ModelFileError("symmetry", "expected %d component expressions" % dim)
    E = geom.vector([_expr(x, coords, "symmetry[%d]" % k) for k, x in enumerate(sym)])
    s = None
    if doc.get("s_form") is not None:
        items = doc["s_form"]
        if not isinstance(items, list):
            raise ModelFileError("s_form", "expected a list of {i, expr} entries")
        comps = {}
        for k, e in enumerate(items):
            f = "s_form[%d]" % k
            if not isinstance(e, dict):
                raise ModelFileError(f, "expected an object")
            comps[(_index(e, "i", dim, f),)] = _expr(e.get("expr"), coords, f + ".expr")
        s = Form(1, dim, comps)
    volume = None
    if doc.get("volume") is not None:
        volume = Form(dim, dim, {tuple(range(dim)): _expr(doc["volume"], coords, "volume")})
    name = doc["name"]
    if not isinstance(name, str) or not name:
        raise ModelFileError("name", "expected a non-empty string")
    try:
        m = PhaseModel(name, coords, W, h, E, omega=omega, s=s, volume=volume, validate=False)
    except ModelError as exc:
        raise ModelFileError("symmetry", str(exc)) from None
    _validate(m, omega is None)
    return m


def _validate(m, derived):
    if geom.wedge_power(m.W, m.n).is_zero():
        raise ModelFileError("poisson", "W is degenerate (W^n = 0)")
    if m.omega is None:
        try:
            m.omega = geom.constant_symplectic(m.W)
        except geom.InconsistentPair as exc:
            raise ModelFileError("poisson", str(exc)) from None
        except geom.GeomError:
            raise ModelFileError("symplectic", "required when the Poisson bivector is not constant") from None
    field = "poisson" if derived else "symplectic"
    try:
        geom.check_pair(m.W, m.omega)
    except geom.InconsistentPair as exc:
        raise ModelFileError(field, "W and omega are not inverse: %s" % exc) from None
    if not geom.is_closed(m.omega):
        raise ModelFileError("symplectic", "omega is not closed")


def load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ModelFileError("<file>", str(exc)) from None
    except json.JSONDecodeError as exc:
        raise ModelFileError("<json>", "line %d column %d: %s" % (exc.lineno, exc.colno, exc.msg)) from None
    return load_dict(doc)


def _sparse2(obj, names):
    return [{"i": a + 1, "j": b + 1, "expr": to_string(c, names)}
            for (a, b), c in sorted(obj.comps.items())]


def to_dict(m):
    names = m.coords
    doc = {
        "name": m.name,
        "dim": m.dim,
        "coords": list(names),
        "poisson": _sparse2(m.W, names),
        "symplectic": _sparse2(m.omega, names) if m.omega is not None else None,
        "hamiltonian": to_string(m.h, names),
        "symmetry": [to_string(c, names) for c in geom.components(m.E)],
        "s_form": None,
        "volume": None,
    }
    if m.s is not None:
        doc["s_form"] = [{"i": a + 1, "expr": to_string(c, names)} for (a,), c in sorted(m.s.comps.items())]
    if m.volume is not None:
        doc["volume"] = to_string(m.volume.comps.get(tuple(range(m.dim)), Expr.const(0)), names)
    return doc


def dumps(m):
    return json.dumps(to_dict(m), indent=2, sort_keys=True) + "\n"
