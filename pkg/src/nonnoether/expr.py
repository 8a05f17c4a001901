"""Exact scalar expressions.

An Expr is a finite sum of terms

    c * t^k * z_1^m_1 ... z_N^m_N * exp(v_1 z_1 + ... + v_N z_N)

with rational c and v_i.  Terms are keyed by (k, monomial, exponent vector)
where the monomial and the exponent vector are stored sparsely as sorted
tuples of (index, value) pairs.  Like terms are merged on construction, so
two Exprs are equal iff their term maps are equal.
"""

from fractions import Fraction
from functools import lru_cache
import math
import re


class ExprError(ValueError):
    pass


class NonLinearExponent(ExprError):
    pass


class UnknownSymbol(ExprError):
    pass


class UnboundCoordinate(ExprError):
    pass


class NotDivisible(ExprError):
    pass


class ParseError(ExprError):
    pass


def _q(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError("exact coefficients only, got %r" % (x,))


def _merge(a, b):
    """Add two sparse (index, value) tuples, dropping zeros."""
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        ia, ib = a[i][0], b[j][0]
        if ia == ib:
            v = a[i][1] + b[j][1]
            if v:
                out.append((ia, v))
            i += 1
            j += 1
        elif ia < ib:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


@lru_cache(maxsize=1 << 18)
def _key_mul(k1, k2):
    return (k1[0] + k2[0], _merge(k1[1], k2[1]), _merge(k1[2], k2[2]))


_ONE_KEY = (0, (), ())


class Expr:
    """Immutable exact expression in normal form."""

    __slots__ = ("_d", "_hash", "_sorted")

    def __init__(self, terms=None):
        d = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for k, c in items:
                c = _q(c)
                if not c:
                    continue
                v = d.get(k, 0) + c
                if v:
                    d[k] = v
                else:
                    d.pop(k, None)
        self._d = d
        self._hash = None
        self._sorted = None

    @classmethod
    def _raw(cls, d):
        # d is already merged and free of zeros
        e = cls.__new__(cls)
        e._d = d
        e._hash = None
        e._sorted = None
        return e

    # constructors
    @classmethod
    def const(cls, c):
        c = _q(c)
        return cls._raw({_ONE_KEY: c} if c else {})

    @classmethod
    def coord(cls, i, power=1):
        return cls._raw({(0, ((i, power),), ()): Fraction(1)})

    @classmethod
    def time(cls, power=1):
        return cls._raw({(power, (), ()): Fraction(1)})

    @classmethod
    def exp_linear(cls, weights):
        """exp(sum_i w_i z_i) for a mapping index -> rational weight."""
        ev = tuple(sorted((i, _q(w)) for i, w in dict(weights).items() if w))
        return cls._raw({(0, (), ev): Fraction(1)})

    # inspection
    def items(self):
        """Terms in canonical order."""
        if self._sorted is None:
            self._sorted = tuple(sorted(self._d.items()))
        return self._sorted

    def __len__(self):
        return len(self._d)

    def is_zero(self):
        return not self._d

    def is_constant(self):
        return not self._d or (len(self._d) == 1 and _ONE_KEY in self._d)

    def constant_value(self):
        if not self.is_constant():
            raise ExprError("expression is not a constant")
        return self._d.get(_ONE_KEY, Fraction(0))

    def has_time(self):
        return any(k[0] for k in self._d)

    def coords(self):
        s = set()
        for tp, mono, ev in self._d:
            s.update(i for i, _ in mono)
            s.update(i for i, _ in ev)
        return s

    def max_index(self):
        c = self.coords()
        return max(c) if c else -1

    # arithmetic
    @staticmethod
    def _coerce(x):
        if isinstance(x, Expr):
            return x
        if isinstance(x, (int, Fraction)):
            return Expr.const(x)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other._d:
            return self
        if not self._d:
            return other
        d = dict(self._d)
        for k, c in other._d.items():
            v = d.get(k, 0) + c
            if v:
                d[k] = v
            else:
                del d[k]
        return Expr._raw(d)

    __radd__ = __add__

    def __neg__(self):
        return Expr._raw({k: -c for k, c in self._d.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return ZERO
            return Expr._raw({k: c * other for k, c in self._d.items()})
        if not isinstance(other, Expr):
            return NotImplemented
        a, b = self._d, other._d
        if not a or not b:
            return ZERO
        if len(a) < len(b):
            a, b = b, a
        d = {}
        get = d.get
        for k2, c2 in b.items():
            for k1, c1 in a.items():
                k = _key_mul(k1, k2)
                v = get(k, 0) + c1 * c2
                if v:
                    d[k] = v
                else:
                    del d[k]
        return Expr._raw(d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / _q(other))
        if isinstance(other, Expr):
            return exact_divide(self, other)
        return NotImplemented

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ExprError("only non-negative integer powers")
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Expr.const(other)
        if not isinstance(other, Expr):
            return NotImplemented
        return self._d == other._d

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._d.items()))
        return self._hash

    def __bool__(self):
        return bool(self._d)

    def __repr__(self):
        return "Expr(%r)" % to_string(self)

    def __str__(self):
        return to_string(self)

    # calculus
    def diff(self, var):
        return differentiate(self, var)

    def subs_time(self, t):
        """Substitute a rational value for t."""
        t = _q(t)
        out = {}
        for (tp, mono, ev), c in self._d.items():
            k = (0, mono, ev)
            v = out.get(k, 0) + c * t ** tp
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return Expr._raw(out)


ZERO = Expr()
ONE = Expr.const(1)
T = Expr.time()


def z(i):
    """Coordinate z_i, 1-based as in the usual notation."""
    return Expr.coord(i - 1)


def normalize(x):
    """Coerce ints, Fractions and strings to Expr."""
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Expr.const(x)
    if isinstance(x, str):
        return parse(x)
    raise TypeError("cannot normalize %r" % (x,))


def _var_index(var, names=None):
    if isinstance(var, int):
        return var
    if var == "t":
        return "t"
    if names is not None and var in names:
        return list(names).index(var)
    m = re.fullmatch(r"z(\d+)", str(var))
    if names is None and m and int(m.group(1)) >= 1:
        return int(m.group(1)) - 1
    raise UnknownSymbol("unknown variable %r" % (var,))


def differentiate(e, var, names=None):
    """Partial derivative by a coordinate index (0-based), a name, or 't'."""
    v = _var_index(var, names)
    d = {}
    if v == "t":
        for (tp, mono, ev), c in e._d.items():
            if tp:
                d[(tp - 1, mono, ev)] = c * tp
        return Expr._raw(d)
    for (tp, mono, ev), c in e._d.items():
        for i, w in ev:
            if i == v:
                k = (tp, mono, ev)
                s = d.get(k, 0) + c * w
                if s:
                    d[k] = s
                else:
                    d.pop(k, None)
                break
        for pos, (i, m) in enumerate(mono):
            if i == v:
                if m == 1:
                    nm = mono[:pos] + mono[pos + 1:]
                else:
                    nm = mono[:pos] + ((i, m - 1),) + mono[pos + 1:]
                k = (tp, nm, ev)
                s = d.get(k, 0) + c * m
                if s:
                    d[k] = s
                else:
                    d.pop(k, None)
                break
    return Expr._raw(d)


def evaluate(e, point, time=0.0):
    """Float value at a point (sequence indexed by coordinate or name map)."""
    total = 0.0
    for (tp, mono, ev), c in e.items():
        try:
            v = float(c)
            if tp:
                v *= time ** tp
            for i, m in mono:
                v *= point[i] ** m
            if ev:
                v *= math.exp(math.fsum(float(w) * point[i] for i, w in ev))
        except (IndexError, KeyError):
            raise UnboundCoordinate("coordinate index out of range for point")
        total += v
    return total


def _lead_order(key, dim):
    tp, mono, ev = key
    dm = [0] * dim
    for i, m in mono:
        dm[i] = m
    de = [Fraction(0)] * dim
    for i, w in ev:
        de[i] = w
    return (tp, tuple(dm), tuple(de))


def exact_divide(num, den):
    """Exact quotient q with q*den == num, or NotDivisible."""
    if den.is_zero():
        raise ZeroDivisionError("division by the zero expression")
    if num.is_zero():
        return ZERO
    if len(den) == 1:
        (dk, dc), = den._d.items()
        dtp, dmono, dev = dk
        dm = dict(dmono)
        out = {}
        neg_ev = tuple((i, -w) for i, w in dev)
        for (tp, mono, ev), c in num._d.items():
            if tp < dtp:
                raise NotDivisible("time power too small")
            mm = dict(mono)
            for i, m in dm.items():
                if mm.get(i, 0) < m:
                    raise NotDivisible("monomial not divisible")
                mm[i] -= m
            nm = tuple(sorted((i, m) for i, m in mm.items() if m))
            out[(tp - dtp, nm, _merge(ev, neg_ev))] = c / dc
        return Expr._raw(out)
    # leading-term division under a multiplicative lex order on dense keys
    dim = max(num.max_index(), den.max_index()) + 1
    order = lambda k: _lead_order(k, dim)
    dlead = max(den._d, key=order)
    lead_only = Expr._raw({dlead: den._d[dlead]})
    rem = num
    q = ZERO
    budget = 8 * (len(num) + 1) * len(den) + 64
    while not rem.is_zero():
        budget -= 1
        if budget < 0:
            raise NotDivisible("division did not terminate")
        rk = max(rem._d, key=order)
        step = exact_divide(Expr._raw({rk: rem._d[rk]}), lead_only)
        q = q + step
        rem = rem - step * den
    return q


# printing

def _fmt_q(c):
    return str(c.numerator) if c.denominator == 1 else "%d/%d" % (c.numerator, c.denominator)


def _name(i, names):
    return names[i] if names is not None else "z%d" % (i + 1)


def _fmt_linform(ev, names):
    parts = []
    for i, w in ev:
        a = abs(w)
        body = _name(i, names) if a == 1 else "%s*%s" % (_fmt_q(a), _name(i, names))
        if not parts:
            parts.append(("-" if w < 0 else "") + body)
        else:
            parts.append(("-" if w < 0 else "+") + body)
    return "".join(parts)


def to_string(e, names=None):
    """Canonical text form; parses back to the same Expr."""
    if e.is_zero():
        return "0"
    out = []
    for (tp, mono, ev), c in e.items():
        fac = []
        if tp:
            fac.append("t" if tp == 1 else "t^%d" % tp)
        for i, m in mono:
            fac.append(_name(i, names) if m == 1 else "%s^%d" % (_name(i, names), m))
        if ev:
            fac.append("exp(%s)" % _fmt_linform(ev, names))
        a = abs(c)
        if not fac:
            body = _fmt_q(a)
        elif a == 1:
            body = "*".join(fac)
        else:
            body = _fmt_q(a) + "*" + "*".join(fac)
        if not out:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


# parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def _tokenize(s):
    toks = []
    pos = 0
    s = s.rstrip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if m is None:
            break
        num, ident, op = m.groups()
        if num is not None:
            toks.append(("num", int(num), m.start(1)))
        elif ident is not None:
            toks.append(("id", ident, m.start(2)))
        elif op is not None:
            if op not in "+-*^()/":
                raise ParseError("unexpected character %r at %d" % (op, m.start(3)))
            toks.append(("op", op, m.start(3)))
        pos = m.end()
    toks.append(("end", None, len(s)))
    return toks


class _Parser:
    def __init__(self, text, names):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.names = names

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, val=None):
        tok = self.toks[self.i]
        if (kind and tok[0] != kind) or (val is not None and tok[1] != val):
            want = val if val is not None else kind
            raise ParseError("expected %r at %d in %r" % (want, tok[2], self.text))
        self.i += 1
        return tok

    def expr(self):
        out = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self):
        out = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            out = out * self.factor()
        return out

    def factor(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            return -self.factor()
        base = self.atom()
        while self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            k = self.take("num")[1]
            base = base ** k
        return base

    def atom(self):
        tok = self.take()
        kind, val, pos = tok
        if kind == "num":
            if self.peek()[0] == "op" and self.peek()[1] == "/":
                self.take()
                den = self.take("num")[1]
                if den == 0:
                    raise ParseError("zero denominator at %d" % pos)
                return Expr.const(Fraction(val, den))
            return Expr.const(val)
        if kind == "id":
            if val == "t":
                return T
            if val == "exp":
                self.take("op", "(")
                arg = self.expr()
                self.take("op", ")")
                return _exp_of(arg, self.text)
            return Expr.coord(self._index(val, pos))
        if kind == "op" and val == "(":
            e = self.expr()
            self.take("op", ")")
            return e
        raise ParseError("unexpected %r at %d in %r" % (val, pos, self.text))

    def _index(self, name, pos):
        if self.names is not None:
            if name in self.names:
                return self.names.index(name)
            raise UnknownSymbol("undeclared coordinate %r at %d in %r" % (name, pos, self.text))
        m = re.fullmatch(r"z(\d+)", name)
        if m and int(m.group(1)) >= 1:
            return int(m.group(1)) - 1
        raise UnknownSymbol("undeclared coordinate %r at %d in %r" % (name, pos, self.text))


def _exp_of(arg, text=""):
    w = {}
    for (tp, mono, ev), c in arg._d.items():
        if tp or ev or len(mono) != 1 or mono[0][1] != 1:
            raise NonLinearExponent("exp argument must be a rational-linear form: %r" % text)
        w[mono[0][0]] = c
    return Expr.exp_linear(w)


def exp(arg):
    """exp of a rational-linear Expr."""
    return _exp_of(normalize(arg))


def parse(text, names=None):
    """Parse the expression grammar; names is the coordinate name list."""
    if not isinstance(text, str):
        raise ParseError("expression must be a string")
    names = list(names) if names is not None else None
    p = _Parser(text, names)
    if p.peek()[0] == "end":
        raise ParseError("empty expression")
    e = p.expr()
    if p.peek()[0] != "end":
        tok = p.peek()
        raise ParseError("trailing input at %d in %r" % (tok[2], text))
    return e
