import warnings
from math import comb

import numpy as np
import pytest

from nonnoether import conslaws, numverify
from nonnoether.conslaws import PairingWarning
from nonnoether.expr import evaluate, parse

P = parse


def test_toda2_Y(toda):
    assert conslaws.y_laws(toda(2)) == [P("1/2*(z1+z2)"), P("z1*z2 - exp(z3-z4)")]


def test_toda3_Y(toda):
    Y = conslaws.y_laws(toda(3))
    assert Y[0] == P("1/3*(z1+z2+z3)")
    assert Y[2] == P("z1*z2*z3 - z3*exp(z4-z5) - z1*exp(z5-z6)")


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_C_is_binomial_times_Y(toda, n):
    m = toda(n)
    Y = conslaws.y_laws(m)
    C = conslaws.c_laws(m)
    for k in range(n):
        assert C[k] == Y[k] * comb(n, k + 1)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_I_matches_power_sums(toda, n):
    from nonnoether.models import general_I
    m = toda(n)
    I = conslaws.c_and_i_laws(m, 4)[1]
    assert I == [P(s) for s in general_I(n, 4)]


@pytest.mark.parametrize("n", [2, 3])
def test_all_families_conserved_and_involutive(toda, n):
    m = toda(n)
    cs = conslaws.conserved_set(m)
    laws = [f for _, f in cs.all_laws()]
    assert all(r.is_zero() for r in conslaws.conservation_residuals(m, laws))
    assert all(v.is_zero() for v in conslaws.involutivity(m, cs.Y).values())
    assert all(v.is_zero() for v in conslaws.involutivity(m, cs.I).values())


def test_newton_recursion_small():
    # power sums of roots {1, 2}: e1 = 3, e2 = 2 -> p1 = 3, p2 = 5, p3 = 9
    from nonnoether.expr import Expr
    I = conslaws.i_from_c([Expr.const(3), Expr.const(2)], 3)
    assert [i.constant_value() for i in I] == [3, 5, 9]


def test_secular_roots_reference_point(toda):
    r = conslaws.secular_roots(toda(2), [1, 0, 0, 0])
    assert r.values == pytest.approx([(1 - 5 ** 0.5) / 2, (1 + 5 ** 0.5) / 2])
    assert not r.complex_roots


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_roots_reproduce_Y(toda, n):
    m = toda(n)
    Y = conslaws.y_laws(m)
    for p in numverify.random_points(2 * n, 20, seed=7):
        yr = conslaws.y_from_roots(conslaws.secular_roots(m, p).values)
        ref = [evaluate(y, p) for y in Y]
        assert np.allclose(yr, ref, rtol=1e-8, atol=1e-8)


def test_pairing_warning():
    with pytest.warns(PairingWarning):
        conslaws.pair_roots([0.0, 1.0, 5.0, 9.0])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert conslaws.pair_roots([1.0, 1.0 + 1e-12, 2.0, 2.0]) == pytest.approx([1.0, 2.0])


def test_elementary_symmetric():
    assert conslaws.elementary_symmetric([1.0, 2.0, 3.0]) == [6.0, 11.0, 6.0]


def test_jacobian_rank(toda):
    m = toda(3)
    assert conslaws.jacobian_rank(m, conslaws.y_laws(m), [0.1, -0.3, 0.2, 0.4, 0.0, -0.5]) == 3


def test_printed_quartic_integral_is_not_conserved(toda):
    from nonnoether.models import general_I
    m = toda(3)
    printed = P(general_I(3, 4, printed=True)[3])
    assert not m.dt(printed).is_zero()
