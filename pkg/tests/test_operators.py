import pytest

from nonnoether import conslaws, geom, operators
from nonnoether.expr import Expr, parse
from nonnoether.fixtures import _parse_like, diff
from nonnoether.geom import Form, MultiVec, Tensor11
from nonnoether.models import FIXTURE_MAP, general_dbar, general_P, general_RE, to_forms, to_matrix

P = parse


def _zero_matrix(M):
    return all(not c for row in M for c in row)


def _expected(key, dim, printed=False):
    fx = FIXTURE_MAP[key]
    return _parse_like(fx.printed if printed else fx.expected, fx.what, dim)


class TestLax:
    @pytest.mark.parametrize("n,count", [(2, 8), (3, 16)])
    def test_fixture_matrices(self, toda, n, count):
        m = toda(n)
        lp = operators.lax_pair(m)
        assert lp.L.M == _expected("toda%d-L" % n, m.dim)
        assert lp.P.M == _expected("toda%d-P" % n, m.dim)
        assert lp.L.nonzero_count() == count

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_lax_equation(self, toda, n):
        m = toda(n)
        assert _zero_matrix(operators.lax_residual(m, operators.lax_pair(m)).M)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_P_table(self, toda, n):
        m = toda(n)
        assert operators.lax_pair(m).P.M == to_matrix(general_P(n), m.dim)

    @pytest.mark.parametrize("n", [2, 3])
    def test_half_traces_are_power_sums(self, toda, n):
        m = toda(n)
        L = operators.lax_pair(m).L.M
        I = conslaws.c_and_i_laws(m, 3)[1]
        Lk = L
        for k in range(3):
            tr = sum((Lk[a][a] for a in range(m.dim)), Expr.const(0))
            assert tr * Expr.const(1) == I[k] * 2
            Lk = geom.matmul(Lk, L)

    def test_perturbed_L_breaks_lax_equation(self, toda):
        m = toda(2)
        lp = operators.lax_pair(m)
        M = [row[:] for row in lp.L.M]
        M[0][1] = M[0][1] + P("z3")
        bad = operators.LaxPair(Tensor11(M, "forms"), lp.P)
        assert not _zero_matrix(operators.lax_residual(m, bad).M)

    def test_printed_three_particle_L_fails(self, toda):
        m = toda(3)
        printed = operators.LaxPair(Tensor11(_expected("toda3-L", m.dim, printed=True), "forms"),
                                    operators.lax_pair(m).P)
        assert not _zero_matrix(operators.lax_residual(m, printed).M)


class TestDbar:
    @pytest.mark.parametrize("n", [2, 3])
    def test_fixture_tables(self, toda, n):
        m = toda(n)
        got = [operators.dbar(m, Expr.coord(a)) for a in range(m.dim)]
        assert not diff(got, _expected("toda%d-dbar" % n, m.dim))

    def test_printed_three_particle_table_differs(self, toda):
        m = toda(3)
        got = [operators.dbar(m, Expr.coord(a)) for a in range(m.dim)]
        assert diff(got, _expected("toda3-dbar", m.dim, printed=True))

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_n_particle_table(self, toda, n):
        m = toda(n)
        got = [operators.dbar(m, Expr.coord(a)) for a in range(m.dim)]
        assert got == to_forms(general_dbar(n), m.dim)

    @pytest.mark.parametrize("n", [2, 3])
    def test_bicomplex(self, toda, n):
        m = toda(n)
        I = conslaws.c_and_i_laws(m, 3)[1]
        res = operators.bicomplex_verify(m, I)
        assert all(v.is_zero() for v in res.values()), [k for k, v in res.items() if not v.is_zero()]

    def test_d_via_bracket_is_d(self, toda):
        m = toda(2)
        f = P("z1^2*exp(z3-z4) + z2*z4")
        assert operators.d_via_bracket(m, f) == m.d(f)
        u = Form(1, 4, {(0,): P("z3"), (2,): P("z1*z2")})
        assert operators.d_via_bracket(m, u) == geom.exterior_derivative(u)

    def test_degree_overflow(self, toda):
        m = toda(2)
        with pytest.raises(geom.DegreeOverflow):
            operators.dbar(m, Form(4, 4, {(0, 1, 2, 3): 1}))


class TestRecursion:
    @pytest.mark.parametrize("n", [2, 3])
    def test_fixture_displays(self, toda, n):
        m = toda(n)
        R = operators.fn_operator(m)
        assert R.R_vectors.M == to_matrix(FIXTURE_MAP["toda%d-R_E" % n].expected, m.dim)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_n_particle_table_and_duality(self, toda, n):
        m = toda(n)
        R = operators.fn_operator(m)
        assert R.R_vectors.M == to_matrix(general_RE(n), m.dim)
        assert _zero_matrix(operators.duality_residual(R))

    @pytest.mark.parametrize("n", [2, 3])
    def test_torsion_free_and_invariant(self, toda, n):
        m = toda(n)
        R = operators.fn_operator(m)
        assert all(v.is_zero() for v in operators.fn_torsion(m, R).values())
        assert all(v.is_zero() for v in operators.fn_invariance(m, R))

    @pytest.mark.parametrize("n", [2, 3])
    def test_recursion_on_integrals(self, toda, n):
        m = toda(n)
        I = conslaws.c_and_i_laws(m, 4)[1]
        assert all(v.is_zero() for v in operators.recursion_check(m, operators.fn_operator(m), I))

    def test_wrong_scale_fails_recursion(self, toda):
        m = toda(2)
        I = conslaws.c_and_i_laws(m, 3)[1]
        R = operators.fn_operator(m)
        R2 = operators.RecursionOperator(Tensor11([[c * 2 for c in row] for row in R.R_forms.M], "forms"),
                                         R.R_vectors)
        assert not all(v.is_zero() for v in operators.recursion_check(m, R2, I))

    @pytest.mark.parametrize("n", [2, 3])
    def test_aux_forms_closed(self, toda, n):
        m = toda(n)
        forms = operators.aux_forms(m, operators.fn_operator(m))
        assert forms[1] == m.LEomega
        assert all(geom.is_closed(f) for f in forms)

    def test_nonzero_torsion_detected(self, toda):
        m = toda(2)
        R = operators.fn_operator(m)
        M = [row[:] for row in R.R_vectors.M]
        M[0][0] = M[0][0] * P("z1")
        out = operators.fn_torsion(m, Tensor11(M, "vectors"))
        assert not all(v.is_zero() for v in out.values())
