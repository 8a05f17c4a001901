import numpy as np
import pytest

from nonnoether import conslaws, geom, symmetry
from nonnoether.expr import Expr, evaluate, parse
from nonnoether.geom import Form, MultiVec
from nonnoether.models import (
    BadGrid, FIXTURES, PdeModel, PdeSpec, build_toda, builtin, eps, general_h, general_J,
    general_LEomega, general_What, kdv_soliton, to_bivector,
)
from nonnoether.symmetry import ModelError, PhaseModel


def test_eps():
    assert [eps(k) for k in (-3, 0, 2)] == [-1, 0, 1]


def test_hamiltonian_reference_value(toda):
    assert evaluate(toda(2).h, [1, 0, 0, 0]) == pytest.approx(1.5)


def test_two_particle_generator_component(toda):
    assert geom.components(toda(2).E)[2] == parse("2*z1 + 1/2*z2 + 1/2*t*(z1^2 + exp(z3-z4))")


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_n_particle_tables(toda, n):
    m = toda(n)
    assert m.h == parse(general_h(n))
    assert m.What == to_bivector(general_What(n), m.dim)
    assert m.LEomega == to_bivector(general_LEomega(n), m.dim, cls=Form)


def test_builtin_names():
    assert builtin("toda:4").n == 4
    assert builtin("toda2").coords == ["z1", "z2", "z3", "z4"]
    for bad in ("toda:x", "kepler", "toda1"):
        with pytest.raises(ValueError):
            builtin(bad)


def test_fixture_keys_unique():
    keys = [f.key for f in FIXTURES]
    assert len(keys) == len(set(keys))
    assert all(f.note for f in FIXTURES if f.corrected is not None)


def test_fixture_suite_passes_and_flags_errata():
    from nonnoether.fixtures import run_suite
    res, secs = run_suite()
    assert all(r.ok for r in res), [r.key for r in res if not r.ok]
    errata = {r.key for r in res if not r.printed_ok}
    assert errata == {"toda3-E", "toda3-What", "toda3-Y", "toda3-L", "toda3-I", "toda3-dbar", "toda3-R_E"}


def test_printed_three_particle_generator_is_not_a_symmetry(toda):
    from nonnoether.models import FIXTURE_MAP
    m = toda(3)
    E = geom.vector([parse(s) for s in FIXTURE_MAP["toda3-E"].printed])
    assert not symmetry.check_symmetry(m.with_E(E)).is_symmetry


def test_printed_three_particle_bracket_differs(toda):
    from nonnoether.models import FIXTURE_MAP
    m = toda(3)
    assert m.What != to_bivector(FIXTURE_MAP["toda3-What"].printed, 6)


def test_printed_first_law_is_not_the_quotient(toda):
    from nonnoether.models import FIXTURE_MAP
    m = toda(3)
    assert conslaws.y_laws(m)[0] != parse(FIXTURE_MAP["toda3-Y"].printed[0])


@pytest.mark.parametrize("n", [2, 3, 4])
def test_orbit_members_table(toda, n):
    m = toda(n)
    fam = symmetry.orbit_family(m, parse(general_J(n)[0]), depth=2, brackets=False).family
    assert fam == [parse(s) for s in general_J(n)]


class TestPde:
    def test_soliton_mass(self):
        pm = PdeModel(PdeSpec("kdv", 80.0, 1024))
        u = kdv_soliton(pm.grid, 0.0, 0.5, 40.0)
        assert pm.densities(u)[0] == pytest.approx(8.0, rel=1e-10)
        assert pm.densities(u)[1] == pytest.approx(4 / 9 * 192 * 0.5 ** 3, rel=1e-8)

    def test_zero_state(self):
        for eq in ("kdv", "mkdv"):
            pm = PdeModel(PdeSpec(eq, 40.0, 256))
            assert pm.densities(np.zeros(256)) == [0.0] * 4

    @pytest.mark.parametrize("N", [100, 128, 300, 2.0 ** 10])
    def test_bad_grid(self, N):
        with pytest.raises(BadGrid):
            PdeModel(PdeSpec("kdv", 80.0, N))

    def test_custom_densities(self):
        pm = PdeModel(PdeSpec("kdv", 2 * np.pi, 256, densities=["u_x^2", "u*u_xx"]))
        u = np.sin(pm.grid)
        a, b = pm.densities(u)
        # fourth-order differences: relative error about (dx)^4 / 30
        assert a == pytest.approx(np.pi, rel=1e-6)
        assert b == pytest.approx(-np.pi, rel=1e-6)

    def test_time_dependent_density_rejected(self):
        with pytest.raises(ValueError):
            PdeModel(PdeSpec("kdv", 80.0, 256, densities=["t*u"]))

    def test_unknown_equation(self):
        with pytest.raises(ValueError):
            PdeModel(PdeSpec("nls", 80.0, 256))

    def test_soliton_profile(self):
        x = np.linspace(0, 10, 11)
        assert kdv_soliton(x, 0.0, 0.5, 5.0)[5] == pytest.approx(3.0)
        assert kdv_soliton(x, 1.0, 0.5, 4.0)[5] == pytest.approx(3.0)


def test_degenerate_W_rejected():
    W = MultiVec(2, 4, {(0, 2): 1})
    with pytest.raises(ModelError):
        PhaseModel("bad", ["a", "b", "c", "d"], W, parse("0"), MultiVec(1, 4, {}))
