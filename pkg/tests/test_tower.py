import pytest

from artifact.pattern import ModuleVector, enumerate_patterns, fully_nested, least_nested, pattern_count
from artifact.qkz import solve_cached
from artifact.ring import SYMBOLIC, RationalField, ZPoly, c_twist, matrix_rank, q_param
from artifact.tlrep import Operator, rep
from artifact.tower import (
    braid_factor,
    braid_o1_verify,
    braid_sides,
    braid_verify,
    dual_solution,
    dual_verify,
    factorize,
    independence_report,
    intertwining_report,
    lift_letter,
    lift_word,
    nested_coefficient_report,
    nu_diagram_check,
    phi,
    phi_cached,
    remark_forms,
    restricted_lhs_report,
)

F = SYMBOLIC


# --- factorization -----------------------------------------------------------------


@pytest.mark.parametrize("n", range(1, 7))
def test_factorization_covers_and_replays(n):
    table = factorize(F, n)
    assert table.words[least_nested(n)] == []
    assert table.scalars[least_nested(n)] == F.one()
    assert len(table.words) == pattern_count(n)
    R = rep(F, n, twisted=False)
    base = ModuleVector.basis(F, least_nested(n))
    for L, w in table.words.items():
        assert R.apply_word(w, base) == ModuleVector.basis(F, L).scale(table.scalars[L])


def test_factorization_is_deterministic():
    a, b = factorize(F, 5), factorize(F, 5)
    assert a.words == b.words


# --- lifting -------------------------------------------------------------------------


def test_lift_of_e_is_e():
    assert lift_letter(F, 4, ("e", 2)) == rep(F, 5, twisted=False).e(2)


def test_lift_of_rho():
    R = rep(F, 5, twisted=False)
    want = (R.rho() @ R.e(4)).scale(F.s_pow(-1)) + R.rho().scale(F.s_pow(1))
    assert lift_letter(F, 4, ("rho", 1)) == want


@pytest.mark.parametrize("n", [2, 3, 4])
def test_lift_is_multiplicative_on_rho_rho_inverse(n):
    assert lift_word(F, n, [("rho", 1), ("rho", -1)]) == Operator.identity(F, n + 1)


# --- phi ---------------------------------------------------------------------------


def test_phi0():
    P = phi(F, 0)
    (E,) = enumerate_patterns(0)
    (L1,) = enumerate_patterns(1)
    assert P.cols[E] == {L1: F.one()}


@pytest.mark.parametrize("n", range(0, 5))
@pytest.mark.parametrize("dual", [False, True])
def test_intertwining_and_nested_coefficient(n, dual):
    for r in (intertwining_report(F, n, dual), nested_coefficient_report(F, n, dual)):
        assert r.ok, r.first_failure()


@pytest.mark.parametrize("n", range(1, 5))
def test_word_choice_independence(n):
    r = independence_report(F, n, trials=2, seed=11)
    assert r.ok, r.first_failure()


def test_wrong_base_calibration_breaks_intertwining():
    """Swapping the odd base-image coefficients must be detected."""
    from artifact.pattern import Pattern

    n = 3
    Fr = RationalField(3)
    good = phi(Fr, n)
    base = least_nested(n)
    arches = base.arches + ((n, n + 1),)
    swapped = ModuleVector(n + 1, Fr, {Pattern(n + 1, arches, gap=0): Fr.one(), Pattern(n + 1, arches, gap=n): Fr.s_pow(1)})
    table = factorize(Fr, n)
    cols = {}
    for L in enumerate_patterns(n):
        vec = lift_word(Fr, n, table.words[L]).apply(swapped)
        cols[L] = dict(vec.scale(Fr.one() / table.scalars[L]).coeffs)
    bad = Operator(Fr, n, n + 1, cols)
    assert not bad == good
    intertwining_fails = not intertwining_report(Fr, n, P=bad).ok
    nested_wrong = bad.entry(fully_nested(n + 1), fully_nested(n)) != Fr.s_pow(-(n // 2))
    assert intertwining_fails or nested_wrong


@pytest.mark.parametrize("n", range(1, 6))
def test_phi_injective(n):
    Fr = RationalField(5)
    P = phi_cached(Fr, n)
    assert matrix_rank(P.rows(), Fr) == pattern_count(n)


# --- braid recursion ----------------------------------------------------------------


def test_braid_factor_n3():
    assert braid_factor(F, 3) == ZPoly(F, 3, {(1, 1, 1): F.s_pow(-5)})
    assert braid_factor(F, 0) == ZPoly.constant(F, 0, 1)


def test_braid_n0():
    lhs, rhs = braid_sides(F, 0)
    assert lhs == rhs


def test_braid_signed_form_holds():
    r = braid_verify(F, 4, signed=True)
    assert r.ok, r.first_failure()


def test_braid_printed_form_differs_by_sign_on_odd_n():
    """Without the (-1)^n sign the recursion fails for odd n by a global -1."""
    for n in range(0, 5):
        lhs, rhs = braid_sides(F, n, signed=False)
        if n % 2:
            assert not lhs == rhs
            assert lhs == rhs.scale(-F.one())
        else:
            assert lhs == rhs


def test_remark_forms_at_o1_point():
    assert remark_forms(4) == (1, 0)
    assert remark_forms(3) == (1, -2)
    r = braid_o1_verify(4)
    assert r.ok, r.first_failure()


@pytest.mark.parametrize("n", range(1, 4))
def test_braid_lhs_in_restricted_module(n):
    r = restricted_lhs_report(F, n)
    assert r.ok, r.first_failure()


def test_compatibility():
    for n in range(1, 8):
        assert -F.s_pow(-3) * c_twist(F, n + 1) == c_twist(F, n) / q_param(F)


# --- dual recursion ------------------------------------------------------------------


def test_dual_n1():
    g1 = solve_cached(1, F)
    assert dual_solution(g1) == g1


def test_dual_recursion():
    r = dual_verify(F, 3)
    assert r.ok, r.first_failure()


# --- nu diagram ----------------------------------------------------------------------


@pytest.mark.parametrize("n", range(0, 5))
def test_nu_diagram(n):
    r = nu_diagram_check(F, n)
    assert r.ok, r.first_failure()


def test_nu0_acts_by_u():
    r = nu_diagram_check(F, 0)
    assert [name for name, _, _ in r.checks] == ["nu0(X)"]
