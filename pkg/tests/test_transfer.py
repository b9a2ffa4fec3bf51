import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from artifact.pattern import enumerate_patterns
from artifact.qkz import solve_cached
from artifact.ring import CYCLOTOMIC, SYMBOLIC, RationalField
from artifact.tlrep import Operator, rep
from artifact.tower import phi_cached
from artifact.transfer import (
    RowConfig,
    TransferError,
    cleared_denominator,
    cleared_transfer_apply,
    commutation_report,
    limit_weight_report,
    limit_weights,
    o1_groundstate_check,
    row_operator,
    rtt_report,
    sample_field,
    sample_point,
    stochasticity_check,
    tile_weights,
    tmat_conjugated_report,
    transfer_matrix,
    transfer_operator,
)

fractions = st.fractions(min_value=Fraction(-9), max_value=Fraction(9)).filter(lambda f: f != 0)


def test_tile_weights_sum_to_one_at_zeta():
    F = CYCLOTOMIC
    for x, z in [(Fraction(1), Fraction(3)), (Fraction(-2, 5), Fraction(7, 2))]:
        a, b = tile_weights(F, F.from_fraction(x), F.from_fraction(z))
        assert a + b == F.one()


def test_limit_weights():
    F = SYMBOLIC
    assert limit_weights(F) == (-F.s_pow(2), -F.s_pow(4))
    assert limit_weight_report(5).ok


@settings(max_examples=20, deadline=None)
@given(fractions, fractions, st.sampled_from([Fraction(2), Fraction(3, 2), Fraction(-5, 3)]))
def test_limit_is_approached(x, z0, s0):
    # a(x/z) + t^{1/2} is O(z): shrinking z shrinks the difference proportionally
    F = RationalField(s0)
    xs = F.from_fraction(x)
    a0, b0 = limit_weights(F)
    small = [F.from_fraction(z0 / 10**k) for k in (6, 7)]
    diffs = [tile_weights(F, xs, z)[0] - a0 for z in small]
    assert abs(diffs[1].to_fraction()) < abs(diffs[0].to_fraction()) or diffs[0].is_zero()


@pytest.mark.parametrize("n", range(2, 6))
def test_uniform_rows_are_rotations(n):
    F = SYMBOLIC
    R = rep(F, n, twisted=False)
    assert row_operator(F, RowConfig(("ne",) * n)) == R.rho()
    assert row_operator(F, RowConfig(("nw",) * n)) == R.rho(-1)


def test_unknown_tile_rejected():
    with pytest.raises(TransferError):
        RowConfig(("up", "ne"))


def test_n0_acts_by_puncture_weight():
    F = RationalField(2)
    T = transfer_operator(F, 0, F.from_int(3), [])
    assert T == Operator.identity(F, 0).scale(F.s_pow(1) + F.s_pow(-1))


@settings(max_examples=15, deadline=None)
@given(fractions, st.lists(fractions, min_size=3, max_size=3, unique=True))
def test_exact_stochasticity_at_zeta(x, zs):
    """Every row maps a pattern to a single pattern with weight 1 at the
    O(1) point, so each column sums to prod (a + b) = 1 exactly."""
    F = CYCLOTOMIC
    xs, zv = F.from_fraction(x), [F.from_fraction(z) for z in zs]
    th, thi = F.s_pow(2), F.s_pow(-2)
    assume(all(not (th * z - thi * xs).is_zero() for z in zv))
    A = transfer_matrix(F, 3, xs, zv)
    assert all(c == F.one() for c in A.column_sums())


@pytest.mark.parametrize("n", range(1, 5))
def test_commutation(n):
    r = commutation_report(n, samples=3, seed=n)
    assert r.ok, r.first_failure()


@pytest.mark.parametrize("n", range(1, 5))
def test_rtt(n):
    r = rtt_report(n, samples=3, seed=n)
    assert r.ok, r.first_failure()


@pytest.mark.parametrize("n", range(1, 5))
def test_tmat_conjugated(n):
    r = tmat_conjugated_report(n, samples=3, seed=n)
    assert r.ok, r.first_failure()


def test_tmat_negative_control():
    rng = random.Random(1)
    F = sample_field(rng)
    x, zs = sample_point(rng, F, 2)
    P = phi_cached(F, 2)
    lhs = transfer_operator(F, 3, x, list(zs) + [F.zero()]) @ P
    rhs = (P @ transfer_operator(F, 2, x, zs)).scale(F.s_pow(3))
    assert not lhs == rhs


def test_cleared_apply_matches_sampled_operator():
    F = RationalField(Fraction(3, 2))
    g = solve_cached(3, SYMBOLIC).specialize(F)
    x = F.from_int(5)
    zs = [F.from_fraction(Fraction(k, 3)) for k in (1, 2, 4)]
    cleared = cleared_transfer_apply(g, x)
    D = cleared_denominator(F, 3, x).evaluate(zs)
    T = transfer_operator(F, 3, x, zs)
    for M in enumerate_patterns(3):
        direct = F.zero()
        for L in enumerate_patterns(3):
            direct = direct + T.entry(M, L) * g[L].evaluate(zs)
        assert cleared[M].evaluate(zs) == D * direct


@pytest.mark.parametrize("n", range(0, 4))
def test_o1_eigen_identity(n):
    r = o1_groundstate_check(n)
    assert r.ok, r.first_failure()


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_float_stochasticity(n):
    r = stochasticity_check(n, samples=50, seed=n)
    assert r.ok, r.first_failure()


def test_swapped_row_orientation_breaks_rtt(monkeypatch):
    import artifact.transfer as T

    original = T.row_operator

    def swapped(F, tau):
        return original(F, RowConfig(tuple("ne" if t == "nw" else "nw" for t in tau.tiles)))

    monkeypatch.setattr(T, "row_operator", swapped)
    assert not rtt_report(3, samples=3, seed=1).ok
