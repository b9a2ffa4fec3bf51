from fractions import Fraction
from itertools import permutations

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from artifact.daha import (
    BasicRep,
    b_relation_report,
    check_B_relation,
    cm_compare,
    d_vector,
    in_B23,
    lambda_n,
    macdonald_E,
    macdonald_report,
    spectrum,
    spectrum_identity,
    w0_bar,
    wheel_check,
)
from artifact.qkz import solve_cached
from artifact.ring import SYMBOLIC, RationalField, ZPoly, q_param
from artifact.tlrep import min_coset_reps, perm_act

F = SYMBOLIC
S = F.s_pow(1)


def poly(n, terms):
    return ZPoly(F, n, {e: F.from_int(c) for e, c in terms.items()})


homogeneous3 = st.dictionaries(
    st.sampled_from([e for e in __import__("itertools").product(range(3), repeat=3) if sum(e) == 2]),
    st.integers(-4, 4),
    min_size=1,
    max_size=4,
)


# --- basic representation ----------------------------------------------------------


def test_T_on_symmetric_polynomial():
    B = BasicRep(F, q_param(F))
    f = poly(2, {(1, 0): 1, (0, 1): 1})
    # eigenvalue -k with k = t^{-1/2}
    assert B.T(f, 1) == f.scale(-F.s_pow(-2))


@settings(max_examples=20, deadline=None)
@given(homogeneous3, st.sampled_from([1, 2]))
def test_hecke_quadratic(terms, i):
    B = BasicRep(F, q_param(F))
    f = poly(3, terms)
    k = B.k
    g = B.T(f, i) + f.scale(k)
    assert B.T(g, i) - g.scale(F.one() / k) == ZPoly.zero(F, 3)
    assert B.T(B.T(f, i), i, inverse=True) == f


@settings(max_examples=20, deadline=None)
@given(homogeneous3)
def test_rho_inverse_and_Ybar_commute(terms):
    B = BasicRep(F, q_param(F))
    f = poly(3, terms)
    assert B.rho(B.rho(f), inverse=True) == f
    for i in range(1, 4):
        assert B.Ybar(B.Ybar_inv(f, i), i) == f
        for j in range(i + 1, 4):
            assert B.Ybar(B.Ybar(f, j), i) == B.Ybar(B.Ybar(f, i), j)


# --- spectrum ----------------------------------------------------------------------


def test_spectrum_lambda3():
    assert lambda_n(3) == (2, 0, 1)
    assert spectrum(F, (2, 0, 1)) == [F.s_pow(8), F.s_pow(4), F.s_pow(6)]


def test_spectrum_lambda4():
    assert lambda_n(4) == (2, 0, 3, 1)
    assert spectrum(F, (2, 0, 3, 1)) == [-F.s_pow(10), -F.s_pow(6), -F.s_pow(12), -F.s_pow(8)]


@pytest.mark.parametrize("n", range(1, 7))
def test_spectrum_zero(n):
    assert d_vector((0,) * n) == [2 * (n - i) + 1 - n for i in range(1, n + 1)]


@pytest.mark.parametrize("n", range(2, 7))
def test_spectrum_identity(n):
    lhs, rhs = spectrum_identity(F, n)
    assert lhs == rhs


def test_w0_bar():
    assert w0_bar(4) == (2, 1, 4, 3)
    assert w0_bar(5) == (3, 2, 1, 5, 4)


# --- E_lambda at generic parameters: an independent sympy oracle ------------------------


def sympy_Ybar(n, f, zs, k, q, j):
    def T(f, i, inverse=False):
        zi, zj = zs[i - 1], zs[i]
        sw = f.subs({zi: zj, zj: zi}, simultaneous=True)
        out = -k * f + (k * zi - zj / k) / (zj - zi) * (sw - f)
        if inverse:
            out = out + (k - 1 / k) * f
        return sympy.expand(sympy.cancel(out))

    def rho_inv(f):
        return f.subs({zs[0]: q * zs[-1], **{zs[m]: zs[m - 1] for m in range(1, n)}}, simultaneous=True)

    for i in range(j - 1, 0, -1):
        f = T(f, i, inverse=True)
    f = rho_inv(f)
    for i in range(n - 1, j - 1, -1):
        f = T(f, i)
    return sympy.expand(f)


def to_sympy_poly(E, zs, s, v):
    out = 0
    for e, c in E.terms.items():
        d = c.to_json()
        coeff = sum(cc * s**a * v**b for a, b, cc in d["num"]) / sum(cc * s**a * v**b for a, b, cc in d["den"])
        mono = 1
        for z, k in zip(zs, e):
            mono *= z**k
        out += coeff * mono
    return out


@pytest.mark.parametrize("lam", [(1, 0), (0, 1), (1, 0, 0), (0, 1, 0)])
def test_generic_E_is_joint_eigenfunction_by_sympy(lam):
    n = len(lam)
    s, v = sympy.symbols("s v")
    zs = sympy.symbols(f"z1:{n + 1}")
    qv = F.v_pow(1)  # v stands in for a generic q
    E = macdonald_E(F, lam, q=qv)
    Es = to_sympy_poly(E, zs, s, v)
    spec = spectrum(F, lam, qv)
    for j in range(1, n + 1):
        lhs = sympy_Ybar(n, Es, zs, s**-2, v, j)
        ev = to_sympy_poly(ZPoly.constant(F, n, spec[j - 1]), zs, s, v)
        assert sympy.simplify(lhs - ev * Es) == 0


def test_generic_degree_one_polynomials():
    qv = F.v_pow(1)
    z = lambda i: ZPoly.var(F, 2, i)  # noqa: E731
    assert macdonald_E(F, (0, 1), q=qv) == z(2)
    t = F.s_pow(4)
    c = qv * (t - F.one()) / (t - qv)
    assert macdonald_E(F, (1, 0), q=qv) == z(1) + z(2).scale(c)


def test_B_relation_n2():
    assert check_B_relation(F, (1, 0), 1, F.v_pow(1))


# --- specialized E and wheel ---------------------------------------------------------


def test_E3_properties():
    E = macdonald_E(F, lambda_n(3))
    assert E.is_homogeneous(3)
    B = BasicRep(F, q_param(F))
    assert B.T(E, 1) == E.scale(F.s_pow(2))
    ok, witness = wheel_check(E, count=20, seed=0)
    assert ok, witness


def test_wheel_rejects_non_ideal_polynomial():
    ok, witness = wheel_check(ZPoly.var(F, 3, 1), count=20, seed=0)
    assert not ok and witness is not None


def test_literal_wheel_step_does_not_vanish():
    E = macdonald_E(F, lambda_n(3))
    ok, _ = wheel_check(E, count=20, seed=0, literal=True)
    assert not ok


@pytest.mark.parametrize("n", range(2, 7))
def test_lambda_in_B23(n):
    assert in_B23(lambda_n(n))


@pytest.mark.parametrize("n", range(2, 6))
def test_orbit_intersection(n):
    lam = lambda_n(n)
    hits = {m for m in set(permutations(lam)) if in_B23(m)}
    assert hits == {tuple(perm_act(w, lam)) for w in min_coset_reps(n)}


@pytest.mark.parametrize("n", [2, 3])
def test_macdonald_report_symbolic(n):
    r = macdonald_report(F, n)
    assert r.ok, r.first_failure()


def test_cm_compare_n2_n3():
    for n in (2, 3):
        ok, kappa = cm_compare(F, n, solve_cached(n, F))
        assert ok and kappa is not None and not kappa.is_zero()


def test_b_relation_small():
    r = b_relation_report(F, sizes=(2,), max_degree=2)
    assert r.ok, r.first_failure()


def test_rational_mode_E():
    R = RationalField(Fraction(3, 2))
    E = macdonald_E(R, lambda_n(3))
    assert E == macdonald_E(F, lambda_n(3)).specialize(R)
