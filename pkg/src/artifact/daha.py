"""Basic representation, dual Cherednik operators and Macdonald polynomials.

The polynomial side uses the Hecke parameter k = t^{-1/2}:

    pi(T_i) f = -k f + (k z_i - k^{-1} z_{i+1}) / (z_{i+1} - z_i) * (s_i f - f),

so pi(T_i) satisfies (T + k)(T - k^{-1}) = 0 and T^{-1} = T - k^{-1} + k.
The rotation acts by pi(rho) f = f(z_2, ..., z_n, q^{-1} z_1).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .pattern import fully_nested
from .qkz import PolyVector, monomials, solve_cached
from .report import Report
from .ring import Field, PolyError, RationalField, Scalar, ZPoly, nullspace, q_param
from .tlrep import build_Qn, gamma, perm_act, reduced_word, rep, w_n, min_coset_reps, parabolic_I


class DahaError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Basic representation
# ---------------------------------------------------------------------------


def basic_T_apply(f: ZPoly, i: int, k: Scalar, inverse: bool = False) -> ZPoly:
    F, n = f.F, f.n
    diff = f.swap(i) - f
    try:
        quo = diff.divide_exact(ZPoly.linear(F, n, {i + 1: F.one(), i: -F.one()}))
    except PolyError as exc:  # cannot happen for polynomials; kept as a loud guard
        raise DahaError(f"divided difference failed: {exc}") from exc
    kinv = F.one() / k
    out = f.scale(-k) + ZPoly.linear(F, n, {i: k, i + 1: -kinv}) * quo
    if inverse:
        out = out + f.scale(k - kinv)
    return out


def basic_rho_apply(f: ZPoly, q: Scalar, inverse: bool = False) -> ZPoly:
    return f.rho_inv_shift(q) if inverse else f.rho_shift(q)


@dataclass(frozen=True)
class BasicRep:
    """pi^{k, q} with k = t^{-1/2} by default (orientation=-1) or t^{1/2}."""

    F: Field
    q: Scalar
    orientation: int = -1

    @property
    def k(self) -> Scalar:
        return self.F.s_pow(2 * self.orientation)

    def T(self, f: ZPoly, i: int, inverse: bool = False) -> ZPoly:
        return basic_T_apply(f, i, self.k, inverse)

    def rho(self, f: ZPoly, inverse: bool = False) -> ZPoly:
        return basic_rho_apply(f, self.q, inverse)

    def T_word(self, f: ZPoly, word: Sequence[int], inverse: bool = False) -> ZPoly:
        """T_{j1} ... T_{jr} f (rightmost first); with inverse, T_{j1}^{-1} ... T_{jr}^{-1} f."""
        for i in reversed(list(word)):
            f = self.T(f, i, inverse)
        return f

    def Ybar(self, f: ZPoly, j: int) -> ZPoly:
        """Ybar_j = T_j ... T_{n-1} rho^{-1} T_1^{-1} ... T_{j-1}^{-1}."""
        n = f.n
        for i in range(j - 1, 0, -1):
            f = self.T(f, i, inverse=True)
        f = self.rho(f, inverse=True)
        for i in range(n - 1, j - 1, -1):
            f = self.T(f, i)
        return f

    def Ybar_inv(self, f: ZPoly, j: int) -> ZPoly:
        n = f.n
        for i in range(j, n):
            f = self.T(f, i, inverse=True)
        f = self.rho(f)
        for i in range(1, j):
            f = self.T(f, i)
        return f


# ---------------------------------------------------------------------------
# Spectrum
# ---------------------------------------------------------------------------


def d_vector(lam: Sequence[int]) -> List[int]:
    n = len(lam)
    out = []
    for i in range(n):
        ties = sum(1 for j in range(i + 1, n) if lam[j] == lam[i])
        below = sum(1 for j in range(n) if lam[i] > lam[j])
        out.append(2 * ties + 2 * below + 1 - n)
    return out


def spectrum(F: Field, lam: Sequence[int], q: Optional[Scalar] = None) -> List[Scalar]:
    """s_{lam,i} = (-t^{-1/2})^{d_i} q^{lam_i}."""
    q = q_param(F) if q is None else q
    base = -F.s_pow(-2)
    return [base ** d * q ** l for d, l in zip(d_vector(lam), lam)]


def lambda_n(n: int) -> Tuple[int, ...]:
    """(2k-2, 2k-4, ..., 0, 2k-1, ..., 1) for n = 2k; the odd case drops 2k-1."""
    k = (n + 1) // 2
    evens = list(range(2 * k - 2, -1, -2))
    odds = list(range(n - 1 if n % 2 == 0 else 2 * k - 3, 0, -2))
    return tuple(evens + odds)


def w0_bar(n: int) -> Tuple[int, ...]:
    """(k, k-1, ..., 1, n, n-1, ..., k+1) with k = ceil(n/2)."""
    k = (n + 1) // 2
    return tuple(list(range(k, 0, -1)) + list(range(n, k, -1)))


def spectrum_identity(F: Field, n: int) -> Tuple[List[Scalar], List[Scalar]]:
    """Both sides of c_n^{-1} w0bar gamma = s_{lambda^(n)} at v = 1."""
    from .ring import c_twist

    cinv = F.one() / c_twist(F, n)
    lhs = [cinv * x for x in perm_act(w0_bar(n), gamma(F, n, twisted=False))]
    return lhs, spectrum(F, lambda_n(n))


# ---------------------------------------------------------------------------
# Macdonald polynomials by joint kernels
# ---------------------------------------------------------------------------


def _op_rows(B: BasicRep, mons, apply, target: Scalar):
    """Sparse rows of (op - target) on the span of ``mons``."""
    F = B.F
    idx = {m: k for k, m in enumerate(mons)}
    n = len(mons[0])
    rows: Dict[Tuple, Dict[int, Scalar]] = {}
    for k, m in enumerate(mons):
        img = apply(ZPoly(F, n, {m: F.one()}))
        img = img - ZPoly(F, n, {m: target})
        for e, c in img.terms.items():
            if e not in idx:
                raise DahaError(f"operator leaves the homogeneous component (monomial {e})")
            rows.setdefault(e, {})[k] = c
    return list(rows.values())


def joint_eigenspace(B: BasicRep, n: int, degree: int, spec: Sequence[Scalar]) -> List[ZPoly]:
    mons = monomials(n, degree)
    rows = []
    for j in range(1, n + 1):
        rows += _op_rows(B, mons, lambda f, j=j: B.Ybar(f, j), spec[j - 1])
    basis = nullspace(rows, len(mons), B.F)
    return [ZPoly(B.F, n, {m: c for m, c in zip(mons, vec) if not c.is_zero()}) for vec in basis]


def macdonald_E(F: Field, lam: Sequence[int], q: Optional[Scalar] = None) -> ZPoly:
    """Monic joint Ybar-eigenfunction with spectrum s_lam in degree |lam|."""
    q = q_param(F) if q is None else q
    B = BasicRep(F, q)
    n = len(lam)
    space = joint_eigenspace(B, n, sum(lam), spectrum(F, lam, q))
    if len(space) != 1:
        raise DahaError(f"joint eigenspace for lambda={tuple(lam)} has dimension {len(space)}")
    E = space[0]
    lead = E.coefficient(tuple(lam))
    if lead.is_zero():
        raise DahaError(f"E_{tuple(lam)} has no z^lambda term")
    return E.scale(F.one() / lead)


def B_apply(B: BasicRep, f: ZPoly, i: int) -> ZPoly:
    """B_i = T_i (Ybar_{i+1} Ybar_i^{-1} - 1) + t^{1/2} - t^{-1/2}."""
    F = B.F
    y = B.Ybar(B.Ybar_inv(f, i), i + 1)
    return B.T(y - f, i) + f.scale(F.s_pow(2) - F.s_pow(-2))


def B_relation_factor(F: Field, lam: Sequence[int], i: int, q: Scalar) -> Scalar:
    sp = spectrum(F, lam, q)
    r = sp[i] / sp[i - 1]
    t, ti = F.s_pow(4), F.s_pow(-4)
    return -F.s_pow(2) * (t * r - 1) * (ti * r - 1) / (r - 1)


def check_B_relation(F: Field, lam: Sequence[int], i: int, q: Scalar) -> bool:
    """pi(B_i) E_lam = factor * E_{s_i lam} for lam_i > lam_{i+1}."""
    if not lam[i - 1] > lam[i]:
        raise DahaError("B relation needs lam_i > lam_{i+1}")
    B = BasicRep(F, q)
    E = macdonald_E(F, lam, q)
    lam2 = list(lam)
    lam2[i - 1], lam2[i] = lam2[i], lam2[i - 1]
    E2 = macdonald_E(F, lam2, q)
    return B_apply(B, E, i) == E2.scale(B_relation_factor(F, lam, i, q))


# ---------------------------------------------------------------------------
# Wheel conditions
# ---------------------------------------------------------------------------


def neighbourhood_pairs(lam: Sequence[int]) -> List[Tuple[int, int]]:
    """Pairs (i, j) with rho(lam)_i - rho(lam)_j = 2 and lam_i - lam_j <= 1,
    or lam_i - lam_j = 2 with j < i."""
    d = d_vector(lam)
    out = []
    n = len(lam)
    for i in range(n):
        for j in range(n):
            if i == j or d[i] - d[j] != 4:
                continue
            diff = lam[i] - lam[j]
            if diff <= 1 or (diff == 2 and j < i):
                out.append((i + 1, j + 1))
    return out


def in_B23(lam: Sequence[int]) -> bool:
    return not neighbourhood_pairs(lam)


def wheel_points(s0: Fraction, n: int, count: int, seed: int, literal: bool = False) -> List[List[Fraction]]:
    """Rational points of Z^{(2,3)} at t = s0^4, q = t^{3/2}:
    z_{i_{a+1}} = z_{i_a} t^{-1} q^{r_a}, r_1 + r_2 <= 1, i_a < i_{a+1} when r_a = 0.

    The step t^{-1} agrees with the wheel condition on spectra
    (s_{i_{a+1}}^{-1} = s_{i_a}^{-1} t^{-1} q^{r_a}).  ``literal=True`` uses the
    step t instead, on which the polynomials E_lambda do not vanish.
    """
    if n < 3:
        return []
    rnd = random.Random(seed)
    t = s0 ** 4 if literal else s0 ** -4
    q = s0 ** 6
    out = []
    choices = [(0, 0), (1, 0), (0, 1)]
    while len(out) < count:
        idx = rnd.sample(range(1, n + 1), 3)
        r1, r2 = rnd.choice(choices)
        if (r1 == 0 and idx[0] > idx[1]) or (r2 == 0 and idx[1] > idx[2]):
            continue
        z = [Fraction(rnd.randint(-20, 20) or 1, rnd.randint(1, 9)) for _ in range(n)]
        z[idx[1] - 1] = z[idx[0] - 1] * t * q ** r1
        z[idx[2] - 1] = z[idx[1] - 1] * t * q ** r2
        out.append(z)
    return out


def wheel_check(E: ZPoly, count: int = 20, seed: int = 0, s0: Optional[Fraction] = None, literal: bool = False) -> Tuple[bool, Optional[List[Fraction]]]:
    """Evaluate E (symbolic or rational) at sampled wheel points; returns (ok, witness)."""
    F = E.F
    if isinstance(F, RationalField):
        s0 = F.s0
        Er = E
    else:
        s0 = s0 if s0 is not None else Fraction(random.Random(seed).randint(2, 9), random.Random(seed + 1).randint(2, 9))
        Er = E.specialize(RationalField(s0))
    R = Er.F
    for pt in wheel_points(s0, E.n, count, seed, literal):
        val = Er.evaluate([R.from_fraction(x) for x in pt])
        if not val.is_zero():
            return False, pt
    return True, None


# ---------------------------------------------------------------------------
# Cherednik-Matsuo map
# ---------------------------------------------------------------------------


def cm_map(F: Field, f: ZPoly, n: int, q: Optional[Scalar] = None) -> PolyVector:
    """sum over minimal coset representatives w of
    pi(T_{w^{-1}}^{-1} T_{w0bar}^{-1}) f (x) T_w I_{w_n} Q_n, at v = 1."""
    q = q_param(F) if q is None else q
    B = BasicRep(F, q)
    R = rep(F, n, twisted=False)
    ue = R.intertwiner_apply(w_n(n), build_Qn(F, n, twisted=False))
    base = B.T_word(f, reduced_word(w0_bar(n))[::-1], inverse=True)
    out: Dict = {}
    for w in min_coset_reps(n):
        word = reduced_word(w)
        # T_{w^{-1}}^{-1} = T_{j1}^{-1} ... T_{jr}^{-1} for w = s_{j1} ... s_{jr}
        poly = B.T_word(base, word, inverse=True)
        vw = R.T_perm_apply(w, ue)
        for L, c in vw.items():
            term = poly.scale(c)
            out[L] = out[L] + term if L in out else term
    return PolyVector(F, n, n, {L: p for L, p in out.items() if not p.is_zero()})


def cm_compare(F: Field, n: int, g: PolyVector, E: Optional[ZPoly] = None) -> Tuple[bool, Optional[Scalar]]:
    """Find kappa with kappa * CM(E) = g from the fully nested components and
    check the identity on every component."""
    E = macdonald_E(F, lambda_n(n)) if E is None else E
    cm = cm_map(F, E, n)
    top = fully_nested(n)
    a, b = g[top], cm[top]
    if b.is_zero():
        return False, None
    e = max(b.terms)
    kappa = a.coefficient(e) / b.terms[e]
    return cm.scale(kappa) == g, kappa


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


def macdonald_report(F: Field, n: int, wheel_count: int = 20, seed: int = 0, compare: bool = True) -> Report:
    """E_{lambda^(n)}: one-dimensional joint eigenspace, degree n(n-1)/2,
    parabolic symmetry, wheel vanishing, spectrum identity, lambda in
    B^(2,3) and (optionally) the comparison kappa CM(E) = g^(n)."""
    lam = lambda_n(n)
    q = q_param(F)
    B = BasicRep(F, q)
    out = Report()
    space = joint_eigenspace(B, n, sum(lam), spectrum(F, lam, q))
    out.add(f"eigenspace dim 1 n={n}", len(space) == 1, f"dimension {len(space)}")
    if len(space) != 1:
        return out
    E = space[0]
    lead = E.coefficient(lam)
    out.add(f"z^lambda coefficient n={n}", not lead.is_zero())
    if lead.is_zero():
        return out
    E = E.scale(F.one() / lead)
    d = n * (n - 1) // 2
    out.add(f"degree {d}", E.is_homogeneous(d) and E.total_degree() == d, f"degree {E.total_degree()}")
    for i in parabolic_I(n):
        out.add(f"pi(T{i}) E = t^1/2 E", B.T(E, i) == E.scale(F.s_pow(2)))
    ok, pt = wheel_check(E, wheel_count, seed)
    out.add(f"wheel vanishing ({wheel_count} points)", ok, f"nonzero at {pt}" if pt else "")
    lhs, rhs = spectrum_identity(F, n)
    out.add("spectrum identity", lhs == rhs)
    out.add("lambda in B(2,3)", in_B23(lam))
    if compare:
        ok, kappa = cm_compare(F, n, solve_cached(n, F), E)
        out.add("kappa CM(E) = g", ok, f"kappa = {kappa}")
    return out


def b_relation_report(F: Field, sizes: Sequence[int] = (2, 3), max_degree: int = 3, q: Optional[Scalar] = None) -> Report:
    """pi(B_i) E_lam = factor * E_{s_i lam} for every lam with lam_i > lam_{i+1}
    and |lam| <= max_degree.  Generic q by default: the free symbol v stands in for q."""
    from itertools import product

    if q is None:
        if F.kind != "symbolic":
            raise DahaError("generic q needs the symbolic field")
        q = F.v_pow(1)
    out = Report()
    for n in sizes:
        for lam in product(range(max_degree + 1), repeat=n):
            if not 0 < sum(lam) <= max_degree:
                continue
            for i in range(1, n):
                if lam[i - 1] > lam[i]:
                    out.add(f"B{i} E{lam}", check_B_relation(F, lam, i, q))
    return out
