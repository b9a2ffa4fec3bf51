"""Exact scalars and multivariate polynomials.

Three scalar fields are provided:

* ``SymbolicField``: reduced fractions of integer Laurent polynomials in
  ``s = t^{1/4}`` and ``v``.
* ``RationalField(s0)``: the specialization ``s = s0`` (a rational number),
  ``v = 1``.
* ``CyclotomicField``: the specialization ``s = zeta = exp(i pi / 3)``,
  ``v = 1``; elements are ``a + b*zeta`` with ``zeta^2 = zeta - 1``.

Every exponent that occurs is a multiple of 1/4, so powers of ``t`` are always
stored as integer powers of ``s``.

``ZPoly`` is a sparse polynomial in ``z_1..z_n`` whose coefficients are
scalars of one field.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import flint

_CTX = flint.fmpz_mpoly_ctx.get(("s", "v"), "deglex")
_ONE_POLY = _CTX.from_dict({(0, 0): 1})
_ZERO_POLY = _CTX.from_dict({})


class ScalarError(ArithmeticError):
    """Raised on mode mismatch, division by zero or bad specialization."""


# ---------------------------------------------------------------------------
# Fields
# ---------------------------------------------------------------------------


class Field:
    kind = "abstract"

    def zero(self) -> "Scalar":
        return self.from_int(0)

    def one(self) -> "Scalar":
        return self.from_int(1)

    def __repr__(self) -> str:
        return f"<{self.name}>"

    # ``t^{k/4}``
    def tq(self, k: int) -> "Scalar":
        return self.s_pow(k)

    def coerce(self, x) -> "Scalar":
        if isinstance(x, Scalar):
            if x.F != self:
                raise ScalarError(f"mode mismatch: {x.F.name} vs {self.name}")
            return x
        if isinstance(x, int):
            return self.from_int(x)
        if isinstance(x, Fraction):
            return self.from_fraction(x)
        raise TypeError(f"cannot coerce {type(x).__name__} into {self.name}")


class SymbolicField(Field):
    kind = "symbolic"
    name = "symbolic"

    def __eq__(self, other):
        return isinstance(other, SymbolicField)

    def __hash__(self):
        return hash("symbolic")

    def from_int(self, k: int) -> "Scalar":
        if k == 0:
            return SymScalar(self, _ZERO_POLY, _ONE_POLY, 0, 0)
        return SymScalar(self, _CTX.from_dict({(0, 0): k}), _ONE_POLY, 0, 0)

    def from_fraction(self, x: Fraction) -> "Scalar":
        return self.from_int(x.numerator) / self.from_int(x.denominator)

    def s_pow(self, k: int) -> "Scalar":
        return SymScalar(self, _ONE_POLY, _ONE_POLY, k, 0)

    def v_pow(self, k: int) -> "Scalar":
        return SymScalar(self, _ONE_POLY, _ONE_POLY, 0, k)

    def monomial(self, c: int, ks: int, kv: int) -> "Scalar":
        if c == 0:
            return self.zero()
        return SymScalar(self, _CTX.from_dict({(0, 0): c}), _ONE_POLY, ks, kv)

    def from_laurent(self, terms: Iterable[Tuple[int, int, int]]) -> "Scalar":
        """Build ``sum c s^ks v^kv`` from ``(ks, kv, c)`` triples."""
        terms = [t for t in terms if t[2] != 0]
        if not terms:
            return self.zero()
        ms = min(t[0] for t in terms)
        mv = min(t[1] for t in terms)
        d: Dict[Tuple[int, int], int] = {}
        for ks, kv, c in terms:
            key = (ks - ms, kv - mv)
            d[key] = d.get(key, 0) + c
        return _sym_normalize(self, _CTX.from_dict(d), _ONE_POLY, ms, mv)


class RationalField(Field):
    kind = "rational"

    def __init__(self, s0):
        s0 = Fraction(s0)
        if s0 == 0:
            raise ScalarError("s0 must be nonzero")
        self.s0 = s0
        self._s0 = flint.fmpq(s0.numerator, s0.denominator)
        self.name = f"rational:{s0}"

    def __eq__(self, other):
        return isinstance(other, RationalField) and other.s0 == self.s0

    def __hash__(self):
        return hash(("rational", self.s0))

    def from_int(self, k: int) -> "Scalar":
        return RatScalar(self, flint.fmpq(k))

    def from_fraction(self, x: Fraction) -> "Scalar":
        return RatScalar(self, flint.fmpq(x.numerator, x.denominator))

    def s_pow(self, k: int) -> "Scalar":
        return RatScalar(self, self._s0 ** k)

    def v_pow(self, k: int) -> "Scalar":
        return self.one()


class CyclotomicField(Field):
    kind = "cyclotomic"
    name = "cyclotomic"

    def __eq__(self, other):
        return isinstance(other, CyclotomicField)

    def __hash__(self):
        return hash("cyclotomic")

    def from_int(self, k: int) -> "Scalar":
        return CycScalar(self, flint.fmpq(k), flint.fmpq(0))

    def from_fraction(self, x: Fraction) -> "Scalar":
        return CycScalar(self, flint.fmpq(x.numerator, x.denominator), flint.fmpq(0))

    def zeta(self) -> "Scalar":
        return CycScalar(self, flint.fmpq(0), flint.fmpq(1))

    def s_pow(self, k: int) -> "Scalar":
        a, b = _ZETA_POWERS[k % 6]
        return CycScalar(self, flint.fmpq(a), flint.fmpq(b))

    def v_pow(self, k: int) -> "Scalar":
        return self.one()

    def to_complex(self, x: "CycScalar") -> complex:
        z = complex(0.5, 3 ** 0.5 / 2)
        return float(Fraction(int(x.a.p), int(x.a.q))) + float(Fraction(int(x.b.p), int(x.b.q))) * z


# zeta^k = a + b zeta, k = 0..5 (zeta^2 = zeta - 1)
_ZETA_POWERS = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)]

SYMBOLIC = SymbolicField()
CYCLOTOMIC = CyclotomicField()


def field_from_spec(spec: str) -> Field:
    """Parse ``symbolic``, ``cyclotomic`` or ``rational:p/q``."""
    if spec == "symbolic":
        return SYMBOLIC
    if spec == "cyclotomic":
        return CYCLOTOMIC
    if spec.startswith("rational:"):
        return RationalField(Fraction(spec.split(":", 1)[1]))
    if spec == "rational":
        return RationalField(2)
    raise ValueError(f"unknown scalar mode {spec!r}")


# ---------------------------------------------------------------------------
# Scalars
# ---------------------------------------------------------------------------


class Scalar:
    """Abstract exact field element; concrete subclasses per mode."""

    __slots__ = ("F",)

    def _c(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.F is not self.F and other.F != self.F:
                raise ScalarError(f"mode mismatch: {self.F.name} vs {other.F.name}")
            return other
        return self.F.coerce(other)

    def __radd__(self, other):
        return self._c(other) + self

    def __rsub__(self, other):
        return self._c(other) - self

    def __rmul__(self, other):
        return self._c(other) * self

    def __rtruediv__(self, other):
        return self._c(other) / self

    def __pow__(self, k: int) -> "Scalar":
        if k < 0:
            return (self.F.one() / self) ** (-k)
        result = self.F.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __ne__(self, other):
        return not self == other

    def __repr__(self) -> str:
        return f"Scalar[{self.F.name}]({self})"


def _strip_monomial(N):
    """Return (N', ms, mv) with N = s^ms v^mv N' and N' not divisible by s or v."""
    monoms = N.monoms()
    ms = min(m[0] for m in monoms)
    mv = min(m[1] for m in monoms)
    if ms == 0 and mv == 0:
        return N, 0, 0
    return N / _CTX.from_dict({(ms, mv): 1}), ms, mv


def _sym_normalize(F, N, D, a, b, reduce=True):
    if N.is_zero():
        return SymScalar(F, _ZERO_POLY, _ONE_POLY, 0, 0)
    if D.is_zero():
        raise ScalarError("division by zero")
    N, ms, mv = _strip_monomial(N)
    a += ms
    b += mv
    if not D.is_one():
        D, ds, dv = _strip_monomial(D)
        a -= ds
        b -= dv
        if reduce:
            g = N.gcd(D)
            if not g.is_one():
                N = N / g
                D = D / g
        if D.leading_coefficient() < 0:
            N = -N
            D = -D
    return SymScalar(F, N, D, a, b)


class SymScalar(Scalar):
    """Value ``s^a v^b N/D`` with N, D coprime, free of monomial content."""

    __slots__ = ("N", "D", "a", "b")

    def __init__(self, F, N, D, a, b):
        self.F = F
        self.N = N
        self.D = D
        self.a = int(a)
        self.b = int(b)

    def is_zero(self) -> bool:
        return self.N.is_zero()

    def __bool__(self):
        return not self.N.is_zero()

    def __neg__(self):
        return SymScalar(self.F, -self.N, self.D, self.a, self.b)

    def _shifted(self, da, db):
        if da == 0 and db == 0:
            return self.N
        return self.N * _CTX.from_dict({(da, db): 1})

    def __add__(self, other):
        if not isinstance(other, SymScalar):
            other = self._c(other)
        if self.N.is_zero():
            return other
        if other.N.is_zero():
            return self
        a = min(self.a, other.a)
        b = min(self.b, other.b)
        N1 = self._shifted(self.a - a, self.b - b)
        N2 = other._shifted(other.a - a, other.b - b)
        if self.D.is_one() and other.D.is_one():
            N = N1 + N2
            if N.is_zero():
                return self.F.zero()
            N, ms, mv = _strip_monomial(N)
            return SymScalar(self.F, N, _ONE_POLY, a + ms, b + mv)
        if self.D == other.D:
            return _sym_normalize(self.F, N1 + N2, self.D, a, b)
        return _sym_normalize(self.F, N1 * other.D + N2 * self.D, self.D * other.D, a, b)

    def __sub__(self, other):
        if not isinstance(other, SymScalar):
            other = self._c(other)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, SymScalar):
            other = self._c(other)
        if self.N.is_zero() or other.N.is_zero():
            return self.F.zero()
        if self.D.is_one() and other.D.is_one():
            return SymScalar(self.F, self.N * other.N, _ONE_POLY, self.a + other.a, self.b + other.b)
        N1, D1, N2, D2 = self.N, self.D, other.N, other.D
        if not D2.is_one():
            g = N1.gcd(D2)
            if not g.is_one():
                N1, D2 = N1 / g, D2 / g
        if not D1.is_one():
            g = N2.gcd(D1)
            if not g.is_one():
                N2, D1 = N2 / g, D1 / g
        N = N1 * N2
        D = D1 * D2
        if D.leading_coefficient() < 0:
            N, D = -N, -D
        return SymScalar(self.F, N, D, self.a + other.a, self.b + other.b)

    def inverse(self):
        if self.N.is_zero():
            raise ScalarError("division by zero")
        N, D = self.D, self.N
        if D.leading_coefficient() < 0:
            N, D = -N, -D
        return SymScalar(self.F, N, D, -self.a, -self.b)

    def __truediv__(self, other):
        if not isinstance(other, SymScalar):
            other = self._c(other)
        return self * other.inverse()

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.F.from_int(other)
        if not isinstance(other, SymScalar):
            return NotImplemented
        return (
            self.a == other.a
            and self.b == other.b
            and self.N == other.N
            and self.D == other.D
        )

    def __hash__(self):
        return hash((self.a, self.b, str(self.N), str(self.D)))

    def _terms(self, P, a, b):
        return sorted(
            ([int(e[0]) + a, int(e[1]) + b, int(c)] for e, c in P.terms()),
            key=lambda t: (t[0], t[1]),
        )

    def to_json(self):
        if self.N.is_zero():
            return {"num": [], "den": [[0, 0, 1]]}
        return {"num": self._terms(self.N, self.a, self.b), "den": self._terms(self.D, 0, 0)}

    def __str__(self):
        def fmt(P, a, b):
            parts = []
            for ks, kv, c in reversed(self._terms(P, a, b)):
                mono = []
                if ks:
                    mono.append("s" if ks == 1 else f"s^{ks}")
                if kv:
                    mono.append("v" if kv == 1 else f"v^{kv}")
                if not mono:
                    parts.append(str(c))
                elif c == 1:
                    parts.append("*".join(mono))
                elif c == -1:
                    parts.append("-" + "*".join(mono))
                else:
                    parts.append(f"{c}*" + "*".join(mono))
            return " + ".join(parts).replace("+ -", "- ") or "0"

        num = fmt(self.N, self.a, self.b)
        if self.D.is_one():
            return num
        return f"({num})/({fmt(self.D, 0, 0)})"

    def is_laurent(self) -> bool:
        return self.D.is_one()

    def specialize(self, target: Field) -> Scalar:
        """Ring homomorphism s -> s0 or zeta, v -> 1."""
        if isinstance(target, SymbolicField):
            return self
        num = _eval_poly(self.N, target)
        den = _eval_poly(self.D, target)
        if den.is_zero():
            raise ScalarError("denominator vanishes under specialization")
        return num / den * target.s_pow(self.a)

    def subs_s_inverse(self) -> Scalar:
        """The field automorphism s -> 1/s (v fixed)."""
        F = self.F
        num = F.from_laurent((-e[0], e[1], int(c)) for e, c in self.N.terms())
        den = F.from_laurent((-e[0], e[1], int(c)) for e, c in self.D.terms())
        return num / den * F.s_pow(-self.a) * F.v_pow(self.b)

    def subs_v(self, k: int) -> Scalar:
        """Substitute ``v -> v^k`` (k = +-1)."""
        F = self.F
        num = F.from_laurent((e[0], k * e[1], int(c)) for e, c in self.N.terms())
        den = F.from_laurent((e[0], k * e[1], int(c)) for e, c in self.D.terms())
        return num / den * F.s_pow(self.a) * F.v_pow(k * self.b)


def _eval_poly(P, target: Field) -> Scalar:
    acc = target.zero()
    if isinstance(target, CyclotomicField):
        a = [0, 0, 0, 0, 0, 0]
        for e, c in P.terms():
            a[int(e[0]) % 6] += int(c)
        for k in range(6):
            if a[k]:
                acc = acc + target.s_pow(k) * a[k]
        return acc
    s0 = target._s0
    total = flint.fmpq(0)
    for e, c in P.terms():
        total += s0 ** int(e[0]) * int(c)
    return RatScalar(target, total)


class RatScalar(Scalar):
    __slots__ = ("x",)

    def __init__(self, F, x):
        self.F = F
        self.x = x

    def is_zero(self):
        return self.x == 0

    def __bool__(self):
        return self.x != 0

    def __neg__(self):
        return RatScalar(self.F, -self.x)

    def __add__(self, other):
        if not isinstance(other, RatScalar):
            other = self._c(other)
        return RatScalar(self.F, self.x + other.x)

    def __sub__(self, other):
        if not isinstance(other, RatScalar):
            other = self._c(other)
        return RatScalar(self.F, self.x - other.x)

    def __mul__(self, other):
        if not isinstance(other, RatScalar):
            other = self._c(other)
        return RatScalar(self.F, self.x * other.x)

    def inverse(self):
        if self.x == 0:
            raise ScalarError("division by zero")
        return RatScalar(self.F, 1 / self.x)

    def __truediv__(self, other):
        if not isinstance(other, RatScalar):
            other = self._c(other)
        if other.x == 0:
            raise ScalarError("division by zero")
        return RatScalar(self.F, self.x / other.x)

    def __eq__(self, other):
        if isinstance(other, int):
            return self.x == other
        if not isinstance(other, RatScalar):
            return NotImplemented
        return self.x == other.x

    def __hash__(self):
        return hash(self.x)

    def to_fraction(self) -> Fraction:
        return Fraction(int(self.x.p), int(self.x.q))

    def to_json(self):
        return str(self.x) if self.x.q != 1 else f"{self.x.p}/1"

    def __str__(self):
        return str(self.x)

    def specialize(self, target):
        if target == self.F:
            return self
        raise ScalarError("a rational scalar cannot be re-specialized")


class CycScalar(Scalar):
    __slots__ = ("a", "b")

    def __init__(self, F, a, b):
        self.F = F
        self.a = a
        self.b = b

    def is_zero(self):
        return self.a == 0 and self.b == 0

    def __bool__(self):
        return not self.is_zero()

    def __neg__(self):
        return CycScalar(self.F, -self.a, -self.b)

    def __add__(self, other):
        if not isinstance(other, CycScalar):
            other = self._c(other)
        return CycScalar(self.F, self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        if not isinstance(other, CycScalar):
            other = self._c(other)
        return CycScalar(self.F, self.a - other.a, self.b - other.b)

    def __mul__(self, other):
        if not isinstance(other, CycScalar):
            other = self._c(other)
        a, b, c, d = self.a, self.b, other.a, other.b
        bd = b * d
        return CycScalar(self.F, a * c - bd, a * d + b * c + bd)

    def norm(self):
        return self.a * self.a + self.a * self.b + self.b * self.b

    def inverse(self):
        nrm = self.norm()
        if nrm == 0:
            raise ScalarError("division by zero")
        # conjugate of zeta is 1 - zeta
        return CycScalar(self.F, (self.a + self.b) / nrm, -self.b / nrm)

    def __truediv__(self, other):
        if not isinstance(other, CycScalar):
            other = self._c(other)
        return self * other.inverse()

    def __eq__(self, other):
        if isinstance(other, int):
            return self.a == other and self.b == 0
        if not isinstance(other, CycScalar):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def to_json(self):
        return {"a": _qstr(self.a), "b": _qstr(self.b)}

    def __str__(self):
        return f"{self.a} + {self.b}*zeta"

    def to_complex(self) -> complex:
        return self.F.to_complex(self)

    def specialize(self, target):
        if target == self.F:
            return self
        raise ScalarError("a cyclotomic scalar cannot be re-specialized")


def _qstr(x) -> str:
    return f"{x.p}/{x.q}"


def scalar_from_json(F: Field, data) -> Scalar:
    if isinstance(F, SymbolicField):
        num = F.from_laurent(tuple(t) for t in data["num"])
        den = F.from_laurent(tuple(t) for t in data["den"])
        return num / den
    if isinstance(F, RationalField):
        return F.from_fraction(Fraction(data))
    a = Fraction(data["a"])
    b = Fraction(data["b"])
    return F.from_fraction(a) + F.from_fraction(b) * F.zeta()


def scalar_arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    """Exact field arithmetic with an explicit operator symbol."""
    if a.F != b.F:
        raise ScalarError(f"mode mismatch: {a.F.name} vs {b.F.name}")
    if op == "+":
        return a + b
    if op in ("-", "−"):
        return a - b
    if op in ("*", "×"):
        return a * b
    if op in ("/", "÷"):
        return a / b
    raise ValueError(f"unknown operator {op!r}")


# ---------------------------------------------------------------------------
# Derived constants
# ---------------------------------------------------------------------------


def t_half(F: Field) -> Scalar:
    return F.s_pow(2)


def q_param(F: Field) -> Scalar:
    """q = t^{3/2} = s^6."""
    return F.s_pow(6)


def delta(F: Field) -> Scalar:
    """Contractible loop weight -t^{1/2} - t^{-1/2}."""
    return -(F.s_pow(2) + F.s_pow(-2))


def u_weight(F: Field) -> Scalar:
    """Puncture loop weight t^{1/4} v + t^{-1/4} v^{-1}."""
    return F.s_pow(1) * F.v_pow(1) + F.s_pow(-1) * F.v_pow(-1)


def c_twist(F: Field, n: int) -> Scalar:
    """c_n = (-t^{-3/4})^{n-1}; c_0 = t^{1/4} + t^{-1/4}."""
    if n == 0:
        return F.s_pow(1) + F.s_pow(-1)
    return (-F.s_pow(-3)) ** (n - 1)


# ---------------------------------------------------------------------------
# Polynomials in z
# ---------------------------------------------------------------------------

Exp = Tuple[int, ...]


class PolyError(ArithmeticError):
    pass


class ZPoly:
    """Sparse polynomial in ``nvars`` variables over one scalar field."""

    __slots__ = ("F", "n", "terms")

    def __init__(self, F: Field, n: int, terms: Optional[Dict[Exp, Scalar]] = None, _clean=False):
        self.F = F
        self.n = n
        if terms is None:
            self.terms = {}
        elif _clean:
            self.terms = terms
        else:
            self.terms = {e: c for e, c in terms.items() if not c.is_zero()}

    # constructors -----------------------------------------------------
    @classmethod
    def zero(cls, F, n):
        return cls(F, n, {}, _clean=True)

    @classmethod
    def constant(cls, F, n, c):
        c = F.coerce(c)
        if c.is_zero():
            return cls.zero(F, n)
        return cls(F, n, {(0,) * n: c}, _clean=True)

    @classmethod
    def var(cls, F, n, i, coeff=None):
        """The variable z_{i} (1-based), optionally scaled."""
        e = [0] * n
        e[i - 1] = 1
        c = F.one() if coeff is None else F.coerce(coeff)
        return cls(F, n, {tuple(e): c})

    @classmethod
    def linear(cls, F, n, coeffs: Dict[int, Scalar]):
        """sum_i coeffs[i] z_i with 1-based indices."""
        terms = {}
        for i, c in coeffs.items():
            e = [0] * n
            e[i - 1] = 1
            terms[tuple(e)] = F.coerce(c)
        return cls(F, n, terms)

    # basic queries ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def copy(self) -> "ZPoly":
        return ZPoly(self.F, self.n, dict(self.terms), _clean=True)

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degrees(self) -> Tuple[int, ...]:
        if not self.terms:
            return (0,) * self.n
        return tuple(max(e[i] for e in self.terms) for i in range(self.n))

    def is_homogeneous(self, degree: Optional[int] = None) -> bool:
        degs = {sum(e) for e in self.terms}
        if not degs:
            return True
        if len(degs) != 1:
            return False
        return degree is None or degs == {degree}

    def coefficient(self, e: Exp) -> Scalar:
        return self.terms.get(tuple(e), self.F.zero())

    def _check(self, other: "ZPoly"):
        if self.n != other.n:
            raise PolyError(f"variable count mismatch {self.n} vs {other.n}")
        if self.F != other.F:
            raise ScalarError(f"mode mismatch: {self.F.name} vs {other.F.name}")

    # arithmetic ---------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, ZPoly):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __neg__(self):
        return ZPoly(self.F, self.n, {e: -c for e, c in self.terms.items()}, _clean=True)

    def __add__(self, other: "ZPoly") -> "ZPoly":
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            if e in out:
                r = out[e] + c
                if r.is_zero():
                    del out[e]
                else:
                    out[e] = r
            else:
                out[e] = c
        return ZPoly(self.F, self.n, out, _clean=True)

    def __sub__(self, other: "ZPoly") -> "ZPoly":
        return self + (-other)

    def add_scaled(self, other: "ZPoly", c: Scalar) -> "ZPoly":
        """self + c * other."""
        if c.is_zero():
            return self
        self._check(other)
        out = dict(self.terms)
        for e, d in other.terms.items():
            r = d * c
            if e in out:
                r = out[e] + r
                if r.is_zero():
                    del out[e]
                else:
                    out[e] = r
            else:
                out[e] = r
        return ZPoly(self.F, self.n, out, _clean=True)

    def scale(self, c) -> "ZPoly":
        c = self.F.coerce(c)
        if c.is_zero():
            return ZPoly.zero(self.F, self.n)
        return ZPoly(self.F, self.n, {e: d * c for e, d in self.terms.items()}, _clean=True)

    def __mul__(self, other) -> "ZPoly":
        if not isinstance(other, ZPoly):
            return self.scale(other)
        self._check(other)
        if len(self.terms) < len(other.terms):
            a, b = self, other
        else:
            a, b = other, self
        out: Dict[Exp, Scalar] = {}
        for ea, ca in a.terms.items():
            for eb, cb in b.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                r = ca * cb
                if e in out:
                    out[e] = out[e] + r
                else:
                    out[e] = r
        return ZPoly(self.F, self.n, out)

    __rmul__ = scale

    def __pow__(self, k: int) -> "ZPoly":
        result = ZPoly.constant(self.F, self.n, 1)
        for _ in range(k):
            result = result * self
        return result

    # substitutions ------------------------------------------------------
    def permute(self, perm: Sequence[int]) -> "ZPoly":
        """Return p(z_{perm[0]}, ..., z_{perm[n-1]}) with 1-based perm."""
        n = self.n
        out = {}
        for e, c in self.terms.items():
            new = [0] * n
            for k in range(n):
                new[perm[k] - 1] += e[k]
            out[tuple(new)] = c
        return ZPoly(self.F, n, out, _clean=True)

    def swap(self, i: int) -> "ZPoly":
        """Exchange z_i and z_{i+1} (1-based)."""
        out = {}
        for e, c in self.terms.items():
            e = list(e)
            e[i - 1], e[i] = e[i], e[i - 1]
            out[tuple(e)] = c
        return ZPoly(self.F, self.n, out, _clean=True)

    def rho_shift(self, q: Scalar) -> "ZPoly":
        """f(z) -> f(z_2, ..., z_n, q^{-1} z_1)."""
        qi = self.F.one() / q
        out = {}
        cache = {}
        for e, c in self.terms.items():
            k = e[-1]
            if k not in cache:
                cache[k] = qi ** k
            out[(e[-1],) + e[:-1]] = c * cache[k]
        return ZPoly(self.F, self.n, out, _clean=True)

    def rho_inv_shift(self, q: Scalar) -> "ZPoly":
        """f(z) -> f(q z_n, z_1, ..., z_{n-1})."""
        out = {}
        cache = {}
        for e, c in self.terms.items():
            k = e[0]
            if k not in cache:
                cache[k] = q ** k
            out[e[1:] + (e[0],)] = c * cache[k]
        return ZPoly(self.F, self.n, out, _clean=True)

    def scale_vars(self, factors: Sequence[Scalar]) -> "ZPoly":
        """f(z) -> f(a_1 z_1, ..., a_n z_n)."""
        out = {}
        for e, c in self.terms.items():
            m = c
            for k, a in zip(e, factors):
                if k:
                    m = m * a ** k
            out[e] = m
        return ZPoly(self.F, self.n, out)

    def set_last_zero(self) -> "ZPoly":
        """Kill monomials involving z_n and drop that variable."""
        out = {e[:-1]: c for e, c in self.terms.items() if e[-1] == 0}
        return ZPoly(self.F, self.n - 1, out, _clean=True)

    def set_var_zero(self, i: int) -> "ZPoly":
        out = {e[: i - 1] + e[i:]: c for e, c in self.terms.items() if e[i - 1] == 0}
        return ZPoly(self.F, self.n - 1, out, _clean=True)

    def invert_and_clear(self, m: int) -> "ZPoly":
        """(z_1 ... z_n)^m p(z_1^{-1}, ..., z_n^{-1})."""
        out = {}
        for e, c in self.terms.items():
            if any(k > m for k in e):
                raise PolyError(f"exponent {e} exceeds bound {m} in invert-and-clear")
            out[tuple(m - k for k in e)] = c
        return ZPoly(self.F, self.n, out, _clean=True)

    def add_variable(self) -> "ZPoly":
        """Embed into n+1 variables (new last variable unused)."""
        return ZPoly(self.F, self.n + 1, {e + (0,): c for e, c in self.terms.items()}, _clean=True)

    def map_coefficients(self, fn, F: Optional[Field] = None) -> "ZPoly":
        F = F or self.F
        return ZPoly(F, self.n, {e: fn(c) for e, c in self.terms.items()})

    def specialize(self, target: Field) -> "ZPoly":
        return self.map_coefficients(lambda c: c.specialize(target), target)

    def evaluate(self, point: Sequence[Scalar]) -> Scalar:
        F = self.F
        pw = [dict() for _ in range(self.n)]
        acc = F.zero()
        for e, c in self.terms.items():
            m = c
            for i, k in enumerate(e):
                if k:
                    p = pw[i].get(k)
                    if p is None:
                        p = point[i] ** k
                        pw[i][k] = p
                    m = m * p
            acc = acc + m
        return acc

    def partial_evaluate(self, values: Dict[int, Scalar]) -> "ZPoly":
        """Substitute z_i = values[i] (1-based) keeping the variable slots (exponent 0)."""
        out: Dict[Exp, Scalar] = {}
        for e, c in self.terms.items():
            m = c
            e2 = list(e)
            for i, val in values.items():
                k = e[i - 1]
                if k:
                    m = m * val ** k
                    e2[i - 1] = 0
            e2 = tuple(e2)
            out[e2] = out[e2] + m if e2 in out else m
        return ZPoly(self.F, self.n, out)

    # division -----------------------------------------------------------
    def divide_exact(self, d: "ZPoly") -> "ZPoly":
        """Exact quotient; raises PolyError when d does not divide self."""
        self._check(d)
        if d.is_zero():
            raise PolyError("division by the zero polynomial")
        if self.is_zero():
            return ZPoly.zero(self.F, self.n)
        lead = max(d.terms)
        lc_inv = self.F.one() / d.terms[lead]
        rest = [(e, c) for e, c in d.terms.items() if e != lead]
        rem = dict(self.terms)
        heap = [tuple(-k for k in e) for e in rem]
        heapq.heapify(heap)
        quo: Dict[Exp, Scalar] = {}
        while heap:
            e = tuple(-k for k in heapq.heappop(heap))
            c = rem.pop(e, None)
            if c is None or c.is_zero():
                continue
            m = tuple(x - y for x, y in zip(e, lead))
            if any(k < 0 for k in m):
                raise PolyError(f"inexact division: remainder term at exponent {e}")
            qc = c * lc_inv
            quo[m] = qc
            for et, ct in rest:
                k = tuple(x + y for x, y in zip(m, et))
                if k in rem:
                    rem[k] = rem[k] - qc * ct
                else:
                    rem[k] = -(qc * ct)
                    heapq.heappush(heap, tuple(-x for x in k))
        return ZPoly(self.F, self.n, quo, _clean=True)

    # output -------------------------------------------------------------
    def to_json(self):
        return [[list(e), self.terms[e].to_json()] for e in sorted(self.terms)]

    @classmethod
    def from_json(cls, F: Field, n: int, data) -> "ZPoly":
        return cls(F, n, {tuple(e): scalar_from_json(F, c) for e, c in data})

    def __repr__(self):
        if not self.terms:
            return "ZPoly(0)"
        parts = []
        for e in sorted(self.terms, reverse=True)[:6]:
            mono = "*".join(f"z{i+1}^{k}" if k > 1 else f"z{i+1}" for i, k in enumerate(e) if k)
            parts.append(f"({self.terms[e]})" + (f"*{mono}" if mono else ""))
        more = " + ..." if len(self.terms) > 6 else ""
        return "ZPoly(" + " + ".join(parts) + more + ")"


def poly_substitute(p: ZPoly, action: str, arg=None) -> ZPoly:
    """Dispatch for the named substitutions: swap, rho-shift, set-last-zero,
    invert-and-clear."""
    if action == "swap":
        return p.swap(arg)
    if action == "rho-shift":
        return p.rho_shift(arg if arg is not None else q_param(p.F))
    if action == "set-last-zero":
        return p.set_last_zero()
    if action == "invert-and-clear":
        return p.invert_and_clear(arg)
    raise ValueError(f"unknown action {action!r}")


def poly_divide_exact(p: ZPoly, d: ZPoly) -> ZPoly:
    return p.divide_exact(d)


def nested_product(F: Field, n: int, sign: int = 1) -> ZPoly:
    """prod_{i<j} (t^{1/2} z_j - t^{-1/2} z_i); with sign=-1 the roles of
    z_i and z_j are exchanged: prod_{i<j} (t^{1/2} z_i - t^{-1/2} z_j)."""
    th, thi = F.s_pow(2), F.s_pow(-2)
    P = ZPoly.constant(F, n, 1)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if sign == 1:
                P = P * ZPoly.linear(F, n, {j: th, i: -thi})
            else:
                P = P * ZPoly.linear(F, n, {i: th, j: -thi})
    return P


# ---------------------------------------------------------------------------
# Exact linear algebra
# ---------------------------------------------------------------------------


def nullspace(rows: List[Dict[int, Scalar]], ncols: int, F: Field) -> List[List[Scalar]]:
    """Exact nullspace basis of a sparse matrix given as a list of rows
    (dict column -> Scalar).  Returns basis vectors as dense lists."""
    if isinstance(F, RationalField):
        return _nullspace_flint(rows, ncols, F)
    pivots: Dict[int, Dict[int, Scalar]] = {}  # pivot col -> normalized row
    for row in rows:
        r = {c: v for c, v in row.items() if not v.is_zero()}
        # reduce by existing pivots
        changed = True
        while r and changed:
            changed = False
            for c in sorted(r):
                if c in pivots:
                    f = r[c]
                    for cc, vv in pivots[c].items():
                        x = r.get(cc)
                        y = vv * f
                        x = -y if x is None else x - y
                        if x.is_zero():
                            r.pop(cc, None)
                        else:
                            r[cc] = x
                    changed = True
                    break
        if not r:
            continue
        pc = min(r)
        inv = F.one() / r[pc]
        r = {c: v * inv for c, v in r.items()}
        # back-substitute into existing pivots to keep reduced form
        for c0, prow in pivots.items():
            if pc in prow:
                f = prow[pc]
                for cc, vv in r.items():
                    x = prow.get(cc)
                    y = vv * f
                    x = -y if x is None else x - y
                    if x.is_zero():
                        prow.pop(cc, None)
                    else:
                        prow[cc] = x
        pivots[pc] = r
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        vec = [F.zero()] * ncols
        vec[fcol] = F.one()
        for pc, prow in pivots.items():
            if fcol in prow:
                vec[pc] = -prow[fcol]
        basis.append(vec)
    return basis


def _nullspace_flint(rows, ncols, F: RationalField):
    rows = [r for r in rows if r]
    if not rows:
        return [[F.one() if i == j else F.zero() for i in range(ncols)] for j in range(ncols)]
    M = flint.fmpq_mat(len(rows), ncols)
    for i, r in enumerate(rows):
        for c, v in r.items():
            M[i, c] = v.x
    R, rank = M.rref()
    pivcols = []
    row = 0
    for c in range(ncols):
        if row < rank and R[row, c] != 0:
            pivcols.append(c)
            row += 1
    pivset = set(pivcols)
    basis = []
    for fcol in range(ncols):
        if fcol in pivset:
            continue
        vec = [F.zero()] * ncols
        vec[fcol] = F.one()
        for i, pc in enumerate(pivcols):
            x = R[i, fcol]
            if x != 0:
                vec[pc] = RatScalar(F, -x)
        basis.append(vec)
    return basis


def matrix_rank(rows: List[List[Scalar]], F: Field) -> int:
    ncols = len(rows[0]) if rows else 0
    sparse = [{j: x for j, x in enumerate(r) if not x.is_zero()} for r in rows]
    return ncols - len(nullspace(sparse, ncols, F))
