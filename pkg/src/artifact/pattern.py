"""Punctured link patterns, their word encoding and Dyck paths.

Points on the boundary of the punctured disc are labelled 1..n
anticlockwise.  Gap ``g`` sits between points ``g`` and ``g+1``; gap 0 sits
between ``n`` and ``1``.

Even n: a noncrossing perfect matching plus the minimal gap ``g*`` of the
face that holds the puncture.  An arch (a, b) with a < b is *flagged* when
the puncture lies on its interval side, i.e. ``a <= g* < b``.

Odd n: a defect point ``d`` joined to the puncture plus a noncrossing
matching of the other points.  The flags are forced: (a, b) is flagged
exactly when ``a < d < b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

Arch = Tuple[int, int]


class PatternError(ValueError):
    pass


@dataclass(frozen=True, order=False)
class Pattern:
    n: int
    arches: Tuple[Arch, ...]
    gap: int = 0  # even n only
    defect: int = 0  # odd n only

    def __post_init__(self):
        arches = tuple(sorted((min(a, b), max(a, b)) for a, b in self.arches))
        object.__setattr__(self, "arches", arches)
        _validate(self)

    # -- basic structure ----------------------------------------------------
    @property
    def odd(self) -> bool:
        return self.n % 2 == 1

    def partner(self) -> Dict[int, int]:
        p = {}
        for a, b in self.arches:
            p[a] = b
            p[b] = a
        return p

    def flagged(self, arch: Arch) -> bool:
        a, b = arch
        if self.odd:
            return a < self.defect < b
        return a <= self.gap < b

    def flags(self) -> Dict[Arch, bool]:
        return {A: self.flagged(A) for A in self.arches}

    def puncture_gaps(self) -> List[int]:
        """Gaps (0..n-1) on the boundary of the face holding the puncture."""
        if self.odd:
            d = self.defect
            return [d - 1, d % self.n]
        return [g for g in range(max(self.n, 1)) if all(_inside(A, g) == self.flagged(A) for A in self.arches)]

    def key(self) -> str:
        m = "".join(f"({a} {b})" for a, b in self.arches)
        if self.odd:
            return f"O;D:{self.defect};M:{m}"
        return f"E;M:{m};G:{self.gap}"

    def word(self) -> str:
        return word_encode(self)

    def __repr__(self):
        return f"Pattern<{self.key()}>"

    def __lt__(self, other: "Pattern"):
        return (self.n, self.word()) < (other.n, other.word())


def _inside(arch: Arch, g: int) -> bool:
    a, b = arch
    return a <= g < b


def _crossing(A: Arch, B: Arch) -> bool:
    a, b = A
    c, d = B
    return a < c < b < d or c < a < d < b


def _validate(L: Pattern) -> None:
    n = L.n
    pts = [p for A in L.arches for p in A]
    if L.odd:
        if not 1 <= L.defect <= n:
            raise PatternError(f"defect {L.defect} out of range for n={n}")
        pts.append(L.defect)
    elif n > 0:
        if not 0 <= L.gap < n:
            raise PatternError(f"gap {L.gap} out of range for n={n}")
    if sorted(pts) != list(range(1, n + 1)):
        raise PatternError(f"arches {L.arches} do not cover 1..{n}")
    for i, A in enumerate(L.arches):
        for B in L.arches[i + 1 :]:
            if _crossing(A, B):
                raise PatternError(f"crossing arches {A} and {B}")
    if not L.odd and n > 0:
        # the gap must be the minimal gap of its face
        for g in range(L.gap):
            if all(_inside(A, g) == _inside(A, L.gap) for A in L.arches):
                raise PatternError(f"gap {L.gap} is not minimal in its face (gap {g})")


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


def _matchings(points: Tuple[int, ...]) -> List[Tuple[Arch, ...]]:
    if not points:
        return [()]
    first = points[0]
    out = []
    for j in range(1, len(points), 2):
        inner = points[1:j]
        outer = points[j + 1 :]
        for m1 in _matchings(inner):
            for m2 in _matchings(outer):
                out.append(((first, points[j]),) + m1 + m2)
    return out


def face_min_gaps(n: int, arches: Sequence[Arch]) -> List[int]:
    """Minimal gap of every face of an even matching."""
    seen = {}
    for g in range(n):
        sig = tuple(_inside(A, g) for A in arches)
        seen.setdefault(sig, g)
    return sorted(seen.values())


@lru_cache(maxsize=None)
def enumerate_patterns(n: int) -> Tuple[Pattern, ...]:
    """All punctured link patterns of size n in canonical (word) order."""
    if n < 0:
        raise PatternError("n must be nonnegative")
    out = []
    if n == 0:
        out.append(Pattern(0, ()))
    elif n % 2 == 0:
        for m in _matchings(tuple(range(1, n + 1))):
            for g in face_min_gaps(n, m):
                out.append(Pattern(n, m, gap=g))
    else:
        for d in range(1, n + 1):
            rest = tuple(p for p in range(1, n + 1) if p != d)
            for m in _matchings(rest):
                out.append(Pattern(n, m, defect=d))
    out.sort(key=lambda L: L.word())
    return tuple(out)


def pattern_count(n: int) -> int:
    return comb(n, (n + 1) // 2)


@lru_cache(maxsize=None)
def basis_index(n: int) -> Dict[Pattern, int]:
    return {L: i for i, L in enumerate(enumerate_patterns(n))}


# ---------------------------------------------------------------------------
# Word encoding
# ---------------------------------------------------------------------------

ALPHA = "a"
BETA = "b"


def word_encode(L: Pattern) -> str:
    """Binary word: 'a' where the oriented strand leaves the point, 'b'
    where it arrives.  Strands are oriented so that, closed along the
    boundary, they run anticlockwise around the puncture."""
    w = [""] * L.n
    for a, b in L.arches:
        if L.flagged((a, b)):
            w[a - 1], w[b - 1] = BETA, ALPHA
        else:
            w[a - 1], w[b - 1] = ALPHA, BETA
    if L.odd:
        w[L.defect - 1] = ALPHA
    return "".join(w)


def word_decode(word: str) -> Pattern:
    n = len(word)
    if set(word) - {ALPHA, BETA}:
        raise PatternError(f"word {word!r} uses letters other than a/b")
    if word.count(ALPHA) != (n + 1) // 2:
        raise PatternError(f"word {word!r} must have {(n + 1) // 2} letters 'a'")
    if n == 0:
        return Pattern(0, ())
    # cyclic bracket matching, 'a' opens; start right after the position where
    # the running height attains its minimum so that every closer is matched
    h, low, start = 0, 0, 0
    for i, c in enumerate(word):
        h += 1 if c == ALPHA else -1
        if h < low:
            low, start = h, i + 1
    stack: List[int] = []
    arches = []
    flags = {}
    for k in range(n):
        i = (start + k) % n
        if word[i] == ALPHA:
            stack.append(i + 1)
        else:
            if not stack:
                raise PatternError(f"word {word!r} is not realizable")
            x = stack.pop()
            y = i + 1
            A = (min(x, y), max(x, y))
            arches.append(A)
            flags[A] = x > y
    if n % 2 == 1:
        if len(stack) != 1:
            raise PatternError(f"word {word!r} is not realizable")
        L = Pattern(n, tuple(arches), defect=stack[0])
        if L.flags() != flags:
            raise PatternError(f"word {word!r} is not realizable")
        return L
    if stack:
        raise PatternError(f"word {word!r} is not realizable")
    for g in range(n):
        if all(_inside(A, g) == flags[A] for A in arches):
            return Pattern(n, tuple(arches), gap=g)
    raise PatternError(f"word {word!r} is not realizable: flags are not a chain")


def pattern_from_key(key: str) -> Pattern:
    parts = dict(p.split(":", 1) for p in key.split(";")[1:])
    pairs = []
    for chunk in parts["M"].split(")"):
        chunk = chunk.strip("( ")
        if chunk:
            a, b = chunk.split()
            pairs.append((int(a), int(b)))
    n = 2 * len(pairs)
    if key.startswith("O"):
        return Pattern(n + 1, tuple(pairs), defect=int(parts["D"]))
    return Pattern(n, tuple(pairs), gap=int(parts["G"]))


# ---------------------------------------------------------------------------
# Distinguished patterns and strata
# ---------------------------------------------------------------------------


def fully_nested(n: int) -> Pattern:
    """The pattern L_cap that is not in the image of any e_i, 1 <= i < n."""
    if n == 0:
        return Pattern(0, ())
    if n % 2 == 0:
        k = n // 2
        return Pattern(n, tuple((j, n + 1 - j) for j in range(1, k + 1)), gap=k)
    k = (n + 1) // 2
    return Pattern(n, tuple((j, n + 1 - j) for j in range(1, k)), defect=k)


def least_nested(n: int) -> Pattern:
    arches = tuple((2 * i - 1, 2 * i) for i in range(1, n // 2 + 1))
    if n % 2 == 0:
        return Pattern(n, arches, gap=0)
    return Pattern(n, arches, defect=n)


def stratum_of(L: Pattern) -> FrozenSet[int]:
    """Indices j in 1..n with L in LP^{(*,j)}; j = n stands for gap 0."""
    if L.odd:
        return frozenset({L.defect})
    return frozenset((g if g else L.n) for g in L.puncture_gaps())


def in_base_stratum(L: Pattern) -> bool:
    return L.n in stratum_of(L) if L.n else True


# ---------------------------------------------------------------------------
# Dyck paths
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DyckPath:
    heights: Tuple[int, ...]

    def __post_init__(self):
        prev = 0
        for h in self.heights:
            if h < 0 or abs(h - prev) != 1:
                raise PatternError(f"invalid Dyck heights {self.heights}")
            prev = h
        if self.heights and self.heights[-1] != 0:
            raise PatternError("Dyck path must end at height 0")

    @property
    def length(self) -> int:
        return len(self.heights)

    @property
    def content(self) -> int:
        m = self.length // 2
        top = sum(min(j, 2 * m - j) for j in range(1, 2 * m + 1))
        return (top - sum(self.heights)) // 2

    def local_maxima(self) -> List[Tuple[int, int]]:
        """(i, height) with an up step at i and a down step at i+1."""
        hs = (0,) + self.heights
        return [(i, hs[i]) for i in range(1, len(hs) - 1) if hs[i] > hs[i - 1] and hs[i + 1] < hs[i]]


def dyck_from_pattern(L: Pattern) -> DyckPath:
    if L.odd:
        if L.defect != L.n:
            raise PatternError(f"{L.key()} is not in the stratum d = n")
    elif L.n and L.gap != 0:
        raise PatternError(f"{L.key()} is not in the stratum g* = 0")
    opens = {a for a, _ in L.arches}
    h = 0
    hs = []
    for p in range(1, L.n + 1 - (1 if L.odd else 0)):
        h += 1 if p in opens else -1
        hs.append(h)
    return DyckPath(tuple(hs))


def pattern_from_dyck(path: DyckPath, odd: bool = False) -> Pattern:
    stack: List[int] = []
    arches = []
    prev = 0
    for p, h in enumerate(path.heights, start=1):
        if h > prev:
            stack.append(p)
        else:
            arches.append((stack.pop(), p))
        prev = h
    m = path.length
    if odd:
        return Pattern(m + 1, tuple(arches), defect=m + 1)
    return Pattern(m, tuple(arches), gap=0)


def content(L: Pattern) -> int:
    return dyck_from_pattern(L).content


# ---------------------------------------------------------------------------
# Module vectors
# ---------------------------------------------------------------------------


class ModuleVector:
    """Finite linear combination of patterns of one size."""

    __slots__ = ("n", "F", "coeffs")

    def __init__(self, n: int, F, coeffs: Optional[Dict[Pattern, object]] = None):
        self.n = n
        self.F = F
        self.coeffs = {}
        if coeffs:
            for L, c in coeffs.items():
                if L.n != n:
                    raise PatternError(f"pattern of size {L.n} in a size-{n} vector")
                if not c.is_zero():
                    self.coeffs[L] = c

    @classmethod
    def basis(cls, F, L: Pattern) -> "ModuleVector":
        return cls(L.n, F, {L: F.one()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, L: Pattern):
        return self.coeffs.get(L, self.F.zero())

    def items(self):
        return self.coeffs.items()

    def __add__(self, other: "ModuleVector") -> "ModuleVector":
        self._check(other)
        out = dict(self.coeffs)
        for L, c in other.coeffs.items():
            out[L] = out[L] + c if L in out else c
        return ModuleVector(self.n, self.F, out)

    def __sub__(self, other):
        return self + other.scale(self.F.from_int(-1))

    def __neg__(self):
        return self.scale(self.F.from_int(-1))

    def scale(self, c) -> "ModuleVector":
        c = self.F.coerce(c)
        return ModuleVector(self.n, self.F, {L: x * c for L, x in self.coeffs.items()})

    def _check(self, other):
        if other.n != self.n:
            raise PatternError(f"size mismatch {self.n} vs {other.n}")

    def __eq__(self, other):
        if not isinstance(other, ModuleVector):
            return NotImplemented
        return self.n == other.n and self.coeffs == other.coeffs

    def dense(self) -> list:
        return [self[L] for L in enumerate_patterns(self.n)]

    def to_json(self):
        return {L.key(): c.to_json() for L, c in sorted(self.coeffs.items(), key=lambda kv: kv[0].word())}

    def __repr__(self):
        inner = ", ".join(f"{L.key()}: {c}" for L, c in sorted(self.coeffs.items(), key=lambda kv: kv[0].word()))
        return f"ModuleVector(n={self.n}, {{{inner}}})"
