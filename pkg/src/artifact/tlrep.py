"""Action of the affine Temperley-Lieb and Hecke algebras on V_n(v).

Everything is computed by one gluing engine.  An annular diagram is a set of
strands between inner points, outer points and internal nodes, each strand
carrying its *sweep*: the total change of angle (in turns) when it is run
from its first endpoint to its second.  Point k of an n-point boundary sits
at angle (k-1)/n.

A pattern is drawn on the inner disc: an unflagged arch (a, b) sweeps
theta_b - theta_a, a flagged one sweeps theta_b - theta_a - 1, and the odd
defect runs from the puncture (angle 0 by convention) to its point d with
sweep theta_d.  Gluing traces every strand, reads the new flags off the
sweeps, counts closed loops by winding number, and measures how many full
turns the defect picked up; each such turn costs a factor v.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .pattern import ModuleVector, Pattern, enumerate_patterns, least_nested
from .report import Report
from .ring import Field, Scalar, delta, u_weight

Node = Tuple[str, int]


class GlueError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Annular diagrams
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Diagram:
    """Annular diagram from n_in inner points to n_out outer points.

    ``edges`` holds (node, node, sweep) triples; nodes are ("i", k), ("o", k)
    or internal ("x", k).  Every inner and internal node has degree 2 once
    a pattern is attached, every outer node has degree 1.
    """

    n_in: int
    n_out: int
    edges: Tuple[Tuple[Node, Node, Fraction], ...]
    name: str = ""


def _theta(k: int, n: int) -> Fraction:
    return Fraction(k - 1, n)


def e_diagram(n: int, i: int) -> Diagram:
    """e_i for 1 <= i <= n; e_n (also called e_0) joins points n and 1."""
    if n < 2 or not 1 <= i <= n:
        raise GlueError(f"e_{i} is not defined on V_{n}")
    j = i % n + 1
    step = Fraction(1, n)
    edges = [(("i", i), ("i", j), step), (("o", i), ("o", j), step)]
    for k in range(1, n + 1):
        if k not in (i, j):
            edges.append((("i", k), ("o", k), Fraction(0)))
    return Diagram(n, n, tuple(edges), f"e{i}")


def rho_diagram(n: int, direction: int = 1) -> Diagram:
    if n < 1:
        raise GlueError("rho needs n >= 1")
    step = Fraction(direction, n)
    edges = tuple((("i", k), ("o", (k - 1 + direction) % n + 1), step) for k in range(1, n + 1))
    return Diagram(n, n, edges, "rho" if direction == 1 else "rhoinv")


def closure_diagram(n: int) -> Diagram:
    """Caps (2i-1, 2i); for odd n the last point runs out to a single outer point."""
    step = Fraction(1, n)
    edges = [(("i", 2 * i - 1), ("i", 2 * i), step) for i in range(1, n // 2 + 1)]
    if n % 2:
        edges.append((("i", n), ("o", 1), step))
        return Diagram(n, 1, tuple(edges), "close")
    return Diagram(n, 0, tuple(edges), "close")


def row_diagram(n: int, tau: Sequence[str]) -> Diagram:
    """One transfer row.  Tile i sits on strand i with its north side facing
    the pattern (inner point i) and its south side facing outward (outer
    point i); the west/east channels are internal nodes, with east of tile i
    equal to west of tile i+1 (cyclically).  nw joins north-west and
    east-south, ne joins north-east and west-south."""
    if len(tau) != n or n < 1:
        raise GlueError("row configuration must have one tile per point")
    half = Fraction(1, 2 * n)
    edges = []
    for i, kind in enumerate(tau, start=1):
        west = ("x", i)
        east = ("x", i % n + 1)
        north = ("i", i)
        south = ("o", i)
        if kind == "nw":
            edges.append((north, west, -half))
            edges.append((east, south, -half))
        elif kind == "ne":
            edges.append((north, east, half))
            edges.append((west, south, half))
        else:
            raise GlueError(f"unknown tile {kind!r}")
    return Diagram(n, n, tuple(edges), "row:" + ",".join(tau))


# ---------------------------------------------------------------------------
# Gluing
# ---------------------------------------------------------------------------


class GlueResult(NamedTuple):
    pattern: Pattern
    loops: int  # contractible, weight delta
    ploops: int  # around the puncture, weight u
    vexp: int  # turns of the defect


def pattern_strands(L: Pattern) -> List[Tuple[Node, Node, Fraction]]:
    n = L.n
    out = []
    for a, b in L.arches:
        sw = _theta(b, n) - _theta(a, n) - (1 if L.flagged((a, b)) else 0)
        out.append((("i", a), ("i", b), sw))
    if L.odd:
        out.append((("P", 0), ("i", L.defect), _theta(L.defect, n)))
    return out


def _pattern_from_strands(m: int, arches: Dict[Tuple[int, int], Fraction], defect: Optional[int]) -> Pattern:
    flags = {}
    for (a, b), sw in arches.items():
        base = _theta(b, m) - _theta(a, m)
        if sw == base:
            flags[(a, b)] = False
        elif sw == base - 1:
            flags[(a, b)] = True
        else:
            raise GlueError(f"arch ({a},{b}) has impossible sweep {sw}")
    pairs = tuple(arches)
    if defect is not None:
        L = Pattern(m, pairs, defect=defect)
        if L.flags() != flags:
            raise GlueError("odd pattern with inconsistent flags")
        return L
    if m == 0:
        return Pattern(0, ())
    for g in range(m):
        if all((a <= g < b) == f for (a, b), f in flags.items()):
            return Pattern(m, pairs, gap=g)
    raise GlueError("flags do not determine a face")


@lru_cache(maxsize=200000)
def glue(D: Diagram, L: Pattern) -> GlueResult:
    if L.n != D.n_in:
        raise GlueError(f"diagram expects size {D.n_in}, pattern has size {L.n}")
    adj: Dict[Node, List[Tuple[int, Node, Fraction]]] = {}
    edges = list(D.edges) + pattern_strands(L)
    for idx, (p, q, sw) in enumerate(edges):
        adj.setdefault(p, []).append((idx, q, sw))
        adj.setdefault(q, []).append((idx, p, -sw))
    used = [False] * len(edges)

    def walk(start: Node):
        node, total = start, Fraction(0)
        while True:
            nxt = [(i, q, s) for i, q, s in adj[node] if not used[i]]
            if not nxt:
                return node, total
            i, q, s = nxt[0]
            used[i] = True
            total += s
            node = q
            if node[0] in ("o", "P"):
                return node, total

    arches: Dict[Tuple[int, int], Fraction] = {}
    defect = None
    vexp = 0
    for k in range(1, D.n_out + 1):
        start = ("o", k)
        if all(used[i] for i, _, _ in adj.get(start, [])):
            continue
        end, sw = walk(start)
        if end[0] == "o":
            a, b = k, end[1]
            if a > b:
                a, b, sw = b, a, -sw
            arches[(a, b)] = sw
        elif end[0] == "P":
            defect = k
            phi = -sw  # sweep from the puncture to outer k
            turns = phi - _theta(k, D.n_out)
            if turns.denominator != 1:
                raise GlueError(f"defect lands off-grid: {phi}")
            vexp = int(turns)
        else:
            raise GlueError(f"strand from outer {k} dead-ends at {end}")
    loops = ploops = 0
    for idx, (p, q, sw) in enumerate(edges):
        if used[idx]:
            continue
        used[idx] = True
        total, node = sw, q
        while node != p:
            nxt = [(i, r, s) for i, r, s in adj[node] if not used[i]]
            if not nxt:
                raise GlueError("open strand found while closing loops")
            i, r, s = nxt[0]
            used[i] = True
            total += s
            node = r
        if total == 0:
            loops += 1
        elif abs(total) == 1:
            ploops += 1
        else:
            raise GlueError(f"closed loop with winding {total}")
    if L.odd and defect is None:
        raise GlueError("defect vanished")
    if L.odd and ploops:
        raise GlueError("puncture loop in the presence of a defect")
    return GlueResult(_pattern_from_strands(D.n_out, arches, defect), loops, ploops, vexp)


def glue_scalar(F: Field, r: GlueResult, twisted: bool = True) -> Scalar:
    """delta^loops u^ploops v^vexp; with ``twisted=False`` v is set to 1."""
    c = F.one()
    if r.loops:
        c = c * delta(F) ** r.loops
    if r.ploops:
        u = u_weight(F) if twisted else F.s_pow(1) + F.s_pow(-1)
        c = c * u ** r.ploops
    if r.vexp and twisted:
        c = c * F.v_pow(r.vexp)
    return c


# ---------------------------------------------------------------------------
# Single generator actions
# ---------------------------------------------------------------------------


def e_apply(F: Field, i: int, L: Pattern, twisted: bool = True) -> Tuple[Scalar, Pattern]:
    if not 1 <= i <= L.n - 1 and not (i in (0, L.n) and L.n >= 2):
        raise GlueError(f"e_{i} is not a generator for n={L.n}")
    r = glue(e_diagram(L.n, i if i else L.n), L)
    return glue_scalar(F, r, twisted), r.pattern


def rho_apply(F: Field, L: Pattern, direction: int = 1, twisted: bool = True) -> Tuple[Scalar, Pattern]:
    r = glue(rho_diagram(L.n, direction), L)
    return glue_scalar(F, r, twisted), r.pattern


# ---------------------------------------------------------------------------
# Operators on V_n
# ---------------------------------------------------------------------------


class Operator:
    """Sparse linear map V_n -> V_m stored column by column."""

    __slots__ = ("F", "n_in", "n_out", "cols")

    def __init__(self, F: Field, n_in: int, n_out: int, cols: Dict[Pattern, Dict[Pattern, Scalar]]):
        self.F, self.n_in, self.n_out = F, n_in, n_out
        self.cols = {L: {M: c for M, c in col.items() if not c.is_zero()} for L, col in cols.items()}

    @classmethod
    def from_diagram(cls, F: Field, D: Diagram, twisted: bool = True) -> "Operator":
        cols = {}
        for L in enumerate_patterns(D.n_in):
            r = glue(D, L)
            cols[L] = {r.pattern: glue_scalar(F, r, twisted)}
        return cls(F, D.n_in, D.n_out, cols)

    @classmethod
    def identity(cls, F: Field, n: int) -> "Operator":
        return cls(F, n, n, {L: {L: F.one()} for L in enumerate_patterns(n)})

    @classmethod
    def from_function(cls, F: Field, n_in: int, n_out: int, fn) -> "Operator":
        cols = {}
        for L in enumerate_patterns(n_in):
            cols[L] = dict(fn(ModuleVector.basis(F, L)).coeffs)
        return cls(F, n_in, n_out, cols)

    def apply(self, x: ModuleVector) -> ModuleVector:
        if x.n != self.n_in:
            raise GlueError(f"operator on V_{self.n_in} applied to a V_{x.n} vector")
        out: Dict[Pattern, Scalar] = {}
        for L, c in x.items():
            for M, a in self.cols.get(L, {}).items():
                term = a * c
                out[M] = out[M] + term if M in out else term
        return ModuleVector(self.n_out, self.F, out)

    __call__ = apply

    def __matmul__(self, other: "Operator") -> "Operator":
        if other.n_out != self.n_in:
            raise GlueError("size mismatch in operator product")
        cols = {}
        for L, col in other.cols.items():
            cols[L] = dict(self.apply(ModuleVector(other.n_out, self.F, col)).coeffs)
        return Operator(self.F, other.n_in, self.n_out, cols)

    def __add__(self, other: "Operator") -> "Operator":
        cols = {}
        for L in enumerate_patterns(self.n_in):
            col = dict(self.cols.get(L, {}))
            for M, c in other.cols.get(L, {}).items():
                col[M] = col[M] + c if M in col else c
            cols[L] = col
        return Operator(self.F, self.n_in, self.n_out, cols)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "Operator":
        c = self.F.coerce(c)
        return Operator(self.F, self.n_in, self.n_out, {L: {M: a * c for M, a in col.items()} for L, col in self.cols.items()})

    def __eq__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        if (self.n_in, self.n_out) != (other.n_in, other.n_out):
            return False
        return all(self.cols.get(L, {}) == other.cols.get(L, {}) for L in enumerate_patterns(self.n_in))

    def is_zero(self) -> bool:
        return all(not col for col in self.cols.values())

    def entry(self, row: Pattern, col: Pattern) -> Scalar:
        return self.cols.get(col, {}).get(row, self.F.zero())

    def map_scalars(self, fn, F: Field) -> "Operator":
        return Operator(F, self.n_in, self.n_out, {L: {M: fn(c) for M, c in col.items()} for L, col in self.cols.items()})

    def rows(self) -> List[List[Scalar]]:
        ins = enumerate_patterns(self.n_in)
        return [[self.entry(M, L) for L in ins] for M in enumerate_patterns(self.n_out)]

    def to_json(self):
        """Square operators use a single basis list; maps V_n -> V_m add the
        column basis under "basis_in"."""
        data = {
            "n": self.n_out,
            "basis": [M.key() for M in enumerate_patterns(self.n_out)],
            "rows": [[c.to_json() for c in row] for row in self.rows()],
        }
        if self.n_in != self.n_out:
            data["n_in"] = self.n_in
            data["basis_in"] = [L.key() for L in enumerate_patterns(self.n_in)]
        return data


class Rep:
    """Cached generator matrices of V_n over a field F.  With
    ``twisted=False`` the twist parameter v is specialized to 1."""

    def __init__(self, F: Field, n: int, twisted: bool = True):
        self.F, self.n, self.twisted = F, n, twisted
        self._ops: Dict[str, Operator] = {}

    def _cached(self, key, build):
        op = self._ops.get(key)
        if op is None:
            op = build()
            self._ops[key] = op
        return op

    def e(self, i: int) -> Operator:
        n = self.n
        i = n if i % n == 0 else i % n
        return self._cached(("e", i), lambda: Operator.from_diagram(self.F, e_diagram(n, i), self.twisted))

    def rho(self, direction: int = 1) -> Operator:
        return self._cached(("rho", direction), lambda: Operator.from_diagram(self.F, rho_diagram(self.n, direction), self.twisted))

    def T(self, i: int, inverse: bool = False) -> Operator:
        """psi(T_i) = e_i + t^{-1/2}, psi(T_i^{-1}) = e_i + t^{1/2}."""
        k = 2 if inverse else -2

        def build():
            return self.e(i) + Operator.identity(self.F, self.n).scale(self.F.s_pow(k))

        return self._cached(("T", i, inverse), build)

    def word(self, letters: Sequence) -> Operator:
        """Product of letters, leftmost letter applied last."""
        op = Operator.identity(self.F, self.n)
        for letter in reversed(list(letters)):
            op = self.letter(letter) @ op
        return op

    def letter(self, letter) -> Operator:
        kind = letter[0]
        if kind == "e":
            return self.e(letter[1])
        if kind == "rho":
            return self.rho(letter[1] if len(letter) > 1 else 1)
        if kind == "T":
            return self.T(letter[1], inverse=len(letter) > 2 and letter[2] == -1)
        raise GlueError(f"unknown letter {letter!r}")

    def apply_word(self, letters: Sequence, x: ModuleVector) -> ModuleVector:
        for letter in reversed(list(letters)):
            x = self.letter(letter).apply(x)
        return x

    # -- Bernstein elements ---------------------------------------------
    def y_letters(self, j: int, inverse: bool = False) -> List:
        """Word for Y_j = T_{j-1}^{-1}...T_1^{-1} rho T_{n-1}...T_j (or its inverse)."""
        n = self.n
        if not inverse:
            return [("T", k, -1) for k in range(j - 1, 0, -1)] + [("rho", 1)] + [("T", k) for k in range(n - 1, j - 1, -1)]
        return [("T", k, -1) for k in range(j, n)] + [("rho", -1)] + [("T", k) for k in range(1, j)]

    def Y(self, j: int, inverse: bool = False) -> Operator:
        return self._cached(("Y", j, inverse), lambda: self.word(self.y_letters(j, inverse)))

    def Yhat(self, j: int) -> Operator:
        """Y_j rescaled by t^{-(2j-n-1)/4}."""
        return self._cached(("Yhat", j), lambda: self.Y(j).scale(self.F.s_pow(-(2 * j - self.n - 1))))

    def yhat_apply(self, j: int, x: ModuleVector) -> ModuleVector:
        return self.Yhat(j).apply(x)

    # -- intertwiners ----------------------------------------------------
    def intertwiner_simple(self, i: int, x: ModuleVector) -> ModuleVector:
        """I_i = T_i(1 - Y^{a_i}) + (t^{-1/2} - t^{1/2}) Y^{a_i}, Y^{a_i} = Y_i Y_{i+1}^{-1}."""
        F = self.F
        y = self.Y(i).apply(self.Y(i + 1, inverse=True).apply(x))
        return self.T(i).apply(x - y) + y.scale(F.s_pow(-2) - F.s_pow(2))

    def intertwiner_apply(self, w: Sequence[int], x: ModuleVector) -> ModuleVector:
        for i in reversed(reduced_word(w)):
            x = self.intertwiner_simple(i, x)
        return x

    def T_perm_apply(self, w: Sequence[int], x: ModuleVector, inverse: bool = False) -> ModuleVector:
        """T_w (or T_w^{-1} = T_{jr}^{-1}...T_{j1}^{-1}) for w = s_{j1}...s_{jr} reduced."""
        word = reduced_word(w)
        if inverse:
            for i in word:
                x = self.T(i, inverse=True).apply(x)
        else:
            for i in reversed(word):
                x = self.T(i).apply(x)
        return x


@lru_cache(maxsize=None)
def _rep_cache(F: Field, n: int, twisted: bool) -> Rep:
    return Rep(F, n, twisted)


def rep(F: Field, n: int, twisted: bool = True) -> Rep:
    return _rep_cache(F, n, twisted)


# ---------------------------------------------------------------------------
# Q_n and its building blocks
# ---------------------------------------------------------------------------


def eta(F: Field, n: int, twisted: bool = True) -> Scalar:
    if not twisted:
        return F.one()
    return F.v_pow(1 if n % 2 == 0 else -1)


def all_DJ(F: Field, n: int, twisted: bool = True) -> Dict[Tuple[int, ...], ModuleVector]:
    """Every D_J for J inside 1..floor(n/2), built along J in increasing order:
    D_{J+i} = t^{-1/4} (Yhat_{2i} - eta - t^{-1/2} eta^{-1}) D_J."""
    R = rep(F, n, twisted)
    et = eta(F, n, twisted)
    shift = et + F.s_pow(-2) / et
    out = {(): ModuleVector.basis(F, least_nested(n))}
    for size in range(1, n // 2 + 1):
        for J in combinations(range(1, n // 2 + 1), size):
            prev = out[J[:-1]]
            i = J[-1]
            out[J] = (R.yhat_apply(2 * i, prev) - prev.scale(shift)).scale(F.s_pow(-1))
    return out


def build_DJ(F: Field, n: int, J: Iterable[int], twisted: bool = True) -> ModuleVector:
    J = tuple(sorted(set(J)))
    if any(not 1 <= i <= n // 2 for i in J):
        raise GlueError(f"J={J} not inside 1..{n // 2}")
    return all_DJ(F, n, twisted)[J]


def build_Qn(F: Field, n: int, twisted: bool = True) -> ModuleVector:
    """Q_n = sum_J t^{#J/4} eta^{-#J} D_J."""
    if n == 0:
        return ModuleVector.basis(F, enumerate_patterns(0)[0])
    et_inv = F.one() / eta(F, n, twisted)
    acc = ModuleVector(n, F)
    for J, D in all_DJ(F, n, twisted).items():
        acc = acc + D.scale(F.s_pow(len(J)) * et_inv ** len(J))
    return acc


def xi_hat(F: Field, n: int, twisted: bool = True) -> List[Scalar]:
    """Yhat-eigenvalues of Q_n: (eta^{-1}, eta, ..., [v])."""
    et = eta(F, n, twisted)
    out = []
    for j in range(1, n - n % 2 + 1):
        out.append(F.one() / et if j % 2 else et)
    if n % 2:
        out.append(F.v_pow(1) if twisted else F.one())
    return out


def xi(F: Field, n: int, twisted: bool = True) -> List[Scalar]:
    """Y-eigenvalues of Q_n."""
    return [F.s_pow(2 * j - n - 1) * c for j, c in enumerate(xi_hat(F, n, twisted), start=1)]


def pair_close(x: ModuleVector) -> Scalar:
    """Close with the caps (2i-1, 2i) and read off the scalar."""
    F = x.F
    D = closure_diagram(x.n)
    acc = F.zero()
    for L, c in x.items():
        acc = acc + glue_scalar(F, glue(D, L)) * c
    return acc


def pairing_formula(F: Field, k: int, odd: bool = False) -> Scalar:
    """sum_J t^{#J/4} v^{-#J} u^{#J} delta^{k-#J} (the odd variant is meant at v = 1)."""
    from math import comb

    v = F.v_pow(1)
    if odd:
        v = F.one() / v
    acc = F.zero()
    for j in range(k + 1):
        acc = acc + F.from_int(comb(k, j)) * (F.s_pow(1) / v * u_weight(F)) ** j * delta(F) ** (k - j)
    return acc


# ---------------------------------------------------------------------------
# Permutations
# ---------------------------------------------------------------------------

Perm = Tuple[int, ...]


def reduced_word(w: Sequence[int]) -> List[int]:
    """Letters j1..jr with w = s_{j1}...s_{jr} (one-line notation, composition
    (w s_i)(k) = w(s_i(k)))."""
    w = list(w)
    found = []
    while True:
        for i in range(len(w) - 1):
            if w[i] > w[i + 1]:
                w[i], w[i + 1] = w[i + 1], w[i]
                found.append(i + 1)
                break
        else:
            break
    return list(reversed(found))


def perm_inverse(w: Sequence[int]) -> Perm:
    out = [0] * len(w)
    for i, x in enumerate(w, start=1):
        out[x - 1] = i
    return tuple(out)


def perm_act(w: Sequence[int], mu: Sequence) -> List:
    """(w mu)_i = mu_{w^{-1}(i)}."""
    wi = perm_inverse(w)
    return [mu[wi[i] - 1] for i in range(len(w))]


def perm_length(w: Sequence[int]) -> int:
    return sum(1 for i in range(len(w)) for j in range(i + 1, len(w)) if w[i] > w[j])


def e_w(F: Field, w: Sequence[int], mu: Sequence[Scalar]) -> Scalar:
    """prod over inversions (i<j, w(i)>w(j)) of (t^{1/2} - t^{-1/2} r)(t^{1/2} - t^{-1/2} r^{-1}), r = mu_i/mu_j."""
    th, thi = F.s_pow(2), F.s_pow(-2)
    acc = F.one()
    n = len(w)
    for i in range(n):
        for j in range(i + 1, n):
            if w[i] > w[j]:
                r = mu[i] / mu[j]
                acc = acc * (th - thi * r) * (th - thi / r)
    return acc


def w_n(n: int) -> Perm:
    """Interleaving permutation [1, k+1, 2, k+2, ...]."""
    if n % 2 == 0:
        k = n // 2
        out = []
        for j in range(1, k + 1):
            out += [j, k + j]
        return tuple(out)
    k = (n + 1) // 2
    out = []
    for j in range(1, k):
        out += [j, k + j]
    out.append(k)
    return tuple(out)


def parabolic_I(n: int) -> List[int]:
    h = (n + 1) // 2
    return [i for i in range(1, n) if i != h]


def min_coset_reps(n: int) -> List[Perm]:
    """sigma with sigma(1) < ... < sigma(h) and sigma(h+1) < ... < sigma(n), h = ceil(n/2)."""
    h = (n + 1) // 2
    out = []
    for first in combinations(range(1, n + 1), h):
        rest = [x for x in range(1, n + 1) if x not in first]
        out.append(tuple(first) + tuple(rest))
    return out


def gamma(F: Field, n: int, twisted: bool = True) -> List[Scalar]:
    """Highest weight w_n xi."""
    return perm_act(w_n(n), xi(F, n, twisted))


# ---------------------------------------------------------------------------
# Relation checks
# ---------------------------------------------------------------------------


def _far(i: int, j: int, n: int) -> bool:
    """i - j is not congruent to 0 or +-1 mod n."""
    return (i - j) % n not in (0, 1, n - 1)


def tl_relations_report(F: Field, n: int, twisted: bool = True) -> Report:
    """The defining relations of the extended affine Temperley-Lieb algebra
    as operator identities on V_n (indices mod n)."""
    R = rep(F, n, twisted)
    I = Operator.identity(F, n)
    out = Report()
    out.add("rho rho^-1 = 1", R.rho() @ R.rho(-1) == I and R.rho(-1) @ R.rho() == I)
    if n < 2:
        return out
    d = delta(F)
    for i in range(n):
        ei = R.e(i)
        out.add(f"e{i}^2 = delta e{i}", ei @ ei == ei.scale(d))
        out.add(f"rho e{i} = e{i + 1} rho", R.rho() @ ei == R.e(i + 1) @ R.rho())
        for j in range(n):
            if _far(i, j, n):
                out.add(f"e{i} e{j} = e{j} e{i}", ei @ R.e(j) == R.e(j) @ ei)
        if n >= 3:
            out.add(f"e{i} e{i + 1} e{i} = e{i}", ei @ R.e(i + 1) @ ei == ei)
            out.add(f"e{i} e{i - 1} e{i} = e{i}", ei @ R.e(i - 1) @ ei == ei)
    rn = I
    for _ in range(n):
        rn = R.rho() @ rn
    re1 = R.rho() @ R.e(1)
    lhs = I
    for _ in range(n - 1):
        lhs = re1 @ lhs
    out.add("(rho e1)^(n-1) = rho^n (rho e1)", lhs == rn @ re1)
    out.add("rho^n central", all(rn @ R.e(i) == R.e(i) @ rn for i in range(n)))
    return out


def hecke_relations_report(F: Field, n: int, twisted: bool = True) -> Report:
    """Affine Hecke relations of T_i = e_i + t^{-1/2} (i mod n) and the
    Bernstein relations of the Y_j on V_n."""
    R = rep(F, n, twisted)
    I = Operator.identity(F, n)
    th, thi = F.s_pow(2), F.s_pow(-2)
    out = Report()
    if n < 2:
        return out
    for i in range(n):
        Ti = R.T(i)
        out.add(f"(T{i} - t^-1/2)(T{i} + t^1/2) = 0", ((Ti - I.scale(thi)) @ (Ti + I.scale(th))).is_zero())
        out.add(f"T{i} T{i}^-1 = 1", Ti @ R.T(i, inverse=True) == I)
        out.add(f"rho T{i} = T{i + 1} rho", R.rho() @ Ti == R.T(i + 1) @ R.rho())
        for j in range(n):
            if _far(i, j, n):
                out.add(f"T{i} T{j} = T{j} T{i}", Ti @ R.T(j) == R.T(j) @ Ti)
        if n >= 3:
            Tj = R.T(i + 1)
            out.add(f"braid T{i} T{i + 1}", Ti @ Tj @ Ti == Tj @ Ti @ Tj)
    for i in range(1, n):
        Ti = R.T(i)
        out.add(f"T{i} Y{i + 1} T{i} = Y{i}", Ti @ R.Y(i + 1) @ Ti == R.Y(i))
        for j in range(1, n + 1):
            if j not in (i, i + 1):
                out.add(f"T{i} Y{j} = Y{j} T{i}", Ti @ R.Y(j) == R.Y(j) @ Ti)
    for i in range(1, n + 1):
        out.add(f"Y{i} Y{i}^-1 = 1", R.Y(i) @ R.Y(i, inverse=True) == I)
        for j in range(i + 1, n + 1):
            out.add(f"Y{i} Y{j} = Y{j} Y{i}", R.Y(i) @ R.Y(j) == R.Y(j) @ R.Y(i))
    word = I
    for k in range(n - 1, 0, -1):
        word = R.T(k) @ word
    out.add("rho = T1...T_{n-1} Y_n", word @ R.Y(n) == R.rho())
    return out


def weight_vector_report(F: Field, n: int, twisted: bool = True) -> Report:
    """Yhat_j Q_n = xihat_j Q_n, Yhat_{2i} D_{J+i} = -t^{-3/4} D_J and Q_n != 0."""
    R = rep(F, n, twisted)
    out = Report()
    Q = build_Qn(F, n, twisted)
    out.add(f"Q_{n} != 0", not Q.is_zero())
    xh = xi_hat(F, n, twisted)
    for j in range(1, n + 1):
        out.add(f"Yhat{j} Q = xihat{j} Q", R.yhat_apply(j, Q) == Q.scale(xh[j - 1]))
    D = all_DJ(F, n, twisted)
    for J, vec in D.items():
        if J:
            out.add(f"Yhat{2 * J[-1]} D{J}", R.yhat_apply(2 * J[-1], vec) == D[J[:-1]].scale(-F.s_pow(-3)))
    return out


def pairing_report(F: Field, k_max: int = 3) -> Report:
    """Z_{2k}(Q_{2k}) against the closed sum over subsets J."""
    out = Report()
    for k in range(1, k_max + 1):
        got, want = pair_close(build_Qn(F, 2 * k)), pairing_formula(F, k)
        out.add(f"Z_{2 * k}(Q_{2 * k})", got == want, f"got {got}, expected {want}")
    return out


def principal_series_report(F: Field, n: int, twisted: bool = True, max_length: int = 3) -> Report:
    """Highest weight vector u_e = I_{w_n} Q_n, its parabolic invariance,
    the vectors u_w = I_w u_e for minimal coset representatives, and
    I_{w^{-1}} I_w = e_w(mu) on the weight vector Q_n for short w."""
    from itertools import permutations

    R = rep(F, n, twisted)
    out = Report()
    Q = build_Qn(F, n, twisted)
    ue = R.intertwiner_apply(w_n(n), Q)
    g = gamma(F, n, twisted)
    out.add("u_e != 0", not ue.is_zero())
    for j in range(1, n + 1):
        out.add(f"Y{j} u_e = gamma{j} u_e", R.Y(j).apply(ue) == ue.scale(g[j - 1]))
    for i in parabolic_I(n):
        out.add(f"T{i} u_e = t^-1/2 u_e", R.T(i).apply(ue) == ue.scale(F.s_pow(-2)))
    for w in min_coset_reps(n):
        uw = R.intertwiner_apply(w, ue)
        wg = perm_act(w, g)
        ok = not uw.is_zero() and all(R.Y(j).apply(uw) == uw.scale(wg[j - 1]) for j in range(1, n + 1))
        out.add(f"u_{''.join(map(str, w))} weight w gamma", ok)
    mu = xi(F, n, twisted)
    for w in permutations(range(1, n + 1)):
        if perm_length(w) > max_length:
            continue
        lhs = R.intertwiner_apply(perm_inverse(w), R.intertwiner_apply(w, Q))
        out.add(f"I_w^-1 I_w Q, w={''.join(map(str, w))}", lhs == Q.scale(e_w(F, w, mu)))
    return out
