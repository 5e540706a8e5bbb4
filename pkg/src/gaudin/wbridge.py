"""Yangian character ring, screening operators and the map to classical W-algebras.

Elements of the character ring are Laurent polynomials in symbols λ_j(a) with
j running over the free indices (1..N for gl_N, 1..n for the other types) and
rational shifts a.  Primed symbols and the middle symbol of type B are
eliminated on construction, so equality is equality of Laurent polynomials.

The W-algebra side lives in polynomials in μ_i^(r) with deg μ_i^(r) = -r-1,
identified with U(ĥ_-) through X_ii[-r-1] = μ_i^(r)/r!.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .diffops import ScalarDiffOp
from .eigen import (
    _unit,
    bd_formula,
    c_formula,
    cdet_formula,
    det_formula,
    pfaffian_formula,
    projector_formula,
    trace_series_formula,
)
from .rational import as_fraction

GR_CAP = 16

Symbol = Tuple[int, Fraction]  # (index, shift)
LMono = Tuple[Tuple[Symbol, int], ...]
Var = Tuple[int, int]  # (index, r) for μ_index^(r)
WMono = Tuple[Tuple[Var, int], ...]


class BridgeError(ValueError):
    pass


class GrNotSaturated(BridgeError):
    pass


# type data -----------------------------------------------------------------------
@dataclass(frozen=True)
class TypeSpec:
    """Family letter and rank: N for gl_N, n for o_{2n+1}, sp_{2n}, o_{2n}."""

    family: str
    rank: int

    def __post_init__(self):
        if self.family not in ("A", "B", "C", "D"):
            raise BridgeError(f"unknown family {self.family!r}")
        if self.rank < 1:
            raise BridgeError("rank must be positive")

    @classmethod
    def from_lie(cls, spec) -> "TypeSpec":
        return cls(spec.family, spec.N if spec.family == "A" else spec.n)

    @property
    def N(self) -> int:
        return {"A": self.rank, "B": 2 * self.rank + 1}.get(self.family, 2 * self.rank)

    @property
    def nvars(self) -> int:
        return self.rank

    @property
    def colors(self) -> range:
        return range(1, self.rank) if self.family == "A" else range(1, self.rank + 1)

    @property
    def kappa(self) -> Fraction:
        if self.family == "A":
            raise BridgeError("κ is defined for B, C, D only")
        return Fraction(self.N, 2) + (1 if self.family == "C" else -1)

    def prime(self, j: int) -> int:
        return self.N - j + 1

    def dual(self) -> "TypeSpec":
        return TypeSpec({"B": "C", "C": "B"}.get(self.family, self.family), self.rank)

    def step(self, i: int) -> Fraction:
        if self.family != "A" and i == self.rank:
            return {"B": Fraction(1, 2), "C": Fraction(2), "D": Fraction(1)}[self.family]
        return Fraction(1)

    def check_color(self, i: int):
        if i not in self.colors:
            raise BridgeError(f"color {i} outside {self.colors.start}..{self.colors.stop - 1}")
        if self.family == "D" and self.rank < 2:
            raise BridgeError("type D screenings need n >= 2")

    @property
    def name(self) -> str:
        return {"A": f"gl_{self.N}", "B": f"o_{self.N}", "C": f"sp_{self.N}", "D": f"o_{self.N}"}[self.family]


def dual_family(family: str) -> str:
    return {"B": "C", "C": "B"}.get(family, family)


# character ring ------------------------------------------------------------------
def _mono_mul(a: LMono, b: LMono) -> LMono:
    d: Dict[Symbol, int] = dict(a)
    for s, e in b:
        d[s] = d.get(s, 0) + e
    return tuple(sorted((s, e) for s, e in d.items() if e))


def _mono_pow(a: LMono, k: int) -> LMono:
    return tuple((s, e * k) for s, e in a) if k else ()


class LambdaElement:
    """Laurent polynomial in the free λ symbols of a :class:`TypeSpec`."""

    __slots__ = ("ts", "terms")

    def __init__(self, ts: TypeSpec, terms: Optional[Mapping[LMono, Fraction]] = None):
        self.ts = ts
        self.terms = {m: Fraction(c) for m, c in (terms or {}).items() if c}

    @classmethod
    def const(cls, ts: TypeSpec, c) -> "LambdaElement":
        return cls(ts, {(): as_fraction(c)})

    @classmethod
    def symbol(cls, ts: TypeSpec, j: int, a) -> "LambdaElement":
        if not 1 <= j <= ts.nvars:
            raise BridgeError(f"free index {j} outside 1..{ts.nvars}")
        return cls(ts, {(((j, as_fraction(a)), 1),): Fraction(1)})

    def _coerce(self, other) -> "LambdaElement":
        if isinstance(other, LambdaElement):
            if other.ts != self.ts:
                raise BridgeError("elements of different character rings")
            return other
        return LambdaElement.const(self.ts, other)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other) -> "LambdaElement":
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return LambdaElement(self.ts, out)

    __radd__ = __add__

    def __neg__(self) -> "LambdaElement":
        return LambdaElement(self.ts, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "LambdaElement":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "LambdaElement":
        return self._coerce(other) - self

    def __mul__(self, other) -> "LambdaElement":
        other = self._coerce(other)
        out: Dict[LMono, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return LambdaElement(self.ts, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LambdaElement":
        if k < 0:
            return self.inverse() ** (-k)
        out = LambdaElement.const(self.ts, 1)
        for _ in range(k):
            out = out * self
        return out

    def inverse(self) -> "LambdaElement":
        if len(self.terms) != 1:
            raise BridgeError("only monomials are invertible in the Laurent ring")
        (m, c), = self.terms.items()
        return LambdaElement(self.ts, {_mono_pow(m, -1): 1 / c})

    def __truediv__(self, other) -> "LambdaElement":
        return self * self._coerce(other).inverse()

    def __eq__(self, other) -> bool:
        if not isinstance(other, LambdaElement):
            if isinstance(other, (int, Fraction)):
                return self.terms == LambdaElement.const(self.ts, other).terms
            return NotImplemented
        return self.ts == other.ts and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.ts, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items()):
            fac = "*".join(f"L{j}({a})" + (f"^{e}" if e != 1 else "") for (j, a), e in m)
            parts.append(f"{c}" + (f"*{fac}" if fac else ""))
        return " + ".join(parts)

    def to_json(self) -> list:
        out = []
        for m, c in sorted(self.terms.items()):
            out.append({"coeff": str(c), "factors": [[j, str(a), e] for (j, a), e in m]})
        return out


def lam(ts: TypeSpec, j: int, a) -> LambdaElement:
    """λ_j(a) for any j in 1..N, with primed and middle symbols eliminated."""
    a = as_fraction(a)
    if not 1 <= j <= ts.N:
        raise BridgeError(f"index {j} outside 1..{ts.N}")
    if ts.family == "A" or j <= ts.rank:
        return LambdaElement.symbol(ts, j, a)
    n, kappa = ts.rank, ts.kappa
    out = LambdaElement.const(ts, 1)
    if ts.family == "B" and j == n + 1:
        for i in range(1, n + 1):
            out = out * LambdaElement.symbol(ts, i, a + n - i) / LambdaElement.symbol(ts, i, a + n - i + Fraction(1, 2))
        return out
    k = ts.prime(j)
    for i in range(1, k + 1):
        if i < k:
            out = out * LambdaElement.symbol(ts, i, a + kappa - i)
        out = out / LambdaElement.symbol(ts, i, a + kappa - i + 1)
    return out


def lambda_sum(ts: TypeSpec, a=0) -> LambdaElement:
    out = LambdaElement.const(ts, 0)
    for j in range(1, ts.N + 1):
        out = out + lam(ts, j, a)
    return out


# σ-modules ------------------------------------------------------------------------
def _rho(ts: TypeSpec, i: int, b: Fraction) -> LambdaElement:
    """σ_i(b + step) = ρ(b) σ_i(b)."""
    if ts.family != "A" and i == ts.rank:
        top = lam(ts, ts.rank - 1 if ts.family == "D" else ts.rank, b)
        return top / lam(ts, ts.rank + 1, b)
    return lam(ts, i, b) / lam(ts, i + 1, b)


@lru_cache(maxsize=None)
def _transport(ts: TypeSpec, i: int, a: Fraction) -> Tuple[Fraction, LambdaElement]:
    """(rep, c) with σ_i(a) = c σ_i(rep) and rep in [0, step)."""
    step = ts.step(i)
    rep = a % step
    k = int((a - rep) / step)
    c = LambdaElement.const(ts, 1)
    if k > 0:
        for t in range(k):
            c = c * _rho(ts, i, rep + t * step)
    else:
        for t in range(1, -k + 1):
            c = c / _rho(ts, i, rep - t * step)
    return rep, c


class SigmaElement:
    """Σ c_rep σ_i(rep) with canonical arguments rep in [0, step)."""

    __slots__ = ("ts", "color", "terms")

    def __init__(self, ts: TypeSpec, color: int, terms: Optional[Mapping[Fraction, LambdaElement]] = None):
        self.ts = ts
        self.color = color
        self.terms: Dict[Fraction, LambdaElement] = {}
        for a, c in (terms or {}).items():
            self.add(c, a)

    def add(self, coeff: LambdaElement, a) -> None:
        rep, c = _transport(self.ts, self.color, as_fraction(a))
        got = self.terms.get(rep)
        new = coeff * c if got is None else got + coeff * c
        if new.is_zero():
            self.terms.pop(rep, None)
        else:
            self.terms[rep] = new

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, SigmaElement):
            return NotImplemented
        return (self.ts, self.color, self.terms) == (other.ts, other.color, other.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({c})*s{self.color}({a})" for a, c in sorted(self.terms.items()))

    def to_json(self) -> list:
        return [{"arg": str(a), "coeff": c.to_json()} for a, c in sorted(self.terms.items())]


def _table(ts: TypeSpec, i: int, j: int) -> List[Tuple[int, Fraction]]:
    """S̃_i λ_j(a) = λ_j(a) Σ sign σ_i(a + shift); j may be primed (1..N)."""
    h = Fraction(1, 2)
    n = ts.rank
    if ts.family == "A" or i < n:
        if j == i:
            return [(1, Fraction(0))]
        if j == i + 1:
            return [(-1, Fraction(1))]
        if ts.family == "A":
            return []
        kappa = ts.kappa
        if j == ts.prime(i):
            return [(-1, kappa - i + 1)]
        if j == ts.prime(i + 1):
            return [(1, kappa - i)]
        return []
    if ts.family == "B":
        return {
            n: [(1, Fraction(0)), (1, -h)],
            n + 1: [(1, -h), (-1, h)],
            n + 2: [(-1, Fraction(0)), (-1, h)],
        }.get(j, [])
    if ts.family == "C":
        return {n: [(1, Fraction(0))], n + 1: [(-1, Fraction(2))]}.get(j, [])
    # D
    if j in (n - 1, n):
        return [(1, Fraction(0))]
    if j in (ts.prime(n), ts.prime(n - 1)):
        return [(-1, Fraction(1))]
    return []


def screening_S(i: int, A: LambdaElement) -> SigmaElement:
    """i-th screening of a character-ring element, Leibniz rule on Laurent monomials."""
    ts = A.ts
    ts.check_color(i)
    out = SigmaElement(ts, i)
    for m, c in A.terms.items():
        mono = LambdaElement(ts, {m: c})
        for (j, a), e in m:
            for sign, shift in _table(ts, i, j):
                out.add(mono * (e * sign), a + shift)
    return out


def screen_product(ts: TypeSpec, i: int, factors: Sequence[Tuple[int, object]]) -> SigmaElement:
    """S̃_i of a product of raw symbols λ_j(a), j in 1..N, using the full per-type tables."""
    ts.check_color(i)
    prod = LambdaElement.const(ts, 1)
    for j, a in factors:
        prod = prod * lam(ts, j, a)
    out = SigmaElement(ts, i)
    for j, a in factors:
        for sign, shift in _table(ts, i, j):
            out.add(prod * sign, as_fraction(a) + shift)
    return out


def relation_instances(ts: TypeSpec, a) -> List[Tuple[list, list]]:
    """Both sides of λ_i(a+κ-i) λ_{i'}(a) = λ_{i+1}(a+κ-i) λ_{(i+1)'}(a) as raw factor lists."""
    if ts.family == "A":
        return []
    a = as_fraction(a)
    top = ts.rank if ts.family == "B" else ts.rank - 1
    out = []
    for i in range(0, top + 1):
        b = a + ts.kappa - i
        lhs = [] if i == 0 else [(i, b), (ts.prime(i), a)]
        rhs = [(i + 1, b), (ts.prime(i + 1), a)]
        out.append((lhs, rhs))
    return out


def relations_respected(ts: TypeSpec, a) -> bool:
    for lhs, rhs in relation_instances(ts, a):
        for i in ts.colors:
            if screen_product(ts, i, lhs) != screen_product(ts, i, rhs):
                return False
    return True


def is_character(A: LambdaElement) -> bool:
    return all(screening_S(i, A).is_zero() for i in A.ts.colors)


# W side -----------------------------------------------------------------------------
def _wmul(a: WMono, b: WMono) -> WMono:
    d: Dict[Var, int] = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def _depth(m: WMono) -> int:
    return sum(e * (r + 1) for (_, r), e in m)


class WPolynomial:
    """Polynomial in μ_i^(r) over the rationals; ∂ sends μ_i^(r) to μ_i^(r+1)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[WMono, Fraction]] = None):
        self.terms = {m: Fraction(c) for m, c in (terms or {}).items() if c}

    @classmethod
    def var(cls, i: int, r: int = 0) -> "WPolynomial":
        return cls({(((i, r), 1),): 1})

    @classmethod
    def const(cls, c) -> "WPolynomial":
        return cls({(): as_fraction(c)})

    def one(self) -> "WPolynomial":
        return WPolynomial.const(1)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def _coerce(self, other) -> "WPolynomial":
        return other if isinstance(other, WPolynomial) else WPolynomial.const(other)

    def __add__(self, other) -> "WPolynomial":
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return WPolynomial(out)

    __radd__ = __add__

    def __neg__(self) -> "WPolynomial":
        return WPolynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "WPolynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "WPolynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "WPolynomial":
        if isinstance(other, (int, Fraction)):
            return WPolynomial({m: c * other for m, c in self.terms.items()})
        return self.mul_truncated(self._coerce(other), None)

    __rmul__ = __mul__

    def mul_truncated(self, other: "WPolynomial", max_depth: Optional[int]) -> "WPolynomial":
        out: Dict[WMono, Fraction] = {}
        for m1, c1 in self.terms.items():
            d1 = _depth(m1)
            for m2, c2 in other.terms.items():
                if max_depth is not None and d1 + _depth(m2) > max_depth:
                    continue
                m = _wmul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return WPolynomial(out)

    def __pow__(self, k: int) -> "WPolynomial":
        out = self.one()
        for _ in range(k):
            out = out * self
        return out

    def derivative(self) -> "WPolynomial":
        out: Dict[WMono, Fraction] = {}
        for m, c in self.terms.items():
            for idx, ((i, r), e) in enumerate(m):
                rest = m[:idx] + (((i, r), e - 1),) + m[idx + 1:] if e > 1 else m[:idx] + m[idx + 1:]
                nm = _wmul(rest, (((i, r + 1), 1),))
                out[nm] = out.get(nm, 0) + c * e
        return WPolynomial(out)

    def partial(self, i: int, r: int) -> "WPolynomial":
        out: Dict[WMono, Fraction] = {}
        for m, c in self.terms.items():
            for idx, (v, e) in enumerate(m):
                if v == (i, r):
                    nm = m[:idx] + ((v, e - 1),) + m[idx + 1:] if e > 1 else m[:idx] + m[idx + 1:]
                    out[nm] = out.get(nm, 0) + c * e
        return WPolynomial(out)

    def component(self, depth: int) -> "WPolynomial":
        return WPolynomial({m: c for m, c in self.terms.items() if _depth(m) == depth})

    def degrees(self) -> List[int]:
        return sorted({-_depth(m) for m in self.terms}, reverse=True)

    def max_r(self, indices: Optional[Iterable[int]] = None) -> int:
        keep = None if indices is None else set(indices)
        return max((r for m in self.terms for (i, r), _ in m if keep is None or i in keep), default=-1)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = WPolynomial.const(other)
        if not isinstance(other, WPolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items(), key=lambda t: (_depth(t[0]), t[0])):
            fac = "*".join(f"mu{i}^({r})" + (f"**{e}" if e > 1 else "") for (i, r), e in m)
            if not fac:
                parts.append(str(c))
            elif c == 1:
                parts.append(fac)
            elif c == -1:
                parts.append("-" + fac)
            else:
                parts.append(f"{c}*{fac}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> list:
        return [
            {"coeff": str(c), "vars": [[i, r, e] for (i, r), e in m]}
            for m, c in sorted(self.terms.items(), key=lambda t: (_depth(t[0]), t[0]))
        ]


# gr ----------------------------------------------------------------------------------
@lru_cache(maxsize=None)
def _symbol_series(j: int, a: Fraction, e: int, depth: int) -> WPolynomial:
    """λ_j(a)^e with λ_j(a) = 1 + Σ_r μ_j^(r) a^r / r!, truncated at the given depth."""
    x = WPolynomial({(((j, r), 1),): a ** r / factorial(r) for r in range(depth)})
    if e < 0:
        # (1 + x)^{-1} = Σ (-x)^k
        inv = WPolynomial.const(1)
        p = WPolynomial.const(1)
        for _ in range(depth):
            p = p.mul_truncated(-x, depth)
            inv = inv + p
        base, e = inv, -e
    else:
        base = x + 1
    out = WPolynomial.const(1)
    for _ in range(e):
        out = out.mul_truncated(base, depth)
    return out


def expand(A: LambdaElement, depth: int) -> WPolynomial:
    """μ-expansion of A keeping all terms of depth <= ``depth``."""
    out = WPolynomial()
    for m, c in A.terms.items():
        t = WPolynomial.const(c)
        for (j, a), e in m:
            t = t.mul_truncated(_symbol_series(j, a, e, depth), depth)
        out = out + t
    return out


def gr_map(A: LambdaElement, cap: int = GR_CAP) -> WPolynomial:
    """Top-degree homogeneous component of the μ-expansion of A."""
    if A.is_zero():
        return WPolynomial()
    depth = 0
    while True:
        depth = min(cap, max(2 * depth, 2))
        full = expand(A, depth)
        for d in range(depth + 1):
            comp = full.component(d)
            if comp:
                return comp
        if depth >= cap:
            raise GrNotSaturated(f"truncation not saturated at cap R={cap}")


def gr_depth(P: WPolynomial) -> int:
    ds = {_depth(m) for m in P.terms}
    if len(ds) > 1:
        raise BridgeError("not homogeneous")
    return ds.pop() if ds else 0


# V screenings ---------------------------------------------------------------------------
def _v_data(ts: TypeSpec, i: int) -> Tuple[List[Tuple[int, int]], List[Tuple[int, int]]]:
    """(generating-function combination, derivative slots) as (index, coefficient) lists."""
    ts.check_color(i)
    n = ts.rank
    if ts.family == "A" or i < n:
        pair = [(i, 1), (i + 1, -1)]
        return pair, pair
    if ts.family == "B":
        return [(n, 1)], [(n, 1)]
    if ts.family == "C":
        return [(n, 2)], [(n, 1)]
    both = [(n - 1, 1), (n, 1)]
    return both, both


def v_coefficients(ts: TypeSpec, i: int, R: int) -> List[WPolynomial]:
    """V_{i[0]}..V_{i[R]} from Σ V_[r] z^r = exp Σ_m x_m z^m / m."""
    gen, _ = _v_data(ts, i)
    # x_m = Σ c X_jj[-m] with X_jj[-m] = μ_j^(m-1)/(m-1)!
    xs = [None] + [
        WPolynomial({(((j, m - 1), 1),): Fraction(c, factorial(m - 1)) for j, c in gen}) for m in range(1, R + 1)
    ]
    ys = [WPolynomial.const(1)]
    for r in range(1, R + 1):
        acc = WPolynomial()
        for m in range(1, r + 1):
            acc = acc + xs[m] * ys[r - m]
        ys.append(acc * Fraction(1, r))
    return ys


def screening_V(ts: TypeSpec, i: int, P: WPolynomial) -> WPolynomial:
    """Σ_r V_[r] Σ_slots c ∂/∂X_jj[-r-1], with ∂/∂X_jj[-r-1] = r! ∂/∂μ_j^(r)."""
    _, slots = _v_data(ts, i)
    R = P.max_r(j for j, _ in slots)
    if R < 0:
        return WPolynomial()
    vs = v_coefficients(ts, i, R)
    out = WPolynomial()
    for r in range(R + 1):
        d = WPolynomial()
        for j, c in slots:
            d = d + P.partial(j, r) * c
        if d:
            out = out + vs[r] * d * factorial(r)
    return out


def is_W_element(P: WPolynomial, ts: TypeSpec) -> bool:
    return all(screening_V(ts, i, P).is_zero() for i in ts.colors)


# Harish-Chandra images --------------------------------------------------------------------
HC_KINDS = {
    "A": ("rdet", "cdet", "antisym-trace", "sym-trace", "trace-power"),
    "B": ("bcd-trace",),
    "C": ("bcd-trace",),
    "D": ("bcd-trace", "pfaffian"),
}


def hc_image_builder(family: str, kind: str, m: Optional[int], rank: int) -> ScalarDiffOp:
    """Image in U(ĥ_-)[τ] of the operator family, τ standing to the right.

    Entries X_ii[-1] are μ_i^(0); the Pfaffian returns its τ-free value applied to 1.
    """
    if family not in HC_KINDS or kind not in HC_KINDS[family]:
        raise BridgeError(f"unsupported: kind {kind!r} for family {family!r}")
    if rank < 1:
        raise BridgeError("rank must be positive")
    fs = [WPolynomial.var(i, 0) for i in range(1, rank + 1)]
    needs_m = kind not in ("rdet", "cdet", "pfaffian")
    if needs_m and (m is None or m < 0):
        raise BridgeError(f"kind {kind!r} needs m >= 0")
    if kind == "rdet":
        return det_formula(fs)
    if kind == "cdet":
        return cdet_formula(fs)
    if kind in ("antisym-trace", "sym-trace"):
        if kind == "antisym-trace" and m > rank:
            raise BridgeError(f"antisymmetrizer of degree {m} vanishes for N={rank}")
        return projector_formula(fs, m, "antisymmetrizer" if kind == "antisym-trace" else "symmetrizer")
    if kind == "trace-power":
        if m == 0:
            return _unit(fs[0]).scale(rank)
        return trace_series_formula(fs, m)
    if kind == "pfaffian":
        val = pfaffian_formula(fs)
        return ScalarDiffOp({0: val} if val is not None else {})
    if family == "C":
        if m > 2 * rank + 1:
            raise BridgeError(f"m={m} outside 0..{2 * rank + 1}")
        return c_formula(fs, m) if m else _unit(fs[0])
    return bd_formula(family, fs, m)


def hc_in_kernel(op: ScalarDiffOp, ts: TypeSpec) -> bool:
    return all(is_W_element(c, ts) for c in op.coeffs.values())


# curated characters --------------------------------------------------------------------
def _pair_sum(ts: TypeSpec, s, t, a=0) -> LambdaElement:
    out = LambdaElement.const(ts, 0)
    for i, j in combinations(range(1, ts.N + 1), 2):
        out = out + lam(ts, i, as_fraction(a) + s) * lam(ts, j, as_fraction(a) + t)
    return out


def second_fundamental(ts: TypeSpec, a=0) -> Optional[LambdaElement]:
    """Σ_{i<j} λ_i(a+s) λ_j(a+t) for the first small shift pair that is a character, if any."""
    grid = [Fraction(k, 2) for k in range(-4, 5)]
    for s in grid:
        for t in grid:
            cand = _pair_sum(ts, s, t, a)
            if is_character(cand):
                return cand
    return None


def curated_characters(ts: TypeSpec) -> List[Tuple[str, LambdaElement]]:
    """Characters built from the vector character and its shifts; each one is checked by callers."""
    N = ts.N
    T0 = lambda_sum(ts, 0)
    T1 = lambda_sum(ts, 1)
    Th = lambda_sum(ts, Fraction(1, 2))
    c0 = T0 - N
    out = [
        ("lambda_sum", c0),
        ("lambda_sum_shift_difference", T0 - T1),
        ("lambda_sum_half_shift_difference", T0 - Th),
        ("lambda_sum_square", c0 * c0),
        ("lambda_sum_product", (T0 - N) * (T1 - N)),
        ("lambda_sum_combination", c0 * 3 + (T0 - T1) * (T0 - Th) - (T1 - N) * 2),
    ]
    e2 = second_fundamental(ts)
    if e2 is not None:
        # strip the constant and the Σμ part so the top component is of degree -2 or lower
        out.append(("second_fundamental_reduced", e2 - (c0 * (N - 1)) - (N * (N - 1)) // 2))
    return out


BUILTINS = ("lambda_sum", "lambda_sum_raw", "second_fundamental")


def builtin_character(name: str, ts: TypeSpec, a=0) -> LambdaElement:
    if name == "lambda_sum":
        return lambda_sum(ts, a) - ts.N
    if name == "lambda_sum_raw":
        return lambda_sum(ts, a)
    if name == "second_fundamental":
        got = second_fundamental(ts, a)
        if got is None:
            raise BridgeError(f"no second fundamental character found for {ts.name}")
        return got
    raise BridgeError(f"unknown built-in character {name!r}")


def lambda_from_json(ts: TypeSpec, terms: list) -> LambdaElement:
    """Terms as [{"coeff": "p/q", "factors": [[j, "a", e], ...]}], j in 1..N (primed allowed)."""
    out = LambdaElement.const(ts, 0)
    for t in terms:
        x = LambdaElement.const(ts, as_fraction(t.get("coeff", "1")))
        for f in t.get("factors", []):
            j, a = int(f[0]), as_fraction(f[1])
            e = int(f[2]) if len(f) > 2 else 1
            x = x * lam(ts, j, a) ** e
        out = out + x
    return out
