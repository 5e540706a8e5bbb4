"""Exact univariate polynomials and rational functions in ``u`` over Q.

Polynomials are dense tuples of :class:`fractions.Fraction`, lowest degree
first, with no trailing zeros (the zero polynomial is the empty tuple).
A :class:`RationalFunction` is always stored reduced with a monic
denominator, so equality is structural.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Sequence, Union

Poly = tuple  # tuple[Fraction, ...]

ONE_POLY: Poly = (Fraction(1),)
ZERO_POLY: Poly = ()


def as_fraction(x) -> Fraction:
    """Coerce an int / Fraction / ``"p/q"`` string to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def _trim(c: list) -> Poly:
    while c and not c[-1]:
        c.pop()
    return tuple(c)


def poly(coeffs: Iterable) -> Poly:
    return _trim([as_fraction(c) for c in coeffs])


def padd(a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    c = list(a)
    for i, x in enumerate(b):
        c[i] += x
    return _trim(c)


def pneg(a: Poly) -> Poly:
    return tuple(-x for x in a)


def psub(a: Poly, b: Poly) -> Poly:
    return padd(a, pneg(b))


def pscale(a: Poly, s: Fraction) -> Poly:
    if not s:
        return ZERO_POLY
    return tuple(x * s for x in a)


def pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ZERO_POLY
    if len(a) == 1:
        return pscale(b, a[0])
    if len(b) == 1:
        return pscale(a, b[0])
    c = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                c[i + j] += x * y
    return _trim(c)


def pdivmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    db = len(b) - 1
    lead = b[-1]
    if len(r) <= db:
        return ZERO_POLY, tuple(r)
    q = [Fraction(0)] * (len(r) - db)
    for k in range(len(r) - 1, db - 1, -1):
        coef = r[k] / lead
        if coef:
            q[k - db] = coef
            for j in range(db + 1):
                r[k - db + j] -= coef * b[j]
    return _trim(q), _trim(r[:db])


def pmonic(a: Poly) -> Poly:
    if not a or a[-1] == 1:
        return a
    lead = a[-1]
    return tuple(x / lead for x in a)


@lru_cache(maxsize=65536)
def pgcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd (Euclid over Q)."""
    while b:
        a, b = b, pdivmod(a, b)[1]
    return pmonic(a)


def pderiv(a: Poly) -> Poly:
    return _trim([i * a[i] for i in range(1, len(a))])


def peval(a: Poly, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def pdeg(a: Poly) -> int:
    return len(a) - 1


def linear(root) -> Poly:
    """The monic polynomial ``u - root``."""
    return (-as_fraction(root), Fraction(1))


def poly_power(a: Poly, k: int) -> Poly:
    out = ONE_POLY
    for _ in range(k):
        out = pmul(out, a)
    return out


def poly_to_str(a: Poly, var: str = "u") -> str:
    if not a:
        return "0"
    parts = []
    for k in range(len(a) - 1, -1, -1):
        c = a[k]
        if not c:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if mono and abs(c) == 1:
            body = mono
        elif mono:
            body = f"{abs(c)}*{mono}"
        else:
            body = str(abs(c))
        parts.append(("-" if c < 0 else "+") + body)
    s = "".join(parts)
    return s[1:] if s.startswith("+") else s


Scalar = Union[int, Fraction]


class RationalFunction:
    """Reduced quotient ``num/den`` of polynomials in ``u`` with monic ``den``."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Poly, den: Poly = ONE_POLY, _reduced: bool = False):
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if not _reduced:
            num, den = _reduce(tuple(num), tuple(den))
        self.num = num
        self.den = den
        self._hash = None

    # constructors -------------------------------------------------------
    @classmethod
    def const(cls, c) -> "RationalFunction":
        c = as_fraction(c)
        return cls((c,) if c else ZERO_POLY, ONE_POLY, _reduced=True)

    @classmethod
    def variable(cls) -> "RationalFunction":
        return cls((Fraction(0), Fraction(1)), ONE_POLY, _reduced=True)

    @classmethod
    def pole(cls, p, order: int = 1, coeff=1) -> "RationalFunction":
        """``coeff / (u - p)**order``."""
        c = as_fraction(coeff)
        if not c:
            return ZERO
        return cls((c,), poly_power(linear(p), order), _reduced=True)

    @classmethod
    def from_poly(cls, num: Sequence, den: Sequence = (1,)) -> "RationalFunction":
        return cls(poly(num), poly(den))

    # predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self) -> bool:
        return bool(self.num)

    def is_constant(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.num[0] if self.num else Fraction(0)

    # arithmetic ---------------------------------------------------------
    @staticmethod
    def _coerce(x) -> "RationalFunction":
        if isinstance(x, RationalFunction):
            return x
        return RationalFunction.const(x)

    def __add__(self, other) -> "RationalFunction":
        if not isinstance(other, RationalFunction):
            if isinstance(other, (int, Fraction)):
                other = RationalFunction.const(other)
            else:
                return NotImplemented
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            num = padd(self.num, other.num)
            if len(self.den) == 1:
                return RationalFunction(num, ONE_POLY, _reduced=True)
            return RationalFunction(num, self.den)
        g = pgcd(self.den, other.den)
        if len(g) == 1:
            return RationalFunction(
                padd(pmul(self.num, other.den), pmul(other.num, self.den)),
                pmul(self.den, other.den),
            )
        da = pdivmod(self.den, g)[0]
        db = pdivmod(other.den, g)[0]
        num = padd(pmul(self.num, db), pmul(other.num, da))
        return RationalFunction(num, pmul(pmul(da, db), g))

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(pneg(self.num), self.den, _reduced=True)

    def __sub__(self, other) -> "RationalFunction":
        if not isinstance(other, (RationalFunction, int, Fraction)):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RationalFunction":
        return self._coerce(other) - self

    def __mul__(self, other) -> "RationalFunction":
        if isinstance(other, (int, Fraction)):
            if not other:
                return ZERO
            return RationalFunction(pscale(self.num, Fraction(other)), self.den, _reduced=True)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        if not self.num or not other.num:
            return ZERO
        if len(self.den) == 1 and len(other.den) == 1:
            return RationalFunction(pmul(self.num, other.num), ONE_POLY, _reduced=True)
        # cross-cancel before multiplying keeps the final gcd small
        g1 = pgcd(self.num, other.den)
        g2 = pgcd(other.num, self.den)
        n1 = pdivmod(self.num, g1)[0] if len(g1) > 1 else self.num
        d2 = pdivmod(other.den, g1)[0] if len(g1) > 1 else other.den
        n2 = pdivmod(other.num, g2)[0] if len(g2) > 1 else other.num
        d1 = pdivmod(self.den, g2)[0] if len(g2) > 1 else self.den
        num = pmul(n1, n2)
        den = pmul(d1, d2)
        lead = den[-1]
        if lead != 1:
            num, den = pscale(num, 1 / lead), pscale(den, 1 / lead)
        return RationalFunction(num, den, _reduced=True)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFunction":
        other = self._coerce(other)
        if not other.num:
            raise ZeroDivisionError("division by the zero rational function")
        return self * RationalFunction(other.den, other.num)

    def __rtruediv__(self, other) -> "RationalFunction":
        return self._coerce(other) / self

    def __pow__(self, k: int) -> "RationalFunction":
        if k < 0:
            return ONE / (self ** (-k))
        out = ONE
        for _ in range(k):
            out = out * self
        return out

    def derivative(self) -> "RationalFunction":
        return _derivative(self)

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        """Value at ``x`` (exact for Fraction input, mpf for mpf input)."""
        d = peval(self.den, x)
        if not d:
            raise ZeroDivisionError(f"{self} has a pole at {x}")
        return peval(self.num, x) / d

    def poles(self) -> Poly:
        return self.den

    def degree_bound(self) -> int:
        return max(len(self.num), len(self.den))

    # comparison / display ----------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RationalFunction.const(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __repr__(self) -> str:
        return f"RationalFunction({self})"

    def __str__(self) -> str:
        if len(self.den) == 1:
            return poly_to_str(self.num)
        return f"({poly_to_str(self.num)})/({poly_to_str(self.den)})"

    def to_json(self) -> dict:
        return {"num": [str(c) for c in self.num], "den": [str(c) for c in self.den]}


def _reduce(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    num = _trim(list(num))
    den = _trim(list(den))
    if not den:
        raise ZeroDivisionError("rational function with zero denominator")
    if not num:
        return ZERO_POLY, ONE_POLY
    if len(den) > 1:
        g = pgcd(num, den)
        if len(g) > 1:
            num = pdivmod(num, g)[0]
            den = pdivmod(den, g)[0]
    lead = den[-1]
    if lead != 1:
        num = pscale(num, 1 / lead)
        den = pscale(den, 1 / lead)
    return num, den


@lru_cache(maxsize=65536)
def _derivative(f: RationalFunction) -> RationalFunction:
    if len(f.den) == 1:
        return RationalFunction(pderiv(f.num), ONE_POLY, _reduced=True)
    num = psub(pmul(pderiv(f.num), f.den), pmul(f.num, pderiv(f.den)))
    return RationalFunction(num, pmul(f.den, f.den))


ZERO = RationalFunction(ZERO_POLY, ONE_POLY, _reduced=True)
ONE = RationalFunction(ONE_POLY, ONE_POLY, _reduced=True)
U = RationalFunction.variable()


def rf_arith(a: RationalFunction, b: RationalFunction, op: str) -> RationalFunction:
    """Dispatch ``add``/``sub``/``mul``/``div`` on two rational functions."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def rf_derivative(f: RationalFunction) -> RationalFunction:
    return f.derivative()


def log_derivative_of_product(factors: Iterable[tuple[object, int]]) -> RationalFunction:
    """``d/du log prod (u - r)**e`` built from the expanded polynomial quotient.

    Expands numerator and denominator polynomials explicitly, then returns
    ``P'/P - Q'/Q`` so the result does not rely on partial fractions.
    """
    top: Poly = ONE_POLY
    bottom: Poly = ONE_POLY
    for root, e in factors:
        if e > 0:
            top = pmul(top, poly_power(linear(root), e))
        elif e < 0:
            bottom = pmul(bottom, poly_power(linear(root), -e))
    f = RationalFunction(top, ONE_POLY, _reduced=True)
    g = RationalFunction(bottom, ONE_POLY, _reduced=True)
    return f.derivative() / f - g.derivative() / g
