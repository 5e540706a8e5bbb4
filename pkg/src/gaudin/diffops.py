"""Normal-ordered differential operators in ``d = d/du``.

An operator is stored as ``sum_k c_k * d**k`` with every power of ``d`` to
the right of its coefficient.  Coefficients live in a differential ring:
anything with ``+``, ``-``, ``*``, integer scaling, ``derivative()`` and
truthiness.  Three coefficient rings are used:

* :class:`~gaudin.rational.RationalFunction` (scalar operators, exact),
* :class:`Jet` (scalar operators in float mode, Taylor data at a point),
* :class:`WordPoly` (words in site-indexed Lie generators with rational
  function coefficients; letters are never reordered).

Products push ``d`` to the right with the Leibniz rule
``d**i * c = sum_k binom(i, k) c^(k) d**(i-k)``.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .rational import ONE, ZERO, RationalFunction, as_fraction

Letter = tuple  # ((i, j), site)
Word = tuple  # tuple[Letter, ...]


class WordPoly:
    """Finite sum of ``RationalFunction * word``; words multiply by concatenation."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Word, RationalFunction] | None = None, _clean: bool = False):
        if terms is None:
            terms = {}
        if not _clean:
            terms = {w: c for w, c in terms.items() if c}
        self.terms = terms
        self._hash = None

    @classmethod
    def scalar(cls, c) -> "WordPoly":
        c = RationalFunction._coerce(c)
        return cls({(): c}) if c else cls()

    @classmethod
    def letter(cls, basis, site: int, coeff=ONE) -> "WordPoly":
        coeff = RationalFunction._coerce(coeff)
        return cls({((basis, site),): coeff}) if coeff else cls()

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other):
        if isinstance(other, (int, Fraction, RationalFunction)):
            other = WordPoly.scalar(other)
        if not isinstance(other, WordPoly):
            return NotImplemented
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w)
            if s is None:
                out[w] = c
            else:
                s = s + c
                if s:
                    out[w] = s
                else:
                    del out[w]
        return WordPoly(out, _clean=True)

    __radd__ = __add__

    def __neg__(self) -> "WordPoly":
        return WordPoly({w: -c for w, c in self.terms.items()}, _clean=True)

    def __sub__(self, other) -> "WordPoly":
        if isinstance(other, (int, Fraction, RationalFunction)):
            other = WordPoly.scalar(other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, RationalFunction)):
            if not other:
                return WordPoly()
            return WordPoly({w: c * other for w, c in self.terms.items()}, _clean=True)
        if not isinstance(other, WordPoly):
            return NotImplemented
        out: dict = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                c = c1 * c2
                s = out.get(w)
                out[w] = c if s is None else s + c
        return WordPoly(out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, RationalFunction)):
            return self * other
        return NotImplemented

    def derivative(self) -> "WordPoly":
        return WordPoly({w: c.derivative() for w, c in self.terms.items()})

    def map_words(self, fn: Callable[[Word], tuple]) -> "WordPoly":
        """Apply ``fn(word) -> (sign_or_scalar, new_word)`` termwise."""
        out: dict = {}
        for w, c in self.terms.items():
            s, nw = fn(w)
            if not s:
                continue
            c = c * s
            prev = out.get(nw)
            out[nw] = c if prev is None else prev + c
        return WordPoly(out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WordPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({c})*{_word_str(w)}" for w, c in sorted(self.terms.items(), key=_word_key))


def _word_key(item):
    return (len(item[0]), item[0])


def _word_str(word: Word) -> str:
    if not word:
        return "1"
    return "".join(f"[{b}]_{a}" for b, a in word)


class Jet:
    """Truncated Taylor data ``(f(u0), f'(u0), f''(u0)/2!, ...)`` at a fixed point.

    ``derivative`` loses the top order, so the length tracks how many exact
    orders remain.
    """

    __slots__ = ("c",)

    def __init__(self, c: Sequence):
        self.c = tuple(c)

    @classmethod
    def const(cls, value, order: int) -> "Jet":
        return cls([value] + [0] * (order - 1))

    @classmethod
    def of_pole(cls, u0, p, weight, order: int) -> "Jet":
        """Taylor data of ``weight / (u - p)`` at ``u0``."""
        x = u0 - p
        out = []
        term = weight / x
        for _ in range(order):
            out.append(term)
            term = -term / x
        return cls(out)

    @property
    def value(self):
        return self.c[0]

    def __len__(self) -> int:
        return len(self.c)

    def __bool__(self) -> bool:
        return any(x != 0 for x in self.c)

    def __add__(self, other):
        if isinstance(other, Jet):
            n = min(len(self.c), len(other.c))
            return Jet([self.c[i] + other.c[i] for i in range(n)])
        if isinstance(other, (int, Fraction)) or hasattr(other, "_mpf_"):
            return Jet((self.c[0] + other,) + self.c[1:])
        return NotImplemented

    __radd__ = __add__

    def __neg__(self) -> "Jet":
        return Jet([-x for x in self.c])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            n = min(len(self.c), len(other.c))
            a, b = self.c, other.c
            return Jet([sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(n)])
        if isinstance(other, (int, Fraction)) or hasattr(other, "_mpf_"):
            return Jet([x * other for x in self.c])
        return NotImplemented

    __rmul__ = __mul__

    def derivative(self) -> "Jet":
        return Jet([(k + 1) * self.c[k + 1] for k in range(len(self.c) - 1)])

    def __repr__(self) -> str:
        return f"Jet({', '.join(str(x) for x in self.c)})"


class DiffOp:
    """``sum_k coeffs[k] * d**k`` over a differential coefficient ring.

    Zero coefficients are never stored.  Instances are treated as immutable.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, object] | None = None):
        self.coeffs = {k: c for k, c in (coeffs or {}).items() if c}

    def _new(self, coeffs, other=None) -> "DiffOp":
        return type(self)(coeffs)

    # construction -------------------------------------------------------
    @classmethod
    def d(cls, power: int = 1, one=ONE) -> "DiffOp":
        return cls({power: one})

    @classmethod
    def coefficient_op(cls, c) -> "DiffOp":
        return cls({0: c})

    @classmethod
    def from_unordered(cls, factors: Iterable) -> "DiffOp":
        """Normal-order a product of factors given as DiffOps or coefficients."""
        factors = list(factors)
        if not factors:
            raise ValueError("empty product needs an explicit unit")
        out = None
        for f in factors:
            f = f if isinstance(f, DiffOp) else cls({0: f})
            out = f if out is None else out * f
        return out

    # access -------------------------------------------------------------
    def order(self) -> int:
        return max(self.coeffs) if self.coeffs else -1

    def coefficient(self, k: int, zero=ZERO):
        return self.coeffs.get(k, zero)

    def items(self) -> Iterator:
        return iter(sorted(self.coeffs.items()))

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    # arithmetic ---------------------------------------------------------
    def __add__(self, other) -> "DiffOp":
        if not isinstance(other, DiffOp):
            other = self._new({0: other})
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out[k] + c if k in out else c
        return self._new(out, other)

    def __neg__(self) -> "DiffOp":
        return self._new({k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other) -> "DiffOp":
        if not isinstance(other, DiffOp):
            other = self._new({0: other})
        return self + (-other)

    def scale(self, s) -> "DiffOp":
        return self._new({k: c * s for k, c in self.coeffs.items()})

    def __mul__(self, other) -> "DiffOp":
        if not isinstance(other, DiffOp):
            if isinstance(other, (int, Fraction)):
                return self.scale(other)
            other = self._new({0: other})
        out: dict = {}
        for j, b in other.coeffs.items():
            # derivatives of b, computed lazily as far as needed
            derivs = [b]
            for i, a in self.coeffs.items():
                while len(derivs) <= i:
                    derivs.append(derivs[-1].derivative())
                for k in range(i + 1):
                    bk = derivs[k]
                    if not bk:
                        continue
                    term = a * bk
                    binom = comb(i, k)
                    if binom != 1:
                        term = term * binom
                    deg = i - k + j
                    out[deg] = out[deg] + term if deg in out else term
        return self._new(out, other)

    def __rmul__(self, other) -> "DiffOp":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return self._new({0: other}) * self

    def __pow__(self, k: int) -> "DiffOp":
        if k < 1:
            raise ValueError("use an explicit unit for the zeroth power")
        out = self
        for _ in range(k - 1):
            out = out * self
        return out

    def apply_to_one(self):
        """Act on the constant function 1: only the ``d**0`` coefficient survives."""
        return self.coeffs.get(0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __repr__(self) -> str:
        if not self.coeffs:
            return f"{type(self).__name__}(0)"
        parts = []
        for k, c in sorted(self.coeffs.items(), reverse=True):
            parts.append(f"({c})" + ("" if k == 0 else (" d" if k == 1 else f" d^{k}")))
        return f"{type(self).__name__}(" + " + ".join(parts) + ")"


class ScalarDiffOp(DiffOp):
    """Operator with scalar (RationalFunction or Jet) coefficients."""

    __slots__ = ()

    @classmethod
    def first_order(cls, f, one=ONE) -> "ScalarDiffOp":
        """``d + f``."""
        return cls({1: one, 0: f})


class DiffPolyOperator(DiffOp):
    """Operator whose coefficients are :class:`WordPoly` elements.

    ``terms()`` exposes the flat ``(word, k) -> RationalFunction`` map.
    """

    __slots__ = ("sites",)

    UNIT = WordPoly({(): ONE}, _clean=True)

    def __init__(self, coeffs=None, sites: int | None = None):
        super().__init__(coeffs)
        self.sites = sites

    def _new(self, coeffs, other=None) -> "DiffPolyOperator":
        sites = self.sites
        theirs = getattr(other, "sites", None)
        if sites is not None and theirs is not None and sites != theirs:
            raise ValueError(f"site count mismatch: {sites} vs {theirs}")
        return DiffPolyOperator(coeffs, sites if sites is not None else theirs)

    @classmethod
    def d(cls, power: int = 1, one=None, sites: int | None = None) -> "DiffPolyOperator":
        return cls({power: cls.UNIT}, sites)

    @classmethod
    def scalar(cls, f, sites: int | None = None) -> "DiffPolyOperator":
        return cls({0: WordPoly.scalar(f)}, sites)

    @classmethod
    def letter(cls, basis, site: int, coeff=ONE, sites: int | None = None) -> "DiffPolyOperator":
        if sites is not None and not 1 <= site <= sites:
            raise ValueError(f"site {site} outside 1..{sites}")
        return cls({0: WordPoly.letter(basis, site, coeff)}, sites)

    def __mul__(self, other):
        if isinstance(other, RationalFunction):
            other = WordPoly.scalar(other)
        return super().__mul__(other)

    def __add__(self, other):
        if isinstance(other, (RationalFunction, int, Fraction)):
            other = DiffPolyOperator.scalar(other, self.sites)
        return super().__add__(other)

    def terms(self) -> dict:
        out = {}
        for k, wp in self.coeffs.items():
            for w, c in wp.terms.items():
                out[(w, k)] = c
        return out

    @classmethod
    def from_terms(cls, terms: Mapping, sites: int | None = None) -> "DiffPolyOperator":
        by_k: dict = {}
        for (w, k), c in terms.items():
            by_k.setdefault(k, {})[w] = c
        return cls({k: WordPoly(t) for k, t in by_k.items()}, sites)

    def num_terms(self) -> int:
        return sum(len(wp.terms) for wp in self.coeffs.values())

    def map_words(self, fn) -> "DiffPolyOperator":
        return DiffPolyOperator({k: wp.map_words(fn) for k, wp in self.coeffs.items()}, self.sites)


def diffop_mul(a: DiffOp, b: DiffOp) -> DiffOp:
    """Normal-ordered product; raises ``ValueError`` on a site-count mismatch."""
    return a * b


scalar_diffop_mul = diffop_mul


def diffop_coefficient(op: DiffOp, k: int):
    """Coefficient of ``d**k`` (zero of the matching kind when absent)."""
    if isinstance(op, DiffPolyOperator):
        return op.coeffs.get(k, WordPoly())
    return op.coeffs.get(k, ZERO)


def d_plus(f) -> ScalarDiffOp:
    """``d + f`` for a scalar coefficient ``f``."""
    one = ONE if isinstance(f, RationalFunction) else _one_like(f)
    return ScalarDiffOp({1: one, 0: f})


def d_only(like=None) -> ScalarDiffOp:
    one = ONE if like is None or isinstance(like, RationalFunction) else _one_like(like)
    return ScalarDiffOp({1: one})


def _one_like(x):
    if isinstance(x, Jet):
        return Jet.const(1, len(x))
    return ONE


def scalar_unit(like=None) -> ScalarDiffOp:
    return ScalarDiffOp({0: _one_like(like) if like is not None else ONE})


def as_rat(x) -> Fraction:
    return as_fraction(x)
