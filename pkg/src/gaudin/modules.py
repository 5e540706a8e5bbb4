"""Tensor products of Verma modules and the action of site-indexed words.

A state is a sparse map from tuples of PBW monomials (one per site) to
coefficients.  A PBW monomial is a tuple of lowering basis labels sorted by
``spec.pbw_key``; the empty tuple is the highest-weight vector ``1_λ``.
Coefficients are ``Fraction`` (exact) or ``mpmath.mpf`` (float mode); the
straightening itself is always exact.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import mpmath

from .diffops import DiffPolyOperator
from .lie import Combo, Index, LieAlgebraSpec, LieSpecError, WeightVector
from .rational import RationalFunction

Monomial = Tuple[Index, ...]
Basis = Tuple[Monomial, ...]
Letter = Tuple[Index, int]


class ModuleError(ValueError):
    pass


class _Verma:
    """Memoized left action of basis elements on the PBW basis of M_λ."""

    def __init__(self, spec: LieAlgebraSpec, lam: WeightVector):
        spec._check_weight(lam)
        self.spec = spec
        self.lam = lam
        self.key = spec.pbw_key
        self._memo: Dict[Tuple[Index, Monomial], Dict[Monomial, Fraction]] = {}

    def cartan_value(self, x: Index, mono: Monomial) -> Fraction:
        d = x[0] - 1
        val = self.lam.values[d]
        for y in mono:
            val += self.spec.root(y).values[d]
        return val

    def act(self, x: Index, mono: Monomial) -> Dict[Monomial, Fraction]:
        got = self._memo.get((x, mono))
        if got is None:
            got = self._act(x, mono)
            self._memo[(x, mono)] = got
        return got

    def _act(self, x: Index, mono: Monomial) -> Dict[Monomial, Fraction]:
        spec = self.spec
        kind = spec.kind(x)
        if kind == 0:
            c = self.cartan_value(x, mono)
            return {mono: c} if c else {}
        if not mono:
            return {(x,): Fraction(1)} if kind < 0 else {}
        if kind < 0 and self.key[x] <= self.key[mono[0]]:
            return {(x,) + mono: Fraction(1)}
        # x y r = y (x r) + [x, y] r
        y, rest = mono[0], mono[1:]
        out: Dict[Monomial, Fraction] = {}
        for m, c in self.act(x, rest).items():
            for m2, c2 in self.act(y, m).items():
                out[m2] = out.get(m2, 0) + c * c2
        for z, cz in spec.bracket(x, y).items():
            for m2, c2 in self.act(z, rest).items():
                out[m2] = out.get(m2, 0) + cz * c2
        return {k: v for k, v in out.items() if v}


@lru_cache(maxsize=None)
def _verma(spec: LieAlgebraSpec, lam: WeightVector) -> _Verma:
    return _Verma(spec, lam)


def straighten(
    spec: LieAlgebraSpec,
    word: Sequence[Index],
    lam: WeightVector,
    strategy: str = "recursive",
    rng: Optional[random.Random] = None,
) -> Dict[Monomial, Fraction]:
    """PBW expansion of ``word · 1_λ``.

    ``strategy="recursive"`` applies letters right to left through the memoized
    engine.  ``strategy="random"`` rewrites the whole word, picking a random
    applicable rule at each step; it exists to cross-check the first one.
    """
    for x in word:
        spec.check_index(x)
    if strategy == "recursive":
        eng = _verma(spec, lam)
        cur: Dict[Monomial, Fraction] = {(): Fraction(1)}
        for x in reversed(tuple(word)):
            nxt: Dict[Monomial, Fraction] = {}
            for m, c in cur.items():
                for m2, c2 in eng.act(x, m).items():
                    nxt[m2] = nxt.get(m2, 0) + c * c2
            cur = {k: v for k, v in nxt.items() if v}
        return cur
    if strategy == "random":
        return _straighten_random(spec, tuple(word), lam, rng or random.Random(0))
    raise ValueError(f"unknown strategy {strategy!r}")


def _straighten_random(spec, word, lam, rng) -> Dict[Monomial, Fraction]:
    key = spec.pbw_key

    def out_of_order(a, b):
        if spec.kind(b) >= 0:
            return False
        if spec.kind(a) >= 0:
            return True
        return key[a] > key[b]

    pending: Dict[Tuple[Index, ...], Fraction] = {word: Fraction(1)}
    done: Dict[Monomial, Fraction] = {}
    while pending:
        w = rng.choice(sorted(pending))
        c = pending.pop(w)
        rules = [p for p in range(len(w) - 1) if out_of_order(w[p], w[p + 1])]
        if w and spec.kind(w[-1]) >= 0:
            rules.append(-1)
        if not rules:
            done[w] = done.get(w, 0) + c
            continue
        p = rng.choice(rules)
        new: List[Tuple[Tuple[Index, ...], Fraction]] = []
        if p == -1:
            x = w[-1]
            if spec.kind(x) == 0:
                new.append((w[:-1], c * lam.values[x[0] - 1]))
        else:
            a, b = w[p], w[p + 1]
            new.append((w[:p] + (b, a) + w[p + 2:], c))
            for z, cz in spec.bracket(a, b).items():
                new.append((w[:p] + (z,) + w[p + 2:], c * cz))
        for w2, c2 in new:
            if c2:
                pending[w2] = pending.get(w2, 0) + c2
                if not pending[w2]:
                    del pending[w2]
    return {k: v for k, v in done.items() if v}


@dataclass(frozen=True, eq=False)
class TensorState:
    spec: LieAlgebraSpec
    weights: Tuple[WeightVector, ...]
    terms: Mapping[Basis, object] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        clean = {}
        for b, c in self.terms.items():
            if len(b) != len(self.weights):
                raise ModuleError("term length does not match the number of sites")
            if c:
                clean[b] = c
        object.__setattr__(self, "terms", clean)

    @classmethod
    def highest(cls, spec: LieAlgebraSpec, weights: Sequence[WeightVector]) -> "TensorState":
        for w in weights:
            spec._check_weight(w)
        return cls(spec, tuple(weights), {tuple(() for _ in weights): Fraction(1)})

    @property
    def sites(self) -> int:
        return len(self.weights)

    def _like(self, terms) -> "TensorState":
        return type(self)(self.spec, self.weights, terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "TensorState") -> "TensorState":
        out = dict(self.terms)
        for b, c in other.terms.items():
            out[b] = out.get(b, 0) + c
        return self._like(out)

    def __neg__(self) -> "TensorState":
        return self._like({b: -c for b, c in self.terms.items()})

    def __sub__(self, other: "TensorState") -> "TensorState":
        return self + (-other)

    def scale(self, c) -> "TensorState":
        return self._like({b: c * v for b, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorState):
            return NotImplemented
        return self.terms == other.terms and self.weights == other.weights

    def max_abs(self):
        return max((abs(c) for c in self.terms.values()), default=0)

    def distance(self, other: "TensorState"):
        return (self - other).max_abs()

    def to_float(self) -> "FloatTensorState":
        return FloatTensorState(
            self.spec, self.weights, {b: mpmath.mpf(c.numerator) / c.denominator if isinstance(c, Fraction) else mpmath.mpf(c) for b, c in self.terms.items()}
        )

    def to_json(self) -> list:
        out = []
        for b in sorted(self.terms):
            out.append({"monomials": [[list(x) for x in m] for m in b], "coeff": str(self.terms[b])})
        return out


class FloatTensorState(TensorState):
    """Same data with high-precision float coefficients."""


def act_letter(state: TensorState, x: Index, site: int, coeff=1) -> TensorState:
    if not 1 <= site <= state.sites:
        raise ModuleError(f"site {site} out of range 1..{state.sites}")
    state.spec.check_index(x)
    eng = _verma(state.spec, state.weights[site - 1])
    out: Dict[Basis, object] = {}
    a = site - 1
    for b, c in state.terms.items():
        for m2, c2 in eng.act(x, b[a]).items():
            nb = b[:a] + (m2,) + b[a + 1:]
            out[nb] = out.get(nb, 0) + c * c2 * coeff
    return state._like(out)


def act_combo(state: TensorState, combo: Combo, site: int) -> TensorState:
    out = state._like({})
    for x, c in combo.items():
        out = out + act_letter(state, x, site, c)
    return out


def apply_word(state: TensorState, word: Sequence[Letter]) -> TensorState:
    """Rightmost letter acts first."""
    for x, site in reversed(tuple(word)):
        state = act_letter(state, x, site)
    return state


class _WordCache:
    def __init__(self, state: TensorState):
        self.state = state
        self.memo: Dict[tuple, TensorState] = {(): state}

    def get(self, word: tuple) -> TensorState:
        got = self.memo.get(word)
        if got is None:
            x, site = word[0]
            got = act_letter(self.get(word[1:]), x, site)
            self.memo[word] = got
        return got


@dataclass
class ActionTable:
    """Per ∂-degree list of (coefficient, word image); independent of ``u``."""

    state: TensorState
    slices: Dict[int, List[Tuple[RationalFunction, TensorState]]]

    def exact(self) -> Dict[int, Dict[Basis, RationalFunction]]:
        out: Dict[int, Dict[Basis, RationalFunction]] = {}
        for k, items in self.slices.items():
            # group by coefficient so rational-function arithmetic runs once per distinct coefficient
            acc: Dict[Basis, Dict[RationalFunction, Fraction]] = {}
            for rf, st in items:
                for b, c in st.terms.items():
                    d = acc.setdefault(b, {})
                    d[rf] = d.get(rf, 0) + c
            vec = {}
            for b, d in acc.items():
                total = RationalFunction.const(0)
                for rf, c in d.items():
                    if c:
                        total = total + rf * c
                if not total.is_zero():
                    vec[b] = total
            out[k] = vec
        return out

    def at(self, u0) -> Dict[int, TensorState]:
        out: Dict[int, TensorState] = {}
        for k, items in self.slices.items():
            acc: Dict[Basis, object] = {}
            for rf, st in items:
                v = rf.evaluate(u0)
                for b, c in st.terms.items():
                    acc[b] = acc.get(b, 0) + v * c
            out[k] = FloatTensorState(self.state.spec, self.state.weights, acc)
        return out


def action_table(op: DiffPolyOperator, state: TensorState) -> ActionTable:
    if op.sites is not None and op.sites != state.sites:
        raise ModuleError(f"site count mismatch: operator {op.sites}, state {state.sites}")
    cache = _WordCache(state)
    slices: Dict[int, List[Tuple[RationalFunction, TensorState]]] = {}
    for (word, k), rf in op.terms().items():
        st = cache.get(tuple(word))
        if not st.is_zero():
            slices.setdefault(k, []).append((rf, st))
    return ActionTable(state, slices)


def apply_diffop(op: DiffPolyOperator, state: TensorState) -> Dict[int, Dict[Basis, RationalFunction]]:
    """Exact action: ∂-degree -> basis tensor -> rational function of u."""
    return action_table(op, state).exact()


def weight_of(state: TensorState) -> WeightVector:
    if state.is_zero():
        raise ModuleError("empty")
    spec = state.spec
    found = None
    for b in state.terms:
        w = spec.zero_weight()
        for lam, mono in zip(state.weights, b):
            w = w + lam
            for y in mono:
                w = w + spec.root(y)
        if found is None:
            found = w
        elif w != found:
            raise ModuleError("inhomogeneous state")
    return found


def pbw_monomials(spec: LieAlgebraSpec, length: int) -> List[Monomial]:
    """All PBW monomials with exactly ``length`` lowering letters."""
    neg = sorted(spec.negative, key=lambda x: spec.pbw_key[x])
    out: List[Monomial] = []

    def rec(start: int, left: int, acc: tuple):
        if left == 0:
            out.append(acc)
            return
        for p in range(start, len(neg)):
            rec(p, left - 1, acc + (neg[p],))

    rec(0, length, ())
    return out


def depth_basis(spec: LieAlgebraSpec, weights: Sequence[WeightVector], depth: int) -> List[TensorState]:
    """Basis tensors with at most ``depth`` lowering letters in total; each is a weight vector."""
    weights = tuple(weights)
    out: List[TensorState] = []

    def rec(site: int, left: int, acc: tuple):
        if site == len(weights):
            out.append(TensorState(spec, weights, {acc: Fraction(1)}))
            return
        for k in range(left + 1):
            for mono in pbw_monomials(spec, k):
                rec(site + 1, left - k, acc + (mono,))

    rec(0, depth, ())
    return out


def random_state(
    spec: LieAlgebraSpec, weights: Sequence[WeightVector], rng: random.Random, depth: int = 2, terms: int = 3
) -> TensorState:
    """Random rational combination of lowering words of length <= depth applied to 1_λ."""
    top = TensorState.highest(spec, weights)
    out = top._like({})
    neg = list(spec.negative)
    for _ in range(terms):
        st = top
        for _ in range(rng.randint(0, depth)):
            st = act_letter(st, rng.choice(neg), rng.randint(1, len(top.weights)))
        out = out + st.scale(Fraction(rng.randint(-5, 5), rng.randint(1, 4)))
    return out if not out.is_zero() else top
