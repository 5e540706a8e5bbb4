"""Hamiltonian-side operator builders.

Every builder returns a normal-ordered :class:`DiffPolyOperator` whose words
are kept unreduced; relations of U(g) only enter when the operator acts on a
state.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .bethe import GaudinInstance
from .diffops import DiffPolyOperator, WordPoly
from .lie import LieAlgebraSpec
from .modules import TensorState, action_table
from .rational import ONE, RationalFunction

Matrix = Dict[Tuple[int, int], DiffPolyOperator]


class OperatorError(ValueError):
    pass


def _require(inst: GaudinInstance, families: str, what: str) -> None:
    if inst.spec.family not in families:
        raise OperatorError(f"{what} is not defined for family {inst.spec.family}")


# current matrix -------------------------------------------------------------
def chi_on(spec: LieAlgebraSpec, chi, i: int, j: int) -> Fraction:
    """χ(E_ij) or χ(F_ij); zero off the diagonal."""
    if i != j:
        return Fraction(0)
    c, x = spec.letter(i, i)
    if x is None:
        return Fraction(0)
    return c * chi.values[x[0] - 1]


def current_matrix(inst: GaudinInstance, sign: int = 1) -> Matrix:
    """``sign * (Σ_a (F_ij)_a/(u - z_a) - χ(F_ij))`` for all i, j in 1..N."""
    spec = inst.spec
    N, ell = spec.N, inst.ell
    poles = [RationalFunction.pole(z) for z in inst.z]
    out: Matrix = {}
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            c, x = spec.letter(i, j)
            terms = {}
            if x is not None:
                for a in range(ell):
                    terms[((x, a + 1),)] = poles[a] * (c * sign)
            chi = chi_on(spec, inst.chi, i, j)
            if chi:
                terms[()] = RationalFunction.const(-chi * sign)
            out[(i, j)] = DiffPolyOperator({0: WordPoly(terms)}, ell)
    return out


def shifted(inst: GaudinInstance, mat: Matrix, transpose: bool = False) -> Matrix:
    """``δ_ij ∂ + M_ij`` (or ``δ_ij ∂ + M_ji``)."""
    d = DiffPolyOperator.d(1, sites=inst.ell)
    out = {}
    for (i, j), v in mat.items():
        e = mat[(j, i)] if transpose else v
        out[(i, j)] = e + d if i == j else e
    return out


def _zero(inst: GaudinInstance) -> DiffPolyOperator:
    return DiffPolyOperator({}, inst.ell)


def _unit(inst: GaudinInstance) -> DiffPolyOperator:
    return DiffPolyOperator.scalar(ONE, inst.ell)


# determinants -------------------------------------------------------------------
def determinant(inst: GaudinInstance, M: Matrix, N: int, by: str = "row") -> DiffPolyOperator:
    """Noncommutative determinant with entries multiplied in row (or column) order.

    row:    Σ_σ sgn σ M_{1σ1} M_{2σ2} ... M_{NσN}
    column: Σ_σ sgn σ M_{σ1,1} M_{σ2,2} ... M_{σN,N}
    """
    if by not in ("row", "column"):
        raise ValueError("by must be 'row' or 'column'")
    memo: Dict[frozenset, DiffPolyOperator] = {}

    def entry(r, c):
        return M[(r, c)] if by == "row" else M[(c, r)]

    def rest(r: int, used: frozenset) -> DiffPolyOperator:
        if r > N:
            return _unit(inst)
        got = memo.get(used)
        if got is not None:
            return got
        total = _zero(inst)
        for c in range(1, N + 1):
            if c in used:
                continue
            # sign of the permutation accumulates inversions against earlier choices
            inv = sum(1 for u in used if u > c)
            e = entry(r, c)
            if not e:
                continue
            term = e * rest(r + 1, used | {c})
            total = total - term if inv % 2 else total + term
        memo[used] = total
        return total

    return rest(1, frozenset())


def rdet_operator(inst: GaudinInstance) -> DiffPolyOperator:
    """rdet(∂ + E(u))."""
    _require(inst, "A", "rdet")
    return determinant(inst, shifted(inst, current_matrix(inst)), inst.spec.N, "row")


def cdet_operator(inst: GaudinInstance, sign: int = -1, transpose: bool = False) -> DiffPolyOperator:
    """cdet(∂ + sign·E(u)), optionally with the transposed current."""
    _require(inst, "A", "cdet")
    return determinant(inst, shifted(inst, current_matrix(inst, sign), transpose), inst.spec.N, "column")


# traces over tensor powers --------------------------------------------------------
@dataclass(frozen=True)
class SymmetrizerMatrix:
    """Sparse exact matrix on (C^N)^{⊗m}; ``entries[(J, I)]`` is the (J, I) entry."""

    family: str
    N: int
    m: int
    entries: Dict[Tuple[tuple, tuple], Fraction]

    def __mul__(self, other: "SymmetrizerMatrix") -> "SymmetrizerMatrix":
        return SymmetrizerMatrix(self.family, self.N, self.m, _smul(self.entries, other.entries))

    def __eq__(self, other) -> bool:
        return isinstance(other, SymmetrizerMatrix) and self.entries == other.entries

    def trace(self) -> Fraction:
        return sum((v for (J, I), v in self.entries.items() if J == I), Fraction(0))

    def is_idempotent(self) -> bool:
        return _smul(self.entries, self.entries) == self.entries

    def scaled(self, c) -> "SymmetrizerMatrix":
        return SymmetrizerMatrix(self.family, self.N, self.m, {k: v * c for k, v in self.entries.items() if v * c})


def _smul(a: dict, b: dict) -> dict:
    by_row: Dict[tuple, list] = {}
    for (K, I), v in b.items():
        by_row.setdefault(K, []).append((I, v))
    out: dict = {}
    for (J, K), v in a.items():
        for I, w in by_row.get(K, ()):
            out[(J, I)] = out.get((J, I), 0) + v * w
    return {k: v for k, v in out.items() if v}


def _identity(N: int, m: int) -> dict:
    return {(I, I): Fraction(1) for I in itertools.product(range(1, N + 1), repeat=m)}


def _perm_sign(p: Sequence[int]) -> int:
    s = 1
    for a in range(len(p)):
        for b in range(a + 1, len(p)):
            if p[a] > p[b]:
                s = -s
    return s


def projector_matrix(N: int, m: int, kind: str) -> SymmetrizerMatrix:
    """A^(m) (antisymmetrizer) or H^(m) (symmetrizer) from the action of Sym_m."""
    if kind not in ("antisymmetrizer", "symmetrizer"):
        raise OperatorError(f"unknown projector kind {kind!r}")
    out: dict = {}
    norm = Fraction(1, factorial(m))
    perms = [(p, _perm_sign(p)) for p in itertools.permutations(range(m))]
    for I in itertools.product(range(1, N + 1), repeat=m):
        for p, sg in perms:
            J = tuple(I[p[a]] for a in range(m))
            c = norm * (sg if kind == "antisymmetrizer" else 1)
            out[(J, I)] = out.get((J, I), 0) + c
    return SymmetrizerMatrix("A", N, m, {k: v for k, v in out.items() if v})


def _traced_product(inst: GaudinInstance, S: SymmetrizerMatrix, M: Matrix) -> DiffPolyOperator:
    """tr S M_1 ... M_m = Σ_{I,J} S[J, I] M_{i1 j1} ... M_{im jm}."""
    memo: Dict[tuple, DiffPolyOperator] = {(): _unit(inst)}

    def prod(pairs: tuple) -> DiffPolyOperator:
        got = memo.get(pairs)
        if got is None:
            got = prod(pairs[:-1]) * M[pairs[-1]]
            memo[pairs] = got
        return got

    # group the scalar weights per operator word-product
    weights: Dict[tuple, Fraction] = {}
    for (J, I), v in S.entries.items():
        pairs = tuple(zip(I, J))
        weights[pairs] = weights.get(pairs, 0) + v
    total = _zero(inst)
    for pairs in sorted(weights):
        v = weights[pairs]
        if v:
            total = total + prod(pairs).scale(RationalFunction.const(v))
    return total


def projector_trace_operator(inst: GaudinInstance, m: int, kind: str) -> DiffPolyOperator:
    """tr P^(m) (∂ + E(u)_1) ... (∂ + E(u)_m) with P = A or H."""
    _require(inst, "A", "projector trace")
    N = inst.spec.N
    if m < 1 or (kind == "antisymmetrizer" and m > N):
        raise OperatorError(f"m={m} out of range for the {kind} trace with N={N}")
    return _traced_product(inst, projector_matrix(N, m, kind), shifted(inst, current_matrix(inst)))


def trace_power_operator(inst: GaudinInstance, k: int, sign: int = 1, transpose: bool = True) -> DiffPolyOperator:
    """tr (∂ + sign·E^t(u))^k (transpose=False drops the transposition)."""
    _require(inst, "A", "trace power")
    if k < 0:
        raise OperatorError("k must be nonnegative")
    N = inst.spec.N
    if k == 0:
        return DiffPolyOperator.scalar(RationalFunction.const(N), inst.ell)
    M = shifted(inst, current_matrix(inst, sign), transpose)
    P = dict(M)
    for _ in range(k - 1):
        nxt = {}
        for i in range(1, N + 1):
            for l in range(1, N + 1):
                acc = _zero(inst)
                for j in range(1, N + 1):
                    if P[(i, j)] and M[(j, l)]:
                        acc = acc + P[(i, j)] * M[(j, l)]
                nxt[(i, l)] = acc
        P = nxt
    total = _zero(inst)
    for i in range(1, N + 1):
        total = total + P[(i, i)]
    return total


# Brauer symmetrizers ---------------------------------------------------------------
def _swap(N: int, m: int, a: int, b: int) -> dict:
    out = {}
    for I in itertools.product(range(1, N + 1), repeat=m):
        J = list(I)
        J[a], J[b] = J[b], J[a]
        out[(tuple(J), I)] = Fraction(1)
    return out


def _contraction(N: int, m: int, a: int, b: int, eps: Optional[Sequence[int]]) -> dict:
    """Q_ab = Σ_ij (s_ij) e_ij ⊗ e_i'j' in copies a, b."""
    out = {}
    for I in itertools.product(range(1, N + 1), repeat=m):
        j = I[a]
        if I[b] != N - j + 1:
            continue
        for i in range(1, N + 1):
            J = list(I)
            J[a], J[b] = i, N - i + 1
            c = 1 if eps is None else eps[i - 1] * eps[j - 1]
            out[(tuple(J), I)] = Fraction(c)
    return out


def brauer_symmetrizer(family: str, N: int, m: int) -> SymmetrizerMatrix:
    """Product formula over pairs (a, b), a < b, in lexicographic order, times 1/m!."""
    family = family.upper()
    if m < 1:
        raise OperatorError("m must be positive")
    if family in ("B", "D"):
        eps = None
    elif family == "C":
        if N % 2:
            raise OperatorError("symplectic N must be even")
        n = N // 2
        if m > n:
            raise OperatorError(f"symplectic symmetrizer product formula needs m <= n = {n}")
        eps = [1] * n + [-1] * n
    else:
        raise OperatorError(f"no Brauer symmetrizer for family {family}")
    S = _identity(N, m)
    for a in range(m):
        for b in range(a + 1, m):
            A, B = a + 1, b + 1
            if eps is None:
                pc, qden = Fraction(1, B - A), Fraction(N, 2) + B - A - 1
            else:
                pc, qden = Fraction(-1, B - A), Fraction(N // 2 - B + A + 1)
            if qden == 0:
                raise OperatorError(f"vanishing denominator at pair ({A},{B})")
            factor = _identity(N, m)
            for k, v in _swap(N, m, a, b).items():
                factor[k] = factor.get(k, 0) + pc * v
            for k, v in _contraction(N, m, a, b, eps).items():
                factor[k] = factor.get(k, 0) - v / qden
            S = _smul(S, {k: v for k, v in factor.items() if v})
    S = {k: v / factorial(m) for k, v in S.items()}
    return SymmetrizerMatrix(family, N, m, S)


def swap_matrix(N: int, m: int, a: int, b: int) -> SymmetrizerMatrix:
    return SymmetrizerMatrix("", N, m, _swap(N, m, a - 1, b - 1))


def contraction_matrix(family: str, N: int, m: int, a: int, b: int) -> SymmetrizerMatrix:
    eps = None if family.upper() != "C" else [1] * (N // 2) + [-1] * (N // 2)
    return SymmetrizerMatrix("", N, m, _contraction(N, m, a - 1, b - 1, eps))


def gamma(m: int, omega) -> Fraction:
    """γ_m(ω) = (ω + m - 2) / (ω + 2m - 2)."""
    den = Fraction(omega) + 2 * m - 2
    if den == 0:
        raise OperatorError(f"γ_{m}({omega}) has a vanishing denominator")
    return (Fraction(omega) + m - 2) / den


def omega_of(spec: LieAlgebraSpec) -> int:
    return spec.N if spec.is_orthogonal else -spec.N


def bcd_trace_operator(inst: GaudinInstance, m: int, sign: int = 1) -> DiffPolyOperator:
    """γ_m(ω) tr S^(m) (∂ + sign·F(u)_1) ... (∂ + sign·F(u)_m)."""
    _require(inst, "BCD", "bcd trace")
    spec = inst.spec
    if m < 1:
        raise OperatorError("m must be positive")
    if spec.family == "C" and m > spec.n:
        raise OperatorError(f"type C traces are supported for m <= n = {spec.n}")
    S = brauer_symmetrizer(spec.family, spec.N, m)
    op = _traced_product(inst, S, shifted(inst, current_matrix(inst, sign)))
    return op.scale(RationalFunction.const(gamma(m, omega_of(spec))))


# Pfaffian ------------------------------------------------------------------------
def pfaffian_operator(inst: GaudinInstance, sign: int = 1) -> DiffPolyOperator:
    """Pf F~(u) = 1/(2^n n!) Σ_{σ ∈ Sym_2n} sgn σ F~_{σ1σ2} ... with F~_ij = F_{ij'}(u)."""
    _require(inst, "D", "Pfaffian")
    spec = inst.spec
    n, N = spec.n, spec.N
    F = current_matrix(inst, sign)
    Ft = {(i, j): F[(i, spec.prime(j))] for i in range(1, N + 1) for j in range(1, N + 1)}
    memo: Dict[tuple, DiffPolyOperator] = {(): _unit(inst)}

    def prod(pairs: tuple) -> DiffPolyOperator:
        got = memo.get(pairs)
        if got is None:
            got = prod(pairs[:-1]) * Ft[pairs[-1]]
            memo[pairs] = got
        return got

    weights: Dict[tuple, int] = {}
    for p in itertools.permutations(range(1, N + 1)):
        pairs = tuple((p[2 * k], p[2 * k + 1]) for k in range(n))
        weights[pairs] = weights.get(pairs, 0) + _perm_sign(p)
    total = _zero(inst)
    for pairs in sorted(weights):
        if weights[pairs]:
            total = total + prod(pairs).scale(RationalFunction.const(weights[pairs]))
    return total.scale(RationalFunction.const(Fraction(1, 2 ** n * factorial(n))))


# ς-stability ------------------------------------------------------------------------
def sigma_image(op: DiffPolyOperator) -> DiffPolyOperator:
    """Antipode on the U(g)^{⊗ℓ} part of each slice: reverse words, sign (-1)^length."""
    return op.map_words(lambda w: ((-1) ** len(w), tuple(reversed(w))))


def operators_agree(a: DiffPolyOperator, b: DiffPolyOperator, states: Iterable[TensorState]) -> bool:
    for st in states:
        if action_table(a, st).exact() != action_table(b, st).exact():
            return False
    return True


def sigma_stability_check(inst: GaudinInstance, m: int, states: Iterable[TensorState], kind: str = "trace") -> bool:
    """Compare an operator built from +current with its ς-counterpart on states.

    B/C/D trace: the +F and -F builds must coincide.
    D Pfaffian (χ = 0): ς maps Pf to (-1)^n Pf.
    A antisym/sym/trace-power/cdet (χ = 0): ς of the -E build equals the +E build.
    """
    states = list(states)
    fam = inst.spec.family
    if fam in "BCD" and kind == "trace":
        return operators_agree(bcd_trace_operator(inst, m, 1), bcd_trace_operator(inst, m, -1), states)
    if any(inst.chi.values):
        raise OperatorError("this ς check needs χ = 0")
    if fam == "D" and kind == "pfaffian":
        pf = pfaffian_operator(inst)
        return operators_agree(sigma_image(pf), pf.scale(RationalFunction.const((-1) ** inst.spec.n)), states)
    if fam == "A":
        if kind in ("antisymmetrizer", "symmetrizer"):
            N = inst.spec.N
            S = projector_matrix(N, m, kind)
            plus = _traced_product(inst, S, shifted(inst, current_matrix(inst, 1)))
            minus = _traced_product(inst, S, shifted(inst, current_matrix(inst, -1)))
            return operators_agree(sigma_image(minus), plus, states)
        if kind == "trace-power":
            minus = trace_power_operator(inst, m, sign=-1, transpose=False)
            return operators_agree(sigma_image(minus), trace_power_operator(inst, m, 1, True), states)
        if kind == "cdet":
            minus = cdet_operator(inst, sign=-1)
            return operators_agree(sigma_image(minus), cdet_operator(inst, sign=1, transpose=True), states)
    raise OperatorError(f"no ς check for family {fam} and kind {kind!r}")


OPERATOR_KINDS = ("rdet", "cdet", "antisym-trace", "sym-trace", "trace-power", "bcd-trace", "pfaffian")


def build_operator(inst: GaudinInstance, kind: str, m: Optional[int] = None) -> DiffPolyOperator:
    if kind == "rdet":
        return rdet_operator(inst)
    if kind == "cdet":
        return cdet_operator(inst)
    if kind == "antisym-trace":
        return projector_trace_operator(inst, _need(m), "antisymmetrizer")
    if kind == "sym-trace":
        return projector_trace_operator(inst, _need(m), "symmetrizer")
    if kind == "trace-power":
        return trace_power_operator(inst, _need(m))
    if kind == "bcd-trace":
        return bcd_trace_operator(inst, _need(m))
    if kind == "pfaffian":
        return pfaffian_operator(inst)
    raise OperatorError(f"unknown operator kind {kind!r}")


def _need(m):
    if m is None:
        raise OperatorError("this operator needs m")
    return int(m)
