"""Classical Lie algebras gl_N, o_N and sp_2n in their matrix realizations.

Basis elements are labelled by index pairs ``(i, j)``.  For gl_N these are
the matrix units ``E_ij``.  For o_N and sp_2n the spanning elements are

    F_ij = E_ij - s_ij E_j'i',   i' = N - i + 1,

with ``s_ij = 1`` (orthogonal) or ``s_ij = eps_i eps_j`` (symplectic).  Since
``F_ij = -s_ij F_j'i'`` only one pair from each ``{(i,j), (j',i')}`` is kept
as a basis label (the lexicographically smaller one), and in the orthogonal
case the vanishing ``F_{i i'}`` are dropped.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Dict, Sequence, Tuple

from .rational import as_fraction

Index = Tuple[int, int]
Combo = Dict[Index, Fraction]  # linear combination of basis labels

FAMILIES = ("A", "B", "C", "D")


class LieSpecError(ValueError):
    pass


@dataclass(frozen=True)
class WeightVector:
    """Values of a functional on the diagonal basis.

    gl_N: ``(λ(E_11), ..., λ(E_NN))``; B/C/D: ``(λ(F_11), ..., λ(F_nn))``.
    """

    values: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(as_fraction(v) for v in self.values))

    @classmethod
    def of(cls, *vals) -> "WeightVector":
        if len(vals) == 1 and isinstance(vals[0], (list, tuple)):
            vals = tuple(vals[0])
        return cls(tuple(vals))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, k: int) -> Fraction:
        return self.values[k]

    def __add__(self, other: "WeightVector") -> "WeightVector":
        return WeightVector(tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other: "WeightVector") -> "WeightVector":
        return WeightVector(tuple(a - b for a, b in zip(self.values, other.values)))

    def __neg__(self) -> "WeightVector":
        return WeightVector(tuple(-a for a in self.values))

    def scaled(self, c) -> "WeightVector":
        return WeightVector(tuple(c * a for a in self.values))

    def is_zero(self) -> bool:
        return not any(self.values)

    def __str__(self) -> str:
        return "(" + ", ".join(str(v) for v in self.values) + ")"


def _mat_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    by_row: dict = {}
    for (r, c), v in b.items():
        by_row.setdefault(r, []).append((c, v))
    for (r, k), v in a.items():
        for c, w in by_row.get(k, ()):
            out[(r, c)] = out.get((r, c), 0) + v * w
    return {k: v for k, v in out.items() if v}


def _mat_sub(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) - v
    return {k: v for k, v in out.items() if v}


@dataclass(frozen=True)
class LieAlgebraSpec:
    family: str
    N: int
    n: int
    eps: Tuple[int, ...] = field(default=(), repr=False)

    # construction -----------------------------------------------------------
    @classmethod
    def gl(cls, N: int) -> "LieAlgebraSpec":
        if N < 1:
            raise LieSpecError("gl_N needs N >= 1")
        return cls("A", N, N - 1)

    @classmethod
    def orthogonal(cls, N: int) -> "LieAlgebraSpec":
        if N < 3:
            raise LieSpecError("o_N is supported for N >= 3 (o_2 is abelian)")
        return cls("B" if N % 2 else "D", N, N // 2)

    @classmethod
    def symplectic(cls, N: int) -> "LieAlgebraSpec":
        if N < 2 or N % 2:
            raise LieSpecError("sp_N needs even N >= 2")
        n = N // 2
        return cls("C", N, n, tuple([1] * n + [-1] * n))

    @classmethod
    def from_family(cls, family: str, rank: int) -> "LieAlgebraSpec":
        """``family`` in A/B/C/D with ``rank`` = N for A (gl_N) and n otherwise."""
        family = family.upper()
        if family == "A":
            return cls.gl(rank)
        if family == "B":
            return cls.orthogonal(2 * rank + 1)
        if family == "C":
            return cls.symplectic(2 * rank)
        if family == "D":
            if rank < 2:
                raise LieSpecError("type D needs n >= 2")
            return cls.orthogonal(2 * rank)
        raise LieSpecError(f"unknown family {family!r}")

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise LieSpecError(f"unknown family {self.family!r}")

    @property
    def name(self) -> str:
        return {"A": f"gl_{self.N}", "B": f"o_{self.N}", "C": f"sp_{self.N}", "D": f"o_{self.N}"}[self.family]

    @property
    def rank(self) -> int:
        """Number of simple roots."""
        return self.n

    @property
    def is_orthogonal(self) -> bool:
        return self.family in ("B", "D")

    def prime(self, i: int) -> int:
        return self.N - i + 1

    def sign(self, i: int, j: int) -> int:
        """``s_ij`` in ``F_ij = E_ij - s_ij E_j'i'``."""
        if self.family == "C":
            return self.eps[i - 1] * self.eps[j - 1]
        return 1

    # basis -------------------------------------------------------------------
    @cached_property
    def basis(self) -> Tuple[Index, ...]:
        N = self.N
        pairs = [(i, j) for i in range(1, N + 1) for j in range(1, N + 1)]
        if self.family == "A":
            return tuple(pairs)
        out = []
        for i, j in pairs:
            partner = (self.prime(j), self.prime(i))
            if partner == (i, j):
                if self.is_orthogonal:
                    continue
                out.append((i, j))
            elif (i, j) < partner:
                out.append((i, j))
        return tuple(out)

    @cached_property
    def _basis_set(self) -> frozenset:
        return frozenset(self.basis)

    @cached_property
    def diagonal(self) -> Tuple[Index, ...]:
        """Cartan basis: E_dd (d = 1..N) for gl_N, F_dd (d = 1..n) otherwise."""
        if self.family == "A":
            return tuple((d, d) for d in range(1, self.N + 1))
        return tuple((d, d) for d in range(1, self.n + 1))

    def letter(self, i: int, j: int) -> Tuple[Fraction, Index | None]:
        """Express ``F_ij`` (or ``E_ij``) as ``coeff * basis_label``.

        Returns ``(0, None)`` for the vanishing orthogonal ``F_{i i'}``.
        """
        if not (1 <= i <= self.N and 1 <= j <= self.N):
            raise LieSpecError(f"index ({i},{j}) out of range for {self.name}")
        if self.family == "A" or (i, j) in self._basis_set:
            return Fraction(1), (i, j)
        partner = (self.prime(j), self.prime(i))
        if partner == (i, j):
            return Fraction(0), None
        return Fraction(-self.sign(i, j)), partner

    def kind(self, x: Index) -> int:
        """-1 lowering, 0 Cartan, +1 raising."""
        i, j = x
        return (i < j) - (i > j)

    def check_index(self, x: Index) -> None:
        if x not in self._basis_set:
            raise LieSpecError(f"{x} is not a basis label of {self.name}")

    def matrix(self, x: Index) -> dict:
        """Sparse ``N x N`` matrix of a basis element."""
        return _matrix(self, x)

    def decompose(self, mat: dict) -> Combo:
        """Coordinates of a matrix in the Lie algebra w.r.t. :attr:`basis`."""
        out: Combo = {}
        for x in self.basis:
            v = mat.get(x, 0)
            if not v:
                continue
            if self.family == "C" and x[1] == self.prime(x[0]):
                v = Fraction(v) / 2  # F_{i i'} = 2 E_{i i'}
            out[x] = Fraction(v)
        return out

    def bracket(self, x: Index, y: Index) -> Combo:
        """``[x, y]`` in basis coordinates (exact)."""
        self.check_index(x)
        self.check_index(y)
        return _bracket(self, x, y)

    def bracket_combo(self, a: Combo, b: Combo) -> Combo:
        out: Combo = {}
        for x, cx in a.items():
            for y, cy in b.items():
                for z, cz in _bracket(self, x, y).items():
                    out[z] = out.get(z, 0) + cx * cy * cz
        return {k: v for k, v in out.items() if v}

    # weights and roots ----------------------------------------------------------
    def root(self, x: Index) -> WeightVector:
        """Weight of a basis element under the adjoint action of the Cartan."""
        return _root(self, x)

    @cached_property
    def negative(self) -> Tuple[Index, ...]:
        """Lowering basis labels in the fixed PBW order (height, then labels)."""
        neg = [x for x in self.basis if self.kind(x) < 0]
        return tuple(sorted(neg, key=lambda x: (-self.height(x), x)))

    @cached_property
    def pbw_key(self) -> Dict[Index, int]:
        return {x: k for k, x in enumerate(self.negative)}

    def height(self, x: Index) -> Fraction:
        """Sum of simple-root coordinates of the root of ``x``."""
        return sum(_root_coordinates(self, x), Fraction(0))

    # Chevalley data -----------------------------------------------------------
    @cached_property
    def chevalley(self) -> Tuple[Tuple[Combo, Combo, Combo], ...]:
        """``(e_l, h_l, f_l)`` for l = 1..n as basis combinations.

        Realization: gl_N uses e_l = E_{l,l+1}; B/C/D use e_l = F_{l,l+1}
        (l < n) and e_n = F_{n,n+1} (B, C) or F_{n-1,n+1} (D).  ``f_l`` is
        the transposed label, rescaled so that [h_l, e_l] = 2 e_l with
        h_l = [e_l, f_l].
        """
        return _chevalley(self)

    def e(self, l: int) -> Combo:
        return self.chevalley[l - 1][0]

    def h(self, l: int) -> Combo:
        return self.chevalley[l - 1][1]

    def f(self, l: int) -> Combo:
        return self.chevalley[l - 1][2]

    @cached_property
    def cartan_matrix(self) -> Tuple[Tuple[int, ...], ...]:
        """``a_ij`` with ``[h_i, e_j] = a_ij e_j``."""
        rows = []
        for i in range(1, self.n + 1):
            row = []
            for j in range(1, self.n + 1):
                row.append(int(_eigenvalue(self, self.h(i), self.e(j))))
            rows.append(tuple(row))
        return tuple(rows)

    def weight_on(self, lam: WeightVector, combo: Combo) -> Fraction:
        """Evaluate a diagonal functional on a Cartan combination."""
        self._check_weight(lam)
        total = Fraction(0)
        for (d, dd), c in combo.items():
            if d != dd:
                raise LieSpecError(f"{(d, dd)} is not diagonal")
            total += c * lam.values[d - 1]
        return total

    def _check_weight(self, lam: WeightVector) -> None:
        if len(lam) != len(self.diagonal):
            raise LieSpecError(
                f"weight of length {len(lam)} for {self.name}; expected {len(self.diagonal)}"
            )

    def zero_weight(self) -> WeightVector:
        return WeightVector(tuple([Fraction(0)] * len(self.diagonal)))


@lru_cache(maxsize=None)
def _matrix(spec: LieAlgebraSpec, x: Index) -> dict:
    i, j = x
    if spec.family == "A":
        return {(i, j): Fraction(1)}
    out = {(i, j): Fraction(1)}
    key = (spec.prime(j), spec.prime(i))
    out[key] = out.get(key, 0) - spec.sign(i, j)
    return {k: v for k, v in out.items() if v}


@lru_cache(maxsize=None)
def _bracket(spec: LieAlgebraSpec, x: Index, y: Index) -> Combo:
    a, b = _matrix(spec, x), _matrix(spec, y)
    return spec.decompose(_mat_sub(_mat_mul(a, b), _mat_mul(b, a)))


@lru_cache(maxsize=None)
def _root(spec: LieAlgebraSpec, x: Index) -> WeightVector:
    vals = []
    for h in spec.diagonal:
        br = _bracket(spec, h, x)
        vals.append(br.get(x, Fraction(0)))
    return WeightVector(tuple(vals))


def _eigenvalue(spec: LieAlgebraSpec, h: Combo, e: Combo) -> Fraction:
    br = spec.bracket_combo(h, e)
    # e is an eigenvector; read off the ratio on any supporting label
    x, c = next(iter(e.items()))
    val = br.get(x, Fraction(0)) / c
    check = {k: v * val for k, v in e.items()}
    if {k: v for k, v in check.items() if v} != br:
        raise LieSpecError("not an ad-eigenvector")
    return val


@lru_cache(maxsize=None)
def _simple_root_matrix(spec: LieAlgebraSpec):
    cols = []
    for l in range(1, spec.n + 1):
        e = spec.e(l)
        x = next(iter(e))
        cols.append(spec.root(x).values)
    return cols


def _solve(cols, target):
    """Least-squares-free exact solve of ``sum c_l cols[l] = target`` (consistent systems)."""
    n = len(cols)
    rows = len(target)
    aug = [[Fraction(cols[l][r]) for l in range(n)] + [Fraction(target[r])] for r in range(rows)]
    piv_cols = []
    r = 0
    for c in range(n):
        p = next((k for k in range(r, rows) if aug[k][c]), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        pv = aug[r][c]
        aug[r] = [v / pv for v in aug[r]]
        for k in range(rows):
            if k != r and aug[k][c]:
                f = aug[k][c]
                aug[k] = [a - f * b for a, b in zip(aug[k], aug[r])]
        piv_cols.append(c)
        r += 1
    for k in range(r, rows):
        if aug[k][n]:
            raise LieSpecError("weight is not in the root lattice span")
    sol = [Fraction(0)] * n
    for k, c in enumerate(piv_cols):
        sol[c] = aug[k][n]
    return sol


@lru_cache(maxsize=None)
def _root_coordinates(spec: LieAlgebraSpec, x: Index):
    if spec.n == 0:
        return []
    return _solve(_simple_root_matrix(spec), spec.root(x).values)


@lru_cache(maxsize=None)
def _chevalley(spec: LieAlgebraSpec):
    n = spec.n
    out = []
    for l in range(1, n + 1):
        if spec.family == "A" or l < n:
            ei, ej = l, l + 1
        elif spec.family in ("B", "C"):
            ei, ej = n, n + 1
        else:
            ei, ej = n - 1, n + 1
        ce, xe = spec.letter(ei, ej)
        cf, xf = spec.letter(ej, ei)
        e = {xe: ce}
        f = {xf: cf}
        h = spec.bracket_combo(e, f)
        val = _eigenvalue(spec, h, e)
        scale = Fraction(2) / val
        f = {k: v * scale for k, v in f.items()}
        h = {k: v * scale for k, v in h.items()}
        out.append((e, h, f))
    return tuple(out)


def bracket(spec: LieAlgebraSpec, x: Index, y: Index) -> Combo:
    return spec.bracket(x, y)


def pairing_coroot_weight(spec: LieAlgebraSpec, l: int, lam: WeightVector) -> Fraction:
    """``<α̌_l, λ> = λ(h_l)``."""
    if not 1 <= l <= spec.n:
        raise LieSpecError(f"simple root index {l} out of range 1..{spec.n}")
    return spec.weight_on(lam, spec.h(l))


def pairing_coroot_root(spec: LieAlgebraSpec, l: int, s: int) -> int:
    """``<α̌_l, α_s> = a_ls``."""
    if not (1 <= l <= spec.n and 1 <= s <= spec.n):
        raise LieSpecError("simple root index out of range")
    return spec.cartan_matrix[l - 1][s - 1]


def root_on_diagonal(spec: LieAlgebraSpec, l: int, d: int) -> Fraction:
    """Value of the simple root α_l on the d-th diagonal basis element."""
    if not 1 <= l <= spec.n:
        raise LieSpecError(f"simple root index {l} out of range 1..{spec.n}")
    if not 1 <= d <= len(spec.diagonal):
        raise LieSpecError(f"diagonal index {d} out of range")
    x = next(iter(spec.e(l)))
    return spec.root(x).values[d - 1]


def simple_root(spec: LieAlgebraSpec, l: int) -> WeightVector:
    x = next(iter(spec.e(l)))
    return spec.root(x)
