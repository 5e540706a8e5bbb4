from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from gaudin.lie import (
    LieAlgebraSpec,
    LieSpecError,
    WeightVector,
    bracket,
    pairing_coroot_root,
    pairing_coroot_weight,
    root_on_diagonal,
)

SMALL_SPECS = [("A", N) for N in range(1, 7)] + [("B", 1), ("B", 2), ("C", 1), ("C", 2), ("C", 3), ("D", 2), ("D", 3)]


def spec_of(family, rank):
    return LieAlgebraSpec.from_family(family, rank)


def combo_add(*combos):
    out = {}
    for c in combos:
        for k, v in c.items():
            out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v}


def test_bracket_examples():
    gl2 = spec_of("A", 2)
    assert bracket(gl2, (1, 2), (2, 1)) == {(1, 1): 1, (2, 2): -1}
    assert bracket(spec_of("B", 1), (1, 2), (2, 1)) == {(1, 1): 1}
    assert bracket(spec_of("C", 1), (1, 1), (1, 2)) == {(1, 2): 2}


def test_invalid_index():
    with pytest.raises(LieSpecError):
        bracket(spec_of("B", 1), (3, 1), (1, 1))  # not a kept label
    with pytest.raises(LieSpecError):
        bracket(spec_of("A", 2), (1, 3), (1, 1))


@pytest.mark.parametrize("family,rank", SMALL_SPECS)
def test_antisymmetry_and_jacobi(family, rank):
    spec = spec_of(family, rank)
    basis = spec.basis
    for x, y in itertools.product(basis, repeat=2):
        assert combo_add(spec.bracket(x, y), spec.bracket(y, x)) == {}
    for x, y, z in itertools.combinations(basis, 3):
        X, Y, Z = {x: Fraction(1)}, {y: Fraction(1)}, {z: Fraction(1)}
        total = combo_add(
            spec.bracket_combo(X, spec.bracket(y, z)),
            spec.bracket_combo(Y, spec.bracket(z, x)),
            spec.bracket_combo(Z, spec.bracket(x, y)),
        )
        assert total == {}, (x, y, z)


@pytest.mark.parametrize("family,rank", SMALL_SPECS)
def test_chevalley_relations(family, rank):
    spec = spec_of(family, rank)
    a = spec.cartan_matrix
    for i in range(1, spec.n + 1):
        for j in range(1, spec.n + 1):
            ef = spec.bracket_combo(spec.e(i), spec.f(j))
            assert ef == (spec.h(i) if i == j else {})
            he = spec.bracket_combo(spec.h(i), spec.e(j))
            assert he == {k: a[i - 1][j - 1] * v for k, v in spec.e(j).items() if a[i - 1][j - 1]}


@pytest.mark.parametrize("family,rank", [s for s in SMALL_SPECS if s[0] != "A"])
def test_prime_involution_and_symmetry(family, rank):
    spec = spec_of(family, rank)
    N = spec.N
    for i in range(1, N + 1):
        assert spec.prime(spec.prime(i)) == i
    for i, j in itertools.product(range(1, N + 1), repeat=2):
        c1, x1 = spec.letter(spec.prime(i), spec.prime(j))
        c2, x2 = spec.letter(j, i)
        s = 1 if spec.is_orthogonal else spec.sign(i, j)
        lhs = {x1: c1} if c1 else {}
        rhs = {x2: -s * c2} if c2 else {}
        assert lhs == rhs


def test_cartan_matrices():
    assert spec_of("A", 3).cartan_matrix == ((2, -1), (-1, 2))
    assert spec_of("B", 2).cartan_matrix == ((2, -1), (-2, 2))
    assert spec_of("C", 2).cartan_matrix == ((2, -2), (-1, 2))
    assert spec_of("D", 3).cartan_matrix == ((2, -1, -1), (-1, 2, 0), (-1, 0, 2))


def test_pairings():
    assert pairing_coroot_weight(spec_of("A", 2), 1, WeightVector.of(1, 0)) == 1
    for fam, r in SMALL_SPECS:
        spec = spec_of(fam, r)
        zero = spec.zero_weight()
        for l in range(1, spec.n + 1):
            assert pairing_coroot_weight(spec, l, zero) == 0
            assert pairing_coroot_root(spec, l, l) == 2
    assert pairing_coroot_weight(spec_of("B", 2), 2, WeightVector.of(1, 0)) == 0
    assert pairing_coroot_root(spec_of("A", 3), 1, 2) == -1
    # with [h_i, e_j] = a_ij e_j the long-root row of C_2 carries -1
    assert pairing_coroot_root(spec_of("C", 2), 2, 1) == -1
    assert pairing_coroot_root(spec_of("C", 2), 1, 2) == -2


def test_root_on_diagonal():
    gl4 = spec_of("A", 4)
    for l in range(1, 4):
        for k in range(1, 5):
            assert root_on_diagonal(gl4, l, k) == (k == l) - (k == l + 1)
    assert root_on_diagonal(spec_of("B", 3), 3, 3) == 1
    assert root_on_diagonal(spec_of("D", 3), 3, 2) == 1
    assert root_on_diagonal(spec_of("D", 3), 3, 3) == 1


def test_o2_is_rejected():
    with pytest.raises(LieSpecError):
        spec_of("D", 1)
