from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from gaudin.bethe import GaudinInstance
from gaudin.diffops import DiffPolyOperator
from gaudin.lie import LieAlgebraSpec, WeightVector
from gaudin.modules import apply_diffop, depth_basis, random_state
from gaudin.operators import (
    OperatorError,
    bcd_trace_operator,
    brauer_symmetrizer,
    build_operator,
    cdet_operator,
    contraction_matrix,
    current_matrix,
    gamma,
    operators_agree,
    pfaffian_operator,
    projector_matrix,
    projector_trace_operator,
    rdet_operator,
    sigma_stability_check,
    swap_matrix,
    trace_power_operator,
)
from gaudin.rational import RationalFunction


def instance(fam, rank, weights, z=(0, 1), chi=None):
    spec = LieAlgebraSpec.from_family(fam, rank)
    chi = spec.zero_weight() if chi is None else WeightVector.of(*chi)
    return GaudinInstance(spec, [WeightVector.of(*w) for w in weights], z, chi)


def letter(x, site, coeff, ell):
    return DiffPolyOperator.letter(x, site, coeff, sites=ell)


def const(c, ell):
    return DiffPolyOperator.scalar(RationalFunction.const(c), ell)


def test_current_matrix_examples():
    one = instance("A", 2, [(1, 0)], z=(Fraction(2, 3),))
    E = current_matrix(one)
    assert E[(1, 2)] == letter((1, 2), 1, RationalFunction.pole(Fraction(2, 3)), 1)
    chi = instance("A", 2, [(1, 0)], z=(0,), chi=(3, 5))
    E = current_matrix(chi)
    assert E[(2, 2)] == letter((2, 2), 1, RationalFunction.pole(0), 1) + const(-5, 1)
    assert E[(2, 1)] == letter((2, 1), 1, RationalFunction.pole(0), 1)
    two = instance("A", 2, [(1, 0), (0, 1)])
    assert current_matrix(two)[(1, 2)] == letter((1, 2), 1, RationalFunction.pole(0), 2) + letter(
        (1, 2), 2, RationalFunction.pole(1), 2
    )


def d(ell, k=1):
    return DiffPolyOperator.d(k, sites=ell)


def test_rdet_and_cdet_structure():
    gl1 = instance("A", 1, [(2,)], z=(0,))
    assert rdet_operator(gl1) == d(1) + current_matrix(gl1)[(1, 1)]
    inst = instance("A", 2, [(1, 0), (1, 0)])
    E = current_matrix(inst)
    assert rdet_operator(inst) == (d(2) + E[(1, 1)]) * (d(2) + E[(2, 2)]) - E[(1, 2)] * E[(2, 1)]
    assert cdet_operator(inst) == (d(2) - E[(1, 1)]) * (d(2) - E[(2, 2)]) - E[(2, 1)] * E[(1, 2)]
    with pytest.raises(OperatorError):
        rdet_operator(instance("B", 1, [(1,)], z=(0,)))


@pytest.mark.parametrize("kind", ["antisymmetrizer", "symmetrizer"])
def test_projector_trace_m1(kind):
    inst = instance("A", 3, [(1, 0, 0), (0, 2, 1)])
    E = current_matrix(inst)
    expect = d(2) * RationalFunction.const(3) + E[(1, 1)] + E[(2, 2)] + E[(3, 3)]
    assert projector_trace_operator(inst, 1, kind) == expect


def test_projectors_rank_two():
    P = swap_matrix(2, 2, 1, 2)
    ident = P * P
    assert projector_matrix(2, 2, "antisymmetrizer") == SymSum(ident, P, Fraction(1, 2), Fraction(-1, 2))
    assert projector_matrix(2, 2, "symmetrizer") == SymSum(ident, P, Fraction(1, 2), Fraction(1, 2))
    for N, m in itertools.product((2, 3), (1, 2, 3)):
        for kind in ("antisymmetrizer", "symmetrizer"):
            assert projector_matrix(N, m, kind).is_idempotent()


def SymSum(a, b, ca, cb):
    out = dict(a.scaled(ca).entries)
    for k, v in b.scaled(cb).entries.items():
        out[k] = out.get(k, 0) + v
    return type(a)("A", a.N, a.m, {k: v for k, v in out.items() if v})


def test_projector_range():
    inst = instance("A", 2, [(1, 0)], z=(0,))
    with pytest.raises(OperatorError):
        projector_trace_operator(inst, 3, "antisymmetrizer")
    with pytest.raises(OperatorError):
        projector_trace_operator(inst, 0, "symmetrizer")


def test_manin_gl2_on_states():
    inst = instance("A", 2, [(1, 0), (Fraction(1, 2), 2)])
    states = depth_basis(inst.spec, inst.weights, 2)
    assert operators_agree(projector_trace_operator(inst, 2, "antisymmetrizer"), rdet_operator(inst), states)


def test_trace_power_examples():
    inst = instance("A", 2, [(1, 0), (2, 1)], chi=(1, -1))
    E = current_matrix(inst)
    assert trace_power_operator(inst, 0) == const(2, 2)
    assert trace_power_operator(inst, 1) == d(2) * RationalFunction.const(2) + E[(1, 1)] + E[(2, 2)]
    expect = d(2, 2) * RationalFunction.const(2)
    for i in (1, 2):
        expect = expect + (d(2) * E[(i, i)]) + E[(i, i)] * d(2)
        for j in (1, 2):
            expect = expect + E[(j, i)] * E[(i, j)]
    assert trace_power_operator(inst, 2) == expect
    with pytest.raises(OperatorError):
        trace_power_operator(inst, -1)


@pytest.mark.parametrize("fam,N", [("B", 3), ("D", 4), ("B", 5), ("C", 4), ("C", 2), ("D", 6)])
def test_brauer_symmetrizer(fam, N):
    assert brauer_symmetrizer(fam, N, 1) == swap_matrix(N, 1, 1, 1)
    S = brauer_symmetrizer(fam, N, 2) if not (fam == "C" and N == 2) else None
    if S is None:
        return
    assert S.is_idempotent()
    Q = contraction_matrix(fam, N, 2, 1, 2)
    P = swap_matrix(N, 2, 1, 2)
    assert not (S * Q).entries and not (Q * S).entries
    sign = 1 if fam in "BD" else -1
    assert S * P == S.scaled(sign) and P * S == S.scaled(sign)


def test_brauer_m3_orthogonal():
    S = brauer_symmetrizer("B", 3, 3)
    assert S.is_idempotent()
    for a, b in ((1, 2), (1, 3), (2, 3)):
        assert S * swap_matrix(3, 3, a, b) == S
        assert not (S * contraction_matrix("B", 3, 3, a, b)).entries


def test_brauer_errors():
    with pytest.raises(OperatorError):
        brauer_symmetrizer("C", 4, 3)
    with pytest.raises(OperatorError):
        brauer_symmetrizer("A", 3, 2)


def test_gamma():
    for N in range(3, 9):
        assert gamma(1, N) == Fraction(N - 1, N)
    assert gamma(2, 3) == Fraction(3, 5)
    for n in (1, 2, 3):
        for m in range(1, n + 1):
            assert gamma(m, -2 * n) == Fraction(-2 * n + m - 2, -2 * n + 2 * m - 2)


def test_o3_trace_m1():
    inst = instance("B", 1, [(1,), (Fraction(1, 2),)], chi=(3,))
    assert bcd_trace_operator(inst, 1) == d(2) * RationalFunction.const(2)


@pytest.mark.parametrize("fam,n,m", [("B", 1, 1), ("B", 1, 2), ("D", 2, 2), ("B", 2, 2), ("C", 2, 1), ("C", 2, 2)])
def test_bcd_trace_top_coefficient(fam, n, m):
    inst = instance(fam, n, [tuple(range(1, n + 1))], z=(0,))
    op = bcd_trace_operator(inst, m)
    S = brauer_symmetrizer(fam, inst.spec.N, m)
    omega = inst.spec.N if fam in "BD" else -inst.spec.N
    top = op.coeffs[m]
    assert op.order() == m
    assert top.terms == {(): RationalFunction.const(gamma(m, omega) * S.trace())}


def test_type_c_range():
    with pytest.raises(OperatorError):
        bcd_trace_operator(instance("C", 2, [(1, 0)], z=(0,)), 3)


def test_pfaffian_matches_plain_sum():
    inst = instance("D", 2, [(1, 0), (0, 1)], chi=(1, 2))
    spec = inst.spec
    F = current_matrix(inst)
    Ft = {(i, j): F[(i, spec.prime(j))] for i in range(1, 5) for j in range(1, 5)}
    for i, j in itertools.product(range(1, 5), repeat=2):
        assert Ft[(i, j)] == Ft[(j, i)].scale(RationalFunction.const(-1))
    total = DiffPolyOperator({}, 2)
    count = 0
    for p in itertools.permutations(range(1, 5)):
        sign = (-1) ** sum(1 for a in range(4) for b in range(a + 1, 4) if p[a] > p[b])
        total = total + (Ft[(p[0], p[1])] * Ft[(p[2], p[3])]).scale(RationalFunction.const(sign))
        count += 1
    assert count == 24
    assert pfaffian_operator(inst) == total.scale(RationalFunction.const(Fraction(1, 8)))
    n1 = instance("D", 2, [(1, 0)], z=(0,))
    assert pfaffian_operator(n1).order() == 0


def _states(inst, count=6, seed=1):
    rng = random.Random(seed)
    return [random_state(inst.spec, inst.weights, rng, depth=2) for _ in range(count)]


def test_sigma_examples():
    o3 = instance("B", 1, [(1,), (Fraction(2, 3),)])
    assert sigma_stability_check(o3, 2, _states(o3))
    sp2 = instance("C", 1, [(1,), (2,)])
    assert sigma_stability_check(sp2, 1, _states(sp2))
    o4 = instance("D", 2, [(1, 0), (0, 1)])
    assert sigma_stability_check(o4, 0, _states(o4), kind="pfaffian")
    gl2 = instance("A", 2, [(1, 0), (0, 1)])
    for kind, m in (("antisymmetrizer", 2), ("symmetrizer", 2), ("trace-power", 2), ("cdet", 0)):
        assert sigma_stability_check(gl2, m, _states(gl2), kind=kind)


def test_sigma_negative_sign():
    # the Pfaffian is not ς-invariant when n is odd: flipping the expected sign must fail
    o6 = instance("D", 3, [(Fraction(7, 2), Fraction(5, 3), 1)], z=(0,))
    from gaudin.operators import sigma_image

    pf = pfaffian_operator(o6)
    states = _states(o6, 3)
    assert any(not all(not v for v in sl.values()) for sl in (apply_diffop(pf, s) for s in states))
    assert sigma_stability_check(o6, 0, states, kind="pfaffian")
    assert not operators_agree(sigma_image(pf), pf, states)


def test_build_operator_errors_and_determinism():
    inst = instance("A", 2, [(1, 0)], z=(0,))
    with pytest.raises(OperatorError):
        build_operator(inst, "bcd-trace", 1)
    with pytest.raises(OperatorError):
        build_operator(inst, "sym-trace")
    with pytest.raises(OperatorError):
        build_operator(inst, "wronskian")
    assert build_operator(inst, "sym-trace", 2) == build_operator(inst, "sym-trace", 2)
    assert repr(build_operator(inst, "rdet")) == repr(build_operator(inst, "rdet"))
