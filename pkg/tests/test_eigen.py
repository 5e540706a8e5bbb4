from __future__ import annotations

from fractions import Fraction

import mpmath
import pytest

import gaudin.eigen as eigen
from gaudin.bethe import BetheConfig, GaudinInstance, eigen_functions
from gaudin.diffops import ScalarDiffOp
from gaudin.eigen import (
    BAEViolation,
    EigenError,
    NoncommSymSpec,
    ZeroBetheVector,
    bd_formula,
    c_formula,
    eig_genfun_BD,
    eig_pfaffian,
    eig_typeA_projector,
    eig_typeA_rdet,
    eig_typeA_trace_series,
    eig_typeBD,
    eig_typeC,
    first_order,
    genfun_consistent,
    genfun_formula,
    masterfn_crosscheck,
    ncsf,
    oracle_for,
    pfaffian_formula,
    verify_eigen,
)
from gaudin.lie import LieAlgebraSpec, WeightVector
from gaudin.modules import TensorState
from gaudin.operators import bcd_trace_operator, rdet_operator
from gaudin.rational import ONE, RationalFunction

D = ScalarDiffOp.d()
f = RationalFunction.pole(0, 1, 2) + RationalFunction.pole(Fraction(1, 3), 1, -1)
g = RationalFunction.pole(1, 1, Fraction(1, 2)) + 3
x1, x2 = first_order(f), first_order(g)


def config(fam, rank, weights, roots=(), z=(0, 1), chi=None):
    spec = LieAlgebraSpec.from_family(fam, rank)
    chi = spec.zero_weight() if chi is None else WeightVector.of(*chi)
    inst = GaudinInstance(spec, [WeightVector.of(*w) for w in weights], z, chi)
    return BetheConfig(inst, tuple(roots))


def flagship(w=Fraction(1, 2)):
    return config("A", 2, [(1, 0), (1, 0)], [(w, 1)])


def test_ncsf_examples():
    assert ncsf(NoncommSymSpec("complete", 2, (x1, x2))) == x1 * x1 + x1 * x2 + x2 * x2
    assert ncsf(NoncommSymSpec("elementary", 2, (x1, x2))) == x2 * x1
    with pytest.raises(EigenError):
        ncsf(NoncommSymSpec("elementary", 3, (x1, x2)))


def test_type_a_formulas():
    cfg = config("A", 1, [(2,)], z=(Fraction(1, 2),))
    e11 = eigen_functions(cfg)[1].rf()
    assert eig_typeA_rdet(cfg) == first_order(e11)
    cfg = flagship()
    e = [eigen_functions(cfg)[i].rf() for i in (1, 2)]
    assert eig_typeA_rdet(cfg) == ScalarDiffOp({2: ONE, 1: e[0] + e[1], 0: e[0].derivative() + e[1] * e[0]})
    assert eig_typeA_projector(cfg, 2, "antisymmetrizer") == eig_typeA_rdet(cfg)
    s1 = ScalarDiffOp({1: RationalFunction.const(2), 0: e[0] + e[1]})
    assert eig_typeA_projector(cfg, 1, "antisymmetrizer") == s1
    assert eig_typeA_projector(cfg, 1, "symmetrizer") == s1
    y1, y2 = first_order(e[0]), first_order(e[1])
    assert eig_typeA_projector(cfg, 2, "symmetrizer") == y1 * y1 + y1 * y2 + y2 * y2
    # m = 0: only z-poles
    base = config("A", 2, [(1, 0), (0, 1)])
    u = RationalFunction.variable()
    for c in eig_typeA_rdet(base).coeffs.values():
        assert (c * (u * (u - 1)) ** 2).den == (1,)


def test_trace_series():
    cfg = flagship()
    e = [eigen_functions(cfg)[i].rf() for i in (1, 2)]
    y1, y2 = first_order(e[0]), first_order(e[1])
    assert eig_typeA_trace_series(cfg, 0) == ScalarDiffOp({0: RationalFunction.const(2)})
    assert eig_typeA_trace_series(cfg, 1) == y1 + y2
    assert eig_typeA_trace_series(cfg, 2) == y1 * y1 + y1 * y2 + y2 * y2 - y2 * y1
    one = config("A", 1, [(3,)], z=(0,))
    y = first_order(eigen_functions(one)[1].rf())
    assert eig_typeA_trace_series(one, 2) == y * y


def test_bd_formulas():
    assert bd_formula("B", [f], 1) == D.scale(2)
    assert bd_formula("B", [f], 2) == x1 * x1 + x1 * first_order(f, -1) + first_order(f, -1) * first_order(f, -1)
    up = [first_order(f), first_order(g)]
    down = [first_order(g, -1), first_order(f, -1)]
    h_a = ncsf(NoncommSymSpec("complete", 2, tuple(up + down[1:])))
    h_b = ncsf(NoncommSymSpec("complete", 2, tuple(up[:1] + down)))
    assert bd_formula("D", [f, g], 2) == (h_a + h_b).scale(Fraction(1, 2))


def test_c_formulas():
    assert c_formula([f], 1) == D.scale(3)
    assert c_formula([f], 3) == first_order(f, -1) * D * first_order(f)
    slots = [first_order(f), first_order(g), D, first_order(g, -1), first_order(f, -1)]
    pairs = [(i, j) for i in range(5) for j in range(i)]
    assert len(pairs) == 10
    total = ScalarDiffOp({})
    for i, j in pairs:
        total = total + slots[i] * slots[j]
    assert c_formula([f, g], 2) == total
    with pytest.raises(EigenError):
        c_formula([f], 4)


def test_pfaffian_formula():
    assert pfaffian_formula([f]) == f
    assert pfaffian_formula([f, g]) == f * g - g.derivative()
    cfg = config("D", 2, [(0, 0)], z=(0,))
    assert eig_pfaffian(cfg).is_zero()


def test_genfun_formula():
    assert genfun_formula("B", [f], 0)[0] == ScalarDiffOp({0: ONE})
    assert genfun_formula("B", [f], 1)[1] == D.scale(2)
    # D: the middle (1 + ∂z)^{-1} subtracts one ∂ at order z
    assert genfun_formula("D", [f, g], 1)[1] == D.scale(3)


@pytest.mark.parametrize(
    "cfg",
    [
        config("B", 1, [(1,), (1,)], [(Fraction(1, 2), 1)]),
        config("B", 2, [(1, 0), (0, 1)], [(Fraction(1, 3), 2)]),
        config("D", 2, [(1, 0), (1, 0)], [(Fraction(1, 2), 1)]),
        config("D", 2, [(2, 1)], z=(0,), chi=(1, 0)),
    ],
)
def test_genfun_consistency(cfg):
    assert genfun_consistent(cfg, 3)


def test_wrong_family():
    with pytest.raises(EigenError):
        eig_typeBD(flagship(), 1)
    with pytest.raises(EigenError):
        eig_typeC(config("C", 1, [(1,)], z=(0,)), 4)
    with pytest.raises(EigenError):
        oracle_for("wronskian")


def test_verify_flagship_exact():
    cfg = flagship()
    rep = verify_eigen(rdet_operator(cfg.instance), cfg, eig_typeA_rdet(cfg))
    assert rep.passed and [s.k for s in rep.slices] == [0, 1, 2]
    assert all(s.status == "exact-equal" for s in rep.slices)


def test_verify_perturbed_root():
    cfg = flagship(Fraction(1, 3))
    with pytest.raises(BAEViolation) as err:
        verify_eigen(rdet_operator(cfg.instance), cfg, eig_typeA_rdet(cfg))
    assert err.value.residuals == [Fraction(3, 2)]
    rep = verify_eigen(rdet_operator(cfg.instance), cfg, eig_typeA_rdet(cfg), enforce_bae=False)
    assert not rep.passed
    bad = [s for s in rep.slices if not s.passed]
    assert bad and all(s.deviation > 0 and s.witness for s in bad)


def test_verify_highest_weight_vector():
    cfg = config("A", 3, [(1, 0, 0), (Fraction(1, 2), 2, 0)], chi=(1, 0, 2))
    rep = verify_eigen(rdet_operator(cfg.instance), cfg, eig_typeA_rdet(cfg))
    assert rep.passed


def test_zero_vector_guard(monkeypatch):
    cfg = flagship()
    zero = TensorState(cfg.instance.spec, cfg.instance.weights, {})
    monkeypatch.setattr(eigen, "bethe_vector", lambda c: zero)
    with pytest.raises(ZeroBetheVector):
        verify_eigen(rdet_operator(cfg.instance), cfg, eig_typeA_rdet(cfg))


def test_verify_float_matches_exact():
    cfg = flagship(mpmath.mpf(1) / 2)
    assert not cfg.exact
    rep = verify_eigen(rdet_operator(cfg.instance), cfg, oracle_for("rdet"))
    assert rep.passed and rep.mode == "float" and rep.sample_points > 0
    with pytest.raises(EigenError):
        verify_eigen(rdet_operator(cfg.instance), cfg, eig_typeA_rdet(flagship()))


def test_verify_o3_and_sp4():
    cfg = config("B", 1, [(1,), (1,)], [(Fraction(1, 2), 1)])
    for m in (1, 2):
        assert verify_eigen(bcd_trace_operator(cfg.instance, m), cfg, eig_typeBD(cfg, m)).passed
    cfg = config("C", 2, [(1, 0), (1, 0)], [(Fraction(1, 2), 1)])
    assert verify_eigen(bcd_trace_operator(cfg.instance, 2), cfg, eig_typeC(cfg, 2)).passed


def test_masterfn():
    assert masterfn_crosscheck(flagship())
    assert masterfn_crosscheck(config("A", 2, [(1, 0), (2, 1)]))
    assert masterfn_crosscheck(config("B", 1, [(1,), (1,)], [(Fraction(1, 2), 1)]))
    assert masterfn_crosscheck(config("C", 1, [(1,), (1,)], [(Fraction(1, 2), 1)]))
    with pytest.raises(EigenError, match="unsupported"):
        masterfn_crosscheck(config("A", 2, [(1, 0)], z=(0,), chi=(1, 0)))
    with pytest.raises(EigenError):
        masterfn_crosscheck(config("A", 2, [(Fraction(1, 2), 0)], z=(0,)))


def test_masterfn_is_an_identity_in_the_roots():
    # the logarithmic derivatives reproduce the eigen functions whether or not the BAE hold
    assert masterfn_crosscheck(flagship(Fraction(1, 3)))
