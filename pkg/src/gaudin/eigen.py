"""Predicted eigenvalue operators and the eigenvector verification engine."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import mpmath

from .bethe import BAE_TOL, BetheConfig, BetheError, bae_residual, bethe_vector, eigen_functions, is_exact, to_mpf
from .diffops import DiffPolyOperator, Jet, ScalarDiffOp
from .modules import ActionTable, FloatTensorState, TensorState, action_table
from .operators import gamma, omega_of
from .rational import ONE, RationalFunction, log_derivative_of_product


class EigenError(ValueError):
    pass


class ZeroBetheVector(EigenError):
    pass


class BAEViolation(EigenError):
    def __init__(self, msg, residuals):
        super().__init__(msg)
        self.residuals = residuals


# scalar helpers ---------------------------------------------------------------
def one_like(like=None):
    """Unit of the coefficient ring ``like`` belongs to."""
    if isinstance(like, Jet):
        return Jet.const(1, len(like))
    if like is None or isinstance(like, RationalFunction):
        return ONE
    return like.one()


def _unit(like=None) -> ScalarDiffOp:
    return ScalarDiffOp({0: one_like(like)})


def _zero() -> ScalarDiffOp:
    return ScalarDiffOp({})


def first_order(f, sign: int = 1) -> ScalarDiffOp:
    """``∂ + sign·f``."""
    return ScalarDiffOp({1: one_like(f), 0: f * sign})


def bare_d(like=None) -> ScalarDiffOp:
    return ScalarDiffOp({1: one_like(like)})


@dataclass(frozen=True)
class NoncommSymSpec:
    kind: str  # complete | elementary
    m: int
    factors: Tuple[ScalarDiffOp, ...]


def ncsf(spec: NoncommSymSpec) -> ScalarDiffOp:
    """h_m = Σ_{i1<=...<=im} x_i1...x_im ; e_m = Σ_{i1>...>im} x_i1...x_im."""
    xs, m = spec.factors, spec.m
    p = len(xs)
    if spec.kind not in ("complete", "elementary"):
        raise EigenError(f"unknown kind {spec.kind!r}")
    if m < 0:
        raise EigenError("m must be nonnegative")
    if spec.kind == "elementary" and m > p:
        raise EigenError(f"e_{m} needs at least {m} factors, got {p}")
    like = next((c for x in xs for c in x.coeffs.values()), None)
    memo: Dict[tuple, ScalarDiffOp] = {}

    def rec(k: int, bound: int) -> ScalarDiffOp:
        # complete: indices >= bound ; elementary: indices < bound
        if k == 0:
            return _unit(like)
        key = (k, bound)
        got = memo.get(key)
        if got is not None:
            return got
        total = _zero()
        rng = range(bound, p) if spec.kind == "complete" else range(bound)
        for i in rng:
            total = total + xs[i] * rec(k - 1, i)
        memo[key] = total
        return total

    return rec(m, 0 if spec.kind == "complete" else p)


class ZSeriesOp:
    """Truncated power series in z with ScalarDiffOp coefficients."""

    def __init__(self, coeffs: Sequence[ScalarDiffOp], K: int):
        self.K = K
        cs = list(coeffs)[: K + 1]
        while len(cs) < K + 1:
            cs.append(_zero())
        self.coeffs = cs

    def __add__(self, other: "ZSeriesOp") -> "ZSeriesOp":
        return ZSeriesOp([a + b for a, b in zip(self.coeffs, other.coeffs)], min(self.K, other.K))

    def __mul__(self, other: "ZSeriesOp") -> "ZSeriesOp":
        K = min(self.K, other.K)
        out = [_zero() for _ in range(K + 1)]
        for i in range(K + 1):
            if not self.coeffs[i]:
                continue
            for j in range(K + 1 - i):
                if other.coeffs[j]:
                    out[i + j] = out[i + j] + self.coeffs[i] * other.coeffs[j]
        return ZSeriesOp(out, K)

    def inverse(self) -> "ZSeriesOp":
        """Two-sided inverse; the constant term must be the unit."""
        c0 = self.coeffs[0]
        one = _unit(next(iter(c0.coeffs.values()), None))
        if c0 != one:
            raise EigenError("series inverse needs constant term 1")
        inv = [one]
        for k in range(1, self.K + 1):
            acc = _zero()
            for j in range(1, k + 1):
                acc = acc + self.coeffs[j] * inv[k - j]
            inv.append(-acc)
        return ZSeriesOp(inv, self.K)

    def __eq__(self, other) -> bool:
        return isinstance(other, ZSeriesOp) and self.coeffs == other.coeffs

    def __getitem__(self, k: int) -> ScalarDiffOp:
        return self.coeffs[k]

    def __repr__(self) -> str:
        return f"ZSeriesOp(K={self.K}, {self.coeffs})"


def geometric(x: ScalarDiffOp, K: int, like=None) -> ZSeriesOp:
    """(1 - z x)^{-1} = Σ z^j x^j."""
    cs = [_unit(like)]
    for _ in range(K):
        cs.append(cs[-1] * x)
    return ZSeriesOp(cs, K)


def linear_series(x: ScalarDiffOp, K: int, like=None, sign: int = 1) -> ZSeriesOp:
    """1 + sign·z x."""
    return ZSeriesOp([_unit(like), x.scale(sign) if sign != 1 else x], K)


# formulas on a list of diagonal functions ---------------------------------------
# ``fs`` holds ℰ_11..ℰ_NN (type A) or ℱ_11..ℱ_nn (B/C/D) in any differential
# coefficient ring; the same formulas give Harish-Chandra images when the
# entries are E_ii[-1] and ∂ plays the role of τ.
def det_formula(fs) -> ScalarDiffOp:
    """(∂ + f_N) ... (∂ + f_1)."""
    out = _unit(fs[0])
    for f in reversed(fs):
        out = out * first_order(f)
    return out


def cdet_formula(fs) -> ScalarDiffOp:
    """(∂ - f_1) ... (∂ - f_N)."""
    out = _unit(fs[0])
    for f in fs:
        out = out * first_order(f, -1)
    return out


def projector_formula(fs, m: int, kind: str) -> ScalarDiffOp:
    k = {"antisymmetrizer": "elementary", "symmetrizer": "complete"}[kind]
    return ncsf(NoncommSymSpec(k, m, tuple(first_order(f) for f in fs)))


def trace_series_formula(fs, k: int) -> ScalarDiffOp:
    """z^k coefficient of Σ_i (1-zx_1)^-1...(1-zx_i)^-1 (1-zx_{i-1})...(1-zx_1), x_i = ∂+f_i."""
    like = fs[0]
    xs = [first_order(f) for f in fs]
    total = ZSeriesOp([], k)
    for i in range(len(xs)):
        s = ZSeriesOp([_unit(like)], k)
        for a in range(i + 1):
            s = s * geometric(xs[a], k, like)
        for a in range(i - 1, -1, -1):
            s = s * linear_series(xs[a], k, like, -1)
        total = total + s
    return total[k]


def bd_formula(family: str, fs, m: int) -> ScalarDiffOp:
    """B: h_m(∂+f_1..∂+f_n, ∂-f_n..∂-f_1); D: half-sum of the two (2n-1)-factor h_m."""
    if m == 0:
        return _unit(fs[0])
    up = [first_order(f) for f in fs]
    down = [first_order(f, -1) for f in reversed(fs)]
    if family == "B":
        return ncsf(NoncommSymSpec("complete", m, tuple(up + down)))
    # D: drop ∂-f_n in one copy and ∂+f_n in the other
    a = ncsf(NoncommSymSpec("complete", m, tuple(up + down[1:])))
    b = ncsf(NoncommSymSpec("complete", m, tuple(up[:-1] + down)))
    return (a + b).scale(Fraction(1, 2))


def c_formula(fs, m: int) -> ScalarDiffOp:
    """e_m(∂+f_1,...,∂+f_n, ∂, ∂-f_n,...,∂-f_1)."""
    n = len(fs)
    if not 0 <= m <= 2 * n + 1:
        raise EigenError(f"m={m} outside 0..{2 * n + 1}")
    up = [first_order(f) for f in fs]
    down = [first_order(f, -1) for f in reversed(fs)]
    return ncsf(NoncommSymSpec("elementary", m, tuple(up + [bare_d(fs[0])] + down)))


def pfaffian_formula(fs):
    """∂-free part of (f_1 - ∂) ... (f_n - ∂) acting on 1 (None when it vanishes)."""
    out = _unit(fs[0])
    for f in fs:
        out = out * first_order(f, -1).scale(-1)
    return out.apply_to_one()


def genfun_formula(family: str, fs, K: int) -> ZSeriesOp:
    """B: Π_i (1+(∂-f_i)z) Π_{i=n..1} (1+(∂+f_i)z); D: with (1+∂z)^{-1} in the middle."""
    like = fs[0]
    out = ZSeriesOp([_unit(like)], K)
    for f in fs:
        out = out * linear_series(first_order(f, -1), K, like)
    if family == "D":
        out = out * geometric(bare_d(like).scale(-1), K, like)
    for f in reversed(fs):
        out = out * linear_series(first_order(f), K, like)
    return out


# eigenvalue data ---------------------------------------------------------------
def _funcs(config: BetheConfig, at=None, order: int = 1):
    ef = eigen_functions(config)
    return [ef[i].coefficient(at, order) for i in range(1, len(ef) + 1)]


def _order_for(config: BetheConfig, extra: int = 0) -> int:
    # enough Taylor orders for an operator of order <= N + extra
    return max(config.instance.spec.N + 3 + extra, 2 * extra + 4)


def eig_typeA_rdet(config: BetheConfig, at=None) -> ScalarDiffOp:
    """(∂ + ℰ_NN) ... (∂ + ℰ_11)."""
    _family(config, "A")
    return det_formula(_funcs(config, at, _order_for(config)))


def eig_typeA_cdet(config: BetheConfig, at=None) -> ScalarDiffOp:
    """(∂ - ℰ_11) ... (∂ - ℰ_NN)."""
    _family(config, "A")
    return cdet_formula(_funcs(config, at, _order_for(config)))


def eig_typeA_projector(config: BetheConfig, m: int, kind: str, at=None) -> ScalarDiffOp:
    _family(config, "A")
    return projector_formula(_funcs(config, at, _order_for(config, m)), m, kind)


def eig_typeA_trace_series(config: BetheConfig, k: int, at=None) -> ScalarDiffOp:
    _family(config, "A")
    if k == 0:
        return _unit().scale(config.instance.spec.N)
    return trace_series_formula(_funcs(config, at, _order_for(config, k)), k)


def eig_typeBD(config: BetheConfig, m: int, at=None) -> ScalarDiffOp:
    fam = _family(config, "BD")
    return bd_formula(fam, _funcs(config, at, _order_for(config, m)), m)


def eig_typeC(config: BetheConfig, m: int, at=None) -> ScalarDiffOp:
    _family(config, "C")
    n = config.instance.spec.n
    if not 1 <= m <= 2 * n + 1:
        raise EigenError(f"m={m} outside 1..{2 * n + 1}")
    return c_formula(_funcs(config, at, _order_for(config, m)), m)


def eig_bcd_trace(config: BetheConfig, m: int, at=None) -> ScalarDiffOp:
    fam = config.instance.spec.family
    return eig_typeC(config, m, at) if fam == "C" else eig_typeBD(config, m, at)


def eig_pfaffian(config: BetheConfig, at=None):
    """(ℱ_11 - ∂) ... (ℱ_nn - ∂) 1."""
    _family(config, "D")
    val = pfaffian_formula(_funcs(config, at, _order_for(config)))
    if val is None:
        return Jet.const(0, 1) if at is not None else RationalFunction.const(0)
    return val


def eig_pfaffian_operator(config: BetheConfig, at=None) -> ScalarDiffOp:
    return ScalarDiffOp({0: eig_pfaffian(config, at)})


def eig_genfun_BD(config: BetheConfig, K: int, at=None) -> ZSeriesOp:
    fam = _family(config, "BD")
    return genfun_formula(fam, _funcs(config, at, _order_for(config, K)), K)


def bcd_eigen_series(config: BetheConfig, K: int, at=None) -> ZSeriesOp:
    """Σ_m (-z)^m eig_m with eig_0 = 1."""
    cs = [_unit(_funcs(config, at, 1)[0])]
    for m in range(1, K + 1):
        e = eig_typeBD(config, m, at)
        cs.append(e.scale(-1) if m % 2 else e)
    return ZSeriesOp(cs, K)


def genfun_consistent(config: BetheConfig, K: int = 3) -> bool:
    return bcd_eigen_series(config, K).inverse() == eig_genfun_BD(config, K)


def _family(config: BetheConfig, allowed: str) -> str:
    fam = config.instance.spec.family
    if fam not in allowed:
        raise EigenError(f"family {fam} not supported here (needs {allowed})")
    return fam


# oracle registry ----------------------------------------------------------------
def oracle_for(kind: str, m: Optional[int] = None) -> Callable:
    """Callable ``(config, at) -> ScalarDiffOp`` predicting the eigenvalue of an operator kind."""
    if kind == "rdet":
        return lambda c, at=None: eig_typeA_rdet(c, at)
    if kind == "cdet":
        return lambda c, at=None: eig_typeA_cdet(c, at)
    if kind == "antisym-trace":
        return lambda c, at=None: eig_typeA_projector(c, m, "antisymmetrizer", at)
    if kind == "sym-trace":
        return lambda c, at=None: eig_typeA_projector(c, m, "symmetrizer", at)
    if kind == "trace-power":
        return lambda c, at=None: eig_typeA_trace_series(c, m, at)
    if kind == "bcd-trace":
        return lambda c, at=None: eig_bcd_trace(c, m, at)
    if kind == "pfaffian":
        return lambda c, at=None: eig_pfaffian_operator(c, at)
    raise EigenError(f"no oracle for operator kind {kind!r}")


# verification -----------------------------------------------------------------
FLOAT_TOL = mpmath.mpf("1e-20")


@dataclass
class SliceResult:
    k: int
    status: str  # exact-equal | mismatch | within-tol
    deviation: object = 0
    witness: Optional[dict] = None

    @property
    def passed(self) -> bool:
        return self.status in ("exact-equal", "within-tol")


@dataclass
class EigenReport:
    mode: str
    slices: List[SliceResult] = field(default_factory=list)
    bae_residuals: List = field(default_factory=list)
    sample_points: int = 0

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.slices)

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "passed": self.passed,
            "baeResiduals": [_num_str(r) for r in self.bae_residuals],
            "samplePoints": self.sample_points,
            "slices": [
                {"k": s.k, "status": s.status, "deviation": _num_str(s.deviation)} for s in self.slices
            ],
        }


def _num_str(x) -> str:
    if isinstance(x, (int, Fraction)):
        return str(x)
    return mpmath.nstr(x, 6)


def check_bae(config: BetheConfig, enforce: bool = True) -> list:
    res = bae_residual(config)
    if config.exact:
        bad = any(r != 0 for r in res)
    else:
        bad = any(abs(r) >= BAE_TOL for r in res)
    if bad and enforce:
        raise BAEViolation("Bethe ansatz equations violated", res)
    return res


def verify_eigen(
    operator: DiffPolyOperator,
    config: BetheConfig,
    oracle,
    tol=FLOAT_TOL,
    enforce_bae: bool = True,
    samples: Optional[int] = None,
) -> EigenReport:
    """Compare each ∂-slice of ``operator`` on the Bethe vector with the oracle's slice times the vector.

    ``oracle`` is a ScalarDiffOp (exact mode) or a callable ``(config, at)``.
    """
    res = check_bae(config, enforce_bae)
    phi = bethe_vector(config)
    if phi.is_zero():
        raise ZeroBetheVector("Bethe vector is zero")
    table = action_table(operator, phi)
    if config.exact:
        pred = oracle if isinstance(oracle, ScalarDiffOp) else oracle(config, None)
        report = EigenReport("exact", bae_residuals=res)
        lhs = table.exact()
        for k in sorted(set(lhs) | set(pred.coeffs)):
            got = lhs.get(k, {})
            c = pred.coeffs.get(k)
            want = {} if c is None else {b: c * v for b, v in phi.terms.items()}
            want = {b: v for b, v in want.items() if not v.is_zero()}
            if got == want:
                report.slices.append(SliceResult(k, "exact-equal", 0))
            else:
                diff = {}
                for b in set(got) | set(want):
                    d = got.get(b, RationalFunction.const(0)) - want.get(b, RationalFunction.const(0))
                    if not d.is_zero():
                        diff[b] = d
                report.slices.append(SliceResult(k, "mismatch", len(diff), witness=diff))
        return report
    if isinstance(oracle, ScalarDiffOp):
        raise EigenError("float mode needs an oracle callable (config, at)")
    points = sample_points(operator, config, samples)
    report = EigenReport("float", bae_residuals=res, sample_points=len(points))
    worst: Dict[int, object] = {}
    phi_f = phi if isinstance(phi, FloatTensorState) else phi.to_float()
    for u0 in points:
        lhs = table.at(u0)
        pred = oracle(config, u0)
        ks = set(lhs) | set(pred.coeffs)
        for k in ks:
            got = lhs.get(k, FloatTensorState(phi.spec, phi.weights, {}))
            c = pred.coeffs.get(k)
            want = phi_f.scale(c.value) if c is not None else FloatTensorState(phi.spec, phi.weights, {})
            dev = got.distance(want)
            scale = max(mpmath.mpf(1), want.max_abs())
            dev = dev / scale
            if k not in worst or dev > worst[k]:
                worst[k] = dev
    for k in sorted(worst):
        status = "within-tol" if worst[k] < tol else "mismatch"
        report.slices.append(SliceResult(k, status, worst[k]))
    return report


def sample_points(operator: DiffPolyOperator, config: BetheConfig, count: Optional[int] = None) -> list:
    """2·(degree bound)+1 points away from every pole."""
    if count is None:
        deg = 0
        for (_, _k), rf in operator.terms().items():
            deg = max(deg, rf.degree_bound())
        deg += (operator.order() + 2) * (config.m + 1)
        count = 2 * deg + 1
    poles = [to_mpf(z) for z in config.instance.z] + [to_mpf(w) for w in config.ws]
    pts = []
    k = 0
    while len(pts) < count:
        k += 1
        u0 = mpmath.mpf(k) / 7 + mpmath.mpf(1) / 3 + mpmath.sqrt(2) / 10
        if all(abs(u0 - p) > mpmath.mpf("1e-3") for p in poles):
            pts.append(u0)
    return pts


# master-function cross-check --------------------------------------------------------
def _integer_weights(values) -> List[int]:
    out = []
    for v in values:
        if Fraction(v).denominator != 1:
            raise EigenError("master-function check needs integer weights")
        out.append(int(v))
    return out


def _master_operator(T: List[List[Tuple[Fraction, int]]], y: List[List[Tuple[Fraction, int]]]) -> ScalarDiffOp:
    """(∂ + x_N) ... (∂ + x_1), x_a = ln'(T_a y_{a-1} / y_a)."""
    N = len(T)
    xs = []
    for a in range(1, N + 1):
        factors = list(T[a - 1]) + list(y[a - 1]) + [(r, -e) for r, e in y[a]]
        xs.append(log_derivative_of_product(factors))
    out = ScalarDiffOp({0: ONE})
    for x in reversed(xs):
        out = out * first_order(x)
    return out


def masterfn_crosscheck(config: BetheConfig) -> bool:
    """Compare the master-function operator with the corresponding eigenvalue operator.

    A: N = N, y_0 = y_N = 1, T_a = Π_k (u-z_k)^{λ_k(E_aa)}.
    B (o_{2n+1}): compared in gl_{2n} form with y_a = y_{2n-a} = y^B_a and
        T_a = T_{2n-a+1}^{-1} = T^B_a; result matched with the z^{2n} genfun term.
    C (sp_{2n}): gl_{2n+1} form, y_a = y_{2n+1-a} = y^C_a except that the two
        middle ones carry y^C_n squared; matched with the top e_{2n+1} operator.
    """
    inst = config.instance
    spec = inst.spec
    if any(inst.chi.values):
        raise EigenError("unsupported: master-function check needs χ = 0")
    if not config.exact:
        raise EigenError("master-function check is exact only")
    fam = spec.family
    weights = [_integer_weights(l.values) for l in inst.weights]
    roots_by_color: Dict[int, List[Fraction]] = {}
    for w, c in config.roots:
        roots_by_color.setdefault(c, []).append(w)

    def ypoly(c, power=1):
        return [(w, power) for w in roots_by_color.get(c, [])]

    def tpoly(a, sgn=1):
        return [(z, sgn * lam[a - 1]) for z, lam in zip(inst.z, weights) if lam[a - 1]]

    if fam == "A":
        N = spec.N
        T = [tpoly(a) for a in range(1, N + 1)]
        y = [[]] + [ypoly(a) for a in range(1, N)] + [[]]
        return _master_operator(T, y) == eig_typeA_rdet(config)
    if fam == "B":
        n = spec.n
        N = 2 * n
        T = [None] * N
        for a in range(1, n + 1):
            T[a - 1] = tpoly(a)
            T[N - a] = tpoly(a, -1)
        y = [[] for _ in range(N + 1)]
        for a in range(1, n + 1):
            y[a] = ypoly(a)
            y[N - a] = ypoly(a)
        target = eig_genfun_BD(config, N)[N]
        return _master_operator(T, y) == target
    if fam == "C":
        n = spec.n
        N = 2 * n + 1
        T = [[] for _ in range(N)]
        for a in range(1, n + 1):
            T[a - 1] = tpoly(a)
            T[N - a] = tpoly(a, -1)
        y = [[] for _ in range(N + 1)]
        for a in range(1, n + 1):
            p = 2 if a == n else 1
            y[a] = ypoly(a, p)
            y[N - a] = ypoly(a, p)
        return _master_operator(T, y) == eig_typeC(config, N)
    raise EigenError(f"unsupported: no master-function identification for family {fam}")
