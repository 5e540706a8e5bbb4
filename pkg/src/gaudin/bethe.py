"""Gaudin instances, Bethe vectors and the Bethe ansatz equations."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath

from .diffops import Jet
from .lie import LieAlgebraSpec, WeightVector, pairing_coroot_root, pairing_coroot_weight
from .modules import FloatTensorState, Monomial, TensorState, straighten
from .rational import RationalFunction, as_fraction, pdeg, peval, pmul, padd, psub, linear, poly

DEFAULT_DPS = 60
BAE_TOL = mpmath.mpf("1e-30")

if mpmath.mp.dps < DEFAULT_DPS:
    mpmath.mp.dps = DEFAULT_DPS


class BetheError(ValueError):
    pass


class NoFiniteSolution(BetheError):
    pass


class SingularJacobian(BetheError):
    pass


class Divergence(BetheError):
    pass


class RootCollision(BetheError):
    pass


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction))


def to_mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


@dataclass(frozen=True)
class GaudinInstance:
    spec: LieAlgebraSpec
    weights: Tuple[WeightVector, ...]
    z: Tuple[Fraction, ...]
    chi: WeightVector

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        object.__setattr__(self, "z", tuple(as_fraction(v) for v in self.z))
        if not self.weights:
            raise BetheError("need at least one site")
        if len(self.weights) != len(self.z):
            raise BetheError("weights and evaluation points differ in length")
        if len(set(self.z)) != len(self.z):
            raise BetheError("evaluation points must be distinct")
        for w in self.weights + (self.chi,):
            self.spec._check_weight(w)

    @property
    def ell(self) -> int:
        return len(self.weights)

    def highest_state(self) -> TensorState:
        return TensorState.highest(self.spec, self.weights)


@dataclass(frozen=True)
class BetheConfig:
    instance: GaudinInstance
    roots: Tuple[Tuple[object, int], ...] = ()

    def __post_init__(self):
        roots = tuple((w if not is_exact(w) else as_fraction(w), int(c)) for w, c in self.roots)
        object.__setattr__(self, "roots", roots)
        n = self.instance.spec.n
        for _, c in roots:
            if not 1 <= c <= n:
                raise BetheError(f"color {c} outside 1..{n}")
        ws = [w for w, _ in roots]
        for a in range(len(ws)):
            for b in range(a + 1, len(ws)):
                if ws[a] == ws[b]:
                    raise RootCollision(f"roots {a + 1} and {b + 1} coincide")
            if any(ws[a] == z for z in self.instance.z):
                raise BetheError(f"root {a + 1} coincides with an evaluation point")

    @property
    def m(self) -> int:
        return len(self.roots)

    @property
    def ws(self) -> tuple:
        return tuple(w for w, _ in self.roots)

    @property
    def colors(self) -> Tuple[int, ...]:
        return tuple(c for _, c in self.roots)

    @property
    def exact(self) -> bool:
        return all(is_exact(w) for w in self.ws)

    def expected_weight(self) -> WeightVector:
        spec = self.instance.spec
        from .lie import simple_root

        w = spec.zero_weight()
        for lam in self.instance.weights:
            w = w + lam
        for c in self.colors:
            w = w - simple_root(spec, c)
        return w


def _residual_terms(inst: GaudinInstance, colors):
    spec = inst.spec
    lam_pair = [[pairing_coroot_weight(spec, c, lam) for lam in inst.weights] for c in colors]
    a = [[pairing_coroot_root(spec, c, s) for s in colors] for c in colors]
    chi = [pairing_coroot_weight(spec, c, inst.chi) for c in colors]
    return lam_pair, a, chi


def bae_residual(config: BetheConfig) -> List:
    inst = config.instance
    ws = config.ws
    lam_pair, a, chi = _residual_terms(inst, config.colors)
    zs = inst.z
    if not config.exact:
        lam_pair = [[to_mpf(v) for v in row] for row in lam_pair]
        a = [[to_mpf(v) for v in row] for row in a]
        chi = [to_mpf(v) for v in chi]
        zs = [to_mpf(z) for z in zs]
    out = []
    for j, w in enumerate(ws):
        r = -chi[j]
        for i, z in enumerate(zs):
            if w == z:
                raise BetheError("root coincides with an evaluation point")
            r = r + lam_pair[j][i] / (w - z)
        for s, ws_ in enumerate(ws):
            if s != j:
                if w == ws_:
                    raise RootCollision("coincident roots")
                r = r - a[j][s] / (w - ws_)
        out.append(r)
    return out


def _jacobian(inst, colors, ws, lam_pair, a):
    m = len(ws)
    J = mpmath.matrix(m, m)
    for j in range(m):
        diag = mpmath.mpf(0)
        for i, z in enumerate(inst.z):
            diag -= lam_pair[j][i] / (ws[j] - to_mpf(z)) ** 2
        for s in range(m):
            if s != j:
                t = a[j][s] / (ws[j] - ws[s]) ** 2
                diag += t
                J[j, s] = -t
        J[j, j] = diag
    return J


def _seed_fraction(s) -> Fraction:
    if isinstance(s, float):
        return Fraction(repr(s))
    if hasattr(s, "_mpf_"):
        return Fraction(mpmath.nstr(s, 40))
    return as_fraction(s)


def _single_root_exact(inst: GaudinInstance, color: int, seed) -> Optional[Fraction]:
    """Clear denominators in the one-root equation; return the root or raise."""
    lam_pair, _, chi = _residual_terms(inst, (color,))
    # sum_i c_i / (w - z_i) - chi = 0  ->  numerator polynomial
    full = poly([1])
    for z in inst.z:
        full = pmul(full, linear(z))
    num = pmul(poly([-chi[0]]), full)
    for i, z in enumerate(inst.z):
        rest = poly([1])
        for k, z2 in enumerate(inst.z):
            if k != i:
                rest = pmul(rest, linear(z2))
        num = padd(num, pmul(poly([lam_pair[0][i]]), rest))
    if not num:
        # residual vanishes identically; any admissible point solves it
        return _seed_fraction(seed)
    d = pdeg(num)
    if d == 0:
        raise NoFiniteSolution("no finite solution")
    if d == 1:
        root = -num[0] / num[1]
        if root in inst.z:
            raise NoFiniteSolution("no finite solution")
        return root
    return None


def bae_solve(
    instance: GaudinInstance,
    colors: Sequence[int],
    seeds: Sequence,
    max_iter: int = 200,
    tol=BAE_TOL,
    dps: int = DEFAULT_DPS,
) -> BetheConfig:
    colors = tuple(int(c) for c in colors)
    if len(colors) != len(seeds):
        raise BetheError("need one seed per root")
    if not colors:
        return BetheConfig(instance, ())
    if len(colors) == 1:
        root = _single_root_exact(instance, colors[0], seeds[0])
        if root is not None:
            return BetheConfig(instance, ((root, colors[0]),))
    with mpmath.workdps(dps):
        ws = [to_mpf(_seed_fraction(s)) if not hasattr(s, "_mpf_") else s for s in seeds]
        for a in range(len(ws)):
            for b in range(a + 1, len(ws)):
                if ws[a] == ws[b]:
                    raise RootCollision("seeds are not distinct")
        lam_pair, amat, _ = _residual_terms(instance, colors)
        lam_pair = [[to_mpf(v) for v in row] for row in lam_pair]
        amat = [[to_mpf(v) for v in row] for row in amat]
        tol = mpmath.mpf(tol)
        scale = 1 + max(abs(to_mpf(z)) for z in instance.z)
        for _ in range(max_iter):
            cfg = BetheConfig(instance, tuple(zip(ws, colors)))
            res = bae_residual(cfg)
            err = max(abs(r) for r in res)
            if err < tol:
                _check_separated(ws, instance)
                return _polish(cfg, instance, colors, lam_pair, amat, err)
            J = _jacobian(instance, colors, ws, lam_pair, amat)
            try:
                if abs(mpmath.det(J)) < mpmath.mpf(10) ** (-dps + 10):
                    raise ZeroDivisionError
                step = mpmath.lu_solve(J, mpmath.matrix(res))
            except ZeroDivisionError:
                raise SingularJacobian("singular Jacobian") from None
            ws = [ws[k] - step[k] for k in range(len(ws))]
            if any(not mpmath.isfinite(w) or abs(w) > 1e12 * scale for w in ws):
                raise Divergence("divergence")
            _check_separated(ws, instance)
        raise Divergence(f"divergence after {max_iter} iterations")


def _polish(cfg, instance, colors, lam_pair, amat, err, steps=2):
    # a couple of extra Newton steps push the residual well below tolerance
    for _ in range(steps):
        ws = list(cfg.ws)
        J = _jacobian(instance, colors, ws, lam_pair, amat)
        try:
            step = mpmath.lu_solve(J, mpmath.matrix(bae_residual(cfg)))
            nxt = BetheConfig(instance, tuple(zip([ws[k] - step[k] for k in range(len(ws))], colors)))
            nerr = max(abs(r) for r in bae_residual(nxt))
        except (ZeroDivisionError, BetheError):
            break
        if not nerr < err:
            break
        cfg, err = nxt, nerr
    return cfg


def _check_separated(ws, inst, eps=mpmath.mpf("1e-20")) -> None:
    for a in range(len(ws)):
        for b in range(a + 1, len(ws)):
            if abs(ws[a] - ws[b]) < eps:
                raise RootCollision(f"roots {a + 1} and {b + 1} collided")
        for z in inst.z:
            if abs(ws[a] - to_mpf(z)) < eps:
                raise RootCollision(f"root {a + 1} ran into an evaluation point")


def block_orders(m: int, ell: int):
    """All ordered partitions of range(m) into ``ell`` ordered (possibly empty) blocks."""
    for assign in itertools.product(range(ell), repeat=m):
        blocks = [[j for j in range(m) if assign[j] == k] for k in range(ell)]
        for perms in itertools.product(*(itertools.permutations(b) for b in blocks)):
            yield perms


def _f_word(spec: LieAlgebraSpec, colors: Tuple[int, ...], lam: WeightVector) -> Dict[Monomial, Fraction]:
    # f_{c1} ... f_{ck} 1_λ, each f a combination of basis labels
    out: Dict[Monomial, Fraction] = {}
    combos = [list(spec.f(c).items()) for c in colors]
    for choice in itertools.product(*combos):
        coeff = Fraction(1)
        for _, c in choice:
            coeff *= c
        for mono, c2 in straighten(spec, [x for x, _ in choice], lam).items():
            out[mono] = out.get(mono, 0) + coeff * c2
    return {k: v for k, v in out.items() if v}


_f_word_cached = lru_cache(maxsize=None)(_f_word)


def bethe_vector(config: BetheConfig) -> TensorState:
    inst = config.instance
    spec = inst.spec
    ws, colors = config.ws, config.colors
    exact = config.exact
    if not exact:
        ws = tuple(to_mpf(w) for w in ws)
    terms: Dict[tuple, object] = {}
    for blocks in block_orders(config.m, inst.ell):
        coeff = Fraction(1) if exact else mpmath.mpf(1)
        site_vecs = []
        for k, block in enumerate(blocks):
            for s, j in enumerate(block):
                nxt = ws[block[s + 1]] if s + 1 < len(block) else (inst.z[k] if exact else to_mpf(inst.z[k]))
                coeff = coeff / (ws[j] - nxt)
            site_vecs.append(_f_word_cached(spec, tuple(colors[j] for j in block), inst.weights[k]))
        for combo in itertools.product(*(v.items() for v in site_vecs)):
            c = coeff
            for _, ck in combo:
                c = c * ck
            key = tuple(mono for mono, _ in combo)
            terms[key] = terms.get(key, 0) + c
    cls = TensorState if exact else FloatTensorState
    return cls(spec, inst.weights, terms)


@dataclass(frozen=True)
class PoleSum:
    """``const + sum_p weight / (u - p)``; exact or float poles."""

    const: object
    poles: Tuple[Tuple[object, object], ...]

    @property
    def exact(self) -> bool:
        return is_exact(self.const) and all(is_exact(p) and is_exact(c) for c, p in self.poles)

    def rf(self) -> RationalFunction:
        if not self.exact:
            raise BetheError("float data has no exact rational form")
        out = RationalFunction.const(self.const)
        for c, p in self.poles:
            if c:
                out = out + RationalFunction.pole(p, 1, c)
        return out

    def jet(self, u0, order: int) -> Jet:
        out = Jet.const(to_mpf(self.const), order)
        for c, p in self.poles:
            if c:
                out = out + Jet.of_pole(u0, to_mpf(p), to_mpf(c), order)
        return out

    def value(self, u0):
        return self.jet(u0, 1).value

    def coefficient(self, at=None, order: int = 1):
        """Rational function when ``at`` is None, otherwise a Jet at ``at``."""
        return self.rf() if at is None else self.jet(at, order)


@dataclass(frozen=True)
class EigenFunctions:
    """ℰ_ii(u) (type A, i = 1..N) or ℱ_ii(u) (B/C/D, i = 1..n)."""

    functions: Tuple[PoleSum, ...]

    def __getitem__(self, i: int) -> PoleSum:
        return self.functions[i - 1]

    def __len__(self) -> int:
        return len(self.functions)


def eigen_functions(config: BetheConfig) -> EigenFunctions:
    inst = config.instance
    spec = inst.spec
    from .lie import root_on_diagonal

    out = []
    for d in range(1, len(spec.diagonal) + 1):
        poles = [(lam.values[d - 1], z) for lam, z in zip(inst.weights, inst.z)]
        for w, c in config.roots:
            poles.append((-root_on_diagonal(spec, c, d), w))
        out.append(PoleSum(-inst.chi.values[d - 1], tuple(poles)))
    return EigenFunctions(tuple(out))
