"""JSON instance files: parsing with field-path errors, and canonical serialization."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from .bethe import BetheConfig, GaudinInstance
from .lie import LieAlgebraSpec, LieSpecError, WeightVector
from .operators import OPERATOR_KINDS
from .wbridge import HC_KINDS, TypeSpec

CHECKS = ("eigen", "masterfn", "sigma-stability", "genfun", "manin")
NEEDS_M = ("antisym-trace", "sym-trace", "trace-power", "bcd-trace")


class InstanceError(ValueError):
    """Schema or consistency problem; ``path`` locates the offending field."""

    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}" if path else reason)
        self.path = path
        self.reason = reason


@dataclass(frozen=True)
class OperatorRequest:
    kind: str
    m: Optional[int] = None

    def to_json(self) -> dict:
        return {"kind": self.kind} if self.m is None else {"kind": self.kind, "m": self.m}


@dataclass(frozen=True)
class RootEntry:
    w: str  # canonical "p/q" in exact mode, decimal text allowed in float mode
    color: int

    def value(self) -> Fraction:
        return Fraction(self.w)


@dataclass(frozen=True)
class SigmaRequest:
    states: int = 20
    seed: int = 0
    depth: int = 2


@dataclass
class InstanceFile:
    family: str
    rank: int
    mode: str = "exact"
    weights: Optional[List[Tuple[Fraction, ...]]] = None
    z: Optional[List[Fraction]] = None
    chi: Optional[Tuple[Fraction, ...]] = None
    bethe: List[RootEntry] = field(default_factory=list)
    operators: List[OperatorRequest] = field(default_factory=list)
    checks: List[str] = field(default_factory=list)
    sigma: SigmaRequest = field(default_factory=SigmaRequest)
    character: Optional[dict] = None
    hc: List[OperatorRequest] = field(default_factory=list)
    name: str = ""

    # derived objects ---------------------------------------------------------------
    @property
    def spec(self) -> LieAlgebraSpec:
        return LieAlgebraSpec.from_family(self.family, self.rank)

    @property
    def type_spec(self) -> TypeSpec:
        return TypeSpec(self.family, self.rank)

    @property
    def ell(self) -> int:
        return len(self.weights or [])

    def gaudin(self) -> GaudinInstance:
        if self.weights is None or self.z is None:
            raise InstanceError("weights", "required for this command")
        spec = self.spec
        chi = self.chi if self.chi is not None else tuple([Fraction(0)] * len(spec.diagonal))
        return GaudinInstance(spec, [WeightVector(w) for w in self.weights], self.z, WeightVector(chi))

    def roots(self) -> List[Tuple[Fraction, int]]:
        return [(r.value(), r.color) for r in self.bethe]

    def config(self) -> BetheConfig:
        return BetheConfig(self.gaudin(), tuple(self.roots()))

    # serialization -----------------------------------------------------------------
    def to_json(self) -> dict:
        out: Dict[str, Any] = {}
        if self.name:
            out["name"] = self.name
        out["family"] = self.family
        out["N" if self.family == "A" else "n"] = self.rank
        out["mode"] = self.mode
        if self.weights is not None:
            out["ell"] = self.ell
            out["weights"] = [[str(v) for v in w] for w in self.weights]
        if self.z is not None:
            out["z"] = [str(v) for v in self.z]
        if self.chi is not None:
            out["chi"] = [str(v) for v in self.chi]
        if self.bethe:
            out["bethe"] = [{"w": r.w, "color": r.color} for r in self.bethe]
        if self.operators:
            out["operators"] = [o.to_json() for o in self.operators]
        if self.checks:
            out["checks"] = list(self.checks)
        if self.sigma != SigmaRequest():
            out["sigma"] = {"states": self.sigma.states, "seed": self.sigma.seed, "depth": self.sigma.depth}
        if self.character is not None:
            out["character"] = self.character
        if self.hc:
            out["hc"] = [o.to_json() for o in self.hc]
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=False)


# parsing ------------------------------------------------------------------------------
def _rational(x, path: str, allow_decimal: bool = False) -> Fraction:
    if isinstance(x, bool):
        raise InstanceError(path, "expected a rational string like \"p/q\"")
    if isinstance(x, int):
        return Fraction(x)
    if not isinstance(x, str):
        raise InstanceError(path, "expected a rational string like \"p/q\"")
    s = x.strip()
    if "." in s or "e" in s.lower():
        if not allow_decimal:
            raise InstanceError(path, "decimals are only allowed in float mode")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise InstanceError(path, f"not a rational: {x!r}") from None


def _int(x, path: str, lo: Optional[int] = None) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise InstanceError(path, "expected an integer")
    if lo is not None and x < lo:
        raise InstanceError(path, f"must be >= {lo}")
    return x


def _list(x, path: str) -> list:
    if not isinstance(x, list):
        raise InstanceError(path, "expected a list")
    return x


def _operator(x, path: str, allowed) -> OperatorRequest:
    if not isinstance(x, dict):
        raise InstanceError(path, "expected an object")
    kind = x.get("kind")
    if kind not in allowed:
        raise InstanceError(f"{path}.kind", f"unknown operator kind {kind!r}")
    m = x.get("m")
    if m is not None:
        m = _int(m, f"{path}.m", 0)
    elif kind in NEEDS_M:
        raise InstanceError(f"{path}.m", f"required for kind {kind!r}")
    return OperatorRequest(kind, m)


def parse_instance_dict(d: dict) -> InstanceFile:
    if not isinstance(d, dict):
        raise InstanceError("", "instance must be a JSON object")
    known = {"name", "family", "N", "n", "ell", "mode", "weights", "z", "chi", "bethe", "operators", "checks", "sigma", "character", "hc"}
    for k in d:
        if k not in known:
            raise InstanceError(k, "unknown field")
    family = d.get("family")
    if family not in ("A", "B", "C", "D"):
        raise InstanceError("family", f"expected one of A, B, C, D, got {family!r}")
    rank_key = "N" if family == "A" else "n"
    if rank_key not in d:
        raise InstanceError(rank_key, f"required for family {family}")
    rank = _int(d[rank_key], rank_key, 1)
    try:
        spec = LieAlgebraSpec.from_family(family, rank)
    except LieSpecError as e:
        raise InstanceError(rank_key, str(e)) from None
    mode = d.get("mode", "exact")
    if mode not in ("exact", "float"):
        raise InstanceError("mode", "expected exact or float")
    width = len(spec.diagonal)

    weights = z = chi = None
    if "weights" in d:
        weights = []
        for a, w in enumerate(_list(d["weights"], "weights")):
            w = _list(w, f"weights[{a}]")
            if len(w) != width:
                raise InstanceError(f"weights[{a}]", f"expected {width} entries for {spec.name}")
            weights.append(tuple(_rational(v, f"weights[{a}][{b}]") for b, v in enumerate(w)))
    if "z" in d:
        z = [_rational(v, f"z[{a}]") for a, v in enumerate(_list(d["z"], "z"))]
        if len(set(z)) != len(z):
            raise InstanceError("z", "evalPoints not distinct")
    if (weights is None) != (z is None):
        raise InstanceError("weights" if weights is None else "z", "weights and z must be given together")
    if weights is not None:
        if len(weights) != len(z):
            raise InstanceError("z", f"expected {len(weights)} evaluation points")
        if "ell" in d and _int(d["ell"], "ell", 1) != len(weights):
            raise InstanceError("ell", f"does not match the {len(weights)} weights")
    if "chi" in d:
        c = _list(d["chi"], "chi")
        if len(c) != width:
            raise InstanceError("chi", f"expected {width} entries for {spec.name}")
        chi = tuple(_rational(v, f"chi[{b}]") for b, v in enumerate(c))

    bethe = []
    for a, r in enumerate(_list(d.get("bethe", []), "bethe")):
        if not isinstance(r, dict) or "w" not in r or "color" not in r:
            raise InstanceError(f"bethe[{a}]", "expected {\"w\": ..., \"color\": ...}")
        w = _rational(r["w"], f"bethe[{a}].w", allow_decimal=mode == "float")
        color = _int(r["color"], f"bethe[{a}].color", 1)
        if color > spec.n:
            raise InstanceError(f"bethe[{a}].color", f"outside 1..{spec.n}")
        if z is not None and w in z:
            raise InstanceError(f"bethe[{a}].w", "root collides with evaluation point")
        text = str(w) if mode == "exact" or not isinstance(r["w"], str) else r["w"].strip()
        bethe.append(RootEntry(text, color))
    ws = [Fraction(r.w) for r in bethe]
    if len(set(ws)) != len(ws):
        raise InstanceError("bethe", "roots not distinct")

    operators = [_operator(o, f"operators[{a}]", OPERATOR_KINDS) for a, o in enumerate(_list(d.get("operators", []), "operators"))]
    checks = _list(d.get("checks", []), "checks")
    for a, c in enumerate(checks):
        if c not in CHECKS:
            raise InstanceError(f"checks[{a}]", f"unknown check {c!r}")

    sigma = SigmaRequest()
    if "sigma" in d:
        s = d["sigma"]
        if not isinstance(s, dict):
            raise InstanceError("sigma", "expected an object")
        sigma = SigmaRequest(
            _int(s.get("states", 20), "sigma.states", 1),
            _int(s.get("seed", 0), "sigma.seed"),
            _int(s.get("depth", 2), "sigma.depth", 0),
        )

    character = d.get("character")
    if character is not None:
        if not isinstance(character, dict) or not ({"builtin", "terms"} & set(character)):
            raise InstanceError("character", "expected {\"builtin\": name} or {\"terms\": [...]}")
        if "terms" in character:
            for a, t in enumerate(_list(character["terms"], "character.terms")):
                if not isinstance(t, dict):
                    raise InstanceError(f"character.terms[{a}]", "expected an object")
                _rational(t.get("coeff", "1"), f"character.terms[{a}].coeff")
                for b, f in enumerate(_list(t.get("factors", []), f"character.terms[{a}].factors")):
                    p = f"character.terms[{a}].factors[{b}]"
                    f = _list(f, p)
                    if len(f) not in (2, 3):
                        raise InstanceError(p, "expected [index, shift] or [index, shift, exponent]")
                    j = _int(f[0], p + "[0]", 1)
                    if j > spec.N:
                        raise InstanceError(p + "[0]", f"index outside 1..{spec.N}")
                    _rational(f[1], p + "[1]")
                    if len(f) == 3:
                        _int(f[2], p + "[2]")

    hc_allowed = HC_KINDS[family]
    hc = [_operator(o, f"hc[{a}]", hc_allowed) for a, o in enumerate(_list(d.get("hc", []), "hc"))]

    return InstanceFile(
        family=family,
        rank=rank,
        mode=mode,
        weights=weights,
        z=z,
        chi=chi,
        bethe=bethe,
        operators=operators,
        checks=list(checks),
        sigma=sigma,
        character=character,
        hc=hc,
        name=str(d.get("name", "")),
    )


def parse_instance(path) -> InstanceFile:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise InstanceError("", f"cannot read {p}: {e.strerror}") from None
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceError("", f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    return parse_instance_dict(d)


def roundtrip(inst: InstanceFile) -> InstanceFile:
    return parse_instance_dict(json.loads(inst.dumps()))
