"""Command-line front end: ``gaudin <command> --instance file.json``.

Exit codes: 0 all checks pass, 1 a verification failed, 2 the input is invalid.
The JSON report goes to stdout (and ``--report``), a short summary to stderr.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional

import mpmath

from .bethe import (
    BAE_TOL,
    BetheConfig,
    BetheError,
    bae_residual,
    bae_solve,
    bethe_vector,
    is_exact,
)
from .eigen import (
    EigenError,
    genfun_consistent,
    masterfn_crosscheck,
    oracle_for,
    verify_eigen,
)
from .instances import InstanceError, InstanceFile, parse_instance_dict
from .lie import LieSpecError
from .modules import ModuleError, depth_basis, random_state, weight_of
from .operators import (
    OperatorError,
    build_operator,
    operators_agree,
    projector_trace_operator,
    rdet_operator,
    sigma_stability_check,
)
from .wbridge import (
    BridgeError,
    builtin_character,
    gr_depth,
    gr_map,
    hc_image_builder,
    is_character,
    is_W_element,
    lambda_from_json,
    relations_respected,
    screening_S,
)

SCHEMA_VERSION = 1
COMMANDS = ("bae-solve", "bethe-build", "verify", "screen-check", "gr", "hc-image")

# errors caused by the input file rather than by a failed verification
INPUT_ERRORS = (InstanceError, LieSpecError, OperatorError, ModuleError)


def version_hash() -> str:
    """Digest of the package sources, so reports name the code that produced them."""
    h = hashlib.sha256()
    for p in sorted(Path(__file__).parent.glob("*.py")):
        h.update(p.name.encode())
        h.update(p.read_bytes())
    return h.hexdigest()[:12]


def _num(x) -> str:
    if isinstance(x, (int, Fraction)):
        return str(x)
    return mpmath.nstr(x, 30)


class Run:
    """Collects checks, timings and the human summary for one command."""

    def __init__(self, command: str, inst: InstanceFile):
        self.command = command
        self.inst = inst
        self.checks: List[dict] = []
        self.timings: Dict[str, float] = {}
        self.extra: Dict[str, object] = {}

    def timed(self, label: str, fn: Callable):
        t = time.perf_counter()
        try:
            return fn()
        finally:
            self.timings[label] = time.perf_counter() - t

    def add(self, name: str, passed: bool, **data) -> dict:
        entry = {"name": name, "status": "pass" if passed else "fail", **data}
        self.checks.append(entry)
        return entry

    @property
    def passed(self) -> bool:
        return all(c["status"] == "pass" for c in self.checks)

    def report(self) -> dict:
        return {
            "schemaVersion": SCHEMA_VERSION,
            "version": version_hash(),
            "command": self.command,
            "instance": self.inst.name,
            "algebra": self.inst.spec.name,
            "mode": self.inst.mode,
            "status": "pass" if self.passed else "fail",
            "checks": self.checks,
            **self.extra,
        }


# configurations ---------------------------------------------------------------------
def _config(inst: InstanceFile, solve: Optional[bool] = None) -> BetheConfig:
    """Roots as given in exact mode; solved from the given seeds in float mode."""
    g = inst.gaudin()
    if solve is None:
        solve = inst.mode == "float"
    if not solve:
        return BetheConfig(g, tuple(inst.roots()))
    colors = [c for _, c in inst.roots()]
    seeds = [w for w, _ in inst.roots()]
    cfg = bae_solve(g, colors, seeds)
    if inst.mode == "exact" and not cfg.exact:
        raise EigenError("exact mode needs rational roots; the solver returned floating roots")
    return cfg


def _bae_entry(cfg: BetheConfig) -> dict:
    res = bae_residual(cfg)
    ok = all(r == 0 for r in res) if cfg.exact else all(abs(r) < BAE_TOL for r in res)
    return {"ok": ok, "residuals": [_num(r) for r in res]}


def _roots_json(cfg: BetheConfig) -> list:
    return [{"w": _num(w), "color": c} for w, c in cfg.roots]


# commands ------------------------------------------------------------------------------
def cmd_bae_solve(run: Run):
    inst = run.inst
    cfg = run.timed("solve", lambda: _config(inst, solve=True))
    bae = _bae_entry(cfg)
    run.extra["roots"] = _roots_json(cfg)
    run.add("bae", bae["ok"], exact=cfg.exact, residuals=bae["residuals"])


def cmd_bethe_build(run: Run):
    inst = run.inst
    cfg = run.timed("solve", lambda: _config(inst))
    bae = _bae_entry(cfg)
    phi = run.timed("bethe-vector", lambda: bethe_vector(cfg))
    run.extra["roots"] = _roots_json(cfg)
    run.add("bae", bae["ok"], residuals=bae["residuals"])
    if phi.is_zero():
        run.add("bethe-vector", False, error={"code": "ZeroBetheVector", "message": "Bethe vector is zero"})
        return
    w = weight_of(phi)
    run.add("bethe-vector", True, terms=len(phi.terms), weight=[str(v) for v in w.values])
    if phi.terms and all(is_exact(c) for c in phi.terms.values()):
        run.extra["vector"] = phi.to_json()


SIGMA_KIND = {
    "antisym-trace": "antisymmetrizer",
    "sym-trace": "symmetrizer",
    "trace-power": "trace-power",
    "cdet": "cdet",
    "bcd-trace": "trace",
    "pfaffian": "pfaffian",
}


def cmd_verify(run: Run):
    inst = run.inst
    checks = inst.checks or ["eigen"]
    needs_config = any(c in checks for c in ("eigen", "masterfn", "genfun"))
    cfg = run.timed("solve", lambda: _config(inst)) if needs_config else None
    if cfg is not None:
        run.extra["roots"] = _roots_json(cfg)
    for check in checks:
        if check == "eigen":
            bae = _bae_entry(cfg)
            run.add("bae", bae["ok"], residuals=bae["residuals"])
            for req in inst.operators:
                label = req.kind if req.m is None else f"{req.kind}[m={req.m}]"
                op = run.timed(f"build {label}", lambda: build_operator(cfg.instance, req.kind, req.m))
                rep = run.timed(
                    f"verify {label}",
                    lambda: verify_eigen(op, cfg, oracle_for(req.kind, req.m), enforce_bae=False),
                )
                data = rep.to_json()
                failing = [s["k"] for s in data["slices"] if s["status"] == "mismatch"]
                run.add(f"eigen {label}", rep.passed, slices=data["slices"], failingSlices=failing,
                        samplePoints=data["samplePoints"])
        elif check == "masterfn":
            ok = run.timed("masterfn", lambda: masterfn_crosscheck(cfg))
            run.add("masterfn", ok)
        elif check == "genfun":
            ok = run.timed("genfun", lambda: genfun_consistent(cfg, 3))
            run.add("genfun", ok, order=3)
        elif check == "sigma-stability":
            g = inst.gaudin()
            rng = random.Random(inst.sigma.seed)
            states = [random_state(g.spec, g.weights, rng, inst.sigma.depth) for _ in range(inst.sigma.states)]
            for req in inst.operators:
                kind = SIGMA_KIND.get(req.kind)
                label = req.kind if req.m is None else f"{req.kind}[m={req.m}]"
                if kind is None:
                    continue
                ok = run.timed(f"sigma {label}", lambda: sigma_stability_check(g, req.m or 0, states, kind))
                run.add(f"sigma {label}", ok, states=len(states))
        elif check == "manin":
            g = inst.gaudin()
            if g.spec.family != "A":
                raise InstanceError("checks", "manin applies to family A only")
            basis = depth_basis(g.spec, g.weights, inst.sigma.depth)
            N = g.spec.N
            ok = run.timed(
                "manin",
                lambda: operators_agree(projector_trace_operator(g, N, "antisymmetrizer"), rdet_operator(g), basis),
            )
            run.add("manin", ok, states=len(basis), depth=inst.sigma.depth)


def _character(inst: InstanceFile):
    ts = inst.type_spec
    ch = inst.character
    if ch is None:
        raise InstanceError("character", "required for this command")
    if "builtin" in ch:
        return builtin_character(ch["builtin"], ts, Fraction(ch.get("a", "0")))
    return lambda_from_json(ts, ch["terms"])


def cmd_screen_check(run: Run):
    inst = run.inst
    A = _character(inst)
    ts = A.ts
    for i in ts.colors:
        img = run.timed(f"S_{i}", lambda: screening_S(i, A))
        run.add(f"S_{i}", img.is_zero(), image=img.to_json())
    for a in (Fraction(0), Fraction(1, 3)):
        ok = run.timed(f"relations a={a}", lambda: relations_respected(ts, a))
        run.add(f"relations a={a}", ok)


def cmd_gr(run: Run):
    inst = run.inst
    A = _character(inst)
    ts = A.ts
    img = run.timed("gr", lambda: gr_map(A))
    run.extra["gr"] = {"text": repr(img), "terms": img.to_json(), "degree": -gr_depth(img)}
    char = is_character(A)
    dual = ts.dual()
    in_w = is_W_element(img, dual)
    # only characters are promised to land in the W-algebra
    run.add("gr", (not char) or in_w, character=char, wFamily=dual.name, inW=in_w)


def cmd_hc_image(run: Run):
    inst = run.inst
    ts = inst.type_spec
    dual = ts.dual()
    reqs = inst.hc
    if not reqs:
        raise InstanceError("hc", "required for this command")
    images = []
    for req in reqs:
        label = req.kind if req.m is None else f"{req.kind}[m={req.m}]"
        op = run.timed(f"hc {label}", lambda: hc_image_builder(inst.family, req.kind, req.m, inst.rank))
        coeffs = {str(k): repr(c) for k, c in sorted(op.coeffs.items())}
        ok = all(is_W_element(c, dual) for c in op.coeffs.values())
        images.append({"operator": label, "tauCoefficients": coeffs})
        run.add(f"hc {label}", ok, wFamily=dual.name)
    run.extra["images"] = images


HANDLERS = {
    "bae-solve": cmd_bae_solve,
    "bethe-build": cmd_bethe_build,
    "verify": cmd_verify,
    "screen-check": cmd_screen_check,
    "gr": cmd_gr,
    "hc-image": cmd_hc_image,
}


# entry point ----------------------------------------------------------------------------
def _load(path: str, mode: Optional[str]) -> InstanceFile:
    p = Path(path)
    try:
        d = json.loads(p.read_text())
    except OSError as e:
        raise InstanceError("", f"cannot read {p}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise InstanceError("", f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    if mode is not None and isinstance(d, dict):
        d["mode"] = mode
    return parse_instance_dict(d)


def _emit(report: dict, path: Optional[str]):
    text = json.dumps(report, indent=2, sort_keys=True)
    print(text)
    if path:
        Path(path).write_text(text + "\n")


def _error_report(command: str, code: str, message: str, path: str = "") -> dict:
    err = {"code": code, "message": message}
    if path:
        err["path"] = path
    return {"schemaVersion": SCHEMA_VERSION, "version": version_hash(), "command": command, "status": "error", "error": err}


def main(argv: Optional[List[str]] = None) -> int:
    ap = argparse.ArgumentParser(prog="gaudin", description="Gaudin model eigenvalue and W-algebra checks.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--instance", required=True, help="instance JSON file")
    ap.add_argument("--mode", choices=("exact", "float"), help="override the instance mode")
    ap.add_argument("--report", help="also write the JSON report here")
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0

    try:
        inst = _load(args.instance, args.mode)
    except INPUT_ERRORS as e:
        _emit(_error_report(args.command, type(e).__name__, str(e), getattr(e, "path", "")), args.report)
        print(f"input error: {e}", file=sys.stderr)
        return 2

    run = Run(args.command, inst)
    t0 = time.perf_counter()
    try:
        HANDLERS[args.command](run)
    except INPUT_ERRORS as e:
        _emit(_error_report(args.command, type(e).__name__, str(e), getattr(e, "path", "")), args.report)
        print(f"input error: {e}", file=sys.stderr)
        return 2
    except (BetheError, EigenError, BridgeError) as e:
        if type(e) is BetheError:
            # plain BetheError is raised by instance validation only
            _emit(_error_report(args.command, type(e).__name__, str(e)), args.report)
            print(f"input error: {e}", file=sys.stderr)
            return 2
        # solver failures and eigenvector guards count as failed verification
        run.add("error", False, error={"code": type(e).__name__, "message": str(e)})
    report = run.report()
    _emit(report, args.report)
    code = 0 if run.passed else 1

    print(f"{args.command} {inst.name or args.instance} [{inst.spec.name}, {inst.mode}]", file=sys.stderr)
    for c in run.checks:
        print(f"  {c['status']:4}  {c['name']}", file=sys.stderr)
    for label, secs in run.timings.items():
        print(f"  time  {label}: {secs:.3f}s", file=sys.stderr)
    print(f"  total {time.perf_counter() - t0:.3f}s -> {'PASS' if code == 0 else 'FAIL'}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
