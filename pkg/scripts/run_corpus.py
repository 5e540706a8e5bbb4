"""Run every fixture in fixtures/manifest.json through the CLI and compare exit codes.

Also checks that each instance survives parse -> serialize -> parse and that
exact-mode reports are identical across two runs.
"""
from __future__ import annotations

import argparse
import contextlib
import io
import json
import sys
import time
from pathlib import Path

from gaudin.cli import main as cli_main
from gaudin.instances import InstanceError, parse_instance, roundtrip

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"


def run_once(command: str, path: Path) -> tuple[int, str]:
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = cli_main([command, "--instance", str(path)])
    return code, out.getvalue()


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--only", help="substring filter on fixture names")
    args = ap.parse_args()
    manifest = json.loads((FIXTURES / "manifest.json").read_text())
    bad = 0
    for entry in manifest:
        if args.only and args.only not in entry["file"]:
            continue
        path = FIXTURES / entry["file"]
        t = time.perf_counter()
        code, out = run_once(entry["command"], path)
        dt = time.perf_counter() - t
        notes = []
        if code != entry["exit"]:
            notes.append(f"exit {code}, expected {entry['exit']}")
        try:
            inst = parse_instance(path)
            if roundtrip(inst) != inst:
                notes.append("round trip changed the instance")
            exact = inst.mode == "exact"
        except InstanceError:
            exact = False  # invalid fixtures have nothing to round-trip
        if exact and code != 2 and run_once(entry["command"], path)[1] != out:
            notes.append("report differs between runs")
        status = "ok " if not notes else "BAD"
        bad += bool(notes)
        print(f"{status} {entry['file']:28} {entry['command']:12} exit={code} {dt:6.2f}s {'; '.join(notes)}")
    print(f"{'all fixtures behave as expected' if not bad else f'{bad} fixture(s) misbehaved'}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
