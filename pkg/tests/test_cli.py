from __future__ import annotations

import json
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from gaudin.cli import SCHEMA_VERSION, main
from gaudin.instances import InstanceError, parse_instance, parse_instance_dict, roundtrip

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
MANIFEST = json.loads((FIXTURES / "manifest.json").read_text())
VALID = [e for e in MANIFEST if e["exit"] != 2]

FLAGSHIP = {
    "family": "A",
    "N": 2,
    "weights": [["1", "0"], ["1", "0"]],
    "z": ["0", "1"],
    "bethe": [{"w": "1/2", "color": 1}],
    "operators": [{"kind": "rdet"}],
    "checks": ["eigen"],
}


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def with_changes(**kw):
    d = json.loads(json.dumps(FLAGSHIP))
    d.update(kw)
    return d


def test_flagship_parses():
    inst = parse_instance(FIXTURES / "flagship_gl2.json")
    assert inst.family == "A" and inst.rank == 2 and inst.ell == 2
    assert inst.roots()[0][0] == inst.bethe[0].value()


@pytest.mark.parametrize(
    "changes,path,reason",
    [
        ({"z": ["0", "0"]}, "z", "evalPoints not distinct"),
        ({"bethe": [{"w": "1", "color": 1}]}, "bethe[0].w", "root collides with evaluation point"),
        ({"bethe": [{"w": "0.5", "color": 1}]}, "bethe[0].w", "decimals are only allowed in float mode"),
        ({"bethe": [{"w": "1/2", "color": 2}]}, "bethe[0].color", "outside"),
        ({"family": "E"}, "family", "expected one of"),
        ({"weights": [["1"], ["1", "0"]]}, "weights[0]", "expected 2 entries"),
        ({"z": ["0"]}, "z", "expected 2 evaluation points"),
        ({"extra": 1}, "extra", "unknown field"),
        ({"operators": [{"kind": "trace-power"}]}, "operators[0].m", "required"),
        ({"checks": ["vibes"]}, "checks[0]", "unknown check"),
        ({"weights": [["1", "x"], ["1", "0"]]}, "weights[0][1]", "not a rational"),
    ],
)
def test_parse_errors(changes, path, reason):
    with pytest.raises(InstanceError) as err:
        parse_instance_dict(with_changes(**changes))
    assert err.value.path == path
    assert reason in err.value.reason


def test_parse_missing_rank_and_bad_files(tmp_path):
    d = with_changes()
    del d["N"]
    with pytest.raises(InstanceError, match="N"):
        parse_instance_dict(d)
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InstanceError, match="invalid JSON"):
        parse_instance(bad)
    with pytest.raises(InstanceError, match="cannot read"):
        parse_instance(tmp_path / "missing.json")


@pytest.mark.parametrize("entry", VALID, ids=lambda e: e["file"])
def test_fixture_roundtrip(entry):
    inst = parse_instance(FIXTURES / entry["file"])
    assert roundtrip(inst) == inst
    assert roundtrip(inst).dumps() == inst.dumps()


fracs = st.fractions(min_value=-9, max_value=9, max_denominator=9)


@settings(max_examples=50)
@given(
    st.integers(1, 3),
    st.lists(fracs, min_size=1, max_size=3, unique=True),
    st.data(),
)
def test_generated_roundtrip(N, z, data):
    weights = [[str(data.draw(fracs)) for _ in range(N)] for _ in z]
    d = {"family": "A", "N": N, "weights": weights, "z": [str(v) for v in z]}
    if N > 1 and data.draw(st.booleans()):
        w = data.draw(fracs.filter(lambda x: x not in z))
        d["bethe"] = [{"w": str(w), "color": data.draw(st.integers(1, N - 1))}]
    if data.draw(st.booleans()):
        d["chi"] = [str(data.draw(fracs)) for _ in range(N)]
    inst = parse_instance_dict(d)
    assert roundtrip(inst) == inst


@pytest.mark.parametrize("entry", MANIFEST, ids=lambda e: e["file"])
def test_manifest_exit_codes(entry, capsys):
    code, out, err = run_cli(capsys, entry["command"], "--instance", str(FIXTURES / entry["file"]))
    assert code == entry["exit"]
    report = json.loads(out)
    assert report["schemaVersion"] == SCHEMA_VERSION
    assert err.strip()
    if code == 2:
        assert report["status"] == "error" and report["error"]["message"]


def test_verify_flagship_report(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = run_cli(capsys, "verify", "--instance", str(FIXTURES / "flagship_gl2.json"), "--report", str(target))
    assert code == 0
    assert target.read_text() == out
    report = json.loads(out)
    assert "timings" not in json.dumps(report)
    eigen = [c for c in report["checks"] if c["name"].startswith("eigen")]
    assert eigen and all(s["status"] == "exact-equal" for c in eigen for s in c["slices"])


def test_perturbed_root_identifies_slice(capsys):
    code, out, _ = run_cli(capsys, "verify", "--instance", str(FIXTURES / "perturbed_gl2.json"))
    assert code == 1
    report = json.loads(out)
    failing = [c for c in report["checks"] if c["status"] == "fail"]
    assert any(c.get("failingSlices") for c in failing)


def test_gr_lambda_sum_output(capsys):
    code, out, _ = run_cli(capsys, "gr", "--instance", str(FIXTURES / "gr_lambda_sum.json"))
    assert code == 0
    assert json.loads(out)["gr"]["text"] == "mu1^(0) + mu2^(0) + mu3^(0)"


@pytest.mark.parametrize("name,command", [("flagship_gl2.json", "verify"), ("screen_B2.json", "screen-check"), ("hc_o5.json", "hc-image")])
def test_exact_reports_deterministic(name, command, capsys):
    first = run_cli(capsys, command, "--instance", str(FIXTURES / name))[1]
    second = run_cli(capsys, command, "--instance", str(FIXTURES / name))[1]
    assert first == second


def test_mode_override_and_usage_errors(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "verify", "--instance", str(FIXTURES / "flagship_gl2.json"), "--mode", "float")
    assert code == 0 and json.loads(out)["mode"] == "float"
    assert run_cli(capsys, "frobnicate", "--instance", "x.json")[0] == 2
    assert run_cli(capsys, "verify")[0] == 2
    code, out, _ = run_cli(capsys, "verify", "--instance", str(tmp_path / "none.json"))
    assert code == 2 and json.loads(out)["error"]["code"] == "InstanceError"
