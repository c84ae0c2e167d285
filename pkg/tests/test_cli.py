import csv
import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from lorentzlox.cli import ConfigError, load_config, main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(name, tmp_path, *extra):
    out = tmp_path / name
    code = main(["--config", str(CONFIGS / f"{name}.json"), "--output-dir", str(out), *extra])
    return code, out


def read_curve(out):
    with open(out / "curve.csv", newline="") as fh:
        return list(csv.reader(fh))


EXPECTED = {
    "type1_right": 0,
    "type1_meridian": 0,
    "type2_spacelike": 0,
    "type3_timelike": 0,
    "type3_right_classify": 0,
    "invalid_pitch": 2,
    "not_unit_speed": 2,
    "type1_degenerate": 3,
    "type1_vanishing_denominator": 3,
    "tight_tolerance": 4,
}


def test_every_fixture_is_listed():
    assert {p.stem for p in CONFIGS.glob("*.json")} == set(EXPECTED)
    assert set(EXPECTED.values()) == {0, 2, 3, 4}


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_exit_codes(name, tmp_path):
    code, _ = run(name, tmp_path)
    assert code == EXPECTED[name]


def test_type1_right_end_to_end(tmp_path):
    code, out = run("type1_right", tmp_path)
    assert code == 0
    rows = read_curve(out)
    assert rows[0] == ["u", "v", "x1", "x2", "x3", "x4"]
    assert len(rows) == 1002
    assert abs(float(rows[-1][1]) - (math.acosh(3) - math.acosh(2))) <= 1e-8
    raw = (out / "curve.csv").read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    report = json.loads((out / "report.json").read_text())
    assert report["status"] == "ok"
    assert report["verification"]["max_angle_deviation"] <= 1e-6
    assert report["arc_length"] == pytest.approx(math.sqrt(2), rel=1e-10)
    assert report["theta_eff"] == pytest.approx(math.cos(math.pi / 4))
    assert report["branch"] == 1
    assert set(report["tolerances"]) >= {"quadrature", "degeneracy", "unit_speed"}


def test_csv_round_trips_doubles(tmp_path):
    _, out = run("type2_spacelike", tmp_path)
    rows = read_curve(out)[1:]
    for row in rows[::97]:
        for cell in row:
            assert float(f"{float(cell):.17g}") == float(cell)


def test_meridian_config(tmp_path):
    code, out = run("type1_meridian", tmp_path)
    assert code == 0
    assert {r[1] for r in read_curve(out)[1:]} == {"0.25"}


def test_degenerate_config_bracket(tmp_path, capsys):
    code, out = run("type1_degenerate", tmp_path)
    assert code == 3
    err = capsys.readouterr().err
    assert "bracket" in err
    report = json.loads((out / "report.json").read_text())
    lo, hi = report["bracket"]
    assert lo <= 1.0 <= hi and hi - lo <= 1e-6
    assert report["status"] == "inadmissible"
    assert not (out / "curve.csv").exists()


def test_vanishing_denominator_bracket(tmp_path):
    code, out = run("type1_vanishing_denominator", tmp_path)
    lo, hi = json.loads((out / "report.json").read_text())["bracket"]
    assert code == 3 and hi - lo <= 1e-6 and 2.19 < lo < 2.2


def test_tight_tolerance_writes_outputs(tmp_path):
    code, out = run("tight_tolerance", tmp_path)
    assert code == 4
    report = json.loads((out / "report.json").read_text())
    assert report["status"] == "verification_failed"
    assert report["verification"]["max_angle_deviation"] > 1e-12
    assert (out / "curve.csv").exists()


def test_advisory_unit_speed(tmp_path, capsys):
    cfg = json.loads((CONFIGS / "not_unit_speed.json").read_text())
    cfg["strict_unit_speed"] = False
    path = tmp_path / "advisory.json"
    path.write_text(json.dumps(cfg))
    code = main(["--config", str(path), "--output-dir", str(tmp_path / "o")])
    assert "warning" in capsys.readouterr().err
    # E no longer equals epsilon, so the metric oracle rejects the curve
    assert code == 4
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert report["unit_speed"]["passed"] is False
    # the flag turns the warning into an error
    code = main(["--config", str(path), "--output-dir", str(tmp_path / "p"), "--strict-unit-speed"])
    assert code == 2


def test_classify_examples(tmp_path, capsys):
    code, out = run("type1_degenerate", tmp_path, "--classify-only")
    assert code == 0
    lines = (out / "metric.csv").read_text().splitlines()
    assert lines[0] == "u,E,F,G,causal"
    assert [l.split(",")[-1] for l in lines[1:]] == ["timelike", "timelike", "spacelike", "spacelike"]
    assert [float(l.split(",")[0]) for l in lines[1:]] == [0.5, 0.9, 1.5, 2.0]
    code, out = run("type3_right_classify", tmp_path, "--classify-only")
    rows = [l.split(",") for l in (out / "metric.csv").read_text().splitlines()[1:]]
    assert len(rows) == 5
    assert all(r[-1] == "spacelike" and float(r[3]) == 8.0 for r in rows)


def test_classify_single_point(tmp_path):
    cfg = json.loads((CONFIGS / "type1_right.json").read_text())
    cfg["classify"] = {"points": 1}
    path = tmp_path / "one.json"
    path.write_text(json.dumps(cfg))
    assert main(["--config", str(path), "--output-dir", str(tmp_path / "o"), "--classify-only"]) == 0
    assert len((tmp_path / "o" / "metric.csv").read_text().splitlines()) == 2


def test_steps_flag_overrides(tmp_path):
    code, out = run("type1_right", tmp_path, "--steps", "40")
    assert code == 0
    assert len(read_curve(out)) == 42
    assert json.loads((out / "report.json").read_text())["steps"] == 40


def test_deterministic_outputs(tmp_path):
    _, a = run("type2_spacelike", tmp_path / "a")
    _, b = run("type2_spacelike", tmp_path / "b")
    for f in ("curve.csv", "report.json"):
        assert (a / f).read_bytes() == (b / f).read_bytes()


BASE = {
    "surface": {"kind": "I", "n": 4, "c": 1.0},
    "profile": {"components": {"1": "u"}, "epsilon": 1},
    "loxodrome": {"theta0": 0.5, "u0": 2.0, "u1": 3.0},
}


@pytest.mark.parametrize("patch,key", [
    (("surface", "kind", "IV"), "surface.kind"),
    (("surface", "n", 3), "surface.n"),
    (("surface", "c", 0), "surface.c"),
    (("surface", "color", 1), "surface.color"),
    (("profile", "components", {}), "profile.components"),
    (("profile", "components", {"x": "u"}), "profile.components.x"),
    (("profile", "components", {"1": 5}), "profile.components.1"),
    (("profile", "epsilon", 0), "profile.epsilon"),
    (("profile", "constants", {"a": "big"}), "profile.constants.a"),
    (("loxodrome", "theta0", "u"), "loxodrome.theta0"),
    (("loxodrome", "theta0", "pi +"), "loxodrome.theta0"),
    (("loxodrome", "branch", 2), "loxodrome.branch"),
    (("loxodrome", "u1", 1.0), "loxodrome.u1"),
    (("loxodrome", "steps", 1), "loxodrome.steps"),
    (("loxodrome", "steps", 10.5), "loxodrome.steps"),
])
def test_validation_names_key(patch, key):
    cfg = json.loads(json.dumps(BASE))
    sec, k, v = patch
    cfg[sec][k] = v
    with pytest.raises(ConfigError) as info:
        load_config(cfg)
    assert info.value.key == key


def test_validation_top_level():
    for cfg, key in [({**BASE, "extra": 1}, "extra"), ({"surface": BASE["surface"]}, "profile"),
                     ({**BASE, "tolerances": {"angle": -1}}, "tolerances.angle"),
                     ({**BASE, "classify": {"grid": []}}, "classify.grid"),
                     ({**BASE, "strict_unit_speed": "yes"}, "strict_unit_speed")]:
        with pytest.raises(ConfigError) as info:
            load_config(cfg)
        assert info.value.key == key


def test_theta0_expression_and_defaults():
    cfg = load_config({**BASE, "loxodrome": {"theta0": "pi/6", "u0": 2, "u1": 3}})
    assert cfg.theta0 == pytest.approx(math.pi / 6)
    assert cfg.steps == 1000 and cfg.branch == 1 and cfg.v0 == 0.0
    assert cfg.strict_unit_speed is False


def test_bad_files(tmp_path, capsys):
    assert main(["--config", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["--config", str(bad)]) == 2
    assert "invalid JSON" in capsys.readouterr().err


def test_inferred_epsilon(tmp_path):
    code, out = run("type2_spacelike", tmp_path)
    assert code == 0
    assert json.loads((out / "report.json").read_text())["epsilon"] == 1


def test_domain_error_exit_code(tmp_path):
    cfg = json.loads(json.dumps(BASE))
    cfg["profile"]["components"] = {"1": "log(u - 2.5) + u"}
    cfg["loxodrome"]["theta0"] = 0.0
    path = tmp_path / "dom.json"
    path.write_text(json.dumps(cfg))
    assert main(["--config", str(path), "--output-dir", str(tmp_path / "o")]) == 3


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "lorentzlox", "--config",
                          str(CONFIGS / "invalid_pitch.json")], capture_output=True, text=True)
    assert res.returncode == 2
    assert "surface.c" in res.stderr
