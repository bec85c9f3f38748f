import json
import math
import xml.etree.ElementTree as ET

import pytest

from linkfix.cli import main
from linkfix.corpus import rotation_document

SVG = "{http://www.w3.org/2000/svg}"


@pytest.fixture
def write(tmp_path):
    def _write(name, doc):
        p = tmp_path / name
        p.write_text(json.dumps(doc))
        return str(p)
    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_hexagon(write, capsys):
    code, out, _ = run(capsys, "analyze", write("hex.json", rotation_document(1, 6)), "--json")
    rep = json.loads(out)
    assert code == 0
    assert rep["linking"]["lk"] == 1
    assert math.hypot(*rep["fixed_point"]["location"]) <= 1e-8
    assert len(rep["faces"]) == 2
    assert all(a["passed"] for a in rep["assertions"])


def test_analyze_star_text_and_json(write, capsys):
    code, out, _ = run(capsys, "analyze", write("star.json", rotation_document(2, 13)))
    assert code == 0
    assert "Lk = 2" in out
    rep = json.loads(out[out.index("{"):])
    assert rep["linking"]["lk"] == 2 and len(rep["faces"]) == 15


def test_uncertified_composition_exits_2(write, capsys):
    doc = {"map": {"type": "composition", "maps": [{"type": "rotation", "angle_turns": [1, 6]},
                                                   {"type": "rotation", "angle_turns": [1, 6]}]},
           "orbit": {"generate": {"rotation_orbit": {"k": 1, "n": 3}}}}
    code, out, _ = run(capsys, "analyze", write("comp.json", doc), "--json")
    rep = json.loads(out)
    assert code == 2
    assert rep["error"]["kind"] == "certificate"
    assert [row["component"] for row in rep["error"]["breakdown"]] == ["maps[0].rotation", "maps[1].rotation"]


@pytest.mark.parametrize("content", ["{not json", json.dumps({"map": {"type": "rotation"}}),
                                     json.dumps({"map": {"type": "warp"}, "orbit": {"points": [[0, 0]]}})])
def test_bad_input_exits_2(tmp_path, capsys, content):
    p = tmp_path / "bad.json"
    p.write_text(content)
    assert run(capsys, "analyze", str(p))[0] == 2


def test_wrong_orbit_exits_2(write, capsys):
    doc = rotation_document(1, 6)
    doc["map"]["angle_turns"] = [1, 3]
    assert run(capsys, "analyze", write("x.json", doc))[0] == 2


def test_missing_file_exits_2(capsys, tmp_path):
    assert run(capsys, "analyze", str(tmp_path / "nope.json"))[0] == 2


def test_two_point_orbit_is_degenerate(write, capsys):
    doc = {"map": {"type": "rotation", "angle": math.pi}, "orbit": {"points": [[1, 0], [-1, 0]]}}
    path = write("pi.json", doc)
    assert run(capsys, "render", path, "-o", path + ".svg")[0] == 3
    assert run(capsys, "analyze", path, "--allow-uncertified")[0] == 3


def test_theorem_failure_exits_4(write, capsys, monkeypatch):
    import linkfix.pipeline as pipeline
    from linkfix.index import FaceIndex

    def broken(m, arr, cert=None, enforce=True):
        return [FaceIndex(f.id, 2, 0, 0) for f in arr.bounded_faces]

    monkeypatch.setattr(pipeline, "face_indices", broken)
    code, out, _ = run(capsys, "analyze", write("hex.json", rotation_document(1, 6)), "--json")
    rep = json.loads(out)
    assert code == 4
    assert rep["error"]["kind"] == "theorem" and "diagnostics" in rep["error"]


def test_verify_single_problem_deterministic(write, capsys, monkeypatch):
    path = write("star.json", rotation_document(2, 13))
    code1, out1, _ = run(capsys, "verify", path, "--seed", "42", "--trials", "20", "--json")
    code2, out2, _ = run(capsys, "verify", path, "--seed", "42", "--trials", "20", "--json")
    assert code1 == code2 == 0
    assert out1 == out2
    monkeypatch.setenv("LINKFIX_SEED", "42")
    code3, out3, _ = run(capsys, "verify", path, "--seed", "7", "--trials", "20", "--json")
    assert out3 == out1
    monkeypatch.setenv("LINKFIX_SEED", "7")
    assert run(capsys, "verify", path, "--trials", "20", "--json")[1] != out1


def test_verify_rotation_by_pi_is_informational(write, capsys):
    doc = {"map": {"type": "rotation", "angle": math.pi}, "orbit": {"points": [[1, 0], [-1, 0]]}}
    path = write("pi.json", doc)
    code, out, _ = run(capsys, "verify", path, "--allow-uncertified", "--trials", "10", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["informational"]
    seg = next(s for s in rep["suites"] if s["name"].startswith("segment: no fixed"))
    assert not seg["passed"] and seg["counterexample"]["t"] == 0.5
    # without the flag the map is refused
    assert run(capsys, "verify", path, "--trials", "10")[0] == 2


def test_render_hexagon(write, capsys, tmp_path):
    out = tmp_path / "hex.svg"
    assert run(capsys, "render", write("hex.json", rotation_document(1, 6)), "-o", str(out))[0] == 0
    root = ET.parse(out).getroot()
    assert root.get("version") == "1.1"
    labels = [t.text for t in root.iter(SVG + "text")]
    assert labels == ["ω=1, Ind=1"]
    assert len(root.find(f"{SVG}g[@id='faces']")) == 1
    gamma = root.find(f"{SVG}g[@id='gamma']")
    assert all(line.get("marker-end") == "url(#arrow)" for line in gamma)
    assert root.find(f"{SVG}g[@id='fixed-point']") is not None


def test_render_star_and_determinism(write, capsys, tmp_path):
    path = write("star.json", rotation_document(2, 13))
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    run(capsys, "render", path, "-o", str(a))
    run(capsys, "render", path, "-o", str(b))
    assert a.read_bytes() == b.read_bytes()
    root = ET.parse(a).getroot()
    labels = root.findall(f".//{SVG}text[@class='face-label']")
    assert len(labels) == 14
    assert sum(t.text.startswith("ω=2") for t in labels) == 1
    changes = root.find(f"{SVG}g[@id='orientation-changes']")
    assert len(changes) > 0


def test_render_viewport_is_padded_bbox(write, capsys, tmp_path):
    doc = rotation_document(1, 6, radius=2.0, center=(1.0, -1.0))
    out = tmp_path / "v.svg"
    run(capsys, "render", write("v.json", doc), "-o", str(out))
    x, y, w, h = map(float, ET.parse(out).getroot().get("viewBox").split())
    # hexagon with a vertex at angle 0: x span 4, y span 2 sqrt 3
    assert w == pytest.approx(4 * 1.2) and h == pytest.approx(2 * math.sqrt(3) * 1.2)
    assert x == pytest.approx(1 - 2 - 0.4)
