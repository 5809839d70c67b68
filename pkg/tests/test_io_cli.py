import json
from fractions import Fraction

import pytest

from hyperball.cli import main
from hyperball.io import (
    ParseError,
    ValidationError,
    canonical_dumps,
    parse_instance,
    to_jsonable,
)
from hyperball.lab import helly_counterexample

from conftest import F, pt


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def test_matrix_round_trip(tmp_path):
    path = write(tmp_path, "m.json", {"type": "matrix", "dist": [["0/1", "1/1"], ["1/1", "0/1"]]})
    kind, space = parse_instance(path)
    assert kind == "metric" and space.d(0, 1) == 1


def test_matrix_validation_names_triple(tmp_path):
    path = write(
        tmp_path, "bad.json", {"type": "matrix", "dist": [[0, 1, 3], [1, 0, 1], [3, 1, 0]]}
    )
    with pytest.raises(ValidationError) as exc:
        parse_instance(path)
    assert "dist[0][2]" in str(exc.value)


def test_zero_denominator_rejected(tmp_path):
    path = write(tmp_path, "z.json", {"type": "matrix", "dist": [["0/1", "1/0"], ["1/0", "0/1"]]})
    with pytest.raises(ParseError):
        parse_instance(path)


def test_float_rejected(tmp_path):
    path = write(tmp_path, "f.json", {"ball": {"center": [0.5, 0], "r": 1}})
    with pytest.raises(ParseError):
        parse_instance(path)


def test_polyhedron_and_ball_wire_format(tmp_path):
    path = write(
        tmp_path,
        "p.json",
        {"polyhedron": {"dim": 2, "rows": [{"a": ["1/1", "1/1"], "b": "-1/1"}]}},
    )
    kind, poly = parse_instance(path)
    assert kind == "polyhedron" and poly.rows[0][1] == -1
    path2 = write(tmp_path, "b.json", {"ball": {"center": ["0/1", "0/1"], "r": "2/1"}})
    kind2, ball = parse_instance(path2)
    assert kind2 == "ball" and ball.radius == 2


def test_helly_instance_byte_identical_round_trip(tmp_path):
    inst = helly_counterexample(3)
    text = canonical_dumps(inst)
    path = tmp_path / "h.json"
    path.write_text(text)
    kind, parsed = parse_instance(str(path))
    assert kind == "helly"
    assert canonical_dumps(parsed) == text


def test_family_with_subset(tmp_path):
    payload = {
        "type": "family",
        "balls": [{"ball": {"center": ["0/1", "0/1"], "r": "1/1"}}],
        "subset": {"box": {"lo": ["0/1", "0/1"], "hi": ["2/1", "2/1"]}},
    }
    kind, family = parse_instance(write(tmp_path, "fam.json", payload))
    assert kind == "family" and family.subset is not None


def test_rationals_serialize_with_denominator():
    assert to_jsonable(Fraction(3)) == "3/1"
    assert to_jsonable({"x": (Fraction(1, 2),)}) == {"x": ["1/2"]}


# ---------------------------------------------------------------------------
# CLI


def test_cli_ip_threshold(capsys):
    code = main(["ip-threshold", "--k", "2"])
    assert code == 0
    assert capsys.readouterr().out.splitlines()[0] == "4"


def test_cli_helly_verify_exit_code(capsys):
    assert main(["helly", "--dim", "4", "--verify"]) == 1
    capsys.readouterr()


def test_cli_helly_emit_and_check(tmp_path, capsys):
    out = str(tmp_path / "h4.json")
    assert main(["helly", "--dim", "4", "--out", out]) == 0
    capsys.readouterr()
    assert main(["check", "--instance", out]) == 1  # family is not Helly of order n
    capsys.readouterr()
    kind, parsed = parse_instance(out)
    assert canonical_dumps(parsed) == open(out).read()


def test_cli_unknown_flag_is_usage_error():
    assert main(["ip-threshold", "--k", "2", "--bogus"]) == 3


def test_cli_check_matrix(tmp_path, capsys):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"type": "matrix", "dist": [[0, 1], [1, 0]]}))
    assert main(["check", "--instance", str(path)]) == 0
    capsys.readouterr()
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"type": "matrix", "dist": [[0, 1, 3], [1, 0, 1], [3, 1, 0]]}))
    assert main(["check", "--instance", str(bad)]) == 3
    capsys.readouterr()


def test_cli_refute_modes(tmp_path, capsys):
    box = tmp_path / "box.json"
    box.write_text(json.dumps({"box": {"lo": ["0/1", "0/1"], "hi": ["1/1", "1/1"]}}))
    assert main(["refute", "--instance", str(box), "--level", "2", "--budget", "500", "--seed", "5"]) == 2
    capsys.readouterr()
    union = tmp_path / "union.json"
    union.write_text(
        json.dumps(
            {
                "type": "family",
                "balls": [{"ball": {"center": ["0/1", "0/1"], "r": "1/1"}}],
                "subset": {
                    "union": [
                        {"box": {"lo": ["0/1", "0/1"], "hi": ["1/1", "1/1"]}},
                        {"box": {"lo": ["3/1", "0/1"], "hi": ["4/1", "1/1"]}},
                    ]
                },
            }
        )
    )
    assert main(["refute", "--instance", str(union), "--level", "2", "--budget", "1000", "--seed", "7"]) == 1
    capsys.readouterr()


def test_cli_reports_are_deterministic_modulo_timing(tmp_path, capsys):
    box = tmp_path / "box.json"
    box.write_text(json.dumps({"box": {"lo": ["0/1", "0/1"], "hi": ["1/1", "1/1"]}}))
    outs = []
    for run in range(2):
        out = tmp_path / f"r{run}.json"
        main(
            [
                "refute", "--instance", str(box), "--level", "2",
                "--budget", "200", "--seed", "9", "--json", "--out", str(out),
            ]
        )
        capsys.readouterr()
        data = json.loads(out.read_text())
        data.pop("timing")
        outs.append(json.dumps(data, sort_keys=True))
    assert outs[0] == outs[1]


def test_cli_barycenter_and_refine(tmp_path, capsys):
    pts_file = tmp_path / "pts.json"
    pts_file.write_text(json.dumps({"type": "points", "points": [["0/1"], ["1/1"], ["2/1"]]}))
    assert main(["barycenter", "--instance", str(pts_file)]) == 0
    capsys.readouterr()

    fam = tmp_path / "fam.json"
    fam.write_text(
        json.dumps(
            {
                "type": "family",
                "balls": [
                    {"ball": {"center": ["3/1", "1/1"], "r": "2/1"}},
                    {"ball": {"center": ["-1/1", "1/1"], "r": "2/1"}},
                ],
                "subset": {"box": {"lo": ["0/1", "0/1"], "hi": ["2/1", "2/1"]}},
            }
        )
    )
    assert main(["refine", "--instance", str(fam), "--scheme", "cauchy-halving", "--iters", "10"]) == 0
    capsys.readouterr()


def test_cli_graph_scan(tmp_path, capsys):
    g = tmp_path / "g.json"
    g.write_text(json.dumps({"type": "graph", "n": 4, "edges": [[0, 1], [1, 2], [2, 3], [3, 0]]}))
    assert main(["graph-scan", "--instance", str(g), "--level", "2"]) == 0
    capsys.readouterr()
    c6 = tmp_path / "c6.json"
    c6.write_text(
        json.dumps({"type": "graph", "n": 6, "edges": [[i, (i + 1) % 6] for i in range(6)]})
    )
    assert main(["graph-scan", "--instance", str(c6), "--level", "3"]) == 1
    capsys.readouterr()


def test_cli_ip_lift(tmp_path, capsys):
    balls = [
        {"ball": {"center": ["0/1", "0/1"], "r": "2/1"}},
        {"ball": {"center": ["1/1", "0/1"], "r": "1/1"}},
        {"ball": {"center": ["0/1", "1/1"], "r": "1/1"}},
        {"ball": {"center": ["-1/1", "0/1"], "r": "3/2"}},
        {"ball": {"center": ["0/1", "-1/1"], "r": "3/2"}},
    ]
    inst = tmp_path / "ip.json"
    inst.write_text(json.dumps({"type": "ip", "k": 2, "eps": "1/64", "balls": balls}))
    assert main(["ip-lift", "--instance", inst.as_posix(), "--iters", "10"]) == 0
    capsys.readouterr()
