import io
import json
import subprocess
import sys

import pytest

from polygrowth.cli import main
from polygrowth.schemas import validate_document


@pytest.fixture
def run(tmp_path):
    def invoke(*args, cache=True):
        out, err = io.StringIO(), io.StringIO()
        argv = list(args)
        if cache:
            argv += ["--cache-dir", str(tmp_path / "cache")]
        code = main(argv, out, err)
        return code, out.getvalue(), err.getvalue()

    return invoke


def test_polygon_csv(run):
    code, out, _ = run("count", "polygon", "--graph", "Z2", "--n", "12", "--output", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,count,root,ratio"
    assert [int(l.split(",")[0]) for l in lines[1:]] == list(range(3, 13))
    assert lines[2].startswith("4,4,")


def test_tree_polygons_are_zero(run):
    code, out, _ = run("count", "polygon", "--graph", "T3", "--n", "10", "--output", "json")
    assert code == 0
    doc = json.loads(out)
    validate_document(doc, "count_series")
    assert set(doc["counts"].values()) == {"0"}


def test_counts_are_decimal_strings(run):
    code, out, _ = run("count", "saw", "--graph", "Z2", "--n", "6", "--output", "json")
    assert json.loads(out)["counts"]["6"] == "780"


def test_bridge_count_needs_a_height(run):
    code, out, _ = run("count", "bridge", "--graph", "Z2", "--height", "none", "--n", "3", "--output", "json")
    assert code == 1
    validate_document(json.loads(out), "error")


def test_square_certificate_for_hexagonal(run):
    code, out, _ = run("verify", "square-ghf", "--graph", "hex", "--height", "fig1", "--radius", "4",
                       "--output", "json")
    assert code == 0
    doc = json.loads(out)
    validate_document(doc, "square_certificate")
    assert doc["passed"] and doc["delta"] == 4


def test_failed_axiom_exits_two(run):
    code, out, _ = run("verify", "ghf", "--graph", "Z2", "--height", "absx", "--radius", "2", "--output", "json")
    assert code == 2
    doc = json.loads(out)
    validate_document(doc, "ghf_report")
    assert {"axiom": "up_down", "witness": ["c0(0,0)"], "detail": "no lower neighbour"} in doc["failures"]


def test_rung_swap_exits_two_with_fixed_set(run):
    code, out, _ = run("verify", "square-ghf", "--graph", "L2", "--radius", "3", "--k-max", "3", "--output", "text")
    assert code == 2
    assert "c0(0), c1(0)" in out


@pytest.mark.parametrize("argv", [
    ["count", "saw", "--graph", "nowhere", "--n", "3"],
    ["count", "saw", "--graph", "Z2"],
    ["count", "saw", "--graph", "Z2", "--n", "3", "--workers", "0"],
    ["count", "saw", "--graph", "Z2", "--n", "3", "--budget", "0"],
    ["count", "bridge", "--graph", "Z2", "--height", "sideways", "--n", "3"],
    ["frobnicate"],
])
def test_usage_errors_exit_one(run, argv):
    code, _, err = run(*argv, cache=False)
    assert code == 1
    assert err.startswith("error:")


def test_error_object_in_json_mode(run):
    code, out, _ = run("count", "saw", "--graph", "nowhere", "--n", "3", "--output", "json")
    doc = json.loads(out)
    assert code == 1 and doc["exit_code"] == 1 and doc["type"] == "InputError"


def test_warm_cache_reproduces_report(run, tmp_path):
    first = run("count", "bridge", "--graph", "sqoct", "--n", "8", "--output", "json")
    lines = (tmp_path / "cache" / "counts.jsonl").read_text().splitlines()
    second = run("count", "bridge", "--graph", "sqoct", "--n", "8", "--output", "json")
    assert first == second
    assert (tmp_path / "cache" / "counts.jsonl").read_text().splitlines() == lines


def test_workers_give_identical_output(run):
    a = run("count", "saw", "--graph", "hex", "--n", "12", "--workers", "1", cache=False)
    b = run("count", "saw", "--graph", "hex", "--n", "12", "--workers", "8", cache=False)
    assert a == b


def test_estimates(run):
    code, out, _ = run("estimate", "mu", "--graph", "T3", "--n", "10", "--output", "json")
    assert code == 0 and json.loads(out)["final"] == 2.0
    code, out, _ = run("estimate", "pi", "--graph", "Z2", "--n", "12", "--output", "json")
    assert set(json.loads(out)["per_n"]) == {"6", "8", "10", "12"}
    code, out, _ = run("estimate", "beta", "--graph", "T3xZ", "--n", "6", "--output", "json")
    doc = json.loads(out)
    assert doc["final"] == max(doc["directions"].values())


def test_checks(run):
    code, out, _ = run("check", "identity", "--graph", "hex", "--n", "10", "--direct", "--output", "json")
    assert code == 0 and json.loads(out)["holds"]
    code, out, _ = run("check", "ordering", "--graph", "L2", "--n", "10", "--output", "json")
    assert code == 0
    code, out, _ = run("check", "subexp", "--graph", "T3", "--n", "10", "--output", "json")
    assert json.loads(out)["verdict"] == "exponential"


def test_construct_polygon_json(run):
    code, out, _ = run("construct", "polygon", "--graph", "Z2", "--n", "1", "--output", "json", "--coordinates")
    assert code == 0
    doc = json.loads(out)
    validate_document(doc, "assembly")
    assert doc["parameters"]["length"] == 24 and doc["parameters"]["k"] == 3
    assert all(doc["verdicts"].values())
    assert len(doc["coordinates"]) == 25


def test_construct_polygon_with_too_small_shift(run):
    code, _, err = run("construct", "polygon", "--graph", "Z2", "--n", "1", "--k", "2")
    assert code == 2 and "share" in err


def test_construct_tube_and_sequence(run):
    code, out, _ = run("construct", "tube", "--graph", "sqoct", "--n", "2", "--output", "json")
    assert code == 0 and json.loads(out)["ell"] == 1
    code, out, _ = run("construct", "sequence", "--graph", "Z2", "--n", "1", "--N", "3", "--output", "csv")
    assert code == 0
    assert [l.split(",")[1] for l in out.strip().splitlines()] == ["24", "26", "28"]


def test_ball_commands(run):
    code, out, _ = run("ball", "histogram", "--graph", "Z2", "--n", "3", "--output", "json")
    assert json.loads(out)["histogram"] == {"1": "8", "3": "28"}
    code, out, _ = run("ball", "prob", "--graph", "Z2", "--n", "3", "--c", "0.4", "--output", "json")
    assert json.loads(out)["probability"] == "2/9"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "polygrowth", "count", "saw", "--graph", "Z2", "--n", "3",
                           "--no-cache", "--output", "csv"], capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[-1].startswith("3,36,")
