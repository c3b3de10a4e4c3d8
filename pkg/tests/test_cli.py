import json

import pytest

from enlab import encomplex
from enlab.algdata import builtin, to_json
from enlab.baroracle import coefficient_complexes
from enlab.cli import main, parse_tree
from enlab.exactla import Field
from enlab.trees import TreeError, corolla


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def _corrupt_top_merge(monkeypatch):
    original = encomplex.differential_terms.__wrapped__

    # flipping every top merge is a consistent change of sign; flip only one
    def corrupted(t):
        out = list(original(t))
        for k, (j, p, s, h) in enumerate(out):
            if p == "merge" and j == t.n:
                out[k] = (j, p, -s, h)
                break
        return tuple(out)

    monkeypatch.setattr(encomplex, "differential_terms", corrupted)


def test_homology_agrees_with_bar_oracle(capsys):
    code, rep = run_json(capsys, "homology", "--n", "2", "--max-degree", "8", "--builtin", "square_zero",
                         "--module", "trivial", "--field", "Q")
    assert code == 0
    a, k = builtin("square_zero")
    expected = coefficient_complexes(a, k, 2, 8)[0].betti()
    assert rep["betti"] == {str(m): v for m, v in expected.items()}
    assert rep["field"] == {"kind": "rational"} and rep["maxDegree"] == 8


def test_single_level_homology_matches_hochschild_suite(capsys):
    flags = ["--n", "1", "--max-degree", "8", "--builtin", "trunc_poly:3", "--module", "A", "--field", "F:2"]
    code, hom = run_json(capsys, "homology", *flags)
    assert code == 0
    code, hoch = run_json(capsys, "verify", "hochschild", *flags)
    assert code == 0 and hoch["ok"]
    assert hom["betti"] == hoch["bettiHochschild"]


@pytest.mark.parametrize("field", ["Q", "F:2"])
def test_cohomology_matches_homology(capsys, field):
    flags = ["--n", "2", "--max-degree", "5", "--builtin", "trunc_poly:3", "--module", "A", "--field", field]
    _, hom = run_json(capsys, "homology", *flags)
    _, co = run_json(capsys, "homology", "--cohomology", *flags)
    _, alias = run_json(capsys, "cohomology", *flags)
    assert hom["betti"] == co["betti"] == alias["betti"]
    assert co["command"] == alias["command"] == "cohomology"


def test_table_output(capsys):
    code, out, _ = run(capsys, "homology", "--n", "1", "--max-degree", "3", "--builtin", "square_zero:2")
    assert code == 0
    assert out.splitlines() == ["degree  betti", "     0      2", "     1      4", "     2      8"]


def test_verify_bstar(capsys):
    code, rep = run_json(capsys, "verify", "bstar", "--n", "3", "--max-degree", "5")
    assert code == 0 and rep["ok"]
    assert [rep["betti"][str(m)] for m in range(4)] == [1, 0, 0, 0]


def test_verify_projective(capsys):
    code, rep = run_json(capsys, "verify", "projective", "--tree", '{"r":[1,2],"maps":[[0,0,1]]}', "--max-degree", "4")
    assert code == 0
    assert rep["betti"] == {"0": 3, "1": 0, "2": 0, "3": 0}


def test_verify_d2(capsys):
    code, out, _ = run(capsys, "verify", "d2", "--n", "2", "--max-degree", "6", "--builtin", "trunc_poly:3", "--module", "A")
    assert code == 0 and out.startswith("d2: PASS")


@pytest.mark.parametrize(
    "suite, extra",
    [
        ("multicomplex", ["--system", "leaves", "--n", "2"]),
        ("multicomplex", ["--system", "representable", "--tree", "C2", "--n", "2"]),
        ("d2", ["--system", "dual_loday", "--builtin", "trunc_poly:3", "--module", "A", "--n", "2"]),
        ("oracle", ["--builtin", "trunc_poly:2", "--module", "A", "--n", "2"]),
        ("duality", ["--builtin", "trunc_poly:3", "--module", "A", "--n", "2"]),
        ("category", ["--trials", "50", "--n", "3"]),
    ],
)
def test_other_suites_pass(capsys, suite, extra):
    code, rep = run_json(capsys, "verify", suite, "--max-degree", "4", *extra)
    assert code == 0 and rep["ok"]


def test_tree_listings(capsys):
    assert run(capsys, "trees", "--n", "2", "--degree", "3", "--count-only")[1].strip() == "3"
    assert run(capsys, "trees", "--n", "1", "--degree", "5", "--count-only")[1].strip() == "1"
    code, rep = run_json(capsys, "trees", "--n", "2", "--signature", "1,2")
    assert code == 0 and rep["count"] == len(rep["trees"]) == 2


def test_homset_listing(capsys):
    assert run(capsys, "homset", "--source", "C2", "--target", "C1", "--n", "1", "--count-only")[1].strip() == "3"
    code, rep = run_json(capsys, "homset", "--source", "C2", "--target", "L", "--n", "2")
    assert code == 0 and rep["count"] == len(rep["morphisms"]) == 3


def test_parse_tree_forms():
    assert parse_tree("C3", 2) == corolla(2, 3)
    assert parse_tree('{"r":[2]}', 1) == corolla(1, 3)
    with pytest.raises(TreeError):
        parse_tree("{r:", 1)


@pytest.mark.parametrize(
    "argv",
    [
        ["homology", "--field", "F:4"],
        ["homology", "--builtin", "polynomial:2"],
        ["homology", "--builtin", "square_zero:1", "--algebra", "x.json"],
        ["homology", "--algebra", "/nonexistent/alg.json"],
        ["homset", "--source", "{bad", "--target", "C1"],
        ["homset", "--source", "C1", "--target", '{"r":[1,1],"maps":[[0,1]]}'],
        ["trees", "--n", "2"],
        ["trees", "--signature", "1,x"],
        ["verify", "projective"],
        ["verify", "d2", "--system", "representable"],
        ["trees", "--n", "2", "--signature", "1,2", "--format", "json", "--signature", "1,-1"],
    ],
)
def test_invalid_input_exits_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("enlab:")


def test_argument_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as info:
        main(["homology", "--n", "0"])
    assert info.value.code == 2
    with pytest.raises(SystemExit):
        main(["verify", "nonsense"])


def test_invalid_algebra_file_exits_two(capsys, tmp_path):
    path = tmp_path / "alg.json"
    path.write_text(json.dumps({"basis": ["x", "y"], "mul": [[0, 1, 0, 1]]}))
    code, _, err = run(capsys, "homology", "--algebra", str(path))
    assert code == 2 and "commutativity" in err


def test_algebra_file_is_used(capsys, tmp_path):
    a, m = builtin("trunc_poly:3", module="A")
    path = tmp_path / "alg.json"
    path.write_text(json.dumps(to_json(a, m, Field(2))))
    _, from_file = run_json(capsys, "homology", "--algebra", str(path), "--n", "2", "--max-degree", "5")
    _, from_builtin = run_json(capsys, "homology", "--builtin", "trunc_poly:3", "--module", "A", "--field", "F:2",
                               "--n", "2", "--max-degree", "5")
    assert from_file == from_builtin


def test_failed_check_exits_one(capsys, monkeypatch):
    _corrupt_top_merge(monkeypatch)
    code, rep = run_json(capsys, "verify", "multicomplex", "--n", "2", "--max-degree", "4", "--builtin", "trunc_poly:3",
                         "--module", "A")
    assert code == 1 and not rep["ok"] and rep["failures"]


def test_not_a_complex_exits_three(capsys, monkeypatch):
    _corrupt_top_merge(monkeypatch)
    code, _, err = run(capsys, "homology", "--n", "2", "--max-degree", "4", "--builtin", "trunc_poly:3", "--module", "A")
    assert code == 3 and "consistency" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["homology", "--n", "2", "--max-degree", "5", "--builtin", "trunc_poly:3", "--module", "A"],
        ["verify", "category", "--trials", "40", "--seed", "7"],
        ["homset", "--source", "C3", "--target", "C1", "--n", "2"],
    ],
)
def test_json_output_is_byte_identical(capsys, argv):
    first = run(capsys, *argv, "--format", "json")[1]
    second = run(capsys, *argv, "--format", "json")[1]
    assert first == second
    assert first == json.dumps(json.loads(first), sort_keys=True) + "\n"
