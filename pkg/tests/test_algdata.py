import json
from fractions import Fraction

import pytest

from enlab.algdata import (
    AlgebraData,
    AlgebraError,
    BimoduleData,
    algebra_from_json,
    builtin,
    load_algebra,
    load_module,
    regular_module,
    square_zero,
    to_json,
    trivial_module,
    trunc_poly,
    unitalize,
    validate,
)
from enlab.exactla import Field


def test_trunc_poly_products():
    a = trunc_poly(4)
    assert a.basis == ("x", "x2", "x3")
    assert a.product(0, 0) == {1: 1}
    assert a.product(0, 1) == {2: 1}
    assert a.product(1, 1) == {}


def test_square_zero_has_no_products():
    a = square_zero(3)
    assert a.dim == 3 and not a.mul
    with pytest.raises(AlgebraError):
        square_zero(0)
    with pytest.raises(AlgebraError):
        trunc_poly(1)


@pytest.mark.parametrize("name", ["square_zero:1", "square_zero:2", "trunc_poly:2", "trunc_poly:3", "trunc_poly:5"])
@pytest.mark.parametrize("module", ["trivial", "A"])
def test_builtins_validate(name, module):
    a, m = builtin(name, module=module)
    assert validate(a, m) == []
    assert validate(a, m, Field(2)) == []


def test_unknown_builtin():
    with pytest.raises(AlgebraError, match="unknown builtin"):
        builtin("polynomial:3")


def test_validate_finds_noncommutative_product():
    a = AlgebraData(("x", "y"), {(0, 1): {0: Fraction(1)}})
    problems = validate(a, trivial_module())
    assert any("commutativity" in p for p in problems)


def test_validate_finds_nonassociative_product():
    # (xy)y = x but x(yy) = 0
    mul = {(0, 0): {1: Fraction(1)}, (0, 1): {0: Fraction(1)}, (1, 0): {0: Fraction(1)}}
    problems = validate(AlgebraData(("x", "y"), mul), trivial_module())
    assert any("associativity" in p for p in problems)


def test_validate_finds_bad_module():
    a = trunc_poly(3)
    m = BimoduleData(("m",), {(0, 0): {0: Fraction(1)}})
    problems = validate(a, m)
    assert any("module associativity" in p for p in problems)


def test_validate_index_range():
    a = AlgebraData(("x",), {(0, 0): {3: Fraction(1)}})
    assert validate(a, trivial_module()) == ["mul index out of range at (0, 0)"]


def test_validate_reports_field_problems():
    a = AlgebraData(("x", "y"), {(0, 0): {1: Fraction(1, 2)}})
    assert any("F_2" in p for p in validate(a, trivial_module(), Field(2)))


def test_unitalize_appends_unit():
    u = unitalize(trunc_poly(3))
    assert u.basis == ("x", "x2", "1")
    assert u.product(2, 0) == {0: 1}
    assert u.product(0, 0) == {1: 1}
    with pytest.raises(AlgebraError):
        unitalize(AlgebraData(("1",), {}))


def test_regular_module_copies_products():
    a = trunc_poly(3)
    assert regular_module(a).act(0, 0) == {1: 1}


def test_json_round_trip(tmp_path):
    a, m = builtin("trunc_poly:3", module="A")
    data = to_json(a, m, Field(3))
    path = tmp_path / "alg.json"
    path.write_text(json.dumps(data))
    a2, m2, fld = load_algebra(path)
    assert fld == Field(3)
    assert a2.basis == a.basis and a2.mul == a.mul
    assert m2.basis == m.basis and m2.action == m.action
    assert load_module(path).action == m.action


def test_json_module_by_name_and_fractions():
    data = {"basis": ["x", "y"], "mul": [[0, 0, 1, "1/2"]], "module": "A"}
    a, m, fld = algebra_from_json(data)
    assert a.product(0, 0) == {1: Fraction(1, 2)}
    assert m.act(0, 0) == {1: Fraction(1, 2)}
    a, m, _ = algebra_from_json({"basis": ["x"]})
    assert m is None


def test_json_rejects_short_entries():
    with pytest.raises(AlgebraError):
        algebra_from_json({"basis": ["x"], "mul": [[0, 0, 1]]})
