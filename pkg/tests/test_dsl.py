from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from isl.dsl import (
    BinOp, Num, ParseError, Pow, Unary, Var, load_system, parse, parse_system, print_expr,
    print_source, render_system, tokenize,
)
from isl.errors import InputError
from isl.series import MPoly, PolyVectorField, variables

from conftest import CORPUS


def test_four_variable_example():
    S = parse_system("vars x1 x2 x3 x4; field Y = x1*d(x1)+x2*d(x2)-x3*d(x3)-x4*d(x4)")
    x1, x2, x3, x4 = variables(4, S.order)
    assert S.fields[0] == PolyVectorField([x1, x2, -x3, -x4])
    assert S.type == (1, 0) and S.field_names == ("Y",) and S.order == 6


def test_full_file():
    text = """# comment line
vars x y
field X = (1 + x*y)*(x*d(x) - y*d(y))   # trailing comment
integral G = x*y
truncation 4
point P = (1/2, -3)
"""
    S = parse_system(text)
    x, y = variables(2, 4)
    assert S.order == 4
    assert S.integrals[0] == x * y
    assert S.fields[0][0] == x + x * x * y
    assert S.points == {"P": (Fraction(1, 2), Fraction(-3))}


def test_rational_coefficients_and_powers():
    S = parse_system("vars x\nfield X = 3/4*x^2*d(x) - x/2*d(x)\ntruncation 3")
    assert S.fields[0][0] == MPoly(1, {(2,): Fraction(3, 4), (1,): Fraction(-1, 2)}, 3)


def _error(text):
    with pytest.raises(ParseError) as info:
        parse_system(text)
    return info.value


def test_missing_field():
    err = _error("vars x y\nintegral G = x")
    assert err.message == "at least one field required"


@pytest.mark.parametrize("text, message, where", [
    ("vars x\nfield X = 1.5*x*d(x)", "floating-point literal", "2:11"),
    ("vars x\nfield X = x*d(x) $", "unexpected character", "2:18"),
    ("vars x\nfield X = (x*d(x)", "expected", "2:18"),
    ("vars x\nfieldd X = x*d(x)", "expected a statement keyword", "2:1"),
    ("vars x\nfield X = x*d(y)", "undeclared variable 'y' in d()", "2:13"),
    ("vars x\nfield X = y*d(x)", "undeclared variable 'y'", "2:11"),
    ("vars x\nintegral G = x*d(x)\nfield X = d(x)", "must not contain d() terms", "2:14"),
    ("vars x\nfield X = x", "must be a combination of d() terms", "2:11"),
    ("vars x\nfield X = d(x)*d(x)", "cannot multiply two vectors", "2:11"),
    ("vars x\nfield X = d(x)^2", "cannot be raised to a power", "2:11"),
    ("vars x\nfield X = d(x)/x", "only allowed by a constant", "2:16"),
    ("vars x\nfield X = d(x)/0", "division by zero", "2:16"),
    ("vars x\nfield X = x + d(x)", "cannot add a scalar and a vector", "2:11"),
    ("vars x y\nfield X = d(x)\npoint P = (1, 2, 3)", "3 coordinates, expected 2", "3:1"),
    ("field X = d(x)", "missing vars declaration", "1:1"),
    ("vars x\nvars y\nfield X = d(x)", "vars declared more than once", "2:1"),
    ("vars x x\nfield X = d(x)", "declared twice", "1:1"),
    ("vars x\nfield X = d(x)\nfield X = x*d(x)", "already in use", "3:1"),
    ("vars x\nfield X = d(x)\ntruncation 0", "at least 1", "3:1"),
    ("vars x\nfield X = d(x)\ntruncation 3\ntruncation 4", "more than once", "4:1"),
])
def test_errors_carry_spans(text, message, where):
    err = _error(text)
    assert message in err.message
    assert str(err.span) == where
    assert str(err).startswith(where)


def test_error_includes_path(tmp_path):
    path = tmp_path / "bad.sys"
    path.write_text("vars x\nfield X = 2.0*d(x)\n")
    with pytest.raises(ParseError) as info:
        load_system(str(path))
    assert str(info.value).startswith(f"{path}:2:11:")
    assert isinstance(info.value, InputError)


def test_tokenize_spans():
    toks = tokenize("vars x\n  field")
    kinds = [(t.text, str(t.span)) for t in toks if t.text.strip()]
    assert ("x", "1:6") in kinds and ("field", "2:3") in kinds


# random expression trees survive printing and parsing
names = st.sampled_from(["x", "y"])
leaves = st.one_of(st.builds(Num, st.integers(0, 20)), st.builds(Var, names))
exprs = st.recursive(
    leaves,
    lambda sub: st.one_of(
        st.builds(Unary, st.just("-"), sub),
        st.builds(BinOp, st.sampled_from("+-*/"), sub, sub),
        st.builds(Pow, sub, st.integers(0, 3)),
    ),
    max_leaves=8,
)


@given(exprs)
def test_print_parse_round_trip(e):
    src = parse(f"vars x y\nintegral G = {print_expr(e)}\nfield X = d(x)")
    assert src.statements[1].expr == e


def test_source_round_trip_over_corpus():
    files = sorted(CORPUS.glob("*.sys"))
    assert len(files) >= 50
    for path in files:
        src = parse(path.read_text())
        again = parse(print_source(src))
        assert again == src
        assert print_source(again) == print_source(src)


def test_render_system_round_trip():
    for path in sorted(CORPUS.glob("*.sys")):
        S = load_system(str(path))
        assert parse_system(render_system(S)) == S
