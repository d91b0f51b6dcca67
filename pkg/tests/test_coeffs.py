import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nls_frames.coeffs import (
    ExpressionError,
    ExpressionFunction,
    Scenario,
    ScenarioError,
    TabulatedFunction,
    char_coeffs,
    demo_scenarios,
    eval_coeffs,
    load_scenario,
    parse_time_expression,
    scenario_from_dict,
)


@pytest.mark.parametrize(
    "src, t, want",
    [
        ("1 + 2*t^2", 3.0, 19.0),
        ("-t^2", 2.0, -4.0),
        ("2^3^2", 0.0, 512.0),
        ("(1 - t)/(1 + t)", 0.5, 1.0 / 3.0),
        ("sin(pi*t)", 0.5, 1.0),
        ("exp(0.3*t)*cos(t)", 1.2, math.exp(0.36) * math.cos(1.2)),
        ("tanh(2*t - 1)", 0.25, math.tanh(-0.5)),
        ("-(-t)", 1.5, 1.5),
    ],
)
def test_parser_values(src, t, want):
    assert parse_time_expression(src).eval(t) == pytest.approx(want, rel=1e-15, abs=1e-15)


@pytest.mark.parametrize("src", ["", "1 +", "t t", "foo(t)", "(1 + t", "1 + )", "x + 1", "2 ** t"])
def test_parser_rejects(src):
    with pytest.raises(ExpressionError):
        parse_time_expression(src)


def test_expression_derivatives_match_hand_results():
    f = ExpressionFunction("0.8 - 0.1*t^2 + 0.4*tanh(2*t - 1)")
    t = np.linspace(0, 1, 7)
    sech2 = 1 / np.cosh(2 * t - 1) ** 2
    np.testing.assert_allclose(f.derivative(t), -0.2 * t + 0.8 * sech2, rtol=1e-14, atol=1e-15)
    d2 = -0.2 - 3.2 * sech2 * np.tanh(2 * t - 1)
    np.testing.assert_allclose(f.second_derivative(t), d2, rtol=1e-13, atol=1e-14)
    assert not f.is_const()
    assert ExpressionFunction("2*pi").is_const()


@given(
    st.floats(-3, 3), st.floats(-3, 3), st.floats(-2, 2), st.floats(0.1, 2.0), st.floats(-1.5, 1.5)
)
def test_derivative_against_complex_step(c1, c2, c3, w, t):
    src = f"{c1!r}*t^3 + {c2!r}*sin({w!r}*t) + {c3!r}*exp(-t)"
    f = ExpressionFunction(src)
    exact = 3 * c1 * t * t + c2 * w * math.cos(w * t) - c3 * math.exp(-t)
    assert f.derivative(t) == pytest.approx(exact, rel=1e-12, abs=1e-12)


def test_source_round_trip():
    f = ExpressionFunction("1 + 0.2*sin(t) - t^2/3")
    g = ExpressionFunction(f.to_dict()["expr"])
    t = np.linspace(-1, 1, 11)
    np.testing.assert_array_equal(f(t), g(t))


def test_tabulated_spline_and_derivative():
    t = np.linspace(0, 1, 201)
    f = TabulatedFunction(np.column_stack([t, np.sin(3 * t)]))
    tt = np.linspace(0.05, 0.95, 37)
    np.testing.assert_allclose(f(tt), np.sin(3 * tt), atol=1e-8)
    np.testing.assert_allclose(f.derivative(tt), 3 * np.cos(3 * tt), atol=1e-6)
    np.testing.assert_allclose(f.second_derivative(tt), -9 * np.sin(3 * tt), atol=1e-3)


@pytest.mark.parametrize(
    "samples",
    [
        [[0, 1], [1, 1], [2, 1]],
        [[0, 1], [0.5, 1], [0.7, 1], [1.5, 1]],
        [[0, 1], [2, 1], [1, 1], [3, 1]],
        [[0, 1, 2], [1, 1, 2], [2, 1, 2], [3, 1, 2]],
    ],
)
def test_tabulated_rejects(samples):
    with pytest.raises(ScenarioError):
        TabulatedFunction(samples)


def test_scenario_rejects_vanishing_a():
    with pytest.raises(ScenarioError, match="vanishes"):
        Scenario("bad", (0.0, 1.0), a="t - 0.5")
    with pytest.raises(ScenarioError):
        Scenario("bad", (1.0, 0.0))
    with pytest.raises(ScenarioError, match="not finite"):
        Scenario("bad", (0.0, 1.0), b="1/(t - 0.5)")


def test_domain_checks():
    s = demo_scenarios()["fiber"]
    with pytest.raises(ScenarioError, match="outside"):
        eval_coeffs(s, 1.5)
    a, b, c, d, f, g = eval_coeffs(s, 0.3)
    assert (a, b, c, d, f, g) == (0.5, 0.0, 0.0, 0.1, 0.0, -0.3)


def test_char_coeffs_by_hand():
    s = demo_scenarios()["fiber"]
    cc = char_coeffs(s, 0.4)
    assert cc.tau == pytest.approx(0.4)
    assert cc.sigma == pytest.approx(0.01)
    v = demo_scenarios()["varying"]
    t = 0.6
    a, b, c, d = 1 + 0.2 * math.sin(t), 0.3 * math.cos(t), 0.1 * t, 0.05
    da = 0.2 * math.cos(t)
    cv = char_coeffs(v, t)
    assert cv.tau == pytest.approx(da / a - 2 * c + 4 * d, rel=1e-14)
    assert cv.sigma == pytest.approx(a * b - c * d + d * d + 0.5 * d * da / a, rel=1e-14)


def test_load_toml_and_json(tmp_path):
    toml = tmp_path / "s.toml"
    toml.write_text('name = "x"\nt_domain = [0.0, 2.0]\na = "1 + 0.1*t"\nb = 0.5\n\n[g]\nsamples = [[0,0],[1,1],[2,2],[3,3]]\n')
    s = load_scenario(toml)
    assert s.name == "x" and s.t_domain == (0.0, 2.0)
    assert s.a(1.0) == pytest.approx(1.1)
    assert s.g(1.5) == pytest.approx(1.5)
    js = tmp_path / "s.json"
    js.write_text(json.dumps(s.to_dict()))
    s2 = load_scenario(js)
    t = np.linspace(0, 2, 9)
    for n in "abcdfg":
        np.testing.assert_allclose(getattr(s2, n)(t), getattr(s, n)(t), rtol=1e-14)


def test_load_errors(tmp_path):
    p = tmp_path / "bad.toml"
    p.write_text("t_domain = [0, ")
    with pytest.raises(ScenarioError, match="TOML"):
        load_scenario(p)
    q = tmp_path / "bad.json"
    q.write_text("{")
    with pytest.raises(ScenarioError, match="JSON"):
        load_scenario(q)
    with pytest.raises(ScenarioError, match="missing key 't_domain'"):
        scenario_from_dict({"a": 1})
    with pytest.raises(ScenarioError):
        scenario_from_dict({"t_domain": [0, 1], "a": {"neither": 1}})


def test_demo_scenarios_are_valid():
    demos = demo_scenarios()
    assert set(demos) == {"free", "fiber", "trap", "varying", "expdisp", "dragged"}
    for s in demos.values():
        t = np.linspace(*s.t_domain, 5)
        assert np.all(np.isfinite(char_coeffs(s, t).sigma))
