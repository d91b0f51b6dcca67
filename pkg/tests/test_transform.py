import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nls_frames.coeffs import Scenario, demo_scenarios
from nls_frames.equations import EquationSpec, WaveField
from nls_frames.kernel import InitData, build_kernel
from nls_frames.transform import (
    CausticError,
    integrability_h,
    kundu_gauge,
    nonlinearity_map,
    painleve_property,
    pull_back,
    push_forward,
    push_forward_fn,
)
from nls_frames.verify import residual


def gauss_free(x, t):
    """Spreading Gaussian solving i A_t + A_xx = 0."""
    q = 1 + 4j * t
    return np.exp(-x * x / q) / np.sqrt(q)


def chi_gauss(xi, tau):
    return gauss_free(xi, -tau)


scenario_st = st.builds(
    lambda a, b, c, d, f, g: Scenario("rand", (0.0, 0.5), a=a, b=b, c=c, d=d, f=f, g=g),
    st.sampled_from(["1", "0.5", "1 + 0.2*sin(t)", "exp(0.3*t)"]),
    st.sampled_from(["0", "0.3", "0.3*cos(t)"]),
    st.sampled_from(["0", "0.1*t", "-0.2"]),
    st.sampled_from(["0", "0.05", "0.2*tanh(t)"]),
    st.sampled_from(["0", "0.2*sin(2*t)", "-0.3"]),
    st.sampled_from(["0", "0.1*cos(t)", "0.4"]),
)


@given(s=scenario_st)
def test_gauge_identity_linear(s):
    t = np.linspace(0, 0.5, 101)
    k = build_kernel(s, InitData(), 0, t)
    nm = nonlinearity_map(k, s, (0, 0, 0, 0, 0, 0, 0))
    psi = push_forward_fn(k, chi_gauss)
    x = np.linspace(-12, 12, 512, endpoint=False)
    rep = residual(nm.equation(), psi, x, np.linspace(0.05, 0.45, 5), h=1e-3)
    assert rep.rel_residual_sup < 1e-8


@given(
    mu=st.floats(0.5, 2.0), alpha=st.floats(-0.1, 0.3), beta=st.floats(0.5, 1.5),
    delta=st.floats(-0.5, 0.5), eps=st.floats(-0.5, 0.5),
)
def test_push_pull_round_trip(mu, alpha, beta, delta, eps):
    s = demo_scenarios()["fiber"]
    init = InitData(mu, alpha, beta, 0.0, delta, eps, 0.0)
    k = build_kernel(s, init, 0, np.linspace(0, 1, 201))
    t = np.linspace(0.1, 0.6, 4)
    psi = push_forward_fn(k, chi_gauss)
    gam = np.ravel(k.at(t)["gamma"])
    xi = np.linspace(-3, 3, 31)
    back = pull_back(k, psi, xi, gam, t_range=(0.0, 1.0))
    for i, g in enumerate(gam):
        np.testing.assert_allclose(back.values[i], chi_gauss(xi, g), atol=1e-9)


def test_push_forward_wavefield_meta():
    s = demo_scenarios()["fiber"]
    k = build_kernel(s, InitData(), 0, np.linspace(0, 1, 51))
    wf = push_forward(k, chi_gauss, np.linspace(-2, 2, 9), [0.0, 0.5])
    assert wf.values.shape == (2, 9)
    assert wf.meta["kernel"]["method"]
    np.testing.assert_allclose(wf.values[0], chi_gauss(wf.x, 0.0), atol=1e-14)


def test_caustic_raises():
    s = demo_scenarios()["free"]
    k = build_kernel(s, InitData(alpha=-0.5), 0, np.linspace(0, 1, 201), method="direct")
    psi = push_forward_fn(k, chi_gauss)
    with pytest.raises(CausticError):
        psi(np.zeros(3), 0.9)


def test_nonlinearity_map_checks_c0():
    s = demo_scenarios()["trap"]
    k = build_kernel(s, InitData(), 0, np.linspace(0, 1, 11))
    with pytest.raises(ValueError, match="c0"):
        nonlinearity_map(k, s, (1, 0, 0, 0, 0, 0, 0))
    with pytest.raises(ValueError):
        nonlinearity_map(k, s, (0, 0, 0))


def test_integrability_two_forms():
    s = demo_scenarios()["expdisp"]
    k = build_kernel(s, InitData(mu=1.3, alpha=0.2, beta=0.8), 0, np.linspace(0, 1, 41))
    for p in (2.0, 4.0, 1.5):
        out = integrability_h(s, k, 1.0, p)
        assert out["rel_dev"] < 1e-10


def test_painleve_property():
    assert painleve_property((1.0, 1.0, 0.25))
    assert painleve_property((0.0, 0.0, 0.0))
    assert not painleve_property((1.0, 1.0, 0.3))


@given(nu=st.floats(-3, 3), xi0=st.floats(-2, 2))
def test_kundu_gauge_inverse_and_modulus(nu, xi0):
    xi = np.linspace(-8, 8, 401)
    chi = WaveField.from_function(chi_gauss, xi, [0.0, 0.2, 0.4], coords=("xi", "tau"))
    phi = kundu_gauge(chi, nu, xi0)
    np.testing.assert_allclose(np.abs(phi.values), np.abs(chi.values), rtol=1e-14)
    back = kundu_gauge(phi, -nu, xi0)
    np.testing.assert_allclose(back.values, chi.values, atol=1e-13)
