import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nls_frames import catalog as cat
from nls_frames.coeffs import demo_scenarios
from nls_frames.equations import KINDS, EquationSpec, WaveField
from nls_frames.verify import (
    PropagatorConfig,
    conservation_report,
    hamiltonian,
    propagate,
    residual,
    sign_flip,
)


def gauss_free(x, t):
    q = 1 + 4j * t
    return np.exp(-x * x / q) / np.sqrt(q)


def test_linear_propagation_matches_exact():
    cfg = PropagatorConfig((-30.0, 30.0), 1024, t_out=(0.0, 0.25, 0.5))
    run = propagate(EquationSpec.linear_free(), lambda x: gauss_free(x, 0.0), 0.5, cfg)
    assert run.meta["status"] == "ok"
    np.testing.assert_allclose(run.values[-1], gauss_free(run.x, 0.5), atol=1e-9)
    rep = conservation_report(run, EquationSpec.linear_free())
    assert rep["norm_drift"] < 1e-10
    assert rep["energy_drift"] < 1e-9


def test_quintic_pulse_propagation():
    h = cat.quintic_pulse(0.3, 0.7, 1.5)
    cfg = PropagatorConfig((-40.0, 40.0), 2048, t_out=(0.0, 0.1))
    run = propagate(h.equation, h(cfg.grid(), 0.0), 0.1, cfg)
    assert np.max(np.abs(run.values[-1] - h(run.x, 0.1))) < 1e-6


def test_amplitude_cap_halts():
    cfg = PropagatorConfig((-20.0, 20.0), 512, max_amplitude=1.5)
    x = cfg.grid()
    run = propagate(EquationSpec.cubic_pm(-1), 1.4 / np.cosh(x), 1.0, cfg)
    assert run.meta["status"] in ("amplitude_cap", "resolution_lost")
    assert run.meta["last_valid_time"] < 1.0


@given(st.floats(-0.8, 0.8), st.floats(1.5, 3.0))
def test_time_step_convergence(v, k):
    # fourth-order stencil: halving dt should cut the residual by about 16
    h = cat.quintic_pulse(0.0, v, k)
    x = np.linspace(-50 / k, 50 / k, 2048, endpoint=False)
    out = []
    for dt in (0.2, 0.1):
        t = 0.1 + dt * np.arange(9)
        wf = WaveField.from_function(h, x, t)
        out.append(residual(h.equation, wf).rel_residual_sup)
    assert out[0] / out[1] >= 8.0


def test_residual_things():
    h = cat.quintic_pulse(0.0, 0.0, 1.0)
    x = np.linspace(-40, 40, 1024, endpoint=False)
    zero = lambda x, t: 0 * x + 0j
    rep = residual(h.equation, zero, x, [0.1])
    assert rep.vacuous
    with pytest.raises(ValueError, match="leakage"):
        residual(h.equation, lambda x, t: np.exp(1j * x), x, [0.1])
    with pytest.raises(ValueError):
        residual(h.equation, WaveField.from_function(h, x, [0.0, 0.1]))
    rep = residual(h.equation, h, x, [0.1, 0.2], singular_times=[0.2])
    assert rep.skipped == [0.2] and rep.nt == 1


def _sample_specs():
    s = demo_scenarios()["fiber"]
    hs = tuple((lambda c: (lambda x, t: c + 0 * np.asarray(x, float)))(c) for c in (0, 0, 1.0, 0, 0, 0))
    return {
        "general_variable": EquationSpec.general_variable(s, hs),
        "autonomous_standard": EquationSpec.autonomous_standard(1, (0, 0, 1, 0, 0, -0.75)),
        "cubic_pm": EquationSpec.cubic_pm(-1),
        "quintic_free": EquationSpec.quintic_free(1),
        "quintic_trap": EquationSpec.quintic_trap(-1),
        "cubic_linear_potential": EquationSpec.cubic_linear_potential(0.5),
        "dnls_trap": EquationSpec.dnls_trap(1.0, 0.25),
        "cgl_quintic": EquationSpec.cgl_quintic(0.1, 1, 0.2, -1, 0.3, 0.1, -0.2),
        "piv_trap": EquationSpec.piv_trap(),
    }


@pytest.mark.parametrize("kind", KINDS)
def test_sign_flip_changes_every_kind(kind):
    eq = _sample_specs()[kind]
    f = sign_flip(eq)
    x = np.linspace(-1, 1, 7)
    if eq.is_cgl:
        assert f.params["c3"] == -eq.params["c3"] and f.params["c5"] == -eq.params["c5"]
    elif kind == "piv_trap":
        assert f.kind == "cubic_pm"
    else:
        assert any(np.any(np.asarray(a) != np.asarray(b)) for a, b in zip(eq.h_values(x, 0.2), f.h_values(x, 0.2))) \
            or eq.linear_coeffs(0.2) != f.linear_coeffs(0.2)


def test_sign_flip_of_linear_equations():
    assert sign_flip(EquationSpec.linear_free()).params["sign"] == 1
    s = demo_scenarios()["free"]
    zero = tuple((lambda x, t: 0 * np.asarray(x, float)) for _ in range(6))
    f = sign_flip(EquationSpec.general_variable(s, zero))
    assert float(f.h_funcs[2](np.zeros(1), 0.0)[0]) == 2.0
    auto = sign_flip(EquationSpec.autonomous_standard(0, (0,) * 6))
    assert auto.params["d2"] == 1.0


def test_hamiltonian_of_soliton():
    # focusing cubic sech soliton: E = int |psi_x|^2 - |psi|^4 = 2/3 - 4/3
    x = np.linspace(-30, 30, 4096, endpoint=False)
    psi = 1 / np.cosh(x)
    assert hamiltonian(EquationSpec.cubic_pm(-1), x, psi) == pytest.approx(2 / 3 - 4 / 3, abs=1e-12)
    assert hamiltonian(EquationSpec.dnls_trap(1.0, 0.0), x, psi) is None


def test_unknown_kind():
    with pytest.raises(ValueError, match="unknown equation kind"):
        EquationSpec("heat")
    with pytest.raises(ValueError):
        EquationSpec.cubic_pm(float("nan"))
