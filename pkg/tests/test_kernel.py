import numpy as np
import pytest
from hypothesis import given, strategies as st

from nls_frames.coeffs import demo_scenarios
from nls_frames.kernel import (
    KERNEL_FIELDS,
    InitData,
    build_kernel,
    complex_frame,
    fundamental_kernel,
    fundamental_pair,
    integrate_riccati_direct,
    kernel_from_frame_ermakov,
    quasi_invariants,
)

FREE = demo_scenarios()["free"]


def free_closed(init: InitData, t):
    """Hand solution of the kernel system for a = 1 and all other coefficients zero."""
    q = 1 + 4 * init.alpha * t
    return {
        "mu": init.mu * q,
        "alpha": init.alpha / q,
        "beta": init.beta / q,
        "gamma": init.gamma - init.beta**2 * t / q,
        "delta": init.delta / q,
        "eps": init.eps - 2 * init.delta * init.beta * t / q,
        "kappa": init.kappa - init.delta**2 * t / q,
    }


inits = st.builds(
    InitData,
    mu=st.floats(0.3, 3.0),
    alpha=st.floats(-0.2, 0.5),
    beta=st.floats(0.3, 2.0),
    gamma=st.floats(-1, 1),
    delta=st.floats(-1, 1),
    eps=st.floats(-1, 1),
    kappa=st.floats(-1, 1),
)


@pytest.mark.parametrize("method", ["superpose", "complex", "direct"])
@given(init=inits)
def test_free_kernel_matches_hand_solution(method, init):
    t = np.linspace(0, 1, 41)
    k = build_kernel(FREE, init, 0, t, method=method)
    ref = free_closed(init, t)
    for f in KERNEL_FIELDS:
        np.testing.assert_allclose(getattr(k, f), ref[f], rtol=1e-9, atol=1e-9, err_msg=f)


def test_free_caustic_time():
    init = InitData(alpha=-0.25)
    k = integrate_riccati_direct(FREE, init, 0, np.linspace(0, 1, 101))
    assert k.events and k.events[0].kind == "caustic"
    assert k.events[0].t == pytest.approx(1.0, abs=1e-8)
    assert np.isnan(k.mu[-1]) or k.mu[-1] < 1e-8


@given(init=inits)
def test_superpose_matches_direct_on_varying(init):
    s = demo_scenarios()["varying"]
    t = np.linspace(0, 1, 51)
    ks = build_kernel(s, init, 0, t, "superpose")
    kd = build_kernel(s, init, 0, t, "direct")
    m = ks.valid & kd.valid
    if m.sum() < 10:
        return
    for f, v in ks.sup_diff(kd, mask=m).items():
        assert v < 1e-7, f


def test_oscillator_quasi_invariants():
    s = demo_scenarios()["trap"]
    init = InitData(mu=1.3, alpha=0.2, beta=0.8, gamma=0.1, delta=-0.3, eps=0.4, kappa=0.05)
    t = np.linspace(0, 1.2, 241)
    pair = fundamental_pair(s, t, c0=1, beta0_init=init.beta, mu0_init=init.mu, alpha0_init=init.alpha)
    k0 = fundamental_kernel(s, pair)
    fr = complex_frame(init, pair, k0)
    k = kernel_from_frame_ermakov(fr, k0, init)
    q = quasi_invariants(k, k0, fr)
    assert q["ratio_identity"] < 1e-8
    assert q["circle_invariant"] < 1e-8
    assert q["kappa_identity"] < 1e-8
    kd = integrate_riccati_direct(s, init, 1, t)
    assert max(k.sup_diff(kd).values()) < 1e-8


def test_initdata_validation():
    with pytest.raises(ValueError):
        InitData(beta=0.0)
    with pytest.raises(ValueError):
        InitData(mu=-1.0)
    assert InitData.from_any([1, 0, 1, 0, 0, 0, 0]) == InitData()
    assert InitData.from_any({"alpha": 0.1}).alpha == 0.1


def test_pair_grid_validation():
    with pytest.raises(ValueError):
        fundamental_pair(FREE, [0.0])
    with pytest.raises(ValueError):
        fundamental_pair(FREE, [0.0, 0.5, 0.4])


def test_csv_and_sidecar():
    k = build_kernel(FREE, InitData(), 0, np.linspace(0, 1, 5))
    lines = k.to_csv().splitlines()
    assert lines[0] == "t,mu,alpha,beta,gamma,delta,eps,kappa,valid_flag"
    assert len(lines) == 6
    side = k.sidecar()
    assert side["n_samples"] == 5 and side["n_invalid"] == 0
