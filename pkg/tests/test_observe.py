import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nls_frames import catalog as cat
from nls_frames.observe import (
    BoundaryLeakage,
    moments,
    pulse_spectrum_closed,
    spectrum,
    wigner_closed,
    wigner_numeric,
)

X = np.linspace(-30, 30, 4096, endpoint=False)


def test_gaussian_moments():
    psi = np.exp(-(X - 1.0) ** 2 / 2 + 0.7j * X)
    m = moments(psi, X)
    assert m.norm == pytest.approx(math.sqrt(math.pi), rel=1e-13)
    assert m.x_mean == pytest.approx(1.0, abs=1e-12)
    assert m.p_mean == pytest.approx(0.7, abs=1e-12)
    assert m.x_var == pytest.approx(0.5, abs=1e-12)
    assert m.p_var == pytest.approx(0.5, abs=1e-12)
    assert m.heisenberg == pytest.approx(0.25, abs=1e-12)
    assert m.energy is None


@given(
    st.lists(st.tuples(st.floats(-4, 4), st.floats(0.5, 2.0), st.floats(-2, 2), st.floats(-1, 1)), min_size=1, max_size=4)
)
def test_heisenberg_floor(terms):
    psi = sum(c * np.exp(-((X - x0) ** 2) / (2 * w * w) + 1j * p0 * X) for x0, w, p0, c in terms)
    if np.max(np.abs(psi)) < 1e-3:
        return
    m = moments(psi, X)
    assert m.heisenberg >= 0.25 - 1e-9


def test_leakage_detected():
    with pytest.raises(BoundaryLeakage):
        moments(np.ones_like(X), X)


def test_gaussian_spectrum():
    p, B = spectrum(np.exp(-X * X / 2), X)
    np.testing.assert_allclose(B, np.exp(-p * p / 2), atol=1e-13)


def test_aliasing_guard():
    xs = np.linspace(-10, 10, 64, endpoint=False)
    with pytest.raises(ValueError, match="aliasing"):
        spectrum(np.exp(-xs * xs * 20), xs)


def test_pulse_energy_and_spectrum():
    h = cat.quintic_pulse(0.3, 0.7, 1.5)
    x = np.linspace(-40, 40, 8192, endpoint=False)
    psi = h(x, 0.2)
    m = moments(psi, x, h.equation, 0.2)
    assert m.energy == pytest.approx(0.7**2 / 4, abs=1e-8)
    p, B = spectrum(psi, x)
    sel = np.abs(p - 0.35) < 15
    np.testing.assert_allclose(B[sel], pulse_spectrum_closed(p[sel], 0.2, 0.3, 0.7, 1.5), atol=1e-8)


def test_wigner_numeric_gaussian():
    psi = lambda x, t: math.pi ** -0.25 * np.exp(-x * x / 2)
    xg = np.linspace(-2, 2, 9)
    pg = np.linspace(-2, 2, 9)
    g = wigner_numeric(psi, 0.0, xg, pg, y_max=20.0, dy=0.01)
    ref = np.exp(-xg[:, None] ** 2 - pg[None, :] ** 2) / math.pi
    np.testing.assert_allclose(g.W, ref, atol=1e-12)
    assert g.to_csv().splitlines()[0] == "x,p,W"
    assert g.metadata()["x"] == [-2.0, 2.0, 9]


def test_wigner_closed_vs_numeric_quintic():
    params = {"phi": 0.0, "v": 0.4, "k": 1.2}
    h = cat.quintic_pulse(**params)
    xg = np.linspace(-1.5, 1.5, 5)
    pg = np.linspace(-2, 2, 5)
    num = wigner_numeric(h, 0.1, xg, pg, y_max=80.0, dy=0.005)
    closed = wigner_closed("quintic_pulse", params, xg, pg, 0.1)
    # closed form is normalised to 1 at its peak; compare shapes
    r = num.W / closed
    assert np.std(r) / abs(np.mean(r)) < 1e-8


def test_wigner_window_and_turning_point():
    h = cat.quintic_pulse(0.0, 0.0, 1.0)
    with pytest.raises(ValueError, match="y-window"):
        wigner_numeric(h, 0.0, [0.0], [0.0], y_max=3.0)
    with pytest.raises(ValueError, match="turning"):
        wigner_closed("osc_pulse", {"k": 1.0}, [0.0], [0.0], math.pi / 4)
    with pytest.raises(ValueError):
        wigner_closed("pii_packet", {"k": 1.0}, [0.0], [0.0], 0.0)
