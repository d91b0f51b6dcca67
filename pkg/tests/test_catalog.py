import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nls_frames import catalog as cat
from nls_frames.painleve import integrate_pii, seed_from_airy
from nls_frames.verify import residual, sign_flip


def _res(h, x, ts, eq=None, **kw):
    eq = eq or h.equation
    return residual(eq, h, x, ts, singular_times=h.singular_times((ts[0], ts[-1])), **kw).rel_residual_sup


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(0.5, 2.0))
def test_quintic_pulse_residual_and_control(phi, v, k):
    h = cat.quintic_pulse(phi, v, k)
    L = 60 / k
    x = np.linspace(-L, L, 4096, endpoint=False)
    ts = np.linspace(0.0, 0.3, 4)
    assert _res(h, x, ts) < 1e-7
    assert _res(h, x, ts, sign_flip(h.equation)) > 1e-2


def test_quintic_source_residual_with_window():
    h = cat.quintic_source(0.1, 0.3, 1.0)
    x = np.linspace(-20, 20, 2048, endpoint=False)
    assert _res(h, x, np.linspace(0, 0.3, 4), taper=3.0) < 1e-7
    with pytest.raises(ValueError, match="pairing"):
        cat.quintic_source(0.0, 0.0, 1.0, pairing="upper")


def test_osc_families_residual():
    x = np.linspace(-20, 20, 2048, endpoint=False)
    ts = np.linspace(-0.6, 0.6, 7)
    assert _res(cat.osc_pulse(0.2, 0.5, 1.5), x, ts) < 1e-7
    assert _res(cat.osc_pulse_general(0.2, 0.5, 1.5, (0.1, 0.9, 0.2, -0.1)), x, np.linspace(0, 0.5, 6)) < 1e-7
    assert _res(cat.osc_source(0.0, 0.2, 1.0), x, ts, taper=3.0) < 1e-7


def test_turning_point_is_excluded():
    h = cat.osc_pulse(0.0, 0.0, 1.0)
    with pytest.raises(ValueError, match="singular"):
        h(np.zeros(2), math.pi / 4)
    st_ = h.singular_times((0, 2))
    np.testing.assert_allclose(st_[:3], [-math.pi / 4, math.pi / 4, 3 * math.pi / 4])


def test_free_to_trap_gauge_matches_osc_pulse_modulus():
    base = cat.quintic_pulse(0.0, 0.0, 1.5)
    g = cat.gauge_free_to_trap(base)
    x = np.linspace(-6, 6, 101)
    direct = cat.osc_pulse(0.0, 0.0, 0.75)
    for t in (0.1, 0.3):
        np.testing.assert_allclose(np.abs(g(x, t)), np.abs(direct(x, t)), rtol=1e-12)


def test_blowup_family_window_and_norm():
    base = cat.quintic_pulse(0.0, 0.0, 1.5)
    h = cat.blowup_family(base, (-0.25, 1.0, 0.0, 0.0, 0.0, 0.0))
    assert h.params["t_blowup"] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        h(np.zeros(1), 1.0)
    x = np.linspace(-0.5, 0.5, 200001)
    m = np.abs(h(x, 0.99)) ** 2
    assert np.trapezoid(m, x) == pytest.approx(math.pi, rel=1e-6)
    with pytest.raises(ValueError):
        cat.blowup_family(cat.osc_pulse(0, 0, 1), (0, 1, 0, 0, 0, 0))


def test_group_orbit_shape_preserving_flag():
    base = cat.osc_pulse(0.2, 0.5, 1.5)
    h = cat.group_orbit_trap(base, (0.0, 1.0, 0.0, 0.3, 0.0, 0.0))
    assert h.params["shape_preserving"]
    x = np.linspace(-20, 20, 2048, endpoint=False)
    assert _res(h, x, np.linspace(0, 0.5, 6)) < 1e-7
    with pytest.raises(ValueError):
        cat.group_orbit_trap(base, (0.0, 1.0, 0.1, 0.0, 0.0, 0.0))


def test_pii_and_airy_packets():
    x = np.linspace(-40, 40, 2048, endpoint=False)
    ts = np.linspace(0, 0.2, 3)
    prof = integrate_pii("defocusing", seed_from_airy(0.9, 8.0), 8.0, -80.0, 0.9)
    h = cat.pii_packet(1.0, 0.5, prof)
    assert h.equation.kind == "cubic_pm"
    assert _res(h, x, ts, taper=8.0) < 1e-6
    a = cat.airy_berry(1.0, 0.3)
    assert _res(a, x, ts, taper=8.0) < 1e-6
    with pytest.raises(ValueError):
        cat.pii_packet(-1.0, 0.0, None)


def test_airy_expansion_forms():
    x = np.linspace(-30, 30, 2048, endpoint=False)
    assert _res(cat.airy_expansion(1.0, 1.5), x, np.linspace(0, 0.5, 3), taper=6.0) < 1e-6
    assert _res(cat.airy_expansion(1.0, 0.0), x, np.linspace(0.5, 1.0, 3), taper=6.0) < 1e-6


@given(st.floats(0.2, 2.0), st.floats(0.5, 3.0), st.floats(-3, 3), st.floats(-5, 0.9))
def test_airy_gun_newton_and_orbit(g, t1, x0, frac):
    gun = cat.airy_gun(g, t1, x0)
    t = frac * t1
    scale = 1 + abs(gun.x(t)) + abs(gun.C2) / (t1 - t) ** 2
    assert abs(gun.newton_residual(t)) < 1e-10 * scale * (1 + (t1 - t) ** 2)
    P = gun.velocity(t) + gun.C1
    if abs(P) > 1e-6:
        assert abs(gun.orbit_residual(t)) < 1e-8 * (1 + abs(gun.C1) + abs(P) + gun.C1**2 / abs(P) + scale**2 / abs(gun.C2))


def test_airy_gun_frozen_values():
    gun = cat.airy_gun(1.0, 1.5, -2.25)
    assert gun.C1 == pytest.approx(0.0, abs=1e-15)
    assert gun.C2 == pytest.approx(3.375)
    assert gun.x(0.0) == pytest.approx(-2.25)
    with pytest.raises(ValueError):
        cat.airy_gun(1.0, 0.0, 0.0)


def test_elliptic_profile_first_integral():
    p = cat.elliptic_profile(-1.0, -2.0, 1.5, z_max=15.0)
    assert p.first_integral_drift < 1e-10
    z = np.linspace(-15, 15, 301)
    assert np.max(np.abs(p(z))) <= _amp_bound(-1.0, -2.0, 1.5) + 1e-12
    with pytest.raises(ValueError):
        p(np.array([20.0]))


def _amp_bound(g0, h0, C0):
    disc = g0 * g0 - 2 * h0 * C0
    return math.sqrt(max((-g0 + s * math.sqrt(disc)) / h0 for s in (1, -1)))


def test_descriptor_is_json():
    h = cat.osc_pulse(0.2, 0.5, 1.5)
    d = json.loads(h.descriptor_json())
    assert d["family"] == "osc_pulse" and d["d_consts"][0] == 1
    prof = integrate_pii("defocusing", seed_from_airy(0.5, 8.0), 8.0, -20.0, 0.5)
    cv = cat.const_velocity_packet(0.5, 0.0, prof)
    with pytest.raises(ValueError, match="standard form"):
        cv.standard_form()
    with pytest.raises(ValueError):
        cat.const_velocity_packet(0.5, 0.0, None)
