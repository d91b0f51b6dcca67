import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from nls_frames.specfun import (
    ConicalArgs,
    airy_ai,
    airy_ai_prime,
    sech_integral_testvectors,
    arg_gamma,
    conical_2f1,
    conical_fourier_integral,
    gamma_complex,
    sech_fourier_closed,
    sech_fourier_integral,
)

mp.mp.dps = 30


def ref_2f1(w, th):
    return float(mp.re(mp.hyp2f1(0.5 + 1j * w, 0.5 - 1j * w, 1, -mp.sinh(th) ** 2)))


# one point per evaluation branch: direct series, Pfaff series, Mehler integral
@pytest.mark.parametrize("w, th", [(0.3, 0.2), (2.0, 0.5), (0.5, 0.9), (1.5, 2.5), (6.0, 1.2), (0.0, 4.0)])
def test_conical_against_mpmath(w, th):
    assert conical_2f1(w, th) == pytest.approx(ref_2f1(w, th), rel=1e-10, abs=1e-13)
    assert conical_2f1(ConicalArgs(w, th)) == conical_2f1(w, th)


@given(st.floats(0, 6), st.floats(0, 3))
def test_conical_even_and_against_mpmath(w, th):
    v = conical_2f1(w, th)
    assert conical_2f1(-w, -th) == v
    assert v == pytest.approx(ref_2f1(w, th), rel=1e-9, abs=1e-12)


def test_conical_at_zero_argument():
    assert conical_2f1(1.7, 0.0) == 1.0


@given(st.floats(0.1, 5), st.floats(-5, 5))
def test_gamma_against_mpmath(re, im):
    z = complex(re, im)
    assert abs(gamma_complex(z) - complex(mp.gamma(z))) <= 1e-13 * abs(complex(mp.gamma(z)))


def test_gamma_poles_raise():
    for z in (0, -1, -2.0, -7):
        with pytest.raises(ValueError):
            gamma_complex(z)


def test_arg_gamma_is_continuous():
    w = 0.5 + 1j * np.linspace(0, 20, 2001)
    a = arg_gamma(w)
    assert np.max(np.abs(np.diff(a))) < 0.05
    assert a[-1] == pytest.approx(float(mp.im(mp.loggamma(w[-1]))), rel=1e-12)


def test_airy_frozen():
    # values from mpmath at 30 digits
    assert airy_ai(0.0) == pytest.approx(float(mp.airyai(0)), rel=1e-14)
    assert airy_ai(8.0) == pytest.approx(float(mp.airyai(8)), rel=1e-12)
    assert airy_ai_prime(-3.0) == pytest.approx(float(mp.airyai(-3, derivative=1)), rel=1e-12)


@pytest.mark.parametrize("w", [0.0, 0.5, 1.0, 2.5])
def test_sech_fourier_dual_route(w):
    q = sech_fourier_integral(w)
    c = sech_fourier_closed(w)
    assert abs(q - c) < 1e-9
    ref = 2 * float(mp.quadosc(lambda s: mp.cos(w * s) / mp.sqrt(mp.cosh(s)), [0, mp.inf], omega=max(w, 0.5)))
    assert abs(c - ref) < 1e-12


@pytest.mark.parametrize("w, c", [(0.0, 0.0), (0.7, 0.4), (1.3, 1.0)])
def test_conical_fourier_vs_mpmath(w, c):
    ref = float(mp.quad(lambda s: mp.cos(w * s) / mp.sqrt(mp.cosh(s) + mp.cosh(c)), [-mp.inf, 0, mp.inf]))
    assert conical_fourier_integral(w, c) == pytest.approx(ref, rel=1e-9)


def test_sech_integral_rows():
    rows = {r["name"]: r for r in sech_integral_testvectors()}
    assert set(rows) == {"sech", "u2_sech", "sinh2_over_cosh3", "sech3"}
    assert rows["sech"]["abs_diff"] < 1e-12
    assert rows["u2_sech"]["abs_diff"] < 1e-12
    assert rows["sech3"]["abs_diff"] < 1e-12
    # tanh^2 sech integrates to pi - pi/2
    assert rows["sinh2_over_cosh3"]["quadrature"] == pytest.approx(math.pi / 2, abs=1e-12)
