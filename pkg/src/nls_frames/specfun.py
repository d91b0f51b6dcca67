"""Special functions: Airy Ai, complex Gamma, the conical 2F1 and reference integrals."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

__all__ = [
    "airy_ai",
    "airy_ai_prime",
    "gamma_complex",
    "arg_gamma",
    "ConicalArgs",
    "conical_2f1",
    "conical_fourier_integral",
    "sech_fourier_integral",
    "sech_fourier_closed",
    "sech_integral_testvectors",
]


def airy_ai(x):
    """Ai(x) for real x (scalar or array)."""
    return special.airy(x)[0]


def airy_ai_prime(x):
    return special.airy(x)[1]


def gamma_complex(w):
    """Gamma at complex ``w``; raises at the poles 0, -1, -2, ..."""
    w = np.asarray(w, dtype=complex)
    bad = (w.imag == 0) & (w.real <= 0) & (np.round(w.real) == w.real)
    if np.any(bad):
        raise ValueError("Gamma has a pole at non-positive integers")
    out = special.gamma(w)
    return complex(out) if out.ndim == 0 else out


def arg_gamma(w):
    """Continuous argument of Gamma (imaginary part of log-Gamma)."""
    return np.imag(special.loggamma(np.asarray(w, dtype=complex)))


@dataclass(frozen=True)
class ConicalArgs:
    omega: float
    theta_arg: float


def _gauss_series(a: complex, b: complex, c: float, z: float, tol=1e-17, nmax=2000) -> complex:
    term = 1.0 + 0.0j
    total = term
    for n in range(nmax):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        total += term
        if abs(term) < tol * max(1.0, abs(total)):
            break
    return total


def _mehler(omega: float, eta: float) -> float:
    """P_{-1/2+i omega}(cosh eta) from Mehler's finite integral.

    The substitution s = eta - v^2 removes the endpoint singularity.
    """
    if eta == 0.0:
        return 1.0
    sq = math.sqrt(eta)
    ch = math.cosh(eta)

    def integrand(v):
        s = eta - v * v
        den = ch - math.cosh(s)
        if den <= 0.0:
            # v -> 0 limit: cosh(eta) - cosh(eta - v^2) ~ sinh(eta) v^2
            return 2.0 * math.cos(omega * eta) / math.sqrt(math.sinh(eta))
        return 2.0 * v * math.cos(omega * s) / math.sqrt(den)

    npts = max(50, int(abs(omega) * eta) + 50)
    with warnings.catch_warnings():
        # the requested 1e-14 floor sits at roundoff; quad warns but the value is fine
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(integrand, 0.0, sq, limit=npts * 4, epsabs=1e-14, epsrel=1e-13)
    return math.sqrt(2.0) / math.pi * val


def conical_2f1(args: ConicalArgs | float, theta: float | None = None) -> float:
    """2F1(1/2 + i w, 1/2 - i w; 1; -sinh^2 theta), real for real (w, theta).

    Accepts ``conical_2f1(ConicalArgs(w, theta))`` or ``conical_2f1(w, theta)``.
    Small arguments use the Gauss series, directly or after the Pfaff map
    z -> z/(z-1); otherwise Mehler's integral for the conical function is used.
    """
    if isinstance(args, ConicalArgs):
        w, th = args.omega, args.theta_arg
    else:
        w, th = float(args), float(theta)
    w = abs(w)
    th = abs(th)
    s2 = math.sinh(th) ** 2
    a = 0.5 + 1j * w
    b = 0.5 - 1j * w
    if s2 <= 0.5 and (w * w + 0.25) * s2 <= 12.0:
        return float(_gauss_series(a, b, 1.0, -s2).real)
    t2 = math.tanh(th) ** 2
    if t2 <= 0.5 and (w * w + 0.25) * t2 <= 12.0:
        # Pfaff: (1 - z)^(-a) 2F1(a, c - b; c; z/(z - 1)), 1 - z = cosh^2 theta
        val = _gauss_series(a, a, 1.0, t2) * np.exp(-2.0 * a * math.log(math.cosh(th)))
        return float(val.real)
    return _mehler(w, 2.0 * th)


def conical_fourier_integral(omega: float, c: float) -> float:
    """Quadrature of  int e^{i w s} / sqrt(cosh s + cosh c) ds  over the real line."""
    ch = math.cosh(c)

    def f(s):
        return 1.0 / math.sqrt(math.cosh(s) + ch)

    # beyond s ~ 80 the integrand is below 1e-17
    val, _ = integrate.quad(f, 0.0, 90.0, weight="cos", wvar=omega, limit=400) if omega else integrate.quad(
        f, 0.0, 90.0, limit=400, epsabs=1e-14, epsrel=1e-13
    )
    return 2.0 * val


def sech_fourier_integral(omega: float) -> float:
    """Quadrature of  int e^{i w s} / sqrt(cosh s) ds."""
    f = lambda s: 1.0 / math.sqrt(math.cosh(s))
    if omega == 0.0:
        val, _ = integrate.quad(f, 0.0, 120.0, limit=400, epsabs=1e-14, epsrel=1e-13)
    else:
        val, _ = integrate.quad(f, 0.0, 120.0, weight="cos", wvar=omega, limit=400)
    return 2.0 * val


def sech_fourier_closed(omega: float) -> float:
    g = gamma_complex(0.25 + 0.5j * omega) * gamma_complex(0.25 - 0.5j * omega)
    return float(g.real) / math.sqrt(2.0 * math.pi)


_PRINTED_ELEMENTARY = {
    "sech": math.pi,
    "u2_sech": math.pi ** 3 / 4.0,
    "sinh2_over_cosh3": 3.0 * math.pi / 8.0,
    "sech3": math.pi / 2.0,
}


def sech_integral_testvectors() -> list[dict]:
    """Quadrature values of four elementary sech-type integrals
    next to their reference closed forms.
    """
    integrands = {
        "sech": lambda u: 1.0 / math.cosh(u),
        "u2_sech": lambda u: u * u / math.cosh(u),
        "sinh2_over_cosh3": lambda u: math.tanh(u) ** 2 / math.cosh(u),
        "sech3": lambda u: 1.0 / math.cosh(u) ** 3,
    }
    rows = []
    for name, fn in integrands.items():
        val, err = integrate.quad(fn, 0.0, 100.0, limit=400, epsabs=1e-14, epsrel=1e-13)
        rows.append(
            {
                "name": name,
                "quadrature": 2.0 * val,
                "reference": _PRINTED_ELEMENTARY[name],
                "abs_diff": abs(2.0 * val - _PRINTED_ELEMENTARY[name]),
            }
        )
    return rows
