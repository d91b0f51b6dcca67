"""Gauge substitution in both directions and the constant-to-coefficient map.

A standard-form field chi(xi, tau) solves

    -i chi_tau + chi_xixi - c0 xi^2 chi = N_d(chi),
    N_d = d0 chi + (d1 xi + d2)|chi|^2 chi + i d3 |chi|^2 chi_xi
          + i d4 chi^2 conj(chi_xi) + d5 |chi|^4 chi,

and is carried to psi(x, t) = exp(i S) chi(beta x + eps, gamma) / sqrt(mu),
S = alpha x^2 + delta x + kappa. Catalog solutions written with +i A_t map
to the standard form through chi(xi, tau) = A(xi, -tau); ``standard_form``
does that flip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import RectBivariateSpline
from scipy.optimize import brentq

from .coeffs import Scenario
from .equations import EquationSpec, WaveField
from .kernel import TransformKernel

__all__ = [
    "CausticError",
    "NonlinearityMap",
    "standard_form",
    "push_forward",
    "push_forward_fn",
    "pull_back",
    "pull_back_fn",
    "nonlinearity_map",
    "integrability_h",
    "adiabatic_residual",
    "painleve_property",
    "kundu_gauge",
]


class CausticError(ValueError):
    """The kernel is singular (or undefined) somewhere on the requested range."""


def standard_form(A: Callable) -> Callable:
    """chi(xi, tau) = A(xi, -tau) for a solution of i A_t + A_xx - c0 x^2 A = N_d(A)."""
    return lambda xi, tau: A(xi, -tau)


def _kernel_at(k: TransformKernel, t) -> dict:
    v = k.at(t)
    mu = np.asarray(v["mu"])
    bad = ~np.isfinite(mu) | (mu <= 0)
    for f in ("alpha", "beta", "gamma", "delta", "eps", "kappa"):
        bad |= ~np.isfinite(np.asarray(v[f]))
    if np.any(bad):
        tt = np.atleast_1d(t)[np.atleast_1d(bad)]
        raise CausticError(f"kernel singular or undefined at t={float(tt[0]):.12g}")
    return v


def _field_fn(chi):
    """Callable view of a WaveField (quintic splines on real and imaginary parts)."""
    if callable(chi):
        return chi, None
    xs, ts = chi.x, chi.t
    kx = min(5, xs.size - 1)
    kt = min(5, ts.size - 1)
    sr = RectBivariateSpline(ts, xs, chi.values.real, kx=kt, ky=kx)
    si = RectBivariateSpline(ts, xs, chi.values.imag, kx=kt, ky=kx)

    def fn(x, t):
        x = np.asarray(x, dtype=float)
        tt = np.broadcast_to(np.asarray(t, dtype=float), x.shape)
        return sr.ev(tt, x) + 1j * si.ev(tt, x)

    return fn, (ts[0], ts[-1], xs[0], xs[-1])


def push_forward_fn(k: TransformKernel, chi) -> Callable:
    """psi(x, t) as a callable; t is a scalar, x an array."""
    fn, box = _field_fn(chi)

    def psi(x, t):
        v = _kernel_at(k, t)
        x = np.asarray(x, dtype=float)
        mu, al, be, ga, de, ep, ka = (float(np.ravel(v[f])[0]) for f in ("mu", "alpha", "beta", "gamma", "delta", "eps", "kappa"))
        xi = be * x + ep
        if box is not None and not (box[0] - 1e-12 <= ga <= box[1] + 1e-12):
            raise ValueError(f"tau={ga:.6g} outside the sampled range of chi")
        S = al * x * x + de * x + ka
        return np.exp(1j * S) * fn(xi, ga) / math.sqrt(mu)

    return psi


def push_forward(k: TransformKernel, chi, x, t) -> WaveField:
    psi = push_forward_fn(k, chi)
    meta = {"kernel": k.sidecar()}
    return WaveField.from_function(psi, x, t, meta=meta)


def _gamma_inverse(k: TransformKernel, t_range):
    """t(tau) on a range where gamma is strictly monotone."""
    tt = np.linspace(t_range[0], t_range[1], 257)
    g = np.asarray(_kernel_at(k, tt)["gamma"], dtype=float)
    dg = np.diff(g)
    if not (np.all(dg > 0) or np.all(dg < 0)):
        raise ValueError("gamma is not strictly monotone on the requested range")

    def inv(tau):
        j = np.searchsorted(g if dg[0] > 0 else -g, tau if dg[0] > 0 else -tau)
        j = min(max(j, 1), tt.size - 1)
        if not (min(g[j - 1], g[j]) - 1e-14 <= tau <= max(g[j - 1], g[j]) + 1e-14):
            raise ValueError(f"tau={tau:.6g} outside gamma image")
        f = lambda s: float(np.ravel(k.at(s)["gamma"])[0]) - tau
        lo, hi = tt[j - 1], tt[j]
        flo, fhi = f(lo), f(hi)
        if flo == 0.0:
            return lo
        if fhi == 0.0 or flo * fhi > 0:
            return hi if abs(fhi) <= abs(flo) else lo
        return brentq(f, lo, hi, xtol=1e-15, rtol=1e-15)

    return inv


def pull_back_fn(k: TransformKernel, psi, t_range) -> Callable:
    """chi(xi, tau) = sqrt(mu) exp(-i S) psi((xi - eps)/beta, t(tau))."""
    fn, _ = _field_fn(psi)
    inv = _gamma_inverse(k, t_range)

    def chi(xi, tau):
        t = inv(float(tau))
        v = _kernel_at(k, t)
        mu, al, be, ga, de, ep, ka = (float(np.ravel(v[f])[0]) for f in ("mu", "alpha", "beta", "gamma", "delta", "eps", "kappa"))
        x = (np.asarray(xi, dtype=float) - ep) / be
        S = al * x * x + de * x + ka
        return math.sqrt(mu) * np.exp(-1j * S) * fn(x, t)

    return chi


def pull_back(k: TransformKernel, psi, xi, tau, t_range=None) -> WaveField:
    if t_range is None:
        if isinstance(psi, WaveField):
            t_range = (psi.t[0], psi.t[-1])
        else:
            raise ValueError("t_range is required for a callable psi")
    chi = pull_back_fn(k, psi, t_range)
    return WaveField.from_function(chi, xi, tau, meta={"kernel": k.sidecar()}, coords=("xi", "tau"))


# ---------------------------------------------------------------------------


@dataclass
class NonlinearityMap:
    d_consts: tuple  # (c0, d0, ..., d5)
    h_funcs: tuple
    S: Callable
    kernel: TransformKernel = field(repr=False)
    scenario: Scenario = field(repr=False)

    def equation(self) -> EquationSpec:
        return EquationSpec.general_variable(self.scenario, self.h_funcs)


def nonlinearity_map(k: TransformKernel, s: Scenario, d) -> NonlinearityMap:
    """Variable coefficients h0..h5 produced by the kernel from constants (c0, d0..d5).

    Real kernels only (Im S = 0); the constants may be complex.
    """
    d = tuple(d)
    if len(d) != 7:
        raise ValueError("expected (c0, d0, d1, d2, d3, d4, d5)")
    c0 = int(d[0])
    if c0 != k.c0_flag:
        raise ValueError(f"kernel was built with c0={k.c0_flag}, constants have c0={c0}")
    d0, d1, d2, d3, d4, d5 = d[1:]

    def kv(t):
        v = _kernel_at(k, t)
        return {f: np.asarray(v[f]).reshape(np.shape(t)) for f in v}

    def h0(x, t):
        v = kv(t)
        return d0 * s.a(t) * v["beta"] ** 2 + 0 * x

    def h1(x, t):
        v = kv(t)
        b, m, al = v["beta"], v["mu"], v["alpha"]
        return s.a(t) * b * b * m * (d1 * b + 2 * al * (d3 - d4) / b) + 0 * x

    def h2(x, t):
        v = kv(t)
        b, m = v["beta"], v["mu"]
        return s.a(t) * b * b * m * (d1 * v["eps"] + d2 + v["delta"] * (d3 - d4) / b) + 0 * x

    def h3(x, t):
        v = kv(t)
        return d3 * s.a(t) * v["beta"] * v["mu"] + 0 * x

    def h4(x, t):
        v = kv(t)
        return d4 * s.a(t) * v["beta"] * v["mu"] + 0 * x

    def h5(x, t):
        v = kv(t)
        return d5 * s.a(t) * (v["beta"] * v["mu"]) ** 2 + 0 * x

    def S(x, t):
        v = kv(t)
        return v["alpha"] * x * x + v["delta"] * x + v["kappa"]

    return NonlinearityMap(d, (h0, h1, h2, h3, h4, h5), S, k, s)


def _lambda(s: Scenario, t0: float, t) -> np.ndarray:
    """lambda(t) = exp(int_{t0}^t (2d - c))."""
    out = []
    for ti in np.atleast_1d(t):
        val, _ = quad(lambda u: 2 * s.d(u) - s.c(u), t0, float(ti), epsabs=1e-14, epsrel=1e-13, limit=200)
        out.append(math.exp(val))
    return np.array(out)


def integrability_h(s: Scenario, k: TransformKernel, h0: float, p: float, t=None, tol: float = 1e-12) -> dict:
    """Coefficient h(t) making |psi|^p psi integrable, from both equivalent expressions."""
    t = k.t if t is None else np.asarray(t, dtype=float)
    v = k.at(t)
    mu = np.asarray(v["mu"])
    if np.any(~np.isfinite(mu)) or np.any(mu <= 0):
        raise CausticError("mu must be positive on the range")
    a = s.a(t)
    form1 = h0 * a * v["beta"] ** 2 * mu ** (p / 2)
    lam = _lambda(s, k.t[0], t)
    i0 = k.init
    form2 = h0 * i0.beta**2 * i0.mu**2 * a * lam**2 / mu ** (2 - p / 2)
    scale = np.maximum(np.abs(form1), 1e-300)
    dev = float(np.max(np.abs(form1 - form2) / scale))
    if dev > tol:
        raise AssertionError(f"the two expressions for h disagree by {dev:.3e}")
    return {"t": t, "h": form1, "h_alt": form2, "rel_dev": dev}


_FD4 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0


def adiabatic_residual(s: Scenario, k: TransformKernel, h: Callable, p: float, t=None, step: float = 1e-3) -> dict:
    """d/dt [h / (a beta^2 mu^{p/2})] by 4th-order centered differences."""
    t = k.t[2:-2] if t is None else np.asarray(t, dtype=float)

    def q(tt):
        v = k.at(tt)
        return np.asarray(h(tt)) / (s.a(tt) * v["beta"] ** 2 * np.asarray(v["mu"]) ** (p / 2))

    vals = sum(c * q(t + j * step) for c, j in zip(_FD4, (-2, -1, 0, 1, 2))) / step
    return {"t": t, "residual": vals, "sup": float(np.max(np.abs(vals)))}


def painleve_property(d, tol: float = 1e-12) -> bool:
    """d5 = d4 (2 d4 - d3) / 4."""
    d3, d4, d5 = d
    return abs(d5 - d4 * (2 * d4 - d3) / 4) <= tol


def kundu_gauge(chi: WaveField, nu: float, xi0: float) -> WaveField:
    """phi = chi exp(+i nu int_{xi0}^{xi} |chi|^2), row by row."""
    xi = chi.x
    m2 = np.abs(chi.values) ** 2
    cum = np.concatenate([np.zeros((m2.shape[0], 1)), np.cumsum(0.5 * (m2[:, 1:] + m2[:, :-1]) * np.diff(xi), axis=1)], axis=1)
    base = np.array([np.interp(xi0, xi, row) for row in cum])
    phase = nu * (cum - base[:, None])
    return WaveField(xi, chi.t, chi.values * np.exp(1j * phase), dict(chi.meta), chi.coords)
