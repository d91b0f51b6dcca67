"""Observables: moments, energies, spectra and Wigner functions."""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import Callable

import numpy as np
from scipy import fft as sfft

from .equations import EquationSpec
from .spectral import deriv, workers
from .specfun import conical_2f1, gamma_complex
from .verify import hamiltonian

__all__ = [
    "BoundaryLeakage",
    "MomentReport",
    "moments",
    "spectrum",
    "pulse_spectrum_closed",
    "WignerGrid",
    "wigner_numeric",
    "wigner_closed",
]


class BoundaryLeakage(ValueError):
    pass


def _edge_check(psi, tol):
    amp = np.max(np.abs(psi))
    edge = max(abs(psi[0]), abs(psi[-1]))
    if amp > 0 and edge > tol * amp:
        raise BoundaryLeakage(f"field at the grid edge is {edge / amp:.2e} of its peak")


@dataclass
class MomentReport:
    norm: float
    x_mean: float
    p_mean: float
    x_var: float
    p_var: float
    heisenberg: float
    energy: float | None

    def to_dict(self) -> dict:
        return asdict(self)


def moments(psi, x, eq: EquationSpec | None = None, t: float = 0.0, leak_tol: float = 1e-12) -> MomentReport:
    """Norm, <x>, <p> (p = -i d/dx), variances and energy per unit norm.

    The energy is the Hamiltonian of ``eq`` divided by the norm; for the
    quintic kinds it reads mean|psi_x|^2 (+ mean x^2) - (1/4) mean|psi|^6.
    """
    x = np.asarray(x, dtype=float)
    psi = np.asarray(psi, dtype=complex)
    _edge_check(psi, leak_tol)
    dx = float(x[1] - x[0])
    rho = np.abs(psi) ** 2
    norm = float(np.sum(rho) * dx)
    if norm <= 0:
        raise ValueError("zero field")
    px = deriv(psi, dx, 1)
    xm = float(np.sum(x * rho) * dx / norm)
    pm = float(np.real(np.sum(np.conj(psi) * (-1j) * px)) * dx / norm)
    x2 = float(np.sum(x * x * rho) * dx / norm)
    p2 = float(np.sum(np.abs(px) ** 2) * dx / norm)
    xv = max(x2 - xm * xm, 0.0)
    pv = max(p2 - pm * pm, 0.0)
    en = None
    if eq is not None:
        H = hamiltonian(eq, x, psi, t)
        en = None if H is None else H / norm
    return MomentReport(norm, xm, pm, xv, pv, xv * pv, en)


def spectrum(psi, x, alias_tol: float = 1e-10, leak_tol: float = 1e-12):
    """B(p) = (2 pi)^{-1/2} int e^{-ipx} psi(x) dx on the FFT momentum grid (sorted)."""
    x = np.asarray(x, dtype=float)
    psi = np.asarray(psi, dtype=complex)
    _edge_check(psi, leak_tol)
    n = x.size
    dx = float(x[1] - x[0])
    p = 2 * np.pi * sfft.fftfreq(n, d=dx)
    B = dx / math.sqrt(2 * math.pi) * np.exp(-1j * p * x[0]) * sfft.fft(psi, workers=workers())
    order = np.argsort(p)
    p, B = p[order], B[order]
    e = np.abs(B) ** 2
    tail = np.abs(p) > 0.9 * np.max(np.abs(p))
    frac = float(np.sum(e[tail]) / np.sum(e)) if np.sum(e) > 0 else 0.0
    if frac > alias_tol:
        raise ValueError(f"spectral tail energy fraction {frac:.2e} exceeds {alias_tol:.0e} (aliasing)")
    return p, B


def pulse_spectrum_closed(p, t, phi: float, v: float, k: float):
    """Gamma-product plane-wave amplitude of the quintic pulse."""
    p = np.asarray(p, dtype=float)
    q = (p - v / 2) / (2 * k)
    G = gamma_complex(0.25 + 1j * q) * gamma_complex(0.25 - 1j * q)
    return np.exp(1j * phi) / (2 * math.pi * math.sqrt(k)) * np.exp(1j * ((v * v + k * k) / 4 - p * v) * t) * G


@dataclass
class WignerGrid:
    x: np.ndarray
    p: np.ndarray
    W: np.ndarray  # W[i, j] = W(x[i], p[j])
    t: float
    imag_residue: float = 0.0

    def to_csv(self) -> str:
        rows = ["x,p,W"]
        for i, xi in enumerate(self.x):
            for j, pj in enumerate(self.p):
                rows.append(f"{xi!r},{pj!r},{self.W[i, j]!r}")
        return "\n".join(rows) + "\n"

    def metadata(self) -> dict:
        return {
            "t": self.t,
            "x": [float(self.x[0]), float(self.x[-1]), int(self.x.size)],
            "p": [float(self.p[0]), float(self.p[-1]), int(self.p.size)],
            "imag_residue": self.imag_residue,
        }


def wigner_numeric(psi: Callable, t: float, x_grid, p_grid, y_max: float = 40.0, dy: float = 0.01,
                   imag_tol: float = 1e-8) -> WignerGrid:
    """W(x,p) = (1/2pi) int conj(psi(x + y/2)) psi(x - y/2) e^{ipy} dy by the trapezoid rule.

    ``psi`` is a callable psi(x, t) so the y-line can be sampled at any x.
    """
    x_grid = np.asarray(x_grid, dtype=float)
    p_grid = np.asarray(p_grid, dtype=float)
    y = np.arange(-y_max, y_max + dy / 2, dy)
    E = np.exp(1j * np.outer(p_grid, y))
    Wc = np.empty((x_grid.size, p_grid.size), dtype=complex)
    for i, xi in enumerate(x_grid):
        f = np.conj(psi(xi + y / 2, t)) * psi(xi - y / 2, t)
        if max(abs(f[0]), abs(f[-1])) > 1e-14 * max(np.max(np.abs(f)), 1e-300):
            raise ValueError("y-window too small: integrand has not decayed at its ends")
        Wc[i] = E @ f * dy / (2 * math.pi)
    scale = max(np.max(np.abs(Wc)), 1e-300)
    resid = float(np.max(np.abs(Wc.imag)) / scale)
    if resid > imag_tol:
        raise ValueError(f"imaginary residue {resid:.2e} exceeds {imag_tol:.0e}")
    return WignerGrid(x_grid, p_grid, Wc.real, float(t), resid)


def _wigner_params(family: str, params: dict, x, p, t):
    k = params["k"]
    v = params.get("v", 0.0)
    if family == "osc_pulse":
        c, s = math.cos(2 * t), math.sin(2 * t)
        w = (p * c + x * s - v) / (2 * k)
        th = 2 * k / c * (x - v * s)
        return w, th
    if family == "osc_pulse_general":
        a0, b0 = params.get("alpha0", 0.0), params.get("beta0", 1.0)
        d0, e0 = params.get("delta0", 0.0), params.get("eps0", 0.0)
        c, s = math.cos(2 * t), math.sin(2 * t)
        w = ((p - 2 * a0 * x) * c + (2 * a0 * p + x) * s - d0 - v * b0) / (2 * k * b0)
        th = 2 * k * (b0 * (x - (d0 + v * b0) * s) / (2 * a0 * s + c) + e0)
        return w, th
    if family == "quintic_pulse":
        # sech-type packet of width 1/k carried at momentum v/2
        w = (p - v / 2) / k
        th = k * (x - v * t)
        return w, th
    raise ValueError(f"no closed Wigner form for {family}")


def wigner_closed(family: str, params: dict, x, p, t: float, printed: bool = False) -> np.ndarray:
    """sech(pi w) 2F1(1/2 + iw, 1/2 - iw; 1; -sinh^2 theta) on the (x, p) mesh.

    The Fourier integral behind this form produces sech(pi w); ``printed=True``
    evaluates the variant with sech(w), which does not match the numeric transform.
    """
    if family in ("osc_pulse", "osc_pulse_general") and abs(math.cos(2 * t)) < 1e-12:
        raise ValueError("turning point: closed form not evaluated")
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    X, P = np.meshgrid(x, p, indexing="ij")
    w, th = _wigner_params(family, params, X, P, t)
    fac = 1.0 if printed else math.pi
    out = np.empty(X.shape)
    for idx in np.ndindex(X.shape):
        wi = float(w[idx])
        out[idx] = conical_2f1(wi, float(th[idx])) / math.cosh(fac * wi)
    return out
