"""FFT helpers shared by the residual engine, the propagator and observables."""

from __future__ import annotations

import os

import numpy as np
from scipy import fft as sfft

__all__ = ["wavenumbers", "deriv", "smooth_window", "workers", "dealias_mask"]


def workers() -> int:
    """Thread cap for FFTs, from NLS_FRAMES_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("NLS_FRAMES_THREADS", "1")))
    except ValueError:
        return 1


def wavenumbers(n: int, dx: float) -> np.ndarray:
    return 2.0 * np.pi * sfft.fftfreq(n, d=dx)


def deriv(u: np.ndarray, dx: float, order: int = 1, axis: int = -1) -> np.ndarray:
    """Spectral derivative of a periodic sample array along ``axis``."""
    n = u.shape[axis]
    k = wavenumbers(n, dx)
    shape = [1] * u.ndim
    shape[axis] = n
    k = k.reshape(shape)
    uh = sfft.fft(u, axis=axis, workers=workers())
    if order == 1:
        fac = 1j * k
        if n % 2 == 0:
            # the Nyquist mode has no consistent odd derivative
            nyq = [slice(None)] * u.ndim
            nyq[axis] = n // 2
            fac = fac.copy()
            fac[tuple(nyq)] = 0.0
    else:
        fac = (1j * k) ** order
    return sfft.ifft(uh * fac, axis=axis, workers=workers())


def _smooth_step(u):
    u = np.clip(u, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)
        b = np.where(u < 1, np.exp(-1.0 / np.where(u < 1, 1.0 - u, 1.0)), 0.0)
    return a / (a + b)


def smooth_window(x: np.ndarray, lo: float, hi: float, taper: float) -> np.ndarray:
    """C-infinity window equal to 1 on [lo, hi] and 0 beyond a taper of the given width."""
    left = _smooth_step((x - (lo - taper)) / taper)
    right = _smooth_step(((hi + taper) - x) / taper)
    return left * right


def dealias_mask(n: int) -> np.ndarray:
    """2/3-rule mask in FFT ordering."""
    m = np.abs(sfft.fftfreq(n) * n)
    return m <= n / 3.0
