"""Vectorized evaluation of solve_ivp dense output.

OdeSolution.__call__ loops over segments in Python, which dominates the
cost of sampling long DOP853 solutions on fine grids. The same polynomial
is evaluated here with one gather per coefficient.
"""

from __future__ import annotations

import numpy as np


class DenseTable:
    def __init__(self, ode, comps=(0,)):
        segs = ode.interpolants
        self.ode = ode
        self.comps = tuple(comps)
        self.fast = all(hasattr(q, "F") for q in segs)
        if self.fast:
            c = list(self.comps)
            self.ts = ode.ts_sorted
            self.t_old = np.array([q.t_old for q in segs])
            self.h = np.array([q.h for q in segs])
            self.y_old = np.array([q.y_old[c] for q in segs])  # (n, m)
            self.F = np.array([q.F[:, c] for q in segs])  # (n, order, m)

    def __call__(self, z) -> np.ndarray:
        """Selected components at z, shape (m,) + z.shape."""
        z = np.asarray(z, dtype=float)
        if not self.fast:
            return self.ode(z.ravel())[list(self.comps)].reshape((len(self.comps),) + z.shape)
        n = self.t_old.size
        j = np.clip(np.searchsorted(self.ts, z.ravel(), side="right") - 1, 0, n - 1)
        if not self.ode.ascending:
            j = n - 1 - j
        x = ((z.ravel() - self.t_old[j]) / self.h[j])[:, None]
        y = np.zeros((j.size, len(self.comps)))
        for i in range(self.F.shape[1] - 1, -1, -1):
            y += self.F[j, i]
            y *= x if (self.F.shape[1] - 1 - i) % 2 == 0 else 1 - x
        y += self.y_old[j]
        return y.T.reshape((len(self.comps),) + z.shape)
