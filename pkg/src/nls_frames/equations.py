"""Equation descriptors and sampled wave fields.

Every Schrodinger-type kind is reduced to one general form

    i psi_t + a psi_xx - b x^2 psi + i c x psi_x + i d psi + f x psi - i g psi_x
        = h0 psi + (h1 x + h2)|psi|^2 psi + i h3 |psi|^2 psi_x
          + i h4 psi^2 conj(psi_x) + h5 |psi|^4 psi

with (a..g) functions of t and (h0..h5) functions of (x, t). The quintic
Ginzburg-Landau kind is handled separately.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .coeffs import Scenario

__all__ = ["EquationSpec", "WaveField", "KINDS", "nonlinear_terms"]

KINDS = (
    "general_variable",
    "autonomous_standard",
    "cubic_pm",
    "quintic_free",
    "quintic_trap",
    "cubic_linear_potential",
    "dnls_trap",
    "cgl_quintic",
    "piv_trap",
)

_ZERO6 = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class EquationSpec:
    kind: str
    params: dict = field(default_factory=dict)
    scenario: Scenario | None = None
    h_funcs: tuple | None = None  # general_variable: six callables h_k(x, t)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown equation kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        for k, v in self.params.items():
            if not np.all(np.isfinite(np.asarray(v, dtype=complex))):
                raise ValueError(f"parameter {k} is not finite")
        if self.kind == "general_variable" and (self.scenario is None or self.h_funcs is None or len(self.h_funcs) != 6):
            raise ValueError("general_variable needs a scenario and six h-functions")

    # -- constructors -----------------------------------------------------
    @classmethod
    def general_variable(cls, s: Scenario, h_funcs) -> "EquationSpec":
        return cls("general_variable", {}, s, tuple(h_funcs))

    @classmethod
    def autonomous_standard(cls, c0: int, d) -> "EquationSpec":
        """-i chi_tau + chi_xixi - c0 xi^2 chi = N_d(chi), in the variables (xi, tau)."""
        d = tuple(d)
        if len(d) != 6:
            raise ValueError("need six constants d0..d5")
        return cls("autonomous_standard", {"c0": int(c0), **{f"d{i}": d[i] for i in range(6)}})

    @classmethod
    def cubic_pm(cls, sign: int) -> "EquationSpec":
        """i psi_t + psi_xx = 2 sign |psi|^2 psi (sign=+1 defocusing, -1 focusing, 0 linear)."""
        return cls("cubic_pm", {"sign": int(sign)})

    @classmethod
    def linear_free(cls) -> "EquationSpec":
        return cls.cubic_pm(0)

    @classmethod
    def quintic_free(cls, sign: int) -> "EquationSpec":
        """i A_t + A_xx + sign (3/4)|A|^4 A = 0."""
        return cls("quintic_free", {"sign": int(sign)})

    @classmethod
    def quintic_trap(cls, sign: int) -> "EquationSpec":
        """i psi_t + psi_xx - x^2 psi + sign (3/4)|psi|^4 psi = 0."""
        return cls("quintic_trap", {"sign": int(sign)})

    @classmethod
    def cubic_linear_potential(cls, k: float) -> "EquationSpec":
        """i psi_t + psi_xx - 2 k x psi = 2|psi|^2 psi."""
        return cls("cubic_linear_potential", {"k": float(k)})

    @classmethod
    def dnls_trap(cls, d3: float, d5: float) -> "EquationSpec":
        """i psi_t + psi_xx - x^2 psi = i d3 (|psi|^2 psi_x + psi^2 conj(psi_x)) + d5 |psi|^4 psi."""
        return cls("dnls_trap", {"d3": float(d3), "d5": float(d5)})

    @classmethod
    def cgl_quintic(cls, eps, b1, c1, b3, c3, b5, c5) -> "EquationSpec":
        vals = dict(eps=eps, b1=b1, c1=c1, b3=b3, c3=c3, b5=b5, c5=c5)
        return cls("cgl_quintic", {k: float(v) for k, v in vals.items()})

    @classmethod
    def piv_trap(cls) -> "EquationSpec":
        """i psi_t + psi_xx - x^2/4 psi = 2 x |psi|^2 psi + 3 |psi|^4 psi."""
        return cls("piv_trap", {})

    # -- general-form view ---------------------------------------------------
    @property
    def is_cgl(self) -> bool:
        return self.kind == "cgl_quintic"

    @property
    def has_derivative_terms(self) -> bool:
        if self.kind == "general_variable":
            return True
        h = self._const_h()
        return h[3] != 0 or h[4] != 0

    @property
    def conservative(self) -> bool:
        """True when the L2 norm is an exact invariant of the flow."""
        if self.is_cgl:
            return False
        if self.kind == "general_variable":
            s = self.scenario
            return s.c.is_const() and s.d.is_const() and s.c(0.0) == 0.0 and s.d(0.0) == 0.0
        return True

    def _const_linear(self):
        p = self.params
        k = self.kind
        if k == "autonomous_standard":
            return (-1.0, -float(p["c0"]), 0.0, 0.0, 0.0, 0.0)
        if k in ("cubic_pm", "quintic_free"):
            return (1.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        if k in ("quintic_trap", "dnls_trap"):
            return (1.0, 1.0, 0.0, 0.0, 0.0, 0.0)
        if k == "cubic_linear_potential":
            return (1.0, 0.0, 0.0, 0.0, -2.0 * p["k"], 0.0)
        if k == "piv_trap":
            return (1.0, 0.25, 0.0, 0.0, 0.0, 0.0)
        raise ValueError(f"{k} has no constant linear part")

    def _const_h(self):
        p = self.params
        k = self.kind
        if k == "autonomous_standard":
            return tuple(-p[f"d{i}"] for i in range(6))
        if k == "cubic_pm":
            return (0.0, 0.0, 2.0 * p["sign"], 0.0, 0.0, 0.0)
        if k in ("quintic_free", "quintic_trap"):
            return (0.0, 0.0, 0.0, 0.0, 0.0, -0.75 * p["sign"])
        if k == "cubic_linear_potential":
            return (0.0, 0.0, 2.0, 0.0, 0.0, 0.0)
        if k == "dnls_trap":
            return (0.0, 0.0, 0.0, p["d3"], p["d3"], p["d5"])
        if k == "piv_trap":
            return (0.0, 2.0, 0.0, 0.0, 0.0, 3.0)
        raise ValueError(f"{k} has no constant nonlinear part")

    def linear_coeffs(self, t) -> tuple:
        """(a, b, c, d, f, g) at time(s) t."""
        if self.kind == "general_variable":
            s = self.scenario
            return tuple(np.asarray(getattr(s, n)(t), dtype=float) for n in "abcdfg")
        return self._const_linear()

    def h_values(self, x, t) -> tuple:
        """(h0..h5) evaluated at (x, t) (broadcasting)."""
        if self.kind == "general_variable":
            return tuple(h(x, t) for h in self.h_funcs)
        return self._const_h()

    def describe(self) -> dict:
        out = {"kind": self.kind, "params": {k: _jsonable(v) for k, v in self.params.items()}}
        if self.scenario is not None:
            out["scenario"] = self.scenario.name
        return out


def _jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def nonlinear_terms(h, x, psi, psi_x):
    """Right-hand side pieces of the general form (list of arrays)."""
    h0, h1, h2, h3, h4, h5 = h
    m2 = np.abs(psi) ** 2
    return [
        h0 * psi,
        (h1 * x + h2) * m2 * psi,
        1j * h3 * m2 * psi_x,
        1j * h4 * psi * psi * np.conj(psi_x),
        h5 * m2 * m2 * psi,
    ]


@dataclass
class WaveField:
    """Complex samples on a rectangular grid: values[i, j] = psi(x[j], t[i])."""

    x: np.ndarray
    t: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)
    coords: tuple = ("x", "t")

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.t = np.asarray(self.t, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.t.size, self.x.size):
            raise ValueError(f"values shape {self.values.shape} != (nt, nx) = {(self.t.size, self.x.size)}")

    @classmethod
    def from_function(cls, fn: Callable, x, t, meta=None, coords=("x", "t")) -> "WaveField":
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        vals = np.empty((t.size, x.size), dtype=complex)
        for i, ti in enumerate(t):
            vals[i] = fn(x, ti)
        return cls(x, t, vals, dict(meta or {}), coords)

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    def slice(self, i: int) -> np.ndarray:
        return self.values[i]

    def to_csv(self) -> str:
        cx, ct = self.coords
        lines = [f"{cx},{ct},re,im"]
        for i, ti in enumerate(self.t):
            for j, xj in enumerate(self.x):
                v = self.values[i, j]
                lines.append(f"{xj!r},{ti!r},{v.real!r},{v.imag!r}")
        return "\n".join(lines) + "\n"

    def metadata_json(self) -> str:
        grid = {
            "x": [float(self.x[0]), float(self.x[-1]), int(self.x.size)],
            "t": [float(self.t[0]), float(self.t[-1]), int(self.t.size)],
        }
        return json.dumps({"grid": grid, "coords": list(self.coords), **self.meta}, sort_keys=True, indent=2)
