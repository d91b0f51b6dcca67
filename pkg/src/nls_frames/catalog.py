"""Closed-form solution factory.

Every handle is evaluable as ``h(x, t)`` on an x-array at a scalar time and
carries the EquationSpec it solves. Handles that solve an autonomous
standard form also expose ``d_consts = (c0, d0..d5)`` so they can be pushed
through a kernel (see ``transform.standard_form``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from ._dense import DenseTable
from .equations import EquationSpec
from .kernel import TransformKernel
from .painleve import PIIProfile, DEFOCUSING
from .specfun import airy_ai

__all__ = [
    "SolutionHandle",
    "AiryGunKinematics",
    "FAMILIES",
    "pii_packet",
    "airy_berry",
    "elliptic_packet",
    "EllipticProfile",
    "elliptic_profile",
    "airy_expansion",
    "airy_gun",
    "const_velocity_packet",
    "quintic_pulse",
    "quintic_source",
    "blowup_family",
    "gauge_free_to_trap",
    "osc_pulse",
    "osc_source",
    "osc_pulse_general",
    "group_orbit_trap",
    "group_parameters",
]

FAMILIES = (
    "pii_packet",
    "elliptic_packet",
    "airy_berry",
    "airy_expansion",
    "airy_gun",
    "const_velocity",
    "quintic_pulse",
    "quintic_source",
    "blowup_family",
    "osc_pulse",
    "osc_source",
    "osc_pulse_general",
    "group_orbit_trap",
)


@dataclass
class SolutionHandle:
    family: str
    params: dict
    equation: EquationSpec
    fn: Callable = field(repr=False)
    windows: list = field(default_factory=list)
    d_consts: tuple | None = None
    base: "SolutionHandle | None" = field(default=None, repr=False)

    def __call__(self, x, t):
        self.check_time(t)
        return self.fn(np.asarray(x, dtype=float), float(t))

    def singular_times(self, t_range=None) -> list:
        out = []
        for w in self.windows:
            if w["kind"] == "singular_time":
                out.append(w["t"])
            elif w["kind"] == "periodic_singular":
                if t_range is None:
                    out.append(w["t"])
                    continue
                p = w["period"]
                n0 = math.floor((t_range[0] - w["t"]) / p)
                n1 = math.ceil((t_range[1] - w["t"]) / p)
                out.extend(w["t"] + n * p for n in range(n0, n1 + 1))
        return out

    def check_time(self, t):
        for w in self.windows:
            if w["kind"] == "t_max" and not t < w["t"]:
                raise ValueError(f"{self.family}: t={t} not below {w['t']}")
            if w["kind"] == "t_min" and not t > w["t"]:
                raise ValueError(f"{self.family}: t={t} not above {w['t']}")
            if w["kind"] == "singular_time" and t == w["t"]:
                raise ValueError(f"{self.family}: singular at t={t}")
            if w["kind"] == "periodic_singular":
                q = (t - w["t"]) / w["period"]
                if abs(q - round(q)) < 1e-14:
                    raise ValueError(f"{self.family}: singular at t={t}")

    def standard_form(self) -> Callable:
        """chi(xi, tau) = A(xi, -tau), the field solving the standard form."""
        if self.d_consts is None:
            raise ValueError(f"{self.family} does not solve an autonomous standard form")
        return lambda xi, tau: self(xi, -tau)

    def descriptor(self) -> dict:
        return {
            "family": self.family,
            "params": {k: _plain(v) for k, v in self.params.items()},
            "equation": self.equation.describe(),
            "validity": self.windows,
            "d_consts": list(self.d_consts) if self.d_consts is not None else None,
        }

    def descriptor_json(self) -> str:
        return json.dumps(self.descriptor(), sort_keys=True)


def _plain(v):
    if isinstance(v, (int, float, str, bool)) or v is None:
        return v
    if isinstance(v, (tuple, list)):
        return [_plain(u) for u in v]
    if hasattr(v, "to_dict"):
        return v.to_dict()
    return repr(v)


# ---------------------------------------------------------------------------
# Painleve II packets


def _profile_eval(profile: PIIProfile | None):
    if profile is None:
        return airy_ai
    z_hi, z_lo = float(profile.z[0]), float(profile.z[-1])
    k0 = profile.k0
    if profile.pole is not None:
        z_lo = profile.pole["z_stop"]

    def F(z):
        z = np.asarray(z, dtype=float)
        if np.any(z < z_lo):
            raise ValueError(f"z={float(z.min()):.6g} below the profile range (ends at {z_lo:.6g})")
        out = np.empty_like(z)
        right = z > z_hi
        out[right] = k0 * airy_ai(z[right])
        out[~right] = profile(z[~right])
        return out

    return F


def pii_packet(g: float, v: float, profile: PIIProfile | None) -> SolutionHandle:
    """psi = exp(i(x - vt/2)v/2 + i g (x - vt - 2g t^2/3) t) g^{1/3} F(g^{1/3}(x - vt - g t^2))."""
    if g <= 0:
        raise ValueError("g must be positive")
    F = _profile_eval(profile)
    c = g ** (1 / 3)

    def fn(x, t):
        ph = (x - v * t / 2) * v / 2 + g * (x - v * t - 2 * g * t * t / 3) * t
        return np.exp(1j * ph) * c * F(c * (x - v * t - g * t * t))

    if profile is None:
        eq, d, fam = EquationSpec.linear_free(), (0, 0, 0, 0, 0, 0, 0), "airy_berry"
    elif profile.sign == DEFOCUSING:
        eq, d, fam = EquationSpec.cubic_pm(+1), (0, 0, 0, 2, 0, 0, 0), "pii_packet"
    else:
        eq, d, fam = EquationSpec.cubic_pm(-1), (0, 0, 0, -2, 0, 0, 0), "pii_packet"
    params = {"g": g, "v": v}
    if profile is not None:
        params.update(k0=profile.k0, sign=profile.sign)
    return SolutionHandle(fam, params, eq, fn, [], d)


def airy_berry(g: float, v: float = 0.0) -> SolutionHandle:
    """Linear limit: the freely accelerating Airy packet."""
    return pii_packet(g, v, None)


def const_velocity_packet(k: float, v: float, profile: PIIProfile) -> SolutionHandle:
    """Packet moving at constant speed in the linear potential 2kx (g = 2k)."""
    if profile is None or profile.sign != DEFOCUSING:
        raise ValueError("const_velocity_packet needs a defocusing profile")
    g = 2.0 * k
    if g <= 0:
        raise ValueError("k must be positive")
    F = _profile_eval(profile)
    c = g ** (1 / 3)

    def fn(x, t):
        ph = (x - v * t / 2) * v / 2 - g * v * t * t / 2
        return np.exp(1j * ph) * c * F(c * (x - v * t))

    return SolutionHandle("const_velocity", {"k": k, "v": v, "k0": profile.k0}, EquationSpec.cubic_linear_potential(k), fn)


# ---------------------------------------------------------------------------
# elliptic packets


@dataclass
class EllipticProfile:
    g0: float
    h0: float
    C0: float
    z_range: tuple
    sol_pos: object = field(repr=False)
    sol_neg: object = field(repr=False)
    first_integral_drift: float = 0.0
    _tabs: tuple | None = field(default=None, repr=False, compare=False)

    def _both(self, z):
        z = np.asarray(z, dtype=float)
        if np.any(z < self.z_range[0]) or np.any(z > self.z_range[1]):
            raise ValueError("argument outside the integrated profile range")
        if self._tabs is None:
            self._tabs = (DenseTable(self.sol_pos.sol, (0, 1)), DenseTable(self.sol_neg.sol, (0, 1)))
        out = np.empty((2,) + z.shape)
        p = z >= 0
        if np.any(p):
            out[:, p] = self._tabs[0](z[p])
        if np.any(~p):
            out[:, ~p] = self._tabs[1](z[~p])
        return out

    def __call__(self, z):
        return self._both(z)[0]

    def first_integral(self, z):
        G, dG = self._both(z)
        return dG**2 - self.C0 - self.g0 * G**2 - 0.5 * self.h0 * G**4


def _turning_amplitude(g0, h0, C0):
    """Largest G >= 0 with C0 + g0 G^2 + h0 G^4/2 = 0, if any."""
    if h0 == 0:
        if g0 == 0:
            return None
        s = -C0 / g0
        return math.sqrt(s) if s >= 0 else None
    disc = g0 * g0 - 2 * h0 * C0
    if disc < 0:
        return None
    roots = [(-g0 + sgn * math.sqrt(disc)) / h0 for sgn in (+1, -1)]
    roots = [r for r in roots if r >= 0]
    return math.sqrt(max(roots)) if roots else None


def elliptic_profile(g0: float, h0: float, C0: float, z_max: float = 60.0, G0: float | None = None,
                     rtol: float = 1e-13, atol: float = 1e-15, cap: float = 1e6) -> EllipticProfile:
    """Integrate G'' = g0 G + h0 G^3 on [-z_max, z_max] from data on the first integral."""
    if G0 is None:
        G0 = _turning_amplitude(g0, h0, C0)
        if G0 is None:
            raise ValueError("no turning point: choose G0 explicitly")
    q = C0 + g0 * G0**2 + 0.5 * h0 * G0**4
    if q < -1e-14:
        raise ValueError("G0 is not reachable on the first integral (G'^2 < 0)")
    dG0 = math.sqrt(max(q, 0.0))

    def rhs(z, y):
        return [y[1], g0 * y[0] + h0 * y[0] ** 3]

    def esc(z, y):
        return abs(y[0]) - cap

    esc.terminal = True
    sols = []
    for end in (z_max, -z_max):
        s = solve_ivp(rhs, (0.0, end), [G0, dG0], method="DOP853", rtol=rtol, atol=atol, dense_output=True, events=esc)
        if s.status == 1:
            raise ValueError(f"profile escapes to infinity near z={s.t_events[0][0]:.6g}")
        sols.append(s)
    prof = EllipticProfile(g0, h0, C0, (-z_max, z_max), sols[0], sols[1])
    zz = np.linspace(-z_max, z_max, 4001)
    prof.first_integral_drift = float(np.max(np.abs(prof.first_integral(zz))))
    return prof


def elliptic_packet(k: TransformKernel, scenario, params, profile: EllipticProfile | None = None) -> SolutionHandle:
    """Kernel image of exp(i(xi y + tau(y^2 - g0))) G(xi + 2 tau y); params = (phi, y, g0, h0, C0)."""
    from .transform import push_forward_fn, nonlinearity_map

    phi, y, g0, h0, C0 = params
    if k.c0_flag != 0:
        raise ValueError("elliptic packets need a c0=0 kernel")
    prof = profile or elliptic_profile(g0, h0, C0)

    def chi(xi, tau):
        return np.exp(1j * (xi * y + tau * (y * y - g0))) * prof(xi + 2 * tau * y)

    psi = push_forward_fn(k, chi)
    nm = nonlinearity_map(k, scenario, (0, 0, 0, h0, 0, 0, 0))
    windows = [{"kind": "singular_time", "t": e.t} for e in k.events]
    ph = complex(np.exp(1j * phi))

    return SolutionHandle(
        "elliptic_packet",
        {"phi": phi, "y": y, "g0": g0, "h0": h0, "C0": C0, "first_integral_drift": prof.first_integral_drift},
        nm.equation(),
        lambda x, t: ph * psi(x, t),
        windows,
    )


# ---------------------------------------------------------------------------
# linear Airy kinematics


def airy_expansion(g: float, t1: float) -> SolutionHandle:
    """Expansion-transformed Airy packet; t1 = 0 selects the degenerate form (t > 0)."""
    c = g ** (1 / 3)
    if t1 == 0:
        def fn(x, t):
            ph = (x * x + (x + g / (12 * t)) * g / (2 * t)) / (4 * t)
            return np.exp(1j * ph) / np.sqrt(2 * t + 0j) * c * airy_ai(-c / (2 * t) * (x + g / (8 * t)))

        return SolutionHandle("airy_expansion", {"g": g, "t1": 0.0}, EquationSpec.linear_free(), fn,
                              [{"kind": "t_min", "t": 0.0}], (0, 0, 0, 0, 0, 0, 0))

    def fn(x, t):
        w = t1 - t
        ph = g * (x - (2 * g / 3) * t1 * t * t / w) * t1 * t1 * t / w**2 - x * x / (4 * w)
        arg = c * (x - g * t1 * t * t / w) * t1 / w
        return math.sqrt(abs(t1) / w) * np.exp(1j * ph) * c * airy_ai(arg)

    return SolutionHandle("airy_expansion", {"g": g, "t1": t1}, EquationSpec.linear_free(), fn,
                          [{"kind": "t_max", "t": t1}], (0, 0, 0, 0, 0, 0, 0))


@dataclass
class AiryGunKinematics:
    g: float
    t1: float
    x0: float
    C1: float
    C2: float

    def x(self, t):
        w = self.t1 - np.asarray(t, dtype=float)
        return self.C2 / w - 2 * self.g * self.t1**2 + self.C1 * w

    def velocity(self, t):
        w = self.t1 - np.asarray(t, dtype=float)
        return self.C2 / w**2 - self.C1

    def acceleration(self, t):
        w = self.t1 - np.asarray(t, dtype=float)
        return 2 * self.C2 / w**3

    def newton_residual(self, t):
        """(t1 - t)^2 x'' - (t1 - t) x' - x - 2 g t1^2."""
        w = self.t1 - np.asarray(t, dtype=float)
        return w * w * self.acceleration(t) - w * self.velocity(t) - self.x(t) - 2 * self.g * self.t1**2

    def orbit_residual(self, t):
        """Q^2/C2 - (2 C1 + P + C1^2/P) with P = x' + C1, Q = x + 2 g t1^2."""
        P = self.velocity(t) + self.C1
        Q = self.x(t) + 2 * self.g * self.t1**2
        return Q * Q / self.C2 - (2 * self.C1 + P + self.C1**2 / P)

    def orbit_P(self, Q, branch: int = +1):
        u = Q * Q / (2 * self.C2)
        return u - self.C1 + branch * np.sqrt(u * (u - 2 * self.C1))

    def to_dict(self) -> dict:
        return {"g": self.g, "t1": self.t1, "x0": self.x0, "C1": self.C1, "C2": self.C2}


def airy_gun(g: float, t1: float, x0: float) -> AiryGunKinematics:
    if t1 <= 0:
        raise ValueError("t1 must be positive")
    C1 = g * t1 + x0 / (g ** (1 / 3) * t1)
    C2 = g * t1**3
    if C2 == 0:
        raise ValueError("C2 = g t1^3 must be nonzero")
    return AiryGunKinematics(g, t1, x0, C1, C2)


# ---------------------------------------------------------------------------
# quintic families


def quintic_pulse(phi: float, v: float, k: float) -> SolutionHandle:
    """A = e^{i phi} [k / cosh k(x - vt)]^{1/2} exp i(vx/2 + (k^2 - v^2) t/4)."""
    if k <= 0:
        raise ValueError("k must be positive")

    def fn(x, t):
        u = k * (x - v * t)
        return np.exp(1j * (phi + v * x / 2 + (k * k - v * v) * t / 4)) * np.sqrt(k / np.cosh(u))

    return SolutionHandle("quintic_pulse", {"phi": phi, "v": v, "k": k}, EquationSpec.quintic_free(+1), fn, [],
                          (0, 0, 0, 0, 0, 0, -0.75))


def _odd_root(u):
    """Analytic square root of (cosh u - 1)/(cosh u + 2): odd in u, no kink at the node."""
    return math.sqrt(2.0) * np.sinh(u / 2) / np.sqrt(np.cosh(u) + 2)


def quintic_source(phi: float, v: float, r: float, pairing: str = "lower") -> SolutionHandle:
    """Plateau (source/sink) solution of the defocusing quintic equation.

    Only the pairing (cosh - 1)/(cosh + 2) keeps the bracket nonnegative on
    the whole line; the other is rejected.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    if pairing != "lower":
        raise ValueError("bracket (cosh+1)/(cosh-2) is negative for cosh<2: pairing rejected")
    s3 = math.sqrt(3.0)

    def fn(x, t):
        u = s3 * r * (x - v * t)
        amp = math.sqrt(r) * _odd_root(u)
        return np.exp(1j * (phi + v * x / 2 - (v * v + 3 * r * r) * t / 4)) * amp

    return SolutionHandle("quintic_source", {"phi": phi, "v": v, "r": r, "pairing": pairing},
                          EquationSpec.quintic_free(-1), fn, [], (0, 0, 0, 0, 0, 0, 0.75))


def blowup_family(base: SolutionHandle, init6) -> SolutionHandle:
    """Expansion/Galilei/scaling image of a free quintic solution; init6 = (alpha, beta, gamma, delta, eps, kappa) at 0."""
    if base.equation.kind != "quintic_free":
        raise ValueError("base must solve the free quintic equation")
    a0, b0, g0, d0, e0, k0 = (float(v) for v in init6)
    if b0 == 0:
        raise ValueError("beta(0) must be nonzero")

    def fn(x, t):
        den = 1 + 4 * a0 * t
        ph = (a0 * x * x + d0 * x - d0 * d0 * t) / den + k0
        A = base.fn(b0 * (x - 2 * d0 * t) / den + e0, b0 * b0 * t / den - g0)
        return np.sqrt(b0 / den + 0j) * np.exp(1j * ph) * A

    windows = []
    params = {"alpha0": a0, "beta0": b0, "gamma0": g0, "delta0": d0, "eps0": e0, "kappa0": k0, "base": base.descriptor()}
    if a0 != 0:
        t0 = -1.0 / (4 * a0)
        windows.append({"kind": "t_max" if t0 > 0 else "t_min", "t": t0})
        params["t_blowup"] = t0
        params["x_blowup"] = -d0 / (2 * a0)
    return SolutionHandle("blowup_family", params, base.equation, fn, windows, base.d_consts, base)


def gauge_free_to_trap(A: SolutionHandle) -> SolutionHandle:
    """psi = exp(-(i/2) x^2 tan 2t) / sqrt(cos 2t) A(x / cos 2t, tan(2t)/2) on |t| < pi/4."""
    if A.equation.kind != "quintic_free":
        raise ValueError("needs a free quintic solution")
    sign = A.equation.params["sign"]

    def fn(x, t):
        c = math.cos(2 * t)
        tn = math.tan(2 * t)
        return np.exp(-0.5j * x * x * tn) / math.sqrt(c) * A.fn(x / c, tn / 2)

    d = (1,) + tuple(A.d_consts[1:])
    return SolutionHandle("gauge_free_to_trap", {"base": A.descriptor()}, EquationSpec.quintic_trap(sign), fn,
                          [{"kind": "t_min", "t": -math.pi / 4}, {"kind": "t_max", "t": math.pi / 4}], d, A)


_TURN = [{"kind": "periodic_singular", "t": math.pi / 4, "period": math.pi / 2}]


def osc_pulse(phi: float, v: float, k: float) -> SolutionHandle:
    """Breathing sech packet in the harmonic trap (focusing quintic)."""
    if k <= 0:
        raise ValueError("k must be positive")

    def fn(x, t):
        c, s = math.cos(2 * t), math.sin(2 * t)
        K = 2 * k / c
        amp = np.sqrt(K / np.cosh(K * (x - v * s)) + 0j)
        return np.exp(1j * phi) * amp * np.exp(1j * (2 * v * x + (k * k - v * v - x * x) * s) / (2 * c))

    return SolutionHandle("osc_pulse", {"phi": phi, "v": v, "k": k}, EquationSpec.quintic_trap(+1), fn, list(_TURN),
                          (1, 0, 0, 0, 0, 0, -0.75))


def osc_source(phi: float, v: float, r: float) -> SolutionHandle:
    if r <= 0:
        raise ValueError("r must be positive")

    def fn(x, t):
        c, s = math.cos(2 * t), math.sin(2 * t)
        u = 2 * r / c * (x - v * s)
        amp = np.sqrt(2 * r / (math.sqrt(3) * c) + 0j) * _odd_root(u)
        return np.exp(1j * phi) * amp * np.exp(1j * (2 * v * x - (v * v + r * r + x * x) * s) / (2 * c))

    return SolutionHandle("osc_source", {"phi": phi, "v": v, "r": r}, EquationSpec.quintic_trap(-1), fn, list(_TURN),
                          (1, 0, 0, 0, 0, 0, 0.75))


def osc_pulse_general(phi: float, v: float, k: float, init) -> SolutionHandle:
    """Group image of osc_pulse with initial data (alpha0, beta0, delta0, eps0); gamma0 = kappa0 = 0."""
    a0, b0, d0, e0 = (float(u) for u in init)
    if b0 == 0:
        raise ValueError("beta(0) must be nonzero")
    if k <= 0:
        raise ValueError("k must be positive")

    def fn(x, t):
        c, s = math.cos(2 * t), math.sin(2 * t)
        D = 2 * a0 * s + c
        amp = np.sqrt(2 * k * b0 / D + 0j)
        u = 2 * k * (b0 * (x - (d0 + v * b0) * s) / D + e0)
        ph1 = ((2 * a0 * c - s) * x * x + d0 * (2 * x - d0 * s)) / (2 * D)
        ph2 = b0 * (2 * v * (x - d0 * s) + (k * k - v * v) * b0 * s) / (2 * D) + v * e0
        return np.exp(1j * phi) * amp / np.sqrt(np.cosh(u)) * np.exp(1j * (ph1 + ph2))

    # blow-ups where 2 alpha0 sin 2t + cos 2t = 0, i.e. cot 2t = -2 alpha0
    tb = 0.5 * math.atan2(1.0, -2 * a0)
    windows = [{"kind": "periodic_singular", "t": tb, "period": math.pi / 2}]
    x0 = (d0 + v * b0) / math.sqrt(4 * a0 * a0 + 1)
    return SolutionHandle(
        "osc_pulse_general",
        {"phi": phi, "v": v, "k": k, "alpha0": a0, "beta0": b0, "delta0": d0, "eps0": e0, "x_blowup": [x0, -x0]},
        EquationSpec.quintic_trap(+1), fn, windows, (1, 0, 0, 0, 0, 0, -0.75))


def group_parameters(init6) -> dict:
    """Complex constants c1, c2, c3 from (alpha0, beta0, gamma0, delta0, eps0, kappa0)."""
    a0, b0, _, d0, e0, _ = (float(u) for u in init6)
    c1 = (1 + b0 * b0) / 2 - 1j * a0
    c2 = (1 - b0 * b0) / 2 + 1j * a0
    c3 = e0 * b0 + 1j * d0
    return {"c1": c1, "c2": c2, "c3": c3, "c1c2star": c1 * np.conj(c2)}


def group_orbit_trap(base: SolutionHandle, init6) -> SolutionHandle:
    """Schrodinger-group image of a solution of the trapped equation (time argument +arg(z)/2)."""
    if base.equation.kind not in ("quintic_trap", "dnls_trap"):
        raise ValueError("base must solve a trapped equation with invariant nonlinearity")
    a0, b0, g0, d0, e0, k0 = (float(u) for u in init6)
    if b0 == 0:
        raise ValueError("beta(0) must be nonzero")
    if g0 != 0 or k0 != 0:
        raise ValueError("gamma(0) = kappa(0) = 0 is assumed")
    cp = group_parameters(init6)
    c1, c2, c3 = cp["c1"], cp["c2"], cp["c3"]
    w = c2 / c1
    argc1 = float(np.angle(c1))
    den = c1 - np.conj(c2)  # = beta0^2

    def kernel(t):
        z = c1 * np.exp(2j * t) + c2 * np.exp(-2j * t)
        az2 = abs(z) ** 2
        argz = 2 * t + argc1 + float(np.angle(1 + w * np.exp(-4j * t)))
        cc = c1 * c2
        alpha = (1j * (np.conj(cc) * z * z - cc * np.conj(z) ** 2) / (2 * den * az2)).real
        beta = b0 / math.sqrt(az2)
        delta = ((c3 * z - np.conj(c3) * np.conj(z)) / (2j * az2)).real
        eps = ((c3 * z + np.conj(c3) * np.conj(z)) / (2 * math.sqrt(az2) * b0)).real
        kappa = ((c3 * c3 * z + np.conj(c3) ** 2 * np.conj(z)) * (z - np.conj(z)) / (8j * den * az2)).real
        return z, argz, alpha, beta, delta, eps, kappa

    def fn(x, t):
        z, argz, al, be, de, ep, ka = kernel(t)
        pref = np.sqrt(b0 / abs(z) + 0j)
        return pref * np.exp(1j * (al * x * x + de * x + ka)) * base.fn(be * x + ep, 0.5 * argz)

    h = SolutionHandle(
        "group_orbit_trap",
        {"init6": [a0, b0, g0, d0, e0, k0], "c1c2star": [cp["c1c2star"].real, cp["c1c2star"].imag],
         "shape_preserving": bool(a0 == 0 and abs(b0) == 1), "base": base.descriptor()},
        base.equation, fn, [], base.d_consts, base)
    h.kernel = kernel
    return h
