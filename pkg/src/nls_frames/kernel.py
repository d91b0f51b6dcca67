"""Gauge kernel: characteristic equation, fundamental kernel and superposition.

The seven gauge functions (mu, alpha, beta, gamma, delta, eps, kappa) solve

    alpha' + b + 2 c alpha + 4 a alpha^2 = c0 a beta^4
    beta'  + (c + 4 a alpha) beta = 0
    gamma' + a beta^2 = 0
    delta' + (c + 4 a alpha) delta = f + 2 g alpha + 2 c0 a beta^3 eps
    eps'   = (g - 2 a delta) beta
    kappa' = g delta - a delta^2 + c0 a beta^2 eps^2
    mu'    = (4 a alpha + 2 d) mu

for c0 in {0, 1}. They are built here from two standard solutions mu0, mu1
of the linear characteristic equation by explicit superposition formulas
(real and complex variants), and independently by direct integration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .coeffs import Scenario, char_coeffs

__all__ = [
    "CausticEvent",
    "InitData",
    "FundamentalPair",
    "Kernel0",
    "TransformKernel",
    "ComplexFrame",
    "fundamental_pair",
    "fundamental_kernel",
    "kernel_quadrature_check",
    "riccati_superpose",
    "ermakov_superpose",
    "complex_frame",
    "kernel_from_frame_riccati",
    "kernel_from_frame_ermakov",
    "integrate_riccati_direct",
    "quasi_invariants",
    "build_kernel",
    "KERNEL_FIELDS",
]

KERNEL_FIELDS = ("mu", "alpha", "beta", "gamma", "delta", "eps", "kappa")
RTOL = 1e-12
ATOL = 1e-12


@dataclass(frozen=True)
class CausticEvent:
    t: float
    kind: str

    def to_dict(self):
        return {"t": self.t, "kind": self.kind}


@dataclass(frozen=True)
class InitData:
    mu: float = 1.0
    alpha: float = 0.0
    beta: float = 1.0
    gamma: float = 0.0
    delta: float = 0.0
    eps: float = 0.0
    kappa: float = 0.0

    def __post_init__(self):
        if self.beta == 0.0:
            raise ValueError("beta(0) must be nonzero")
        if self.mu <= 0.0:
            raise ValueError("mu(0) must be positive")

    def as_tuple(self):
        return tuple(getattr(self, k) for k in KERNEL_FIELDS)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_any(cls, init) -> "InitData":
        if isinstance(init, InitData):
            return init
        if isinstance(init, dict):
            return cls(**init)
        return cls(*map(float, init))


# ---------------------------------------------------------------------------
# fundamental pair


def _coeff_arrays(s: Scenario, t):
    a, b, c, d, f, g = (getattr(s, n)(t) for n in ("a", "b", "c", "d", "f", "g"))
    return a, b, c, d, f, g


class _Segments:
    """Piecewise dense output of the pair integration."""

    def __init__(self):
        self.parts: list[tuple[float, float, str, Callable]] = []

    def add(self, t_start, t_end, mode, sol):
        self.parts.append((t_start, t_end, mode, sol))

    def __call__(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty((8, t.size))
        modes = np.empty(t.size, dtype="<U1")
        ends = np.array([p[1] for p in self.parts])
        idx = np.searchsorted(ends, t, side="left")
        idx = np.clip(idx, 0, len(self.parts) - 1)
        for k in np.unique(idx):
            sel = idx == k
            _, _, mode, sol = self.parts[k]
            out[:, sel] = sol(t[sel])
            modes[sel] = mode
        return out, modes


_HYST = 0.5  # log-ratio hysteresis of the region switch


def _pair_rhs(s: Scenario, mode: str):
    def rhs(t, y):
        m0, dm0, m1, dm1, llam, u, e, k = y
        a, b, c, d, f, g = _coeff_arrays(s, t)
        cc = char_coeffs(s, t)
        tau, sig = cc.tau, cc.sigma
        lam = math.exp(llam)
        U = lam * u
        fg = f - d * g / a
        du = (fg * m0 + g * dm0 / (2 * a)) / lam
        if mode == "A":
            # regular where mu0' != 0 (includes the start point)
            de = 8 * a * sig * lam * U / dm0**2 + 2 * a * lam * fg / dm0
            dk = -4 * a * sig * U**2 / dm0**2 - 2 * a * U * fg / dm0
        else:
            # regular where mu0 != 0
            delta0 = U / m0
            beta0 = -lam / m0
            de = (g - 2 * a * delta0) * beta0
            dk = g * delta0 - a * delta0**2
        return [dm0, tau * dm0 - 4 * sig * m0, dm1, tau * dm1 - 4 * sig * m1, 2 * d - c, du, de, dk]

    return rhs


def _switch_fn(s: Scenario, t_ref: float, sign: float):
    def ev(t, y):
        a = s.a(t)
        r = abs(y[1]) / (2 * abs(a)) + 1e-300
        q = abs(y[0]) / t_ref + 1e-300
        return math.log(r / q) + sign * _HYST

    ev.terminal = True
    ev.direction = -1.0 if sign > 0 else 1.0
    return ev


def _to_mode(s: Scenario, t: float, y: np.ndarray, target: str) -> np.ndarray:
    y = np.array(y, dtype=float)
    a = s.a(t)
    m0, dm0, lam, U = y[0], y[1], math.exp(y[4]), math.exp(y[4]) * y[5]
    if target == "B":  # (tilde eps, tilde kappa) -> (eps0, kappa0)
        y[6] = y[6] - 2 * a * lam * U / (m0 * dm0)
        y[7] = y[7] + a * U**2 / (m0 * dm0)
    else:
        y[6] = y[6] + 2 * a * lam * U / (m0 * dm0)
        y[7] = y[7] - a * U**2 / (m0 * dm0)
    return y


def _integrate_pair(s: Scenario, t0: float, t1: float, rtol: float, atol: float) -> _Segments:
    a0 = s.a(t0)
    y = np.array([0.0, 2 * a0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    t_ref = 1.0
    mode = "A"
    segs = _Segments()
    t = t0
    for _ in range(10000):
        ev = _switch_fn(s, t_ref, +1.0 if mode == "A" else -1.0)
        sol = solve_ivp(
            _pair_rhs(s, mode),
            (t, t1),
            y,
            method="DOP853",
            rtol=rtol,
            atol=atol * 1e-2,
            dense_output=True,
            events=ev,
        )
        if sol.status < 0:
            raise RuntimeError(f"pair integration failed: {sol.message}")
        t_end = float(sol.t[-1])
        segs.add(t, t_end, mode, sol.sol)
        if sol.status == 1 and t_end < t1:
            target = "B" if mode == "A" else "A"
            y = _to_mode(s, t_end, sol.y[:, -1], target)
            mode = target
            t = t_end
            continue
        break
    return segs


def _find_roots(fun: Callable[[float], float], t: np.ndarray, vals: np.ndarray, skip_first=True):
    roots = []
    start = 1 if skip_first else 0
    for i in range(start, len(t) - 1):
        v0, v1 = vals[i], vals[i + 1]
        if v0 == 0.0 and i > 0:
            roots.append(float(t[i]))
        elif v0 * v1 < 0:
            roots.append(float(brentq(fun, t[i], t[i + 1], xtol=1e-12, rtol=1e-15)))
    return roots


@dataclass
class FundamentalPair:
    """Standard solutions mu0, mu1 of the characteristic equation on a grid.

    mu0(t0) = 0, mu0'(t0) = 2 a(t0); mu1(t0) = 1, mu1'(t0) = 0. For the
    oscillator case (c0 = 1) ``mu_erm`` additionally holds the solution of the
    nonlinear (Ermakov) characteristic equation for the supplied initial data.
    """

    scenario: Scenario
    t: np.ndarray
    mu0: np.ndarray
    dmu0: np.ndarray
    mu1: np.ndarray
    dmu1: np.ndarray
    lam: np.ndarray
    c0_flag: int
    events: list = field(default_factory=list)
    mu_erm: np.ndarray | None = None
    dmu_erm: np.ndarray | None = None
    _segments: _Segments | None = None

    @property
    def t0(self) -> float:
        return float(self.t[0])

    def state(self, t):
        """Dense evaluation: rows mu0, mu0', mu1, mu1', log lambda, u, e, k; modes."""
        return self._segments(t)

    def mu0_at(self, t: float) -> float:
        return float(self._segments(t)[0][0, 0])

    def z_parts(self, t, init: "InitData"):
        st, _ = self._segments(t)
        a0, d0 = self.scenario.a(self.t0), self.scenario.d(self.t0)
        re = (2 * init.alpha + d0 / a0) * st[0] + st[2]
        im = init.beta**2 * st[0]
        return re, im


def fundamental_pair(
    s: Scenario,
    t_grid,
    c0: int = 0,
    beta0_init: float = 1.0,
    mu0_init: float = 1.0,
    alpha0_init: float = 0.0,
    rtol: float = RTOL,
    atol: float = ATOL,
) -> FundamentalPair:
    """Integrate the characteristic equation mu'' - tau mu' + 4 sigma mu = 0.

    The integration also carries the regular quadratures needed later for the
    linear-forcing part of the fundamental kernel.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 2 or np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must be strictly increasing with >= 2 points")
    s._check(t)
    segs = _integrate_pair(s, float(t[0]), float(t[-1]), rtol, atol)
    st, _ = segs(t)
    events = [CausticEvent(float(t[0]), "mu0_start")]
    fun = lambda tt: float(segs(tt)[0][0, 0])
    for r in _find_roots(fun, t, st[0]):
        events.append(CausticEvent(r, "mu0_zero"))
    pair = FundamentalPair(
        scenario=s,
        t=t,
        mu0=st[0],
        dmu0=st[1],
        mu1=st[2],
        dmu1=st[3],
        lam=np.exp(st[4]),
        c0_flag=int(c0),
        events=events,
        _segments=segs,
    )
    if c0 == 1:
        pair.mu_erm, pair.dmu_erm = _ermakov_mu(s, t, pair, beta0_init, mu0_init, alpha0_init, rtol, atol)
    return pair


def _ermakov_mu(s, t, pair, beta0, mu0, alpha0, rtol, atol):
    t0 = t[0]
    a0, d0 = s.a(t0), s.d(t0)
    k4 = (beta0 * mu0) ** 4

    def rhs(tt, y):
        m, dm, llam = y
        cc = char_coeffs(s, tt)
        a = s.a(tt)
        return [dm, cc.tau * dm - 4 * cc.sigma * m + 4 * a * a * k4 * math.exp(4 * llam) / m**3, 2 * s.d(tt) - s.c(tt)]

    y0 = [mu0, (4 * a0 * alpha0 + 2 * d0) * mu0, 0.0]
    sol = solve_ivp(rhs, (t0, t[-1]), y0, method="DOP853", t_eval=t, rtol=rtol, atol=atol * 1e-2)
    if not sol.success:
        raise RuntimeError(sol.message)
    return sol.y[0], sol.y[1]


# ---------------------------------------------------------------------------
# fundamental kernel


@dataclass
class Kernel0:
    """Fundamental (singular-at-t0) solution alpha0..kappa0 of the c0=0 system."""

    pair: FundamentalPair
    t: np.ndarray
    alpha0: np.ndarray
    beta0: np.ndarray
    gamma0: np.ndarray
    delta0: np.ndarray
    eps0: np.ndarray
    kappa0: np.ndarray
    valid: np.ndarray
    events: list

    @property
    def scenario(self):
        return self.pair.scenario

    @property
    def t0(self):
        return float(self.t[0])

    def values_at(self, t) -> dict:
        """alpha0..kappa0, mu0 and lambda at arbitrary t inside the pair range."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        st, _ = self.pair.state(t)
        vals = _kernel0_values(self.scenario, self.pair, t)
        out = dict(zip(("alpha0", "beta0", "gamma0", "delta0", "eps0", "kappa0"), vals))
        out["mu0"] = st[0]
        out["lam"] = np.exp(st[4])
        out["t"] = t
        return out

    def grid_values(self) -> dict:
        return {
            "alpha0": self.alpha0, "beta0": self.beta0, "gamma0": self.gamma0,
            "delta0": self.delta0, "eps0": self.eps0, "kappa0": self.kappa0,
            "mu0": self.pair.mu0, "lam": self.pair.lam, "t": self.t,
        }


def _kernel0_values(s: Scenario, pair: FundamentalPair, t: np.ndarray):
    st, modes = pair.state(t)
    m0, dm0, m1, _, llam, u, e, k = st
    lam = np.exp(llam)
    U = lam * u
    a, _, _, d, _, g = _coeff_arrays(s, t)
    t0 = pair.t0
    a0, d0, g0 = s.a(t0), s.d(t0), s.g(t0)
    at0 = np.abs(t - t0) == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha0 = dm0 / (4 * a * m0) - d / (2 * a)
        beta0 = -lam / m0
        gamma0 = m1 / (2 * 1.0 * m0) + d0 / (2 * a0)
        delta0 = np.where(at0, g0 / (2 * a0), U / m0)
        eps0 = np.where(modes == "A", e - 2 * a * lam * delta0 / dm0, e)
        kappa0 = np.where(modes == "A", k + a * U * delta0 / dm0, k)
    eps0 = np.where(at0, -g0 / (2 * a0), eps0)
    kappa0 = np.where(at0, 0.0, kappa0)
    return alpha0, beta0, gamma0, delta0, eps0, kappa0


def _guard_mask(t: np.ndarray, events: list, kinds: tuple, guard: float) -> np.ndarray:
    ok = np.ones(t.shape, dtype=bool)
    for ev in events:
        if ev.kind in kinds:
            ok &= np.abs(t - ev.t) > guard
    return ok


def fundamental_kernel(s: Scenario, pair: FundamentalPair) -> Kernel0:
    """alpha0, beta0, gamma0 in closed form; delta0, eps0, kappa0 by integration."""
    t = pair.t
    vals = _kernel0_values(s, pair, t)
    guard = 1e-6 * (t[-1] - t[0])
    valid = _guard_mask(t, pair.events, ("mu0_zero",), guard)
    valid[0] = False  # alpha0, beta0, gamma0 are singular at t0
    return Kernel0(pair, t, *vals, valid=valid, events=list(pair.events))


def kernel_quadrature_check(s: Scenario, k0: Kernel0, n_sub: int = 4000) -> dict:
    """Evaluate the closed quadrature forms of delta0, eps0, kappa0 on the first
    interval where mu0' keeps its sign and compare with the integrated kernel."""
    from scipy.integrate import cumulative_simpson

    t0 = k0.t0
    pair = k0.pair
    t_end = k0.t[-1]
    probe = np.linspace(t0, t_end, 2001)
    dm0 = pair.state(probe)[0][1]
    flips = np.nonzero(np.sign(dm0[1:]) != np.sign(dm0[:-1]))[0]
    if flips.size:
        t_end = probe[flips[0]] - 0.05 * (probe[flips[0]] - t0)
    tt = np.linspace(t0, t_end, n_sub + 1)
    st, _ = pair.state(tt)
    m0, dm0, _, _, llam, _, _, _ = st
    lam = np.exp(llam)
    a, _, _, d, f, g = _coeff_arrays(s, tt)
    sig = char_coeffs(s, tt).sigma
    fg = f - d * g / a
    # delta0 = lambda/mu0 * int [fg mu0 + g mu0'/(2a)] / lambda
    U = lam * cumulative_simpson((fg * m0 + g * dm0 / (2 * a)) / lam, x=tt, initial=0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        delta_q = np.where(tt == t0, g[0] / (2 * a[0]), U / m0)
    eps_q = -2 * a * lam * delta_q / dm0 + cumulative_simpson(
        8 * a * sig * lam * U / dm0**2 + 2 * a * lam * fg / dm0, x=tt, initial=0.0
    )
    kap_q = a * U * delta_q / dm0 + cumulative_simpson(
        -4 * a * sig * U**2 / dm0**2 - 2 * a * U * fg / dm0, x=tt, initial=0.0
    )
    ref = _kernel0_values(s, pair, tt)
    return {
        "t_range": [t0, float(t_end)],
        "delta0": float(np.max(np.abs(delta_q - ref[3]))),
        "eps0": float(np.max(np.abs(eps_q - ref[4]))),
        "kappa0": float(np.max(np.abs(kap_q - ref[5]))),
    }


# ---------------------------------------------------------------------------
# transform kernel


@dataclass
class TransformKernel:
    t: np.ndarray
    mu: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    delta: np.ndarray
    eps: np.ndarray
    kappa: np.ndarray
    c0_flag: int
    init: InitData
    valid: np.ndarray
    events: list = field(default_factory=list)
    method: str = ""
    evaluator: Callable | None = field(default=None, repr=False)

    def arrays(self) -> dict:
        return {k: getattr(self, k) for k in KERNEL_FIELDS}

    def sup_diff(self, other: "TransformKernel", fields=KERNEL_FIELDS, mask=None) -> dict:
        m = self.valid & other.valid if mask is None else mask
        return {k: float(np.max(np.abs(getattr(self, k)[m] - getattr(other, k)[m]))) for k in fields}

    def at(self, t) -> dict:
        """The seven functions at arbitrary t.

        Uses the exact evaluator when the kernel has one (dense ODE output
        fed through the closed formulas), otherwise cubic interpolation.
        """
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if self.evaluator is not None:
            return self.evaluator(t)
        from scipy.interpolate import CubicSpline

        return {k: CubicSpline(self.t, getattr(self, k))(t) for k in KERNEL_FIELDS}

    def to_csv(self) -> str:
        lines = ["t,mu,alpha,beta,gamma,delta,eps,kappa,valid_flag"]
        for i in range(self.t.size):
            row = [self.t[i]] + [getattr(self, k)[i] for k in KERNEL_FIELDS]
            lines.append(",".join(_fmt(v) for v in row) + f",{int(self.valid[i])}")
        return "\n".join(lines) + "\n"

    def sidecar(self) -> dict:
        return {
            "method": self.method,
            "c0": self.c0_flag,
            "init": self.init.to_dict(),
            "t_range": [float(self.t[0]), float(self.t[-1])],
            "n_samples": int(self.t.size),
            "caustics": [e.to_dict() for e in self.events],
            "n_invalid": int((~self.valid).sum()),
        }


def _fmt(v) -> str:
    return "nan" if not np.isfinite(v) else repr(float(v))


def _set_init(arrs: dict, t: np.ndarray, init: InitData, t0: float | None = None):
    at0 = t == (t[0] if t0 is None else t0)
    for k in KERNEL_FIELDS:
        arrs[k] = np.where(at0, getattr(init, k), arrs[k])
    return arrs


def _denominator_events(k0: Kernel0, init: InitData, kind: str) -> list:
    pair = k0.pair
    fun = lambda tt: float(pair.z_parts(tt, init)[0][0])
    re, _ = pair.z_parts(k0.t, init)
    return [CausticEvent(r, kind) for r in _find_roots(fun, k0.t, re)]


def _riccati_arrays(v: dict, init: InitData) -> dict:
    with np.errstate(divide="ignore", invalid="ignore"):
        D = init.alpha + v["gamma0"]
        s_ = init.delta + v["eps0"]
        return {
            "mu": 2 * init.mu * v["mu0"] * D,
            "alpha": v["alpha0"] - v["beta0"] ** 2 / (4 * D),
            "beta": -init.beta * v["beta0"] / (2 * D),
            "gamma": init.gamma - init.beta**2 / (4 * D),
            "delta": v["delta0"] - v["beta0"] * s_ / (2 * D),
            "eps": init.eps - init.beta * s_ / (2 * D),
            "kappa": init.kappa + v["kappa0"] - s_**2 / (4 * D),
        }


def _init_fill(t0: float, init: InitData, fn: Callable) -> Callable:
    def ev(t):
        out = fn(t)
        return _set_init(out, t, init, t0)

    return ev


def riccati_superpose(k0: Kernel0, init) -> TransformKernel:
    """Closed-form solution of the c0 = 0 system from the fundamental kernel."""
    init = InitData.from_any(init)
    t = k0.t
    arr = _set_init(_riccati_arrays(k0.grid_values(), init), t, init)
    events = _denominator_events(k0, init, "caustic")
    guard = 1e-6 * (t[-1] - t[0])
    valid = _guard_mask(t, k0.events + events, ("mu0_zero", "caustic"), guard)
    valid &= (arr["mu"] > 0) | (t == t[0])
    ev = _init_fill(k0.t0, init, lambda tt: _riccati_arrays(k0.values_at(tt), init))
    return TransformKernel(t, **arr, c0_flag=0, init=init, valid=valid, events=events, method="riccati", evaluator=ev)


def _ermakov_arrays(v: dict, init: InitData) -> dict:
    b0 = init.beta
    with np.errstate(divide="ignore", invalid="ignore"):
        D = init.alpha + v["gamma0"]
        N = b0**4 + 4 * D**2
        # continuity branch: sign(mu0) sqrt(N) = |z| / mu0 stays smooth through mu0 = 0
        sqN = np.sign(v["mu0"]) * np.sqrt(N)
        s_ = init.delta + v["eps0"]
        raw_g = np.arctan(b0**2 / (2 * D))
        return {
            "mu": init.mu * v["mu0"] * sqN,
            "alpha": v["alpha0"] - v["beta0"] ** 2 * D / N,
            "beta": -b0 * v["beta0"] / sqN,
            "gamma_raw": raw_g,
            "delta": v["delta0"] - v["beta0"] * (init.eps * b0**3 + 2 * D * s_) / N,
            "eps": (2 * init.eps * D - b0 * s_) / sqN,
            "kappa": init.kappa + v["kappa0"] - init.eps * b0**3 * s_ / N + D * (init.eps**2 * b0**2 - s_**2) / N,
            "N": N,
        }


def _wrap_pi(x):
    return (x + np.pi / 2) % np.pi - np.pi / 2


def ermakov_superpose(k0: Kernel0, init) -> TransformKernel:
    """Closed-form solution of the c0 = 1 system from the fundamental kernel.

    The arctan in the gamma formula is unwrapped continuously along the grid.
    """
    init = InitData.from_any(init)
    t = k0.t
    arr = _ermakov_arrays(k0.grid_values(), init)
    if np.any(arr["N"][1:] == 0.0):
        raise AssertionError("beta(0)^4 + 4 (alpha(0) + gamma0)^2 vanished")
    raw = arr.pop("gamma_raw")
    arr.pop("N")
    raw[0] = 0.0
    unwrapped = np.unwrap(raw, period=np.pi)
    arr["gamma"] = init.gamma - 0.5 * unwrapped
    arr = _set_init(arr, t, init)

    def ev(tt):
        out = _ermakov_arrays(k0.values_at(tt), init)
        out.pop("N")
        r = out.pop("gamma_raw")
        j = np.clip(np.searchsorted(t, tt), 0, t.size - 1)
        j0 = np.clip(j - 1, 0, t.size - 1)
        j = np.where(np.abs(t[j0] - tt) < np.abs(t[j] - tt), j0, j)
        base = np.where(j == 0, 0.0, raw[j])
        out["gamma"] = init.gamma - 0.5 * (unwrapped[j] + _wrap_pi(np.nan_to_num(r) - base))
        return _set_init(out, tt, init, k0.t0)

    guard = 1e-6 * (t[-1] - t[0])
    valid = _guard_mask(t, k0.events, ("mu0_zero",), guard)
    return TransformKernel(t, **arr, c0_flag=1, init=init, valid=valid, events=[], method="ermakov", evaluator=ev)


# ---------------------------------------------------------------------------
# complex frame


@dataclass
class ComplexFrame:
    t: np.ndarray
    c1: complex
    c2: complex
    c3: complex
    z: np.ndarray
    zeta: np.ndarray
    E: np.ndarray
    lam: np.ndarray

    def mu0_from_z(self):
        return ((self.z - np.conj(self.z)) / (2j * (self.c1 - np.conj(self.c2)))).real

    def mu1_from_z(self):
        c1, c2 = self.c1, self.c2
        z = self.z
        return (((np.conj(c1) - np.conj(c2)) * z + (c1 - c2) * np.conj(z)) / (2 * (c1 - np.conj(c2)))).real

    def E_from_z(self):
        c1, c2 = self.c1, self.c2
        return (np.conj(c1) * self.z - c2 * np.conj(self.z)) / (abs(c1) ** 2 - abs(c2) ** 2)

    def initial_data(self, a0: float, d0: float, beta_sign: float = 1.0) -> dict:
        """Recover alpha(0), beta(0)^2, delta(0), eps(0) from c1, c2, c3."""
        c1, c2, c3 = self.c1, self.c2, self.c3
        b2 = (c1 - np.conj(c2)).real
        return {
            "alpha": ((np.conj(c1) - c1) / 2j).real - d0 / (2 * a0),
            "beta2": b2,
            "delta": ((c3 - np.conj(c3)) / 2j).real,
            "eps": beta_sign * ((c3 + np.conj(c3)) / (2 * math.sqrt(b2))).real,
        }


def complex_frame(init, pair: FundamentalPair, k0: Kernel0) -> ComplexFrame:
    init = InitData.from_any(init)
    s = pair.scenario
    a0, d0 = s.a(pair.t0), s.d(pair.t0)
    w = init.alpha + d0 / (2 * a0)
    b2 = init.beta**2
    c1 = complex((1 + b2) / 2, -w)
    c2 = complex((1 - b2) / 2, w)
    c3 = complex(init.eps * init.beta, init.delta)
    E = pair.mu1 / 1.0 + 1j * pair.mu0
    z = c1 * E + c2 * np.conj(E)
    zeta = c3 + 1j * k0.eps0
    return ComplexFrame(pair.t, c1, c2, c3, z, zeta, E, pair.lam)


def kernel_from_frame_riccati(frame: ComplexFrame, k0: Kernel0, init, printed: bool = False) -> TransformKernel:
    """c0 = 0 kernel from (z, zeta).

    ``printed=True`` evaluates alpha and eps literally from the published
    compact forms (kept for comparison); the default uses the forms that
    reduce to the real superposition.
    """
    init = InitData.from_any(init)
    z, zeta, lam = frame.z, frame.zeta, frame.lam
    zc, zetac = np.conj(z), np.conj(zeta)
    b2 = (frame.c1 - np.conj(frame.c2)).real
    sgn = math.copysign(1.0, init.beta)
    mu0 = (z - zc) / (2j * (frame.c1 - np.conj(frame.c2)))
    with np.errstate(divide="ignore", invalid="ignore"):
        if printed:
            alpha = k0.alpha0 - lam**2 / (2j * np.abs(z) ** 2) * (z - zc) / (z + zc)
            eps = init.eps + 1j * sgn * math.sqrt(b2) * (zeta - zetac) / (z + zc)
        else:
            alpha = k0.alpha0 - 2j * lam**2 * (frame.c1 - np.conj(frame.c2)) / ((z - zc) * (z + zc))
            eps = init.eps + 1j * init.beta * mu0 * (zeta - zetac) / (z + zc)
        arr = {
            "mu": init.mu * (z + zc).real / 2,
            "alpha": alpha.real,
            "beta": (sgn * 2 * lam * math.sqrt(b2) / (z + zc)).real,
            "gamma": (init.gamma - (z - zc) / (2j * (z + zc))).real,
            "delta": (k0.delta0 - 1j * lam * (zeta - zetac) / (z + zc)).real,
            "eps": eps.real,
            "kappa": (
                init.kappa + k0.kappa0 + (zeta - zetac) ** 2 / (8j * (frame.c1 - np.conj(frame.c2))) * (z - zc) / (z + zc)
            ).real,
        }
    arr = _set_init(arr, frame.t, init)
    events = _denominator_events(k0, init, "caustic")
    guard = 1e-6 * (frame.t[-1] - frame.t[0])
    valid = _guard_mask(frame.t, k0.events + events, ("mu0_zero", "caustic"), guard)
    valid &= (arr["mu"] > 0) | (frame.t == frame.t[0])
    return TransformKernel(frame.t, **arr, c0_flag=0, init=init, valid=valid, events=events, method="riccati-complex")


def continuous_arg(frame_t: np.ndarray, z: np.ndarray, z_at: Callable | None = None, depth: int = 12) -> np.ndarray:
    """arg z accumulated along t, refining intervals whose phase step exceeds pi/2."""
    ang = np.angle(z)
    out = np.empty_like(ang)
    out[0] = ang[0]
    for i in range(1, len(z)):
        step = _phase_step(frame_t[i - 1], frame_t[i], z[i - 1], z[i], z_at, depth)
        out[i] = out[i - 1] + step
    return out


def _phase_step(ta, tb, za, zb, z_at, depth):
    d = np.angle(zb / za)
    if abs(d) < np.pi / 2 or z_at is None or depth == 0:
        if abs(d) >= np.pi / 2 and z_at is None:
            raise ValueError("grid too coarse to unwrap arg z; refine the time grid")
        return d
    tm = 0.5 * (ta + tb)
    zm = complex(z_at(tm))
    return _phase_step(ta, tm, za, zm, z_at, depth - 1) + _phase_step(tm, tb, zm, zb, z_at, depth - 1)


def kernel_from_frame_ermakov(frame: ComplexFrame, k0: Kernel0, init) -> TransformKernel:
    """c0 = 1 kernel from (z, zeta): mu = mu(0)|z|, gamma = gamma(0) - arg(z)/2."""
    init = InitData.from_any(init)
    z, zeta, lam = frame.z, frame.zeta, frame.lam
    if np.any(np.abs(z) == 0.0):
        raise AssertionError("z vanished")
    zc, zetac = np.conj(z), np.conj(zeta)
    cd = frame.c1 - np.conj(frame.c2)
    b2 = cd.real
    sgn = math.copysign(1.0, init.beta)
    az = np.abs(z)
    pair = k0.pair

    def z_at(tt):
        re, im = pair.z_parts(tt, init)
        return re[0] + 1j * im[0]

    argz = continuous_arg(frame.t, z, z_at)
    with np.errstate(divide="ignore", invalid="ignore"):
        arr = {
            "mu": init.mu * az,
            "alpha": (k0.alpha0 + lam**2 * cd * (z + zc) / (2j * az**2 * (z - zc))).real,
            "beta": sgn * lam * math.sqrt(b2) / az,
            "gamma": init.gamma - 0.5 * (argz - argz[0]),
            "delta": (k0.delta0 + lam * (zeta * z - zetac * zc) / (2j * az**2)).real,
            "eps": (sgn * (zeta * z + zetac * zc) / (2 * az * math.sqrt(b2))).real,
            "kappa": (init.kappa + k0.kappa0 + (zeta**2 * z + zetac**2 * zc) * (z - zc) / (8j * cd * az**2)).real,
        }
    arr = _set_init(arr, frame.t, init)
    guard = 1e-6 * (frame.t[-1] - frame.t[0])
    valid = _guard_mask(frame.t, k0.events, ("mu0_zero",), guard)
    return TransformKernel(frame.t, **arr, c0_flag=1, init=init, valid=valid, events=[], method="ermakov-complex")


# ---------------------------------------------------------------------------
# direct oracle


def integrate_riccati_direct(
    s: Scenario,
    init,
    c0: int,
    t_grid,
    rtol: float = RTOL,
    atol: float = ATOL,
    mu_floor: float = 1e-9,
) -> TransformKernel:
    """Integrate the seven-function system directly (the oracle).

    Integration halts at a caustic (mu -> 0, i.e. finite-time escape of alpha);
    samples beyond the halt are NaN and flagged invalid.
    """
    init = InitData.from_any(init)
    t = np.asarray(t_grid, dtype=float)
    s._check(t)

    def rhs(tt, y):
        mu, al, be, ga, de, ep, ka = y
        a, b, c, d, f, g = _coeff_arrays(s, tt)
        q = c + 4 * a * al
        return [
            (4 * a * al + 2 * d) * mu,
            c0 * a * be**4 - b - 2 * c * al - 4 * a * al * al,
            -q * be,
            -a * be * be,
            f + 2 * g * al + 2 * c0 * a * be**3 * ep - q * de,
            (g - 2 * a * de) * be,
            g * de - a * de * de + c0 * a * be * be * ep * ep,
        ]

    def hit(tt, y):
        return y[0] - mu_floor * init.mu

    hit.terminal = True
    hit.direction = -1.0
    sol = solve_ivp(rhs, (t[0], t[-1]), list(init.as_tuple()), method="DOP853", rtol=rtol, atol=atol,
                    dense_output=True, events=hit)
    if sol.status < 0:
        raise RuntimeError(sol.message)
    t_stop = float(sol.t[-1])
    inside = t <= t_stop
    vals = np.full((7, t.size), np.nan)
    vals[:, inside] = sol.sol(t[inside])
    events = []
    if sol.status == 1:
        events.append(CausticEvent(t_stop, "caustic"))
    arr = dict(zip(KERNEL_FIELDS, vals))

    def ev(tt):
        out = np.full((7, tt.size), np.nan)
        ok = tt <= t_stop
        if ok.any():
            out[:, ok] = sol.sol(tt[ok])
        return dict(zip(KERNEL_FIELDS, out))

    return TransformKernel(t, **arr, c0_flag=int(c0), init=init, valid=inside.copy(), events=events,
                           method="direct", evaluator=ev)


# ---------------------------------------------------------------------------
# quasi-invariants


def quasi_invariants(k: TransformKernel, k0: Kernel0, frame: ComplexFrame) -> dict:
    """Three pointwise identities of the Ermakov kernel, as sup-norm residuals."""
    init = k.init
    m = k.valid & k0.valid
    z = frame.z
    with np.errstate(divide="ignore", invalid="ignore"):
        q1 = 2j * (k.alpha - k0.alpha0) / k.beta**2 - (z + np.conj(z)) / (z - np.conj(z))
        sh = (init.delta + k0.eps0) / init.beta
        q2 = k.eps**2 + ((k.delta - k0.delta0) / k.beta) ** 2 - (init.eps**2 + sh**2)
        q3 = (
            k.kappa
            - init.kappa
            - k0.kappa0
            - (k.delta - k0.delta0) * k.eps / (2 * k.beta)
            + (k0.eps0 + init.delta) * init.eps / (2 * init.beta)
        )
    return {
        "ratio_identity": float(np.max(np.abs(q1[m]))),
        "circle_invariant": float(np.max(np.abs(q2[m]))),
        "kappa_identity": float(np.max(np.abs(q3[m]))),
        "pointwise": {"ratio_identity": q1, "circle_invariant": q2, "kappa_identity": q3},
    }


def build_kernel(s: Scenario, init, c0: int, t_grid, method: str = "superpose") -> TransformKernel:
    """Convenience: full pipeline from scenario to kernel."""
    init = InitData.from_any(init)
    if method == "direct":
        return integrate_riccati_direct(s, init, c0, t_grid)
    pair = fundamental_pair(s, t_grid, c0=c0, beta0_init=init.beta, mu0_init=init.mu, alpha0_init=init.alpha)
    k0 = fundamental_kernel(s, pair)
    if method == "complex":
        fr = complex_frame(init, pair, k0)
        return kernel_from_frame_ermakov(fr, k0, init) if c0 else kernel_from_frame_riccati(fr, k0, init)
    return ermakov_superpose(k0, init) if c0 else riccati_superpose(k0, init)
