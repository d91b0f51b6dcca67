"""Painleve II (both signs) from Airy seeds, tail fits and connection laws; PIV residual."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.integrate import solve_ivp

from ._dense import DenseTable
from .specfun import airy_ai, airy_ai_prime, arg_gamma

__all__ = [
    "PIIProfile",
    "ConnectionData",
    "PoleDetected",
    "seed_from_airy",
    "integrate_pii",
    "fit_oscillatory_tail",
    "connect_defocusing",
    "connect_focusing",
    "piv_residual",
]

DEFOCUSING = "defocusing"
FOCUSING = "focusing"


class PoleDetected(RuntimeError):
    def __init__(self, profile: "PIIProfile"):
        super().__init__(f"pole near z={profile.pole['c0']:.10g} (local exponent {profile.pole['exponent']:.4f})")
        self.profile = profile


@dataclass
class PIIProfile:
    sign: str
    z: np.ndarray
    F: np.ndarray
    dF: np.ndarray
    k0: float
    pole: dict | None = None
    sol: object = field(default=None, repr=False)

    _tab: DenseTable | None = field(default=None, repr=False, compare=False)

    def __call__(self, z):
        if self._tab is None:
            self._tab = DenseTable(self.sol.sol)
        return self._tab(z)[0]

    def to_csv(self) -> str:
        rows = ["z,F,dF"] + [f"{a!r},{b!r},{c!r}" for a, b, c in zip(self.z, self.F, self.dF)]
        return "\n".join(rows) + "\n"


@dataclass
class ConnectionData:
    r: float
    theta0: float
    k0: float | None
    branch: str
    generic_triple: tuple | None = None
    n: int | None = None
    quantization_defect: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def _sgn(sign) -> float:
    if sign in (DEFOCUSING, +1, 1):
        return 1.0
    if sign in (FOCUSING, -1):
        return -1.0
    raise ValueError(f"sign must be 'defocusing' or 'focusing', got {sign!r}")


def seed_from_airy(k0: float, z_plus: float = 8.0) -> tuple[float, float]:
    """(F, F') = k0 (Ai, Ai') at z_plus."""
    if z_plus < 6:
        raise ValueError("seed point must satisfy z_plus >= 6")
    return float(k0 * airy_ai(z_plus)), float(k0 * airy_ai_prime(z_plus))


def integrate_pii(sign, seed, z_from: float, z_to: float, k0: float = float("nan"), *, rtol: float = 1e-12,
                  atol: float | None = None, dz: float = 0.01, pole_cap: float = 1e6, raise_on_pole: bool = False) -> PIIProfile:
    """F'' = z F + 2 s F^3 (s = +1 defocusing, -1 focusing), integrated leftward."""
    s = _sgn(sign)
    if atol is None:
        # the Airy seed is tiny for small k0; keep atol well below it
        atol = min(1e-14, 1e-10 * max(abs(seed[0]), abs(seed[1]), 1e-300))
    if not z_from > z_to:
        raise ValueError("integration runs leftward: need z_from > z_to")

    def rhs(z, y):
        return [y[1], z * y[0] + 2 * s * y[0] ** 3]

    def blow(z, y):
        return abs(y[0]) - pole_cap

    blow.terminal = True
    n = int(round((z_from - z_to) / dz)) + 1
    z_eval = np.linspace(z_from, z_to, n)
    sol = solve_ivp(rhs, (z_from, z_to), list(seed), method="DOP853", rtol=rtol, atol=atol,
                    t_eval=z_eval, events=blow, dense_output=True)
    if sol.status < 0:
        raise RuntimeError(f"PII integration failed: {sol.message}")
    prof = PIIProfile(DEFOCUSING if s > 0 else FOCUSING, sol.t, sol.y[0], sol.y[1], float(k0), None, sol)
    if sol.status == 1:
        prof.pole = _fit_pole(sol)
        if raise_on_pole:
            raise PoleDetected(prof)
    return prof


def _fit_pole(sol) -> dict:
    """Local exponent p of F ~ C (z - c0)^p from d/dz (F/F') = 1/p on the last decade."""
    z_end = sol.t_events[0][0]
    F_end = sol.y_events[0][0][0]
    # sample the approach with |F| between cap/10 and cap
    z_hi = sol.t[-1] if sol.t.size else z_end
    zs = np.linspace(z_hi, z_end, 4001)
    F, dF = sol.sol(zs)
    m = np.abs(F) >= np.abs(F_end) / 10
    zs, F, dF = zs[m], F[m], dF[m]
    q = F / dF
    slope, intercept = np.polyfit(zs, q, 1)
    p = 1.0 / slope
    c0 = -intercept / slope
    return {"c0": float(c0), "exponent": float(p), "z_stop": float(z_end), "sign": float(np.sign(F_end))}


def _phase(z, r, s):
    az = np.abs(z)
    return (2.0 / 3.0) * az**1.5 - s * 0.75 * r * r * np.log(az)


def fit_oscillatory_tail(profile: PIIProfile, window=(-40.0, -15.0), max_iter: int = 10, tol: float = 1e-6) -> tuple[float, float]:
    """Fit F ~ r |z|^{-1/4} sin(s(z) - theta0) on a window of the left tail."""
    za, zb = sorted(window)
    if zb > -15 + 1e-12:
        raise ValueError("the fitting window must lie in z <= -15")
    s = 1.0 if profile.sign == DEFOCUSING else -1.0
    m = (profile.z >= za) & (profile.z <= zb)
    if m.sum() < 20:
        raise ValueError("profile does not cover the fitting window")
    z, F = profile.z[m], profile.F[m]
    w = np.abs(z) ** -0.25
    r = float(np.sqrt(2 * np.mean(F**2 / w**2)))
    for _ in range(max_iter):
        ph = _phase(z, r, s)
        M = np.column_stack([w * np.sin(ph), -w * np.cos(ph)])
        (A, B), *_ = np.linalg.lstsq(M, F, rcond=None)
        r_new = math.hypot(A, B)
        theta0 = math.atan2(B, A)
        if abs(r_new - r) < tol:
            r = r_new
            break
        r = r_new
    else:
        raise RuntimeError("tail fit did not converge")
    return r, theta0


def connect_defocusing(k0: float) -> ConnectionData:
    if k0 == 0 or abs(k0) >= 1:
        raise ValueError("defocusing connection needs 0 < |k0| < 1")
    r2 = -math.log1p(-k0 * k0) / math.pi
    theta0 = 1.5 * r2 * math.log(2) + float(arg_gamma(1 - 0.5j * r2)) + 0.25 * math.pi * (1 - 2 * math.copysign(1, k0))
    return ConnectionData(math.sqrt(r2), theta0, k0, "defocusing")


def _wrap(x):
    return (x + math.pi) % (2 * math.pi) - math.pi


def connect_focusing(r: float, theta0: float, tol: float = 1e-6) -> ConnectionData:
    """Classify left-tail data (r, theta0) of F'' = zF - 2F^3."""
    if r == 0:
        raise ValueError("r must be nonzero")
    r2 = r * r
    q = theta0 + 1.5 * r2 * math.log(2) - 0.25 * math.pi - float(np.angle(_gamma(0.5j * r2)))
    n = int(round(q / math.pi))
    defect = q - n * math.pi
    if abs(defect) <= tol:
        k0 = (-1) ** (n % 2) * math.sqrt(math.expm1(math.pi * r2))
        return ConnectionData(r, theta0, k0, "focusing_quantized", None, n, defect)
    xi = math.sqrt(math.expm1(math.pi * r2)) * np.exp(
        1j * (1.5 * r2 * math.log(2) - 0.25 * math.pi + theta0 - float(np.angle(_gamma(0.5j * r2))))
    )
    if xi.imag == 0:
        raise ValueError("Im xi = 0: beta^2 undefined")
    alpha = -math.copysign(1.0, xi.imag)
    beta2 = math.log((1 + abs(xi) ** 2) / (2 * abs(xi.imag))) / math.pi
    theta = -0.75 * math.pi - 3.5 * beta2 * math.log(2) + float(np.angle(1 + xi * xi)) + float(np.angle(_gamma(1j * beta2)))
    beta = math.sqrt(beta2) if beta2 >= 0 else float("nan")
    return ConnectionData(r, theta0, None, "focusing_generic", (alpha, beta, theta), n, defect)


def _gamma(w):
    from .specfun import gamma_complex

    return complex(gamma_complex(w))


def piv_residual(u, x, n: int, max_step: float = 0.05) -> dict:
    """Residual of u'' - 3u^5 - 2x u^3 - (x^2/4 - n - 1/2) u with 4th-order differences.

    Also returns the residual of psi = exp(-i(n+1/2)t) u(x) in
    i psi_t + psi_xx - x^2/4 psi = 2x|psi|^2 psi + 3|psi|^4 psi, which is the
    same expression up to the unimodular factor.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    h = x[1] - x[0]
    if np.max(np.abs(np.diff(x) - h)) > 1e-9 * abs(h):
        raise ValueError("grid must be uniform")
    if h > max_step:
        raise ValueError(f"grid step {h} exceeds {max_step}")
    upp = (-u[4:] + 16 * u[3:-1] - 30 * u[2:-2] + 16 * u[1:-3] - u[:-4]) / (12 * h * h)
    xi, ui = x[2:-2], u[2:-2]
    ode = upp - 3 * ui**5 - 2 * xi * ui**3 - (xi**2 / 4 - n - 0.5) * ui
    # PDE residual at t=0: i psi_t = (n+1/2) psi
    E = n + 0.5
    pde = E * ui + upp - xi**2 / 4 * ui - 2 * xi * ui**3 - 3 * ui**5
    scale = max(np.max(np.abs(upp)), np.max(np.abs(ui)), 1e-300)
    return {
        "x": xi,
        "ode_residual": ode,
        "pde_residual": pde,
        "sup": float(np.max(np.abs(ode))) if ode.size else 0.0,
        "rel_sup": float(np.max(np.abs(ode)) / scale) if np.any(u) else 0.0,
        "pde_sup": float(np.max(np.abs(pde))) if pde.size else 0.0,
    }
