"""Independent verification: PDE residuals, a pseudo-spectral propagator, conservation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from typing import Callable

import numpy as np
from scipy import fft as sfft
from scipy.integrate import solve_ivp

from .equations import EquationSpec, WaveField, nonlinear_terms
from .spectral import deriv, smooth_window, dealias_mask, wavenumbers, workers

__all__ = [
    "ResidualReport",
    "residual",
    "residual_terms",
    "PropagatorConfig",
    "propagate",
    "conservation_report",
    "hamiltonian",
    "sign_flip",
]

_FD4 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0


@dataclass
class ResidualReport:
    rel_residual_sup: float
    rel_residual_l2: float
    nx: int
    nt: int
    x_range: tuple
    t_range: tuple
    interior: tuple
    skipped: list = field(default_factory=list)
    vacuous: bool = False
    per_slice: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_slice"] = [float(v) for v in self.per_slice]
        return d


def residual_terms(eq: EquationSpec, x, t, psi, psi_t) -> list:
    """Additive pieces whose sum is the residual (left side minus right side)."""
    dx = float(x[1] - x[0])
    psi_x = deriv(psi, dx, 1)
    psi_xx = deriv(psi, dx, 2)
    if eq.is_cgl:
        p = eq.params
        m2 = np.abs(psi) ** 2
        return [
            psi_t,
            -p["eps"] * psi,
            -(p["b1"] + 1j * p["c1"]) * psi_xx,
            (p["b3"] - 1j * p["c3"]) * m2 * psi,
            (p["b5"] - 1j * p["c5"]) * m2 * m2 * psi,
        ]
    a, b, c, d, f, g = eq.linear_coeffs(t)
    lhs = [
        1j * psi_t,
        a * psi_xx,
        -b * x * x * psi,
        1j * c * x * psi_x,
        1j * d * psi,
        f * x * psi,
        -1j * g * psi_x,
    ]
    rhs = nonlinear_terms(eq.h_values(x, t), x, psi, psi_x)
    return lhs + [-r for r in rhs]


def _auto_step(fn, x, t, probe: float = 1e-5, target: float = 0.01, h_max: float = 1e-3) -> float:
    u0 = fn(x, t)
    u1 = fn(x, t + probe)
    amp = np.abs(u0)
    m = amp > 1e-6 * np.max(amp) if np.max(amp) > 0 else np.zeros_like(amp, dtype=bool)
    if not np.any(m):
        return h_max
    w = float(np.max(np.abs(u1[m] - u0[m]) / amp[m])) / probe
    return min(h_max, target / w) if w > 0 else h_max


def _prep(values, x, win):
    return values * win if win is not None else values


def residual(
    eq: EquationSpec,
    field_or_fn,
    x=None,
    t_slices=None,
    *,
    h: float | None = None,
    taper: float | None = None,
    margin: float = 0.0,
    interior: tuple | None = None,
    singular_times=(),
    guard: float = 1e-3,
    leak_tol: float = 1e-8,
) -> ResidualReport:
    """Relative residual of a field against ``eq``.

    ``field_or_fn`` is either a WaveField (time derivatives by 4th-order
    central differences across its uniformly spaced slices) or a callable
    psi(x, t) (derivatives from a five-point stencil of step ``h`` around each
    requested slice). With ``taper`` the field is multiplied by a smooth window
    that is 1 on the inner region and the residual is measured there only
    (shrunk by ``margin``); this is how non-decaying fields are handled.
    With ``h=None`` the stencil step is picked per slice so that h times the
    largest local frequency |psi_t/psi| stays near 0.01.
    """
    if isinstance(field_or_fn, WaveField):
        fw = field_or_fn
        x = fw.x
        if fw.t.size < 8:
            raise ValueError("need at least 8 time slices for 4th-order differencing")
        dts = np.diff(fw.t)
        if np.max(np.abs(dts - dts[0])) > 1e-9 * abs(dts[0]):
            raise ValueError("slices must be uniformly spaced in t")
        idx = range(2, fw.t.size - 2)
        times = fw.t[2:-2]
        dt = dts[0]

        def slice_data(i):
            st = fw.values[i - 2 : i + 3]
            return fw.values[i], np.tensordot(_FD4, st, axes=(0, 0)) / dt

        getters = [(fw.t[i], (lambda i=i: slice_data(i))) for i in idx]
    else:
        fn = field_or_fn
        if x is None or t_slices is None:
            raise ValueError("callable input needs x grid and t_slices")
        x = np.asarray(x, dtype=float)
        times = np.asarray(t_slices, dtype=float)

        def slice_data_fn(ti):
            hh = h if h is not None else _auto_step(fn, x, ti)
            st = np.array([fn(x, ti + k * hh) for k in (-2, -1, 0, 1, 2)])
            return st[2], np.tensordot(_FD4, st, axes=(0, 0)) / hh

        getters = [(ti, (lambda ti=ti: slice_data_fn(ti))) for ti in times]

    x = np.asarray(x, dtype=float)
    L = x[-1] - x[0]
    if taper is not None:
        lo, hi = x[0] + taper + 0.02 * L, x[-1] - taper - 0.02 * L
        win = smooth_window(x, lo, hi, taper)
        inner = (lo + margin, hi - margin) if interior is None else interior
    else:
        win = None
        inner = (x[0], x[-1]) if interior is None else interior
    mask = (x >= inner[0]) & (x <= inner[1])

    skipped = []
    worst = 0.0
    num2 = 0.0
    den2 = 0.0
    per_slice = []
    any_nonzero = False
    for ti, get in getters:
        if any(abs(ti - ts) < guard for ts in singular_times):
            skipped.append(float(ti))
            continue
        psi, psi_t = get()
        if not (np.all(np.isfinite(psi)) and np.all(np.isfinite(psi_t))):
            skipped.append(float(ti))
            continue
        amp = np.max(np.abs(psi))
        if amp == 0.0:
            per_slice.append(0.0)
            continue
        any_nonzero = True
        if win is None:
            edge = max(abs(psi[0]), abs(psi[-1]), abs(psi[1]), abs(psi[-2]))
            if edge > leak_tol * amp:
                raise ValueError(f"tail leakage at t={ti}: edge/max = {edge / amp:.2e}; use a window")
        terms = residual_terms(eq, x, ti, _prep(psi, x, win), _prep(psi_t, x, win))
        R = sum(terms)[mask]
        scale = max(np.max(np.abs(T[mask])) if np.ndim(T) else 0.0 for T in terms)
        scale_l2 = max(np.linalg.norm(T[mask]) if np.ndim(T) else 0.0 for T in terms)
        r = float(np.max(np.abs(R)) / scale) if scale > 0 else 0.0
        per_slice.append(r)
        worst = max(worst, r)
        num2 += float(np.linalg.norm(R) ** 2)
        den2 += float(scale_l2**2)
    l2 = math.sqrt(num2 / den2) if den2 > 0 else 0.0
    return ResidualReport(
        rel_residual_sup=worst,
        rel_residual_l2=l2,
        nx=int(x.size),
        nt=len(per_slice),
        x_range=(float(x[0]), float(x[-1])),
        t_range=(float(np.min(times)), float(np.max(times))) if len(times) else (0.0, 0.0),
        interior=(float(inner[0]), float(inner[1])),
        skipped=skipped,
        vacuous=not any_nonzero,
        per_slice=per_slice,
    )


# ---------------------------------------------------------------------------
# propagation


@dataclass
class PropagatorConfig:
    x_domain: tuple = (-40.0, 40.0)
    n_modes: int = 2048
    rtol: float = 1e-10
    atol: float = 1e-12
    dealias: bool = True
    t_out: tuple | None = None
    resolution_tol: float = 1e-8  # halt when the outer-third spectral energy fraction exceeds this
    max_amplitude: float = 1e8

    def grid(self) -> np.ndarray:
        lo, hi = self.x_domain
        n = self.n_modes
        return lo + (hi - lo) * np.arange(n) / n


def _rhs_factory(eq: EquationSpec, x, cfg: PropagatorConfig):
    n = x.size
    dx = x[1] - x[0]
    k = wavenumbers(n, dx)
    mask = dealias_mask(n) if cfg.dealias else np.ones(n, dtype=bool)
    W = workers()

    def filt(u):
        return sfft.ifft(sfft.fft(u, workers=W) * mask, workers=W)

    if eq.is_cgl:
        p = eq.params

        def rhs(t, u):
            uh = sfft.fft(u, workers=W)
            uxx = sfft.ifft(-(k**2) * uh, workers=W)
            m2 = np.abs(u) ** 2
            nl = filt(-(p["b3"] - 1j * p["c3"]) * m2 * u - (p["b5"] - 1j * p["c5"]) * m2 * m2 * u)
            return p["eps"] * u + (p["b1"] + 1j * p["c1"]) * uxx + nl

        return rhs

    ik = 1j * k
    if n % 2 == 0:
        ik = ik.copy()
        ik[n // 2] = 0.0

    def rhs(t, u):
        a, b, c, d, f, g = eq.linear_coeffs(t)
        uh = sfft.fft(u, workers=W)
        ux = sfft.ifft(ik * uh, workers=W)
        uxx = sfft.ifft(-(k**2) * uh, workers=W)
        lin = -a * uxx + b * x * x * u - 1j * c * x * ux - 1j * d * u - f * x * u + 1j * g * ux
        nl = sum(nonlinear_terms(eq.h_values(x, t), x, u, ux))
        return -1j * (lin + filt(nl))

    return rhs


def propagate(eq: EquationSpec, psi0, t_final: float, cfg: PropagatorConfig | None = None, t0: float = 0.0) -> WaveField:
    """Method-of-lines evolution: spectral x-derivatives, adaptive DOP853 in t.

    Halts early (without raising) when the field loses spectral resolution
    or exceeds ``max_amplitude``; the returned field's meta carries
    ``status`` and ``last_valid_time``.
    """
    cfg = cfg or PropagatorConfig()
    x = cfg.grid()
    u0 = np.asarray(psi0(x) if callable(psi0) else psi0, dtype=complex)
    if u0.shape != x.shape:
        raise ValueError("initial slice does not match the grid")
    rhs = _rhs_factory(eq, x, cfg)
    n = x.size
    outer = ~(np.abs(sfft.fftfreq(n) * n) <= n / 3.0)

    def resolution(t, u):
        uh = np.abs(sfft.fft(u, workers=workers())) ** 2
        return float(np.sum(uh[outer]) / max(np.sum(uh), 1e-300)) - cfg.resolution_tol

    resolution.terminal = True
    resolution.direction = 1.0

    def amplitude(t, u):
        return float(np.max(np.abs(u))) - cfg.max_amplitude

    amplitude.terminal = True
    amplitude.direction = 1.0

    t_out = np.asarray(cfg.t_out if cfg.t_out is not None else np.linspace(t0, t_final, 11), dtype=float)
    # rejected trial steps near a collapse may overflow; the events catch real growth
    with np.errstate(over="ignore", invalid="ignore"):
        sol = solve_ivp(
            rhs, (t0, t_final), u0, method="DOP853", t_eval=t_out, rtol=cfg.rtol, atol=cfg.atol,
            events=[resolution, amplitude],
        )
    status = "ok"
    if sol.status == 1:
        status = "resolution_lost" if len(sol.t_events[0]) else "amplitude_cap"
    elif sol.status < 0:
        status = "step_failure"
    t_last = float(sol.t[-1]) if sol.t.size else t0
    if sol.status != 0 and sol.t_events is not None:
        for te in sol.t_events:
            if len(te):
                t_last = float(te[0])
    vals = sol.y.T if sol.y.size else np.empty((0, n), dtype=complex)
    meta = {
        "equation": eq.describe(),
        "status": status,
        "message": sol.message,
        "last_valid_time": t_last,
        "nfev": int(sol.nfev),
        "n_modes": n,
        "x_domain": list(cfg.x_domain),
    }
    return WaveField(x, sol.t, vals, meta)


def hamiltonian(eq: EquationSpec, x, psi, t: float = 0.0) -> float | None:
    """Conserved energy for kinds without derivative nonlinearities.

    E = int a|psi_x|^2 + b x^2|psi|^2 - f x|psi|^2 + h0|psi|^2
        + (h1 x + h2)|psi|^4/2 + h5|psi|^6/3 dx
    """
    if eq.is_cgl or eq.has_derivative_terms:
        return None
    a, b, c, d, f, g = eq.linear_coeffs(t)
    if c != 0 or d != 0 or g != 0:
        return None
    dx = float(x[1] - x[0])
    h0, h1, h2, h3, h4, h5 = eq.h_values(x, t)
    m2 = np.abs(psi) ** 2
    px = deriv(psi, dx, 1)
    dens = a * np.abs(px) ** 2 + (b * x * x - f * x + h0) * m2 + (h1 * x + h2) * m2**2 / 2 + h5 * m2**3 / 3
    return float(np.real(np.sum(dens)) * dx)


def conservation_report(run: WaveField, eq: EquationSpec) -> dict:
    """Norm (and energy when defined) versus time, with relative drifts."""
    dx = run.dx
    norms = np.sum(np.abs(run.values) ** 2, axis=1) * dx
    rep = {
        "t": [float(v) for v in run.t],
        "norm": [float(v) for v in norms],
        "conservative": eq.conservative,
    }
    if norms.size:
        rep["norm_drift"] = float(np.max(np.abs(norms - norms[0])) / norms[0]) if norms[0] else 0.0
    if eq.conservative:
        en = [hamiltonian(eq, run.x, run.values[i], run.t[i]) for i in range(run.t.size)]
        if en and en[0] is not None:
            e0 = en[0]
            rep["energy"] = en
            rep["energy_drift"] = float(max(abs(e - e0) for e in en) / max(abs(e0), 1e-300))
    return rep


def sign_flip(eq: EquationSpec) -> EquationSpec:
    """A deliberately wrong equation for negative controls.

    Nonlinear kinds get the opposite nonlinearity sign; linear ones get a
    defocusing cubic term (cubic_pm) or, in the general form, h2 = 2.
    """
    k, p = eq.kind, eq.params
    if k == "cubic_pm":
        return EquationSpec.cubic_pm(-p["sign"] if p["sign"] else 1)
    if k == "quintic_free":
        return EquationSpec.quintic_free(-p["sign"])
    if k == "quintic_trap":
        return EquationSpec.quintic_trap(-p["sign"])
    if k == "cubic_linear_potential":
        return EquationSpec.cubic_linear_potential(-p["k"])
    if k == "dnls_trap":
        return EquationSpec.dnls_trap(-p["d3"], -p["d5"])
    if k == "autonomous_standard":
        d = [p[f"d{i}"] for i in range(6)]
        d = [-v for v in d] if any(d) else [0.0, 0.0, 1.0, 0.0, 0.0, 0.0]
        return EquationSpec.autonomous_standard(p["c0"], d)
    if k == "general_variable":
        probe = np.linspace(-1.0, 1.0, 5)
        t0 = float(eq.scenario.t_domain[0])
        zero = all(np.all(np.asarray(h(probe, t0)) == 0) for h in eq.h_funcs)
        if zero:
            two = lambda x, t: 2.0 + 0 * np.asarray(x, dtype=float)
            hs = tuple(two if i == 2 else h for i, h in enumerate(eq.h_funcs))
        else:
            hs = tuple((lambda f: (lambda x, t: -f(x, t)))(h) for h in eq.h_funcs)
        return EquationSpec.general_variable(eq.scenario, hs)
    if k == "piv_trap":
        return EquationSpec.cubic_pm(1)
    if k == "cgl_quintic":
        q = dict(p)
        q["c3"], q["c5"] = -q["c3"], -q["c5"]
        return EquationSpec.cgl_quintic(**q)
    raise ValueError(f"no sign-flip control for {k}")
