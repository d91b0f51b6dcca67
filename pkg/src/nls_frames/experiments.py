"""Named experiments behind the acceptance checks and the CLI demos.

Each ``criterion_N`` returns a CriterionResult whose items carry the measured
value, the tolerance and a pass flag. Items marked ``printed=True`` test a
formula exactly as published next to a corrected variant; they are reported
but kept apart from the corrected check.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.integrate import quad, solve_ivp

from . import catalog as cat
from .coeffs import demo_scenarios
from .kernel import (
    KERNEL_FIELDS,
    InitData,
    build_kernel,
    complex_frame,
    ermakov_superpose,
    fundamental_kernel,
    fundamental_pair,
    integrate_riccati_direct,
    kernel_from_frame_ermakov,
    kernel_from_frame_riccati,
    quasi_invariants,
    riccati_superpose,
)
from .observe import moments, pulse_spectrum_closed, spectrum, wigner_closed, wigner_numeric
from .painleve import connect_defocusing, fit_oscillatory_tail, integrate_pii, seed_from_airy
from .specfun import sech_integral_testvectors, sech_fourier_closed, sech_fourier_integral
from .spectral import smooth_window
from .transform import nonlinearity_map, push_forward_fn
from .verify import PropagatorConfig, conservation_report, propagate, residual, sign_flip

__all__ = ["Item", "CriterionResult", "CRITERIA", "run_criterion", "osc_pulse_heisenberg_table", "INIT_SET"]


@dataclass
class Item:
    name: str
    value: float
    tol: float
    passed: bool
    printed: bool = False
    note: str = ""


@dataclass
class CriterionResult:
    number: int
    title: str
    items: list = field(default_factory=list)
    info: dict = field(default_factory=dict)
    seconds: float = 0.0

    def add(self, name, value, tol, ok=None, printed=False, note="", mode="le"):
        value = float(value)
        if ok is None:
            ok = value <= tol if mode == "le" else value >= tol
        self.items.append(Item(name, value, float(tol), bool(ok and np.isfinite(value)), printed, note))

    @property
    def passed(self) -> bool:
        """All corrected (non-printed) items pass."""
        core = [it for it in self.items if not it.printed]
        return bool(core) and all(it.passed for it in core)

    @property
    def printed_passed(self) -> bool | None:
        pr = [it for it in self.items if it.printed]
        return None if not pr else all(it.passed for it in pr)

    def to_dict(self) -> dict:
        return {
            "number": self.number,
            "title": self.title,
            "passed": self.passed,
            "printed_passed": self.printed_passed,
            "items": [asdict(it) for it in self.items],
            "info": self.info,
            "seconds": self.seconds,
        }


INIT_SET = (
    InitData(mu=1.3, alpha=0.2, beta=0.8, gamma=0.1, delta=-0.3, eps=0.4, kappa=0.05),
    InitData(),
    InitData(mu=0.7, alpha=-0.15, beta=1.4, gamma=0.0, delta=0.5, eps=-0.2, kappa=0.1),
    InitData(mu=2.0, alpha=0.4, beta=0.5, gamma=-0.3, delta=0.2, eps=0.1, kappa=-0.2),
    InitData(mu=1.0, alpha=-0.1, beta=1.1, gamma=0.2, delta=-0.4, eps=-0.3, kappa=0.3),
)


def _grid(s, n=201):
    return np.linspace(*s.t_domain, n)


def _routes(s, init, c0, t):
    pair = fundamental_pair(s, t, c0=c0, beta0_init=init.beta, mu0_init=init.mu, alpha0_init=init.alpha)
    k0 = fundamental_kernel(s, pair)
    sup = ermakov_superpose(k0, init) if c0 else riccati_superpose(k0, init)
    return pair, k0, sup


# -- 1-4: kernels ----------------------------------------------------------


CAUSTIC_GUARD = 1e-2


def _away_from_caustics(k, t, guard=CAUSTIC_GUARD):
    m = k.valid.copy()
    for ev in k.events:
        if ev.kind == "caustic":
            m &= np.abs(t - ev.t) > guard
    return m


def criterion_1() -> CriterionResult:
    res = CriterionResult(1, "superposition kernels vs direct ODE integration")
    worst = {0: 0.0, 1: 0.0}
    unguarded = 0.0
    for name, s in demo_scenarios().items():
        t = _grid(s)
        for j, init in enumerate(INIT_SET):
            for c0 in (0, 1):
                _, _, ks = _routes(s, init, c0, t)
                kd = integrate_riccati_direct(s, init, c0, t)
                m = _away_from_caustics(ks, t) & kd.valid
                d = max(ks.sup_diff(kd, mask=m).values())
                unguarded = max(unguarded, max(ks.sup_diff(kd).values()))
                worst[c0] = max(worst[c0], d)
                res.add(f"{name}/init{j}/c0={c0}", d, 1e-8)
    res.info = {"scenarios": len(demo_scenarios()), "inits": len(INIT_SET), "worst_by_c0": worst,
                "caustic_guard": CAUSTIC_GUARD, "worst_including_guard_band": unguarded}
    return res


def criterion_2() -> CriterionResult:
    res = CriterionResult(2, "real and complex-frame kernel forms agree")
    worst_printed = 0.0
    for name, s in demo_scenarios().items():
        t = _grid(s)
        for j, init in enumerate(INIT_SET):
            for c0 in (0, 1):
                pair, k0, ks = _routes(s, init, c0, t)
                fr = complex_frame(init, pair, k0)
                kc = kernel_from_frame_ermakov(fr, k0, init) if c0 else kernel_from_frame_riccati(fr, k0, init)
                res.add(f"{name}/init{j}/c0={c0}", max(ks.sup_diff(kc).values()), 1e-9)
                if c0 == 0:
                    kp = kernel_from_frame_riccati(fr, k0, init, printed=True)
                    worst_printed = max(worst_printed, max(kp.sup_diff(ks).values()))
    res.add("complex Riccati form as printed (alpha, eps)", worst_printed, 1e-9, printed=True,
            note="printed alpha/eps expressions do not reduce to the real form")
    return res


def criterion_3() -> CriterionResult:
    res = CriterionResult(3, "Ermakov quasi-invariants")
    for name, s in demo_scenarios().items():
        t = _grid(s)
        for j, init in enumerate(INIT_SET):
            pair, k0, ks = _routes(s, init, 1, t)
            q = quasi_invariants(ks, k0, complex_frame(init, pair, k0))
            res.add(f"{name}/init{j}/circle", q["circle_invariant"], 1e-8)
            res.add(f"{name}/init{j}/kappa", q["kappa_identity"], 1e-8)
    return res


def fiber_closed_form(a, d, g, init, t, printed=False) -> dict:
    D = 1 + 4 * init.alpha * a * t
    out = {
        "mu": init.mu * D * np.exp(2 * d * t),
        "alpha": init.alpha / D,
        "beta": init.beta / D,
        "gamma": init.gamma - init.beta**2 * a * t / D,
        "delta": (init.delta + 2 * init.alpha * g * t) / D,
        "eps": init.eps + init.beta * (g - 2 * a * init.delta) * t / D,
    }
    if printed:
        out["kappa"] = init.kappa + init.delta * (g - init.delta) * t / D
    else:
        out["kappa"] = init.kappa + (init.alpha * g * g * t * t + g * t * init.delta - a * t * init.delta**2) / D
    return out


def criterion_4() -> CriterionResult:
    res = CriterionResult(4, "fiber kernel closed forms")
    s = demo_scenarios()["fiber"]
    a, d, g = 0.5, 0.1, -0.3
    t = _grid(s)
    worst_kappa_printed = 0.0
    for j, init in enumerate(INIT_SET):
        k = build_kernel(s, init, 0, t)
        m = k.valid
        ref = fiber_closed_form(a, d, g, init, t)
        for f in KERNEL_FIELDS:
            res.add(f"init{j}/{f}", np.max(np.abs(ref[f][m] - getattr(k, f)[m])), 1e-9)
        kp = fiber_closed_form(a, d, g, init, t, printed=True)["kappa"]
        worst_kappa_printed = max(worst_kappa_printed, float(np.max(np.abs(kp[m] - k.kappa[m]))))
    res.add("kappa as printed", worst_kappa_printed, 1e-9, printed=True,
            note="printed kappa agrees only when a = 1 and alpha(0) g = 0")
    return res


# -- 5: gauge correctness ----------------------------------------------------


def _pii_profile(k0, sign="defocusing"):
    return integrate_pii(sign, seed_from_airy(k0, 8.0), 8.0, -80.0, k0)


def _own_equation_cases():
    p = _pii_profile(0.5)
    pf = _pii_profile(0.5, "focusing")
    lin = lambda a, b: np.linspace(a, b, 100)
    return [
        ("quintic_pulse", cat.quintic_pulse(0.3, 0.7, 1.5), lin(0, 0.3), 30, None),
        ("quintic_source", cat.quintic_source(0.3, 0.7, 0.8), lin(0, 0.3), 15, 3.0),
        ("osc_pulse", cat.osc_pulse(0.2, 0.5, 1.5), lin(-0.6, 0.6), 15, None),
        ("osc_source", cat.osc_source(0.2, 0.5, 0.8), lin(-0.6, 0.6), 12, 3.0),
        ("osc_pulse_general", cat.osc_pulse_general(0.2, 0.5, 1.5, (0.3, 1.2, 0.4, -0.2)), lin(-0.3, 0.3), 15, None),
        ("blowup_family", cat.blowup_family(cat.quintic_pulse(0, 0, 1.5), (-0.25, 1.1, 0.1, 0.2, 0.3, 0.4)), lin(0, 0.6), 30, None),
        ("gauge_free_to_trap", cat.gauge_free_to_trap(cat.quintic_pulse(0, 0.6, 1.5)), lin(-0.5, 0.5), 30, None),
        ("group_orbit_trap", cat.group_orbit_trap(cat.osc_pulse(0.1, 0.4, 1.5), (0.3, 1.2, 0, 0.4, -0.2, 0)), lin(0.1, 0.5), 15, None),
        ("airy_berry", cat.airy_berry(1.0, 0.5), lin(0, 0.3), 20, 3.0),
        ("airy_expansion", cat.airy_expansion(1.0, 2.0), lin(0, 1.6), 10, 3.0),
        ("airy_expansion_t1=0", cat.airy_expansion(1.0, 0.0), lin(0.5, 1.5), 10, 3.0),
        ("pii_packet/defocusing", cat.pii_packet(1.0, 0.5, p), lin(0, 0.3), 20, 3.0),
        ("pii_packet/focusing", cat.pii_packet(1.0, 0.5, pf), lin(0, 0.3), 20, 3.0),
        ("const_velocity", cat.const_velocity_packet(0.5, 0.4, p), lin(0, 0.3), 20, 3.0),
    ]


GAUGE_INIT = InitData(mu=1.0, alpha=0.05, beta=1.0, gamma=0.0, delta=0.1, eps=0.2, kappa=0.0)


def gauge_residual(handle, x, ts, taper=None):
    """(residual, sign-flip control residual) of a handle on its own equation."""
    r = residual(handle.equation, handle, x, ts, taper=taper).rel_residual_sup
    rn = residual(sign_flip(handle.equation), handle, x, ts, taper=taper).rel_residual_sup
    return r, rn


def pushed_handle(base, s, init=GAUGE_INIT, c0=None):
    """Push a standard-form catalog solution through the kernel of scenario s."""
    c0 = base.d_consts[0] if c0 is None else c0
    k = build_kernel(s, init, c0, _grid(s))
    nm = nonlinearity_map(k, s, base.d_consts)
    psi = push_forward_fn(k, base.standard_form())
    return cat.SolutionHandle(f"pushed:{base.family}", {"scenario": s.name}, nm.equation(), psi, [], None, base)


def criterion_5(nx: int = 1024, nt: int = 100) -> CriterionResult:
    res = CriterionResult(5, "gauge correctness: residuals and sign-flip controls")
    for name, h, ts, L, taper in _own_equation_cases():
        x = np.linspace(-L, L, nx, endpoint=False)
        r, rn = gauge_residual(h, x, ts, taper)
        res.add(f"{name}", r, 1e-6)
        res.add(f"{name}/control", rn, 1e-2, mode="ge")
    bases = [
        ("quintic_pulse", cat.quintic_pulse(0.3, 0.7, 1.5), 30, None),
        ("osc_pulse", cat.osc_pulse(0.2, 0.5, 1.5), 30, None),
        ("pii_packet", cat.pii_packet(1.0, 0.5, _pii_profile(0.9)), 20, 3.0),
    ]
    for sname, s in demo_scenarios().items():
        t0 = s.t_domain[0]
        ts = np.linspace(t0 + 0.01, t0 + 0.31, nt)
        k = build_kernel(s, GAUGE_INIT, 0, _grid(s))
        hs = [(b, pushed_handle(base, s), L, tp) for b, base, L, tp in bases]
        hs.append(("elliptic_packet", cat.elliptic_packet(k, s, (0.2, 0.4, -1.0, -2.0, 1.5)), 15, 3.0))
        for b, h, L, tp in hs:
            x = np.linspace(-L, L, nx, endpoint=False)
            r, rn = gauge_residual(h, x, ts, tp)
            res.add(f"{b}->{sname}", r, 1e-6)
            res.add(f"{b}->{sname}/control", rn, 1e-2, mode="ge")
    return res


# -- 6: Painleve II ------------------------------------------------------------


def _wrap(x):
    return (x + math.pi) % (2 * math.pi) - math.pi


def criterion_6() -> CriterionResult:
    res = CriterionResult(6, "Painleve II connection and pole")
    for k0 in (0.3, 0.5, 0.7):
        prof = integrate_pii("defocusing", seed_from_airy(k0, 8.0), 8.0, -45.0, k0)
        r, th = fit_oscillatory_tail(prof, (-40.0, -15.0))
        c = connect_defocusing(k0)
        res.add(f"k0={k0}/r^2 rel", abs(r * r - c.r**2) / c.r**2, 0.02)
        res.add(f"k0={k0}/theta0", abs(_wrap(th - c.theta0)), 0.1)
    for k0 in (1.2, -1.2):
        prof = integrate_pii("defocusing", seed_from_airy(k0, 8.0), 8.0, -10.0, k0)
        if prof.pole is None:
            res.add(f"k0={k0}/pole", float("inf"), 0.02, note="no pole found")
            continue
        res.add(f"k0={k0}/exponent+1", abs(prof.pole["exponent"] + 1), 0.02, note=f"pole at z={prof.pole['c0']:.8f}")
    return res


# -- 7-9: observables ----------------------------------------------------------


def criterion_7() -> CriterionResult:
    res = CriterionResult(7, "quintic pulse analytics")
    for phi, v, k in ((0.3, 0.7, 1.5), (0.0, -0.4, 1.0)):
        h = cat.quintic_pulse(phi, v, k)
        L = 60.0 / k
        x = np.linspace(-L, L, 8192, endpoint=False)
        for t in (0.0, 0.2):
            psi = h(x, t)
            m = moments(psi, x, h.equation, t)
            tag = f"v={v},k={k},t={t}"
            res.add(f"{tag}/norm", abs(m.norm - math.pi), 1e-10)
            res.add(f"{tag}/heisenberg", abs(m.heisenberg - math.pi**2 / 32), 1e-8)
            res.add(f"{tag}/energy", abs(m.energy - v * v / 4), 1e-8)
            p, B = spectrum(psi, x)
            sel = np.abs(p - v / 2) < 20
            ref = pulse_spectrum_closed(p[sel], t, phi, v, k)
            res.add(f"{tag}/spectrum", np.max(np.abs(B[sel] - ref)), 1e-6)
    return res


def osc_pulse_closed(t, v, k) -> dict:
    c, s = math.cos(2 * t), math.sin(2 * t)
    vx = math.pi**2 / (16 * k * k) * c * c
    vp = math.pi**2 / (16 * k * k) * s * s + k * k / (2 * c * c)
    return {
        "x_mean": v * s,
        "p_mean": v * c,
        "x_var": vx,
        "p_var": vp,
        "heisenberg": math.pi**2 / 32 * (1 + math.pi**2 / (32 * k**4) * math.sin(4 * t) ** 2),
        "energy": math.pi**2 / (16 * k * k) + v * v,
    }


def osc_pulse_moments(t, phi=0.2, v=0.5, k=1.5, n=8192):
    h = cat.osc_pulse(phi, v, k)
    K = 2 * k / abs(math.cos(2 * t))
    L = abs(v) + 60.0 / K
    x = np.linspace(-L, L, n, endpoint=False)
    return moments(h(x, t), x, h.equation, t)


def osc_pulse_heisenberg_table(times=None, phi=0.2, v=0.5, k=1.5) -> list[dict]:
    times = np.linspace(-0.7, 0.7, 20) if times is None else times
    rows = []
    for t in times:
        m = osc_pulse_moments(float(t), phi, v, k)
        ref = osc_pulse_closed(float(t), v, k)
        rows.append({"t": float(t), **{f: getattr(m, f) for f in ref}, **{f"{f}_closed": ref[f] for f in ref}})
    return rows


def criterion_8() -> CriterionResult:
    res = CriterionResult(8, "oscillating pulse moments and Heisenberg product")
    v, k = 0.5, 1.5
    floor = math.pi**2 / 32 - 1e-9
    for row in osc_pulse_heisenberg_table(v=v, k=k):
        t = row["t"]
        dev = max(abs(row[f] - row[f"{f}_closed"]) for f in ("x_mean", "p_mean", "x_var", "p_var"))
        res.add(f"t={t:.4f}/moments", dev, 1e-6)
        res.add(f"t={t:.4f}/heisenberg", abs(row["heisenberg"] - row["heisenberg_closed"]), 1e-6)
        res.add(f"t={t:.4f}/floor", row["heisenberg"], floor, mode="ge")
    return res


def criterion_9(n: int = 64) -> CriterionResult:
    res = CriterionResult(9, "Wigner closed form vs numeric transform")
    h = cat.osc_pulse(0.2, 0.5, 1.5)
    params = {"k": 1.5, "v": 0.5}
    worst_printed = 0.0
    for t in (0.0, 0.3):
        c = math.cos(2 * t)
        xc, pc = 0.5 * math.sin(2 * t), 0.5 * c
        x = np.linspace(xc - 2.0, xc + 2.0, n)
        p = np.linspace(pc - 6.0 / c, pc + 6.0 / c, n)
        Wn = wigner_numeric(h, t, x, p, y_max=40.0, dy=0.005).W
        Wc = wigner_closed("osc_pulse", params, x, p, t)
        Wp = wigner_closed("osc_pulse", params, x, p, t, printed=True)
        res.add(f"t={t}", np.max(np.abs(Wc - Wn)), 1e-5)
        worst_printed = max(worst_printed, float(np.max(np.abs(Wp - Wn))))
    res.add("prefactor sech(omega) as printed", worst_printed, 1e-5, printed=True,
            note="the Fourier integral gives sech(pi omega)")
    return res


# -- 10-11: evolution ----------------------------------------------------------


def _evolve(h, cfg, t1=0.1, win=None, inner=None):
    x = cfg.grid()
    u0 = h(x, 0.0)
    if win is not None:
        u0 = u0 * win(x)
    cfg.t_out = (0.0, t1)
    run = propagate(h.equation, u0, t1, cfg)
    m = np.ones(x.shape, bool) if inner is None else inner(x)
    err = float(np.max(np.abs(run.values[-1] - h(x, t1))[m]))
    return err, conservation_report(run, h.equation), run.meta["status"]


def criterion_10() -> CriterionResult:
    res = CriterionResult(10, "pseudo-spectral evolution vs closed forms")
    p = _pii_profile(0.5)
    win = lambda x: smooth_window(x, -25.0, 25.0, 8.0)
    inner = lambda x: np.abs(x) <= 13.0
    cases = [
        ("quintic_pulse", cat.quintic_pulse(0.3, 0.7, 1.5), PropagatorConfig((-40.0, 40.0), 2048), None, None),
        ("osc_pulse", cat.osc_pulse(0.2, 0.5, 1.5), PropagatorConfig((-20.0, 20.0), 2048), None, None),
        ("pii_packet", cat.pii_packet(1.0, 0.5, p), PropagatorConfig((-40.0, 40.0), 2048), win, inner),
        ("const_velocity", cat.const_velocity_packet(0.5, 0.4, p), PropagatorConfig((-40.0, 40.0), 2048), win, inner),
    ]
    for name, h, cfg, w, m in cases:
        err, cr, status = _evolve(h, cfg, 0.1, w, m)
        res.add(f"{name}/sup error", err, 1e-4, ok=err <= 1e-4 and status == "ok")
        res.add(f"{name}/norm drift", cr["norm_drift"], 1e-8)
    return res


def blowup_kernel_run(alpha0=-0.25, delta0=0.0, k=1.5, mu_floor=1e-9) -> dict:
    """Blow-up through the gauge kernel: integrate the kernel ODEs until they halt at mu -> 0.

    The quintic pulse is carried by the halting kernel of the free equation;
    its peak and norm are measured just before the halt, next to the closed
    blow-up family it must reproduce.
    """
    s = demo_scenarios()["free"]
    init = InitData(mu=1.0, alpha=alpha0, beta=1.0, gamma=0.0, delta=delta0, eps=0.0, kappa=0.0)
    t_end = min(s.t_domain[1], -1.0 / (4 * alpha0) + 0.5) if alpha0 < 0 else s.t_domain[1]
    kern = integrate_riccati_direct(s, init, 0, np.linspace(0.0, t_end, 2001), mu_floor=mu_floor)
    base = cat.quintic_pulse(0.0, 0.0, k)
    psi = push_forward_fn(kern, base.standard_form())
    eq = nonlinearity_map(kern, s, base.d_consts)
    fam = cat.blowup_family(base, (alpha0, 1.0, 0.0, delta0, 0.0, 0.0))
    halted = bool(kern.events)
    t_halt = kern.events[0].t if halted else float("nan")
    rows = []
    if halted:
        for frac in (0.5, 0.9, 0.99, 0.999, 0.99999, 1 - 1e-7, 1 - 1e-12):
            t = t_halt * frac
            v = kern.at(t)
            mu, be, ep = (float(v[f][0]) for f in ("mu", "beta", "eps"))
            xc = -ep / be
            w = mu  # the packet width scales like mu for beta0 = 1
            x = xc + np.linspace(-40 * w, 40 * w, 8001)
            a = np.abs(psi(x, t))
            j = int(np.argmax(a))
            nrm, _ = quad(lambda y: abs(psi(np.array([y]), t)[0]) ** 2, xc - 80 * w, xc + 80 * w,
                          points=[xc], limit=400, epsabs=1e-13, epsrel=1e-12)
            xs = xc + np.linspace(-5 * w, 5 * w, 11)
            mod_dev = float(np.max(np.abs(np.abs(fam(xs, t)) - np.abs(psi(xs, t)))) / a[j])
            h5 = float(eq.h_funcs[5](np.zeros(1), np.array([t]))[0])
            rows.append({"t": t, "mu": mu, "max_abs": float(a[j]), "x_peak": float(x[j]), "norm": nrm,
                         "closed_form_modulus_dev": mod_dev, "h5": h5})
    return {"halted": halted, "t_halt": t_halt, "t_blowup": -1.0 / (4 * alpha0), "x_blowup": -delta0 / (2 * alpha0),
            "rows": rows}


def blowup_pde_run(alpha0=-0.25, k=1.5, n=4096, t_final=1.0) -> dict:
    """Direct pseudo-spectral run of the same data; reports how far it tracks the closed form."""
    base = cat.quintic_pulse(0.0, 0.0, k)
    fam = cat.blowup_family(base, (alpha0, 1.0, 0.0, 0.0, 0.0, 0.0))
    cfg = PropagatorConfig((-40.0, 40.0), n)
    cfg.t_out = tuple(np.linspace(0.0, t_final, 41))
    x = cfg.grid()
    run = propagate(base.equation, fam(x, 0.0), t_final, cfg)
    cr = conservation_report(run, base.equation)
    track = []
    for i, t in enumerate(run.t):
        if t < fam.params["t_blowup"]:
            track.append((float(t), float(np.max(np.abs(run.values[i]))), float(np.max(np.abs(run.values[i] - fam(x, t))))))
    return {"status": run.meta["status"], "last_valid_time": run.meta["last_valid_time"], "norm_drift": cr["norm_drift"],
            "max_abs": float(np.max(np.abs(run.values))), "track": track}


def criterion_11(with_pde: bool = False) -> CriterionResult:
    res = CriterionResult(11, "blow-up family: halt at t0 = 1, x0 = 0")
    out = blowup_kernel_run()
    res.add("kernel integrator halted", 0.0 if out["halted"] else 1.0, 0.0)
    res.add("|t_halt - t0|", abs(out["t_halt"] - out["t_blowup"]), 1e-6)
    rows = out["rows"]
    peak = max(r["max_abs"] for r in rows) if rows else 0.0
    res.add("max|psi| before halt", peak, 1e3, mode="ge")
    res.add("|x_peak - x0| at last sample", abs(rows[-1]["x_peak"] - out["x_blowup"]) if rows else float("inf"), 1e-6)
    res.add("norm drift until halt", max(abs(r["norm"] - math.pi) for r in rows) if rows else float("inf"), 1e-6)
    res.add("closed-form modulus agreement (t <= 0.999 t_halt)",
            max(r["closed_form_modulus_dev"] for r in rows if r["t"] <= 0.999 * out["t_halt"]), 1e-6)
    res.info["kernel_route"] = out
    if with_pde:
        res.info["pde_route"] = blowup_pde_run()
    return res


# -- 12-13 -------------------------------------------------------------------------


def criterion_12() -> CriterionResult:
    res = CriterionResult(12, "Airy gun kinematics")
    for g, t1, x0 in ((1.0, 2.0, 0.5), (2.5, 1.0, -1.0), (1.0, 1.5, -(1.0 ** (4 / 3)) * 1.5**2)):
        gun = cat.airy_gun(g, t1, x0)
        tag = f"g={g},t1={t1},C1={gun.C1:.3g}"
        t = np.linspace(-20.0, t1 - 0.05, 400)
        scale = np.maximum(np.abs(gun.x(t)) + np.abs(gun.velocity(t)) + np.abs(gun.acceleration(t)), 1.0)
        res.add(f"{tag}/newton (closed derivatives)", np.max(np.abs(gun.newton_residual(t)) / scale), 1e-10)
        # independent route: integrate the ODE from one point and compare
        def rhs(tt, y):
            w = t1 - tt
            return [y[1], (w * y[1] + y[0] + 2 * g * t1 * t1) / (w * w)]

        sol = solve_ivp(rhs, (t[0], t[-1]), [float(gun.x(t[0])), float(gun.velocity(t[0]))], method="DOP853",
                        rtol=1e-13, atol=1e-13, t_eval=t)
        res.add(f"{tag}/newton (ODE integration)", np.max(np.abs(sol.y[0] - gun.x(t)) / np.maximum(np.abs(gun.x(t)), 1.0)), 1e-10)
        far = -1e12
        res.add(f"{tag}/velocity limit", abs(float(gun.x(far)) / (t1 - far) - gun.C1), 1e-10)
        w = 2.0**-40  # t1 - w is exact in binary, so t1 - t recovers w without cancellation
        res.add(f"{tag}/pole residue", abs(w * float(gun.x(t1 - w)) - gun.C2), 1e-10)
        ts = np.linspace(-5.0, t1 - 0.1, 50)
        P = gun.velocity(ts) + gun.C1
        Q = gun.x(ts) + 2 * g * t1 * t1
        orb = np.abs(gun.orbit_residual(ts)) / np.maximum(np.abs(Q * Q / gun.C2), 1.0)
        res.add(f"{tag}/orbit", np.max(orb), 1e-10)
        br = [np.abs(gun.orbit_P(Q, b) - P) for b in (+1, -1)]
        res.add(f"{tag}/orbit branch", np.max(np.minimum(*br) / np.maximum(np.abs(P), 1.0)), 1e-10)
        if abs(gun.C1) < 1e-12:
            res.add(f"{tag}/parabola P = Q^2/C2", np.max(np.abs(P - Q * Q / gun.C2) / np.maximum(np.abs(P), 1.0)), 1e-10)
    return res


def criterion_13() -> CriterionResult:
    res = CriterionResult(13, "sech-type integrals by quadrature")
    for row in sech_integral_testvectors():
        printed_wrong = row["name"] == "sinh2_over_cosh3"
        res.add(f"{row['name']} vs printed value", row["abs_diff"], 1e-8, printed=printed_wrong,
                note="quadrature gives pi/2" if printed_wrong else "")
        if printed_wrong:
            res.add(f"{row['name']} vs pi/2", abs(row["quadrature"] - math.pi / 2), 1e-8)
    for w in (0.0, 0.5, 1.0):
        res.add(f"sech Fourier integral w={w}", abs(sech_fourier_integral(w) - sech_fourier_closed(w)), 1e-8)
    return res


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6, 7: criterion_7,
    8: criterion_8, 9: criterion_9, 10: criterion_10, 11: criterion_11, 12: criterion_12, 13: criterion_13,
}


def run_criterion(n: int) -> CriterionResult:
    t = time.perf_counter()
    res = CRITERIA[n]()
    res.seconds = time.perf_counter() - t
    return res
