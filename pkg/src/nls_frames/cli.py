"""Command-line front end.

    nls-frames kernel  --scenario fiber --param alpha=0.2 --c0 0 --out run/
    nls-frames solve   --family quintic_pulse --param k=1.5 --nx 512
    nls-frames verify  --family osc_pulse --param k=1.5 --control sign-flip
    nls-frames connect --param k0=0.5
    nls-frames wigner  --family osc_pulse --param k=1.5 --param t=0.3
    nls-frames demo    osc-pulse-heisenberg

Exit codes: 0 success, 1 bad input or failed computation, 2 kernel output
truncated by a caustic. Outputs are byte-identical for identical arguments.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import catalog as cat
from .coeffs import ExpressionError, ScenarioError, demo_scenarios, load_scenario
from .kernel import KERNEL_FIELDS, InitData, build_kernel
from .painleve import connect_defocusing, connect_focusing, fit_oscillatory_tail, integrate_pii, seed_from_airy

EXIT_OK, EXIT_ERROR, EXIT_CAUSTIC = 0, 1, 2

DEMOS = {f"criterion-{n}": n for n in range(1, 14)}
DEMOS.update({"osc-pulse-heisenberg": None, "blowup": None})


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# helpers


def _params(pairs) -> dict:
    out = {}
    for p in pairs or ():
        if "=" not in p:
            raise UsageError(f"--param expects key=value, got {p!r}")
        k, v = p.split("=", 1)
        k = k.strip()
        try:
            out[k] = float(v)
        except ValueError:
            out[k] = v.strip()
    return out


def _num(params, key, default=None):
    if key not in params:
        if default is None:
            raise UsageError(f"missing --param {key}=...")
        return default
    v = params[key]
    if isinstance(v, str):
        raise UsageError(f"--param {key} must be a number, got {v!r}")
    return float(v)


def _scenario(arg):
    if arg is None:
        raise UsageError("--scenario is required")
    demos = demo_scenarios()
    if arg in demos and not Path(arg).exists():
        return demos[arg]
    return load_scenario(arg)


def _dumps(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(u) for k, u in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(u) for u in v]
    if isinstance(v, np.ndarray):
        return [_plain(u) for u in v.tolist()]
    if isinstance(v, (np.floating, float)):
        f = float(v)
        return f if math.isfinite(f) else repr(f)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if hasattr(v, "to_dict"):
        return _plain(v.to_dict())
    return v


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    for r in rows:
        lines.append(",".join(repr(float(v)) if not isinstance(v, str) else v for v in r))
    return "\n".join(lines) + "\n"


class _Sink:
    """Collects named artifacts; writes them (plus a manifest) to --out or prints the primary one."""

    def __init__(self, args, command):
        self.args = args
        self.command = command
        self.files: dict[str, str] = {}

    def put(self, name, text):
        self.files[name] = text

    def flush(self, primary):
        out = self.args.out
        if out is None:
            sys.stdout.write(self.files[primary])
            return
        d = Path(out)
        d.mkdir(parents=True, exist_ok=True)
        for name, text in self.files.items():
            (d / name).write_text(text)
        manifest = {
            "command": self.command,
            "arguments": {k: v for k, v in sorted(vars(self.args).items()) if k not in ("func", "out")},
            "outputs": {n: hashlib.sha256(t.encode()).hexdigest() for n, t in sorted(self.files.items())},
        }
        manifest["inputs_hash"] = hashlib.sha256(json.dumps(_plain(manifest["arguments"]), sort_keys=True).encode()).hexdigest()
        (d / "manifest.json").write_text(_dumps(manifest))


def _fmt_ok(args, allowed=("csv", "json")):
    if args.format not in allowed:
        raise UsageError(f"--format must be one of {', '.join(allowed)}")


# ---------------------------------------------------------------------------
# families


def _pii_profile(params, sign_default="defocusing"):
    k0 = _num(params, "k0", 0.5)
    sign = params.get("sign", sign_default)
    return integrate_pii(sign, seed_from_airy(k0, 8.0), 8.0, -80.0, k0)


def make_family(name: str, p: dict, scenario=None):
    """Build a SolutionHandle from a family name and numeric parameters."""
    n = lambda k, d=None: _num(p, k, d)
    if name == "quintic_pulse":
        return cat.quintic_pulse(n("phi", 0.0), n("v", 0.0), n("k", 1.0))
    if name == "quintic_source":
        return cat.quintic_source(n("phi", 0.0), n("v", 0.0), n("r", 1.0))
    if name == "osc_pulse":
        return cat.osc_pulse(n("phi", 0.0), n("v", 0.0), n("k", 1.0))
    if name == "osc_source":
        return cat.osc_source(n("phi", 0.0), n("v", 0.0), n("r", 1.0))
    if name == "osc_pulse_general":
        return cat.osc_pulse_general(n("phi", 0.0), n("v", 0.0), n("k", 1.0),
                                     (n("alpha0", 0.0), n("beta0", 1.0), n("delta0", 0.0), n("eps0", 0.0)))
    if name == "blowup_family":
        base = cat.quintic_pulse(n("phi", 0.0), n("v", 0.0), n("k", 1.0))
        return cat.blowup_family(base, tuple(n(f, d) for f, d in (("alpha0", -0.25), ("beta0", 1.0), ("gamma0", 0.0),
                                                                     ("delta0", 0.0), ("eps0", 0.0), ("kappa0", 0.0))))
    if name == "gauge_free_to_trap":
        return cat.gauge_free_to_trap(cat.quintic_pulse(n("phi", 0.0), n("v", 0.0), n("k", 1.0)))
    if name == "group_orbit_trap":
        base = cat.osc_pulse(n("phi", 0.0), n("v", 0.0), n("k", 1.0))
        return cat.group_orbit_trap(base, (n("alpha0", 0.0), n("beta0", 1.0), 0.0, n("delta0", 0.0), n("eps0", 0.0), 0.0))
    if name == "airy_berry":
        return cat.airy_berry(n("g", 1.0), n("v", 0.0))
    if name == "airy_expansion":
        return cat.airy_expansion(n("g", 1.0), n("t1", 1.0))
    if name == "pii_packet":
        return cat.pii_packet(n("g", 1.0), n("v", 0.0), _pii_profile(p))
    if name == "const_velocity":
        return cat.const_velocity_packet(n("k", 0.5), n("v", 0.0), _pii_profile(p))
    if name == "elliptic_packet":
        if scenario is None:
            raise UsageError("elliptic_packet needs --scenario")
        init = _init(p)
        k = build_kernel(scenario, init, 0, np.linspace(*scenario.t_domain, 201))
        return cat.elliptic_packet(k, scenario, (n("phi", 0.0), n("y", 0.0), n("g0", -1.0), n("h0", -2.0), n("C0", 1.5)))
    raise UsageError(f"unknown family {name!r}; choose from {', '.join(cat.FAMILIES)}")


def _init(p) -> InitData:
    vals = {f: _num(p, f, d) for f, d in zip(KERNEL_FIELDS, InitData().as_tuple())}
    return InitData(**vals)


def _x_grid(args, default=(-20.0, 20.0, 512)):
    x0 = default[0] if args.x0 is None else args.x0
    x1 = default[1] if args.x1 is None else args.x1
    nx = default[2] if args.nx is None else args.nx
    if not x1 > x0 or nx < 2:
        raise UsageError("need x1 > x0 and nx >= 2")
    return np.linspace(x0, x1, nx, endpoint=False)


def _t_grid(args, default=(0.0, 0.3, 4)):
    t0 = default[0] if args.t0 is None else args.t0
    t1 = default[1] if args.t1 is None else args.t1
    nt = default[2] if args.nt is None else args.nt
    if nt < 1 or (nt > 1 and not t1 > t0):
        raise UsageError("need t1 > t0 and nt >= 1")
    return np.linspace(t0, t1, nt)


# ---------------------------------------------------------------------------
# commands


def cmd_kernel(args) -> int:
    _fmt_ok(args)
    s = _scenario(args.scenario)
    p = _params(args.param)
    init = _init(p)
    t = _t_grid(args, (s.t_domain[0], s.t_domain[1], 201))
    k = build_kernel(s, init, args.c0, t, method=args.method)
    side = {"scenario": s.name, **k.sidecar()}
    sink = _Sink(args, "kernel")
    sink.put("kernel.csv", k.to_csv())
    sink.put("kernel.json", _dumps(side))
    sink.flush("kernel.csv" if args.format == "csv" else "kernel.json")
    truncated = bool(np.any(~k.valid) or any(e.kind == "caustic" for e in k.events))
    return EXIT_CAUSTIC if truncated else EXIT_OK


def cmd_solve(args) -> int:
    _fmt_ok(args)
    p = _params(args.param)
    scen = _scenario(args.scenario) if args.scenario else None
    if args.family == "airy_gun":
        gun = cat.airy_gun(_num(p, "g", 1.0), _num(p, "t1", 1.0), _num(p, "x0", 0.0))
        t = _t_grid(args, (-2.0, 0.9 * gun.t1, 50))
        rows = [(ti, gun.x(ti), gun.velocity(ti), gun.acceleration(ti)) for ti in t]
        sink = _Sink(args, "solve")
        sink.put("trajectory.csv", _csv(["t", "x", "dxdt", "d2xdt2"], rows))
        sink.put("trajectory.json", _dumps(gun.to_dict()))
        sink.flush("trajectory.csv" if args.format == "csv" else "trajectory.json")
        return EXIT_OK
    h = make_family(args.family, p, scen)
    x = _x_grid(args)
    t = _t_grid(args)
    rows = []
    for ti in t:
        psi = h(x, float(ti))
        rows.extend((xj, ti, v.real, v.imag) for xj, v in zip(x, psi))
    sink = _Sink(args, "solve")
    sink.put("field.csv", _csv(["x", "t", "re", "im"], rows))
    sink.put("field.json", _dumps(h.descriptor()))
    sink.flush("field.csv" if args.format == "csv" else "field.json")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import residual, sign_flip

    p = _params(args.param)
    scen = _scenario(args.scenario) if args.scenario else None
    h = make_family(args.family, p, scen)
    x = _x_grid(args, (-20.0, 20.0, 1024))
    t = _t_grid(args, (0.0, 0.3, 100))
    eq = sign_flip(h.equation) if args.control == "sign-flip" else h.equation
    rep = residual(eq, h, x, t, taper=args.taper, singular_times=h.singular_times((t[0], t[-1])))
    out = {
        "family": h.family,
        "equation": eq.describe(),
        "control": args.control,
        "report": rep.to_dict(),
        "tolerance": args.tol,
        "mismatch": bool(rep.rel_residual_sup > args.tol),
    }
    sink = _Sink(args, "verify")
    sink.put("report.json", _dumps(out))
    sink.flush("report.json")
    return EXIT_OK


def cmd_connect(args) -> int:
    p = _params(args.param)
    sign = p.get("sign", "defocusing")
    out: dict = {"sign": sign}
    if "k0" in p:
        k0 = _num(p, "k0")
        prof = integrate_pii(sign, seed_from_airy(k0, 8.0), 8.0, -45.0, k0)
        out["k0"] = k0
        if prof.pole is not None:
            out["pole"] = prof.pole
        else:
            r, th = fit_oscillatory_tail(prof, (-40.0, -15.0))
            out["fitted"] = {"r": r, "r2": r * r, "theta0": th}
            if sign == "defocusing":
                c = connect_defocusing(k0)
                out["closed_form"] = {"r": c.r, "r2": c.r**2, "theta0": c.theta0}
            else:
                out["classification"] = connect_focusing(r, th, tol=0.05).to_dict()
    elif "r" in p and "theta0" in p:
        if sign != "focusing":
            raise UsageError("(r, theta0) classification is for sign=focusing")
        out["classification"] = connect_focusing(_num(p, "r"), _num(p, "theta0"), tol=_num(p, "tol", 1e-6)).to_dict()
    else:
        raise UsageError("give --param k0=... or --param r=... --param theta0=...")
    sink = _Sink(args, "connect")
    sink.put("connect.json", _dumps(out))
    sink.flush("connect.json")
    return EXIT_OK


def cmd_wigner(args) -> int:
    from .observe import wigner_closed, wigner_numeric

    _fmt_ok(args)
    p = _params(args.param)
    t = _num(p, "t", 0.0)
    h = make_family(args.family, p)
    x = np.linspace(-2.0 if args.x0 is None else args.x0, 2.0 if args.x1 is None else args.x1, args.nx or 64)
    pg = np.linspace(_num(p, "p0", -6.0), _num(p, "p1", 6.0), int(_num(p, "np", 64)))
    if args.method == "numeric":
        g = wigner_numeric(h, t, x, pg)
        W, meta = g.W, g.metadata()
    else:
        W = wigner_closed(args.family, dict(h.params), x, pg, t)
        meta = {"t": t, "x": [float(x[0]), float(x[-1]), int(x.size)], "p": [float(pg[0]), float(pg[-1]), int(pg.size)]}
    meta.update(family=h.family, method=args.method)
    rows = [(xi, pj, W[i, j]) for i, xi in enumerate(x) for j, pj in enumerate(pg)]
    sink = _Sink(args, "wigner")
    sink.put("wigner.csv", _csv(["x", "p", "W"], rows))
    sink.put("wigner.json", _dumps(meta))
    sink.flush("wigner.csv" if args.format == "csv" else "wigner.json")
    return EXIT_OK


def cmd_demo(args) -> int:
    from . import experiments as ex

    _fmt_ok(args)
    name = args.name
    if name not in DEMOS:
        raise UsageError(f"unknown demo {name!r}; choose from {', '.join(sorted(DEMOS))}")
    sink = _Sink(args, "demo")
    if name == "osc-pulse-heisenberg":
        p = _params(args.param)
        t = _t_grid(args, (-0.7, 0.7, 20))
        rows = ex.osc_pulse_heisenberg_table(t, _num(p, "phi", 0.2), _num(p, "v", 0.5), _num(p, "k", 1.5))
        cols = list(rows[0])
        sink.put("moments.csv", _csv(cols, [[r[c] for c in cols] for r in rows]))
        sink.put("moments.json", _dumps({"rows": rows}))
        sink.flush("moments.csv" if args.format == "csv" else "moments.json")
        return EXIT_OK
    if name == "blowup":
        out = {"kernel_route": ex.blowup_kernel_run()}
        if args.pde:
            out["pde_route"] = ex.blowup_pde_run()
        sink.put("blowup.json", _dumps(out))
        sink.flush("blowup.json")
        return EXIT_OK
    res = ex.run_criterion(DEMOS[name])
    d = res.to_dict()
    d.pop("seconds")  # keep the bundle deterministic
    sink.put("criterion.json", _dumps(d))
    rows = [[it.name.replace(",", ";"), it.value, it.tol, "PASS" if it.passed else "FAIL", "printed" if it.printed else ""]
            for it in res.items]
    lines = ["item,value,tol,status,kind"] + [f"{a},{b!r},{c!r},{s},{k}" for a, b, c, s, k in rows]
    sink.put("criterion.csv", "\n".join(lines) + "\n")
    sink.flush("criterion.csv" if args.format == "csv" else "criterion.json")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nls-frames", description="Gauge kernels, closed forms and their numerical checks.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, family=False):
        sp.add_argument("--scenario", help="scenario file (TOML/JSON) or built-in name")
        sp.add_argument("--param", action="append", metavar="K=V", help="parameter (repeatable)")
        sp.add_argument("--t0", type=float)
        sp.add_argument("--t1", type=float)
        sp.add_argument("--nt", type=int)
        sp.add_argument("--x0", type=float)
        sp.add_argument("--x1", type=float)
        sp.add_argument("--nx", type=int)
        sp.add_argument("--out", help="output directory (default: primary artifact to stdout)")
        sp.add_argument("--format", default="csv", help="csv or json")
        if family:
            sp.add_argument("--family", required=True)

    sp = sub.add_parser("kernel", help="transformation kernel on a scenario")
    common(sp)
    sp.add_argument("--c0", type=int, choices=(0, 1), default=0)
    sp.add_argument("--method", default="superpose", choices=("superpose", "complex", "direct"))
    sp.set_defaults(func=cmd_kernel)

    sp = sub.add_parser("solve", help="sample a closed-form solution")
    common(sp, family=True)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("verify", help="PDE residual of a closed form")
    common(sp, family=True)
    sp.add_argument("--control", default="none", choices=("none", "sign-flip"))
    sp.add_argument("--taper", type=float)
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.set_defaults(func=cmd_verify, format="json")

    sp = sub.add_parser("connect", help="Painleve II connection data")
    common(sp)
    sp.set_defaults(func=cmd_connect, format="json")

    sp = sub.add_parser("wigner", help="Wigner function on an (x, p) grid")
    common(sp, family=True)
    sp.add_argument("--method", default="closed", choices=("closed", "numeric"))
    sp.set_defaults(func=cmd_wigner)

    sp = sub.add_parser("demo", help="named experiment bundles")
    common(sp)
    sp.add_argument("name", help=", ".join(sorted(DEMOS)))
    sp.add_argument("--pde", action="store_true", help="blowup: also run the direct PDE integration")
    sp.set_defaults(func=cmd_demo, format="json")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ScenarioError, ExpressionError, ValueError, RuntimeError, OSError) as exc:
        print(f"nls-frames {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
