"""Time-dependent coefficient functions of the variable-coefficient NLS.

The scenario carries six real functions a, b, c, d, f, g (plus an optional
nonlinearity strength h) of the equation

    i psi_t = -a psi_xx + b x^2 psi - i c x psi_x - i d psi - f x psi
              + i g psi_x + h |psi|^p psi.

Each function is either a parsed arithmetic expression in ``t`` (with exact
AST derivatives) or a table of samples with cubic interpolation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

__all__ = [
    "ExpressionError",
    "ScenarioError",
    "Expr",
    "parse_time_expression",
    "ExpressionFunction",
    "TabulatedFunction",
    "constant",
    "Scenario",
    "CharCoeffs",
    "eval_coeffs",
    "char_coeffs",
    "load_scenario",
    "scenario_from_dict",
    "demo_scenarios",
]

COEFF_NAMES = ("a", "b", "c", "d", "f", "g")


class ExpressionError(ValueError):
    """Syntax or name error in a time expression; ``offset`` is a byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class ScenarioError(ValueError):
    pass


# ---------------------------------------------------------------------------
# expression AST


class Expr:
    def eval(self, t):
        raise NotImplementedError

    def deriv(self) -> "Expr":
        raise NotImplementedError

    def to_source(self) -> str:
        raise NotImplementedError

    def is_const(self) -> bool:
        return False

    def __str__(self) -> str:
        return self.to_source()


@dataclass(frozen=True)
class Num(Expr):
    value: float

    def eval(self, t):
        return self.value + 0.0 * np.asarray(t, dtype=float)

    def deriv(self):
        return Num(0.0)

    def to_source(self):
        if self.value < 0:
            return f"({self.value!r})"
        return repr(float(self.value))

    def is_const(self):
        return True


@dataclass(frozen=True)
class Var(Expr):
    def eval(self, t):
        return np.asarray(t, dtype=float) + 0.0

    def deriv(self):
        return Num(1.0)

    def to_source(self):
        return "t"


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr

    def eval(self, t):
        return -self.arg.eval(t)

    def deriv(self):
        return _neg(self.arg.deriv())

    def to_source(self):
        return f"(-{self.arg.to_source()})"

    def is_const(self):
        return self.arg.is_const()


@dataclass(frozen=True)
class Bin(Expr):
    op: str
    left: Expr
    right: Expr

    def eval(self, t):
        u = self.left.eval(t)
        v = self.right.eval(t)
        if self.op == "+":
            return u + v
        if self.op == "-":
            return u - v
        if self.op == "*":
            return u * v
        if self.op == "/":
            return u / v
        return np.power(u, v)

    def deriv(self):
        u, v = self.left, self.right
        du, dv = u.deriv(), v.deriv()
        if self.op == "+":
            return _add(du, dv)
        if self.op == "-":
            return _sub(du, dv)
        if self.op == "*":
            return _add(_mul(du, v), _mul(u, dv))
        if self.op == "/":
            return _div(_sub(_mul(du, v), _mul(u, dv)), _mul(v, v))
        # power
        if v.is_const():
            n = float(v.eval(0.0))
            return _mul(_mul(Num(n), Bin("^", u, Num(n - 1.0))), du)
        # u^v = exp(v log u)
        return _mul(self, _add(_mul(dv, Func("log", u)), _div(_mul(v, du), u)))

    def to_source(self):
        return f"({self.left.to_source()} {self.op} {self.right.to_source()})"

    def is_const(self):
        return self.left.is_const() and self.right.is_const()


_FUNCS: dict[str, Callable] = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "tanh": np.tanh,
    # only produced by differentiation, never accepted from source
    "log": np.log,
}
_PUBLIC_FUNCS = ("sin", "cos", "exp", "tanh")


@dataclass(frozen=True)
class Func(Expr):
    name: str
    arg: Expr

    def eval(self, t):
        return _FUNCS[self.name](self.arg.eval(t))

    def deriv(self):
        u = self.arg
        du = u.deriv()
        if self.name == "sin":
            outer = Func("cos", u)
        elif self.name == "cos":
            outer = _neg(Func("sin", u))
        elif self.name == "exp":
            outer = self
        elif self.name == "tanh":
            outer = _sub(Num(1.0), _mul(self, self))
        else:
            outer = _div(Num(1.0), u)
        return _mul(outer, du)

    def to_source(self):
        return f"{self.name}({self.arg.to_source()})"

    def is_const(self):
        return self.arg.is_const()


def _zero(e):
    return isinstance(e, Num) and e.value == 0.0


def _one(e):
    return isinstance(e, Num) and e.value == 1.0


def _add(u, v):
    if _zero(u):
        return v
    if _zero(v):
        return u
    return Bin("+", u, v)


def _sub(u, v):
    if _zero(v):
        return u
    if _zero(u):
        return _neg(v)
    return Bin("-", u, v)


def _mul(u, v):
    if _zero(u) or _zero(v):
        return Num(0.0)
    if _one(u):
        return v
    if _one(v):
        return u
    return Bin("*", u, v)


def _div(u, v):
    if _zero(u):
        return Num(0.0)
    if _one(v):
        return u
    return Bin("/", u, v)


def _neg(u):
    if _zero(u):
        return Num(0.0)
    return Neg(u)


# ---------------------------------------------------------------------------
# recursive-descent parser
#
#   expr    := term (('+'|'-') term)*
#   term    := unary (('*'|'/') unary)*
#   unary   := '-' unary | '+' unary | power
#   power   := atom ('^' unary)?          right-associative
#   atom    := number | 't' | 'pi' | name '(' expr ')' | '(' expr ')'


class _Parser:
    def __init__(self, source: str):
        self.src = source
        self.pos = 0

    def error(self, msg, pos=None):
        p = self.pos if pos is None else pos
        raise ExpressionError(msg, len(self.src[:p].encode("utf-8")))

    def skip(self):
        while self.pos < len(self.src) and self.src[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.src[self.pos] if self.pos < len(self.src) else ""

    def parse(self) -> Expr:
        if not self.src.strip():
            self.error("empty expression")
        e = self.expr()
        if self.peek():
            self.error(f"unexpected character {self.peek()!r}")
        return e

    def expr(self):
        e = self.term()
        while self.peek() in ("+", "-") and self.peek():
            op = self.src[self.pos]
            self.pos += 1
            e = Bin(op, e, self.term())
        return e

    def term(self):
        e = self.unary()
        while self.peek() in ("*", "/") and self.peek():
            op = self.src[self.pos]
            self.pos += 1
            if op == "*" and self.peek() == "*":
                self.error("use '^' for powers")
            e = Bin(op, e, self.unary())
        return e

    def unary(self):
        c = self.peek()
        if c == "-":
            self.pos += 1
            return Neg(self.unary())
        if c == "+":
            self.pos += 1
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            return Bin("^", base, self.unary())
        return base

    def atom(self):
        c = self.peek()
        start = self.pos
        if not c:
            self.error("unexpected end of expression")
        if c == "(":
            self.pos += 1
            e = self.expr()
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
            return e
        if c.isdigit() or c == ".":
            return self.number()
        if c.isalpha() or c == "_":
            while self.pos < len(self.src) and (self.src[self.pos].isalnum() or self.src[self.pos] == "_"):
                self.pos += 1
            name = self.src[start:self.pos]
            if name == "t":
                return Var()
            if name == "pi":
                return Num(math.pi)
            if name in _PUBLIC_FUNCS:
                if self.peek() != "(":
                    self.error(f"expected '(' after {name}")
                self.pos += 1
                arg = self.expr()
                if self.peek() != ")":
                    self.error("expected ')'")
                self.pos += 1
                return Func(name, arg)
            self.error(f"unknown identifier {name!r}", start)
        self.error(f"unexpected character {c!r}")

    def number(self):
        s = self.src
        start = self.pos
        i = start
        while i < len(s) and s[i].isdigit():
            i += 1
        if i < len(s) and s[i] == ".":
            i += 1
            while i < len(s) and s[i].isdigit():
                i += 1
        if i < len(s) and s[i] in "eE":
            j = i + 1
            if j < len(s) and s[j] in "+-":
                j += 1
            if j < len(s) and s[j].isdigit():
                while j < len(s) and s[j].isdigit():
                    j += 1
                i = j
        text = s[start:i]
        if text == ".":
            self.error("malformed number", start)
        self.pos = i
        return Num(float(text))


def parse_time_expression(source: str) -> Expr:
    """Parse an arithmetic expression in ``t``.

    Supports literals, ``t``, ``pi``, ``+ - * / ^``, unary minus and
    ``sin cos exp tanh``. Power binds tighter than unary minus, so
    ``-t^2`` is ``-(t^2)``.
    """
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    return _Parser(source).parse()


# ---------------------------------------------------------------------------
# time functions


class TimeFunction:
    def __call__(self, t):
        raise NotImplementedError

    def derivative(self, t):
        raise NotImplementedError

    def second_derivative(self, t):
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


class ExpressionFunction(TimeFunction):
    """Time function backed by a parsed expression with analytic derivatives."""

    def __init__(self, expr: Expr | str):
        self.expr = parse_time_expression(expr) if isinstance(expr, str) else expr
        self._d1 = self.expr.deriv()
        self._d2 = self._d1.deriv()

    def __call__(self, t):
        return _scalarize(self.expr.eval(t), t)

    def derivative(self, t):
        return _scalarize(self._d1.eval(t), t)

    def second_derivative(self, t):
        return _scalarize(self._d2.eval(t), t)

    def is_const(self):
        return self.expr.is_const()

    def to_dict(self):
        return {"expr": self.expr.to_source()}

    def __repr__(self):
        return f"ExpressionFunction({self.expr.to_source()!r})"


def _fd4_nodes(t: np.ndarray, v: np.ndarray) -> np.ndarray:
    """First derivative on uniform nodes: 4th-order central inside, one-sided at the ends."""
    n = len(v)
    h = t[1] - t[0]
    d = np.empty_like(v)
    if n < 5:
        return np.gradient(v, t)
    d[2:-2] = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)
    # 4th-order one-sided stencils
    d[0] = (-25 * v[0] + 48 * v[1] - 36 * v[2] + 16 * v[3] - 3 * v[4]) / (12 * h)
    d[1] = (-3 * v[0] - 10 * v[1] + 18 * v[2] - 6 * v[3] + v[4]) / (12 * h)
    d[-1] = (25 * v[-1] - 48 * v[-2] + 36 * v[-3] - 16 * v[-4] + 3 * v[-5]) / (12 * h)
    d[-2] = (3 * v[-1] + 10 * v[-2] - 18 * v[-3] + 6 * v[-4] - v[-5]) / (12 * h)
    return d


class TabulatedFunction(TimeFunction):
    """Samples on a uniform time grid, interpolated by a cubic spline.

    Derivatives are taken from 4th-order finite differences of the samples,
    then interpolated the same way.
    """

    def __init__(self, samples: Sequence[Sequence[float]], order: int = 3):
        arr = np.asarray(samples, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2 or len(arr) < 4:
            raise ScenarioError("tabulated samples must be >= 4 pairs [t, v]")
        if order != 3:
            raise ScenarioError("only cubic interpolation (order 3) is supported")
        t, v = arr[:, 0], arr[:, 1]
        if np.any(np.diff(t) <= 0):
            raise ScenarioError("sample times must be strictly increasing")
        if not np.allclose(np.diff(t), t[1] - t[0], rtol=1e-9, atol=1e-12):
            raise ScenarioError("sample times must be uniformly spaced")
        self.samples = arr
        self.order = order
        self._s0 = CubicSpline(t, v)
        d1 = _fd4_nodes(t, v)
        self._s1 = CubicSpline(t, d1)
        self._s2 = CubicSpline(t, _fd4_nodes(t, d1))

    def __call__(self, t):
        return _scalarize(self._s0(t), t)

    def derivative(self, t):
        return _scalarize(self._s1(t), t)

    def second_derivative(self, t):
        return _scalarize(self._s2(t), t)

    def is_const(self):
        return bool(np.all(self.samples[:, 1] == self.samples[0, 1]))

    def to_dict(self):
        return {"samples": self.samples.tolist(), "order": self.order}


def _scalarize(val, t):
    if np.ndim(t) == 0:
        return float(np.asarray(val))
    return np.asarray(val, dtype=float)


def constant(value: float) -> ExpressionFunction:
    return ExpressionFunction(Num(float(value)))


def _as_function(spec) -> TimeFunction:
    if isinstance(spec, TimeFunction):
        return spec
    if isinstance(spec, (int, float)):
        return constant(spec)
    if isinstance(spec, str):
        return ExpressionFunction(spec)
    if isinstance(spec, dict):
        if "expr" in spec:
            return ExpressionFunction(str(spec["expr"]))
        if "samples" in spec:
            return TabulatedFunction(spec["samples"], int(spec.get("order", 3)))
    raise ScenarioError(f"cannot interpret coefficient specification {spec!r}")


# ---------------------------------------------------------------------------
# scenario


@dataclass(frozen=True)
class CharCoeffs:
    tau: float | np.ndarray
    sigma: float | np.ndarray


@dataclass
class Scenario:
    """Coefficient set a..g on a closed time interval."""

    name: str
    t_domain: tuple[float, float]
    a: TimeFunction = field(default_factory=lambda: constant(1.0))
    b: TimeFunction = field(default_factory=lambda: constant(0.0))
    c: TimeFunction = field(default_factory=lambda: constant(0.0))
    d: TimeFunction = field(default_factory=lambda: constant(0.0))
    f: TimeFunction = field(default_factory=lambda: constant(0.0))
    g: TimeFunction = field(default_factory=lambda: constant(0.0))
    h: TimeFunction | None = None

    def __post_init__(self):
        for name in COEFF_NAMES:
            setattr(self, name, _as_function(getattr(self, name)))
        if self.h is not None:
            self.h = _as_function(self.h)
        t0, t1 = map(float, self.t_domain)
        if not t1 > t0:
            raise ScenarioError("t_domain must satisfy t0 < t1")
        self.t_domain = (t0, t1)
        probe = np.linspace(t0, t1, 257)
        for name in COEFF_NAMES:
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                vals = np.asarray(getattr(self, name)(probe), dtype=float)
            if not np.all(np.isfinite(vals)):
                raise ScenarioError(f"coefficient {name} is not finite on the domain")
        if np.any(np.asarray(self.a(probe)) == 0.0) or np.any(np.diff(np.sign(self.a(probe))) != 0):
            raise ScenarioError("coefficient a vanishes on the domain")

    @property
    def t0(self) -> float:
        return self.t_domain[0]

    def _check(self, t):
        lo, hi = self.t_domain
        tt = np.asarray(t, dtype=float)
        span = hi - lo
        if np.any(tt < lo - 1e-12 * span) or np.any(tt > hi + 1e-12 * span):
            raise ScenarioError(f"t outside domain [{lo}, {hi}]")

    def coeff(self, name: str, t, order: int = 0):
        fn = getattr(self, name)
        if order == 0:
            return fn(t)
        if order == 1:
            return fn.derivative(t)
        return fn.second_derivative(t)

    def is_constant(self) -> bool:
        return all(getattr(self, n).is_const() for n in COEFF_NAMES)

    def to_dict(self) -> dict:
        out = {"name": self.name, "t_domain": list(self.t_domain)}
        for n in COEFF_NAMES:
            out[n] = getattr(self, n).to_dict()
        if self.h is not None:
            out["h"] = self.h.to_dict()
        return out


def eval_coeffs(s: Scenario, t):
    """Return (a, b, c, d, f, g) at ``t``; raises if outside the domain or a=0."""
    s._check(t)
    vals = tuple(getattr(s, n)(t) for n in COEFF_NAMES)
    if np.any(np.asarray(vals[0]) == 0.0):
        raise ScenarioError("a(t) = 0")
    return vals


def char_coeffs(s: Scenario, t) -> CharCoeffs:
    """tau = a'/a - 2c + 4d and sigma = ab - cd + d^2 + (d a'/a - d')/2."""
    a, b, c, d, _, _ = eval_coeffs(s, t)
    da = s.a.derivative(t)
    dd = s.d.derivative(t)
    tau = da / a - 2.0 * c + 4.0 * d
    sigma = a * b - c * d + d * d + 0.5 * (d * da / a - dd)
    return CharCoeffs(tau, sigma)


def scenario_from_dict(doc: dict) -> Scenario:
    try:
        name = str(doc.get("name", "scenario"))
        dom = doc["t_domain"]
        if len(dom) != 2:
            raise ScenarioError("t_domain must be [t0, t1]")
        kwargs = {n: _as_function(doc[n]) for n in COEFF_NAMES if n in doc}
        if "h" in doc:
            kwargs["h"] = _as_function(doc["h"])
        return Scenario(name=name, t_domain=(float(dom[0]), float(dom[1])), **kwargs)
    except KeyError as exc:
        raise ScenarioError(f"missing key {exc.args[0]!r}") from None


def load_scenario(path: str | Path) -> Scenario:
    """Read a TOML or JSON scenario document."""
    p = Path(path)
    raw = p.read_bytes()
    if p.suffix.lower() == ".json":
        try:
            doc = json.loads(raw.decode("utf-8"))
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"invalid JSON: {exc}") from None
    else:
        import tomli

        try:
            doc = tomli.loads(raw.decode("utf-8"))
        except tomli.TOMLDecodeError as exc:
            raise ScenarioError(f"invalid TOML: {exc}") from None
    if not isinstance(doc, dict):
        raise ScenarioError("scenario document must be a table/object")
    return scenario_from_dict(doc)


def demo_scenarios() -> dict[str, Scenario]:
    """Built-in scenarios used by the demos and tests."""
    return {
        "free": Scenario("free", (0.0, 1.0)),
        "fiber": Scenario("fiber", (0.0, 1.0), a="0.5", d="0.1", g="-0.3"),
        "trap": Scenario("trap", (0.0, 1.2), a="1", b="1"),
        "varying": Scenario(
            "varying",
            (0.0, 1.0),
            a="1 + 0.2*sin(t)",
            b="0.3*cos(t)",
            c="0.1*t",
            d="0.05",
            f="0.2*sin(2*t)",
            g="0.1*cos(t)",
        ),
        "expdisp": Scenario(
            "expdisp",
            (0.0, 1.0),
            a="exp(0.3*t)",
            b="0.5",
            c="-0.1",
            d="0.2*tanh(t)",
            f="0.1",
            g="0.2",
        ),
        "dragged": Scenario(
            "dragged",
            (0.0, 1.0),
            a="0.8 - 0.1*t^2",
            b="0.2 + 0.1*t",
            c="0.05*cos(3*t)",
            d="-0.1*t",
            f="-0.3",
            g="0.4*tanh(2*t - 1)",
        ),
    }
