"""A tiny expression language for scalar fields of (x, y, t).

Grammar: binary +, -, *, /, ^ with the usual precedence, ^ binding tighter
than unary minus and associating to the right; unary functions sin, cos, exp,
abs, sqrt, log; variables x, y, t; decimal literals with optional exponent.
Function application requires parentheses: "sin(x)", never "sin x".

Expressions parse to immutable trees (Const / Var / Unary / Binary) that
compare structurally, print back to parseable source, and evaluate on scalars
or numpy arrays. Domain violations during evaluation (log of a non-positive
value, division by zero, negative base with fractional exponent, square root
of a negative value) raise FieldEvalError naming the subexpression and the
offending point.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import DimensionError, FieldEvalError, InvalidParameterError, ParseError

VARIABLES = ("x", "y", "t")
FUNCTIONS = ("neg", "sin", "cos", "exp", "abs", "sqrt", "log")

# Binding powers. ^ > unary minus > * / > + -.
_BP_ADD = 10
_BP_MUL = 20
_BP_NEG = 25
_BP_POW = 30
_BINARY_BP = {"+": _BP_ADD, "-": _BP_ADD, "*": _BP_MUL, "/": _BP_MUL, "^": _BP_POW}
_RIGHT_ASSOC = {"^"}


class FieldExpr:
    """Base class for expression nodes. Instances are immutable."""

    def __call__(self, x, y=0.0, t=0.0):
        return evaluate(self, x, y, t)

    def to_string(self) -> str:
        return _print(self, 0)

    def variables(self) -> frozenset:
        out = set()
        _collect_vars(self, out)
        return frozenset(out)

    @property
    def uses_t(self) -> bool:
        return "t" in self.variables()

    def __str__(self) -> str:
        return self.to_string()


@dataclass(frozen=True)
class Const(FieldExpr):
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))


@dataclass(frozen=True)
class Var(FieldExpr):
    name: str

    def __post_init__(self):
        if self.name not in VARIABLES:
            raise InvalidParameterError(f"unknown variable {self.name!r}; expected one of {VARIABLES}")


@dataclass(frozen=True)
class Unary(FieldExpr):
    op: str
    arg: FieldExpr

    def __post_init__(self):
        if self.op not in FUNCTIONS:
            raise InvalidParameterError(f"unknown function {self.op!r}; expected one of {FUNCTIONS}")


@dataclass(frozen=True)
class Binary(FieldExpr):
    op: str
    lhs: FieldExpr
    rhs: FieldExpr

    def __post_init__(self):
        if self.op not in _BINARY_BP:
            raise InvalidParameterError(f"unknown operator {self.op!r}")


_TOKEN = re.compile(
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
)


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(src):
        if src[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(), pos))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0

    def _peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, "", len(self.src))

    def _next(self):
        tok = self._peek()
        self.i += 1
        return tok

    def parse(self) -> FieldExpr:
        if not self.tokens:
            raise ParseError("empty expression", 0)
        expr = self._expr(0)
        kind, text, pos = self._peek()
        if kind is not None:
            raise ParseError(f"trailing input starting with {text!r}", pos)
        return expr

    def _expr(self, min_bp: int) -> FieldExpr:
        lhs = self._operand()
        while True:
            kind, text, pos = self._peek()
            if kind != "op" or text not in _BINARY_BP:
                break
            bp = _BINARY_BP[text]
            if bp < min_bp:
                break
            self._next()
            rhs = self._expr(bp if text in _RIGHT_ASSOC else bp + 1)
            lhs = Binary(text, lhs, rhs)
        return lhs

    def _operand(self) -> FieldExpr:
        kind, text, pos = self._next()
        if kind == "num":
            return Const(float(text))
        if kind == "name":
            if text in VARIABLES:
                return Var(text)
            if text in FUNCTIONS and text != "neg":
                k2, t2, p2 = self._peek()
                if k2 != "op" or t2 != "(":
                    raise ParseError(f"function {text!r} requires parentheses", p2)
                self._next()
                arg = self._expr(0)
                k3, t3, p3 = self._next()
                if t3 != ")":
                    raise ParseError("expected ')'", p3)
                return Unary(text, arg)
            raise ParseError(f"unknown identifier {text!r}", pos)
        if kind == "op":
            if text == "-":
                return Unary("neg", self._expr(_BP_NEG))
            if text == "(":
                inner = self._expr(0)
                k2, t2, p2 = self._next()
                if t2 != ")":
                    raise ParseError("expected ')'", p2)
                return inner
        if kind is None:
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"expected an operand, got {text!r}", pos)


def parse(src: str) -> FieldExpr:
    """Parse expression source into a tree. Raises ParseError with the
    character position on malformed input."""
    if not isinstance(src, str):
        raise InvalidParameterError(f"expression source must be a string, got {type(src).__name__}")
    return _Parser(src).parse()


def _node_bp(e: FieldExpr) -> int:
    if isinstance(e, Binary):
        return _BINARY_BP[e.op]
    if isinstance(e, Unary) and e.op == "neg":
        return _BP_NEG
    return 100


def _print(e: FieldExpr, parent_bp: int) -> str:
    if isinstance(e, Const):
        s = repr(e.value)
        return f"({s})" if e.value < 0 else s
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Unary):
        if e.op == "neg":
            inner = _print(e.arg, _BP_NEG)
            s = f"-{inner}"
            return f"({s})" if parent_bp > 0 else s
        return f"{e.op}({_print(e.arg, 0)})"
    assert isinstance(e, Binary)
    bp = _BINARY_BP[e.op]
    right_assoc = e.op in _RIGHT_ASSOC
    lhs = _print(e.lhs, bp + 1 if right_assoc else bp)
    rhs = _print(e.rhs, bp if right_assoc else bp + 1)
    s = f"{lhs}{e.op}{rhs}"
    return f"({s})" if bp < parent_bp else s


def _collect_vars(e: FieldExpr, out: set):
    if isinstance(e, Var):
        out.add(e.name)
    elif isinstance(e, Unary):
        _collect_vars(e.arg, out)
    elif isinstance(e, Binary):
        _collect_vars(e.lhs, out)
        _collect_vars(e.rhs, out)


def _first_bad(mask: np.ndarray, env: dict, index_hint: list):
    """Variable values at the first offending position of a vectorized eval."""
    idx = tuple(np.argwhere(mask)[0])
    point = {}
    for name, val in env.items():
        arr = np.asarray(val)
        if arr.ndim == 0:
            point[name] = float(arr)
        else:
            point[name] = float(np.broadcast_to(arr, mask.shape)[idx])
    index_hint.append(int(np.ravel_multi_index(idx, mask.shape)))
    return point


def _domain_error(message: str, node: FieldExpr, bad_mask, env: dict):
    bad_mask = np.asarray(bad_mask)
    if bad_mask.ndim == 0:
        point = {k: (float(v) if np.asarray(v).ndim == 0 else float(np.asarray(v).flat[0])) for k, v in env.items()}
        raise FieldEvalError(message, node.to_string(), point, index=None)
    hint: list = []
    point = _first_bad(bad_mask, env, hint)
    raise FieldEvalError(message, node.to_string(), point, index=hint[0])


def _eval(e: FieldExpr, env: dict):
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Unary):
        v = _eval(e.arg, env)
        if e.op == "neg":
            return np.negative(v)
        if e.op == "sin":
            return np.sin(v)
        if e.op == "cos":
            return np.cos(v)
        if e.op == "exp":
            return np.exp(v)
        if e.op == "abs":
            return np.abs(v)
        if e.op == "sqrt":
            bad = np.less(v, 0.0)
            if np.any(bad):
                _domain_error("square root of a negative value", e, bad, env)
            return np.sqrt(v)
        assert e.op == "log"
        bad = np.less_equal(v, 0.0)
        if np.any(bad):
            _domain_error("logarithm of a non-positive value", e, bad, env)
        return np.log(v)
    assert isinstance(e, Binary)
    a = _eval(e.lhs, env)
    b = _eval(e.rhs, env)
    if e.op == "+":
        return np.add(a, b)
    if e.op == "-":
        return np.subtract(a, b)
    if e.op == "*":
        return np.multiply(a, b)
    if e.op == "/":
        bad = np.equal(b, 0.0)
        if np.any(bad):
            _domain_error("division by zero", e, bad, env)
        return np.divide(a, b)
    assert e.op == "^"
    a_arr, b_arr = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    frac = np.not_equal(b_arr, np.floor(b_arr))
    bad = np.less(a_arr, 0.0) & frac
    if np.any(bad):
        _domain_error("negative base with a non-integer exponent", e, bad, env)
    bad = np.equal(a_arr, 0.0) & np.less(b_arr, 0.0)
    if np.any(bad):
        _domain_error("zero base with a negative exponent", e, bad, env)
    return np.power(a, b)


def evaluate(e: FieldExpr, x, y=0.0, t=0.0):
    """Evaluate e with variables bound to scalars or broadcastable arrays."""
    env = {"x": x, "y": y, "t": t}
    out = _eval(e, env)
    if np.ndim(out) == 0 and np.ndim(x) == 0 and np.ndim(y) == 0 and np.ndim(t) == 0:
        return float(out)
    # Constant subtrees evaluate to scalars; promote to the broadcast shape.
    shape = np.broadcast_shapes(np.shape(x), np.shape(y), np.shape(t))
    return np.broadcast_to(np.asarray(out, dtype=np.float64), shape).copy() if np.ndim(out) == 0 else np.asarray(out)


def _point_env(point: np.ndarray, t: float) -> dict:
    if point.size == 1:
        return {"x": float(point[0]), "y": 0.0, "t": t}
    return {"x": float(point[0]), "y": float(point[1]), "t": t}


def _steps(point: np.ndarray, h) -> np.ndarray:
    if h is None:
        return (1.0 + np.abs(point)) * 1e-5
    h = np.asarray(h, dtype=np.float64)
    if np.any(h <= 0):
        raise InvalidParameterError(f"finite-difference step must be positive, got {h}")
    return np.broadcast_to(h, point.shape).astype(np.float64)


def grad_fd(e: FieldExpr, point, t: float = 0.0, h=None) -> np.ndarray:
    """Central-difference gradient of e in the spatial variables at point.

    point has 1 entry (x) or 2 entries (x, y); the default step is
    (1 + |coordinate|) * 1e-5 per axis.
    """
    point = np.atleast_1d(np.asarray(point, dtype=np.float64))
    if point.size not in (1, 2):
        raise DimensionError(f"point must have 1 or 2 components, got {point.size}")
    hs = _steps(point, h)
    grad = np.empty(point.size)
    for i in range(point.size):
        p_hi, p_lo = point.copy(), point.copy()
        p_hi[i] += hs[i]
        p_lo[i] -= hs[i]
        f_hi = evaluate(e, **_point_env(p_hi, t))
        f_lo = evaluate(e, **_point_env(p_lo, t))
        grad[i] = (f_hi - f_lo) / (2.0 * hs[i])
    return grad


def hessian_fd(e: FieldExpr, point, t: float = 0.0, h=None) -> np.ndarray:
    """Central-difference Hessian of e at point, symmetrized exactly."""
    point = np.atleast_1d(np.asarray(point, dtype=np.float64))
    if point.size not in (1, 2):
        raise DimensionError(f"point must have 1 or 2 components, got {point.size}")
    hs = _steps(point, h)
    d = point.size
    hess = np.empty((d, d))
    f0 = evaluate(e, **_point_env(point, t))
    for i in range(d):
        p_hi, p_lo = point.copy(), point.copy()
        p_hi[i] += hs[i]
        p_lo[i] -= hs[i]
        f_hi = evaluate(e, **_point_env(p_hi, t))
        f_lo = evaluate(e, **_point_env(p_lo, t))
        hess[i, i] = (f_hi - 2.0 * f0 + f_lo) / hs[i] ** 2
    for i in range(d):
        for j in range(i + 1, d):
            vals = {}
            for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                p = point.copy()
                p[i] += si * hs[i]
                p[j] += sj * hs[j]
                vals[(si, sj)] = evaluate(e, **_point_env(p, t))
            cross = (vals[(1, 1)] - vals[(1, -1)] - vals[(-1, 1)] + vals[(-1, -1)]) / (4.0 * hs[i] * hs[j])
            hess[i, j] = hess[j, i] = cross
    return hess


def validate_on_box(e: FieldExpr, lo, hi, n_per_axis: int = 25, t: float = 0.0) -> None:
    """Check that e evaluates to finite reals on a probe grid over the box.

    Raises FieldEvalError on domain violations and InvalidParameterError when
    the expression produces non-finite values inside the box.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=np.float64))
    hi = np.atleast_1d(np.asarray(hi, dtype=np.float64))
    if lo.shape != hi.shape or lo.size not in (1, 2):
        raise DimensionError(f"box must be 1-D or 2-D, got lo={lo}, hi={hi}")
    if np.any(lo >= hi):
        raise InvalidParameterError(f"box must have lo < hi, got lo={lo}, hi={hi}")
    axes = [np.linspace(lo[i], hi[i], n_per_axis) for i in range(lo.size)]
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        if lo.size == 1:
            vals = evaluate(e, axes[0], 0.0, t)
        else:
            gx, gy = np.meshgrid(axes[0], axes[1], indexing="ij")
            vals = evaluate(e, gx, gy, t)
    if not np.all(np.isfinite(vals)):
        bad = ~np.isfinite(np.atleast_1d(vals))
        raise InvalidParameterError(
            f"expression '{e.to_string()}' is not finite everywhere on the box "
            f"[{lo.tolist()}, {hi.tolist()}] ({int(bad.sum())} of {bad.size} probe points)"
        )


FieldLike = Union[FieldExpr, Callable]


@dataclass(frozen=True)
class FieldSpec:
    """Coefficient fields of a diffusion: drift b (d,), diffusion sigma
    (d, m), and optional scalar potential and payoff fields."""

    drift: tuple
    diffusion: tuple
    potential: FieldExpr | None = None
    payoff: FieldExpr | None = None

    def __post_init__(self):
        drift = tuple(self.drift)
        diffusion = tuple(tuple(row) for row in self.diffusion)
        if not drift:
            raise DimensionError("drift must have at least one component")
        if len(diffusion) != len(drift):
            raise DimensionError(
                f"diffusion has {len(diffusion)} rows but drift has {len(drift)} components"
            )
        m = len(diffusion[0])
        if m < 1 or any(len(row) != m for row in diffusion):
            raise DimensionError("diffusion rows must be non-empty and of equal length")
        for e in drift + tuple(x for row in diffusion for x in row):
            if not isinstance(e, FieldExpr):
                raise InvalidParameterError(f"coefficient entries must be FieldExpr, got {type(e).__name__}")
        allowed = {"x", "t"} if len(drift) == 1 else {"x", "y", "t"}
        for e in drift + tuple(x for row in diffusion for x in row):
            extra = set(e.variables()) - allowed
            if extra:
                raise InvalidParameterError(
                    f"coefficient '{e.to_string()}' uses {sorted(extra)} but the problem is {len(drift)}-dimensional"
                )
        object.__setattr__(self, "drift", drift)
        object.__setattr__(self, "diffusion", diffusion)

    @classmethod
    def from_strings(cls, drift, diffusion, potential: str | None = None, payoff: str | None = None) -> "FieldSpec":
        """Build from source strings. diffusion accepts a full matrix
        [[...], ...] or a flat list interpreted as a diagonal matrix."""
        drift_e = tuple(parse(s) for s in drift)
        diffusion = list(diffusion)
        if diffusion and isinstance(diffusion[0], str):
            d = len(diffusion)
            diffusion_e = tuple(
                tuple(parse(diffusion[i]) if i == j else Const(0.0) for j in range(d)) for i in range(d)
            )
        else:
            diffusion_e = tuple(tuple(parse(s) for s in row) for row in diffusion)
        return cls(
            drift=drift_e,
            diffusion=diffusion_e,
            potential=parse(potential) if potential is not None else None,
            payoff=parse(payoff) if payoff is not None else None,
        )

    @property
    def d(self) -> int:
        return len(self.drift)

    @property
    def m(self) -> int:
        return len(self.diffusion[0])

    @property
    def is_diagonal(self) -> bool:
        if self.d != self.m:
            return False
        return all(
            self.diffusion[i][j] == Const(0.0)
            for i in range(self.d)
            for j in range(self.m)
            if i != j
        )

    @property
    def uses_t(self) -> bool:
        exprs = self.drift + tuple(x for row in self.diffusion for x in row)
        return any(e.uses_t for e in exprs)
