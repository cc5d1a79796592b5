"""Radial coefficient functions and the config expression grammar.

Weight functions in the integral identities and rigidity conditions are
functions of the ambient radius r with declared monotonicity. They can be
built from plain callables (with an optional analytic derivative) or from
a small arithmetic expression grammar (constants, r, power, exp, log,
sqrt, trig, min/max) that is parsed through the ast module with a strict
whitelist, so config files stay deterministic and sandboxed. Derivatives
default to centered finite differences, consistent to second order.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConstructionError, DomainError

__all__ = ["RadialFunction", "WeightFamily", "constant", "monomial", "from_expression"]

MONOTONICITY = ("increasing", "decreasing", "none")


class RadialFunction:
    """A scalar function of the radius with derivative access.

    Parameters
    ----------
    fn : vectorized callable r -> value
    dfn : optional analytic derivative; centered differences otherwise
    name : label used in reports
    monotonicity : declared trend ("increasing", "decreasing", "none");
        validated by sampling, never assumed
    """

    def __init__(self, fn, dfn=None, name="radial", monotonicity="none"):
        if monotonicity not in MONOTONICITY:
            raise ConstructionError(f"monotonicity must be one of {MONOTONICITY}")
        self._fn = fn
        self._dfn = dfn
        self.name = name
        self.monotonicity = monotonicity

    def __call__(self, r):
        return np.asarray(self._fn(np.asarray(r, dtype=float)), dtype=float)

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        if self._dfn is not None:
            return np.asarray(self._dfn(r), dtype=float)
        step = 1e-6 * np.maximum(1.0, np.abs(r))
        return (self._fn(r + step) - self._fn(r - step)) / (2.0 * step)

    def validate_monotonicity(self, grid):
        """Sampled check of the declared trend; returns (ok, margin).

        margin is the minimum signed increment in the declared direction
        (or the negated maximum for decreasing); "none" always validates.
        """
        grid = np.sort(np.asarray(grid, dtype=float))
        if grid.size < 2 or self.monotonicity == "none":
            return True, 0.0
        diffs = np.diff(self(grid))
        if self.monotonicity == "increasing":
            margin = float(np.min(diffs))
        else:
            margin = float(np.min(-diffs))
        return margin >= -1e-12, margin

    def __repr__(self):
        return f"RadialFunction({self.name!r}, monotonicity={self.monotonicity!r})"


def constant(value, name=None, monotonicity="increasing"):
    """Constant weight; constants count as (weakly) monotone either way."""
    value = float(value)
    return RadialFunction(
        lambda r: np.full_like(np.asarray(r, dtype=float), value),
        dfn=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
        name=name or f"{value:g}", monotonicity=monotonicity,
    )


def monomial(degree, coeff=1.0, name=None, monotonicity=None):
    """coeff * r**degree with its analytic derivative."""
    degree = float(degree)
    coeff = float(coeff)
    if monotonicity is None:
        monotonicity = "increasing" if coeff * degree >= 0.0 else "decreasing"
    return RadialFunction(
        lambda r: coeff * r**degree,
        dfn=lambda r: coeff * degree * r ** (degree - 1.0) if degree != 0.0
        else np.zeros_like(np.asarray(r, dtype=float)),
        name=name or f"{coeff:g}*r^{degree:g}", monotonicity=monotonicity,
    )


_ALLOWED_CALLS = {
    "exp": np.exp, "log": np.log, "sqrt": np.sqrt,
    "sin": np.sin, "cos": np.cos, "tanh": np.tanh,
    "min": np.minimum, "max": np.maximum, "abs": np.abs,
}
_ALLOWED_NAMES = {"r": None, "pi": math.pi, "e": math.e}
_ALLOWED_BINOPS = {ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow}


def _compile_node(node):
    if isinstance(node, ast.Expression):
        return _compile_node(node.body)
    if isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)):
            raise ConstructionError(f"non-numeric constant {node.value!r}")
        value = float(node.value)
        return lambda r: value
    if isinstance(node, ast.Name):
        if node.id == "r":
            return lambda r: r
        if node.id in _ALLOWED_NAMES:
            value = _ALLOWED_NAMES[node.id]
            return lambda r: value
        raise ConstructionError(f"unknown name {node.id!r} in radial expression")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _compile_node(node.operand)
        sign = -1.0 if isinstance(node.op, ast.USub) else 1.0
        return lambda r: sign * inner(r)
    if isinstance(node, ast.BinOp) and type(node.op) in _ALLOWED_BINOPS:
        left = _compile_node(node.left)
        right = _compile_node(node.right)
        op = type(node.op)
        if op is ast.Add:
            return lambda r: left(r) + right(r)
        if op is ast.Sub:
            return lambda r: left(r) - right(r)
        if op is ast.Mult:
            return lambda r: left(r) * right(r)
        if op is ast.Div:
            return lambda r: left(r) / right(r)
        return lambda r: left(r) ** right(r)
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _ALLOWED_CALLS:
            raise ConstructionError("only exp/log/sqrt/sin/cos/tanh/min/max/abs calls allowed")
        if node.keywords:
            raise ConstructionError("keyword arguments not allowed in radial expressions")
        fn = _ALLOWED_CALLS[node.func.id]
        args = [_compile_node(a) for a in node.args]
        if node.func.id in ("min", "max"):
            if len(args) != 2:
                raise ConstructionError("min/max take exactly two arguments")
            return lambda r: fn(args[0](r), args[1](r))
        if len(args) != 1:
            raise ConstructionError(f"{node.func.id} takes exactly one argument")
        return lambda r: fn(args[0](r))
    raise ConstructionError(f"disallowed syntax in radial expression: {ast.dump(node)}")


def from_expression(text, name=None, monotonicity="none"):
    """Parse a radial expression such as "r^2" or "exp(-r)*min(r, 2)"."""
    if not isinstance(text, str) or not text.strip():
        raise ConstructionError("radial expression must be a non-empty string")
    source = text.replace("^", "**")
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise ConstructionError(f"cannot parse radial expression {text!r}: {exc}") from exc
    fn = _compile_node(tree)

    def compiled(r):
        # constants evaluate to scalars; broadcast them to the input shape
        out = np.asarray(fn(r), dtype=float)
        if np.shape(r) and out.shape != np.shape(r):
            out = np.broadcast_to(out, np.shape(r)).copy()
        return out

    return RadialFunction(compiled, name=name or text, monotonicity=monotonicity)


@dataclass
class WeightFamily:
    """Named groups of radial coefficient functions used by the checks.

    b : multiply H_j in radial curvature conditions (declared increasing)
    c : multiply H_1 H_{j-1} (declared increasing)
    a : the decreasing family of ratio conditions
    eta : right-hand side profile
    phi : scalar weight of the integral identities
    """

    b: tuple = ()
    c: tuple = ()
    a: tuple = ()
    eta: RadialFunction | None = None
    phi: RadialFunction | None = None

    def members(self):
        out = list(self.b) + list(self.c) + list(self.a)
        if self.eta is not None:
            out.append(self.eta)
        if self.phi is not None:
            out.append(self.phi)
        return out

    def validate(self, grid):
        """Sampled monotonicity report: {name: (ok, margin)}."""
        report = {}
        for fn in self.members():
            report[fn.name] = fn.validate_monotonicity(grid)
        return report

    def check_differentiable(self, grid, tol=1e-6):
        """Derivative access consistent with centered differences on the grid."""
        grid = np.asarray(grid, dtype=float)
        for fn in self.members():
            step = 1e-5 * np.maximum(1.0, np.abs(grid))
            fd = (fn(grid + step) - fn(grid - step)) / (2.0 * step)
            if np.max(np.abs(fd - fn.derivative(grid))) > tol * np.maximum(1.0, np.max(np.abs(fd))):
                raise DomainError(f"derivative of {fn.name} inconsistent with finite differences")
        return True
