"""Warped-product ambient spaces M = N^{n-1} x [0, r_max) with metric dr^2 + h(r)^2 g_N.

The fiber N is the unit round sphere (constant curvature K = 1) for every
catalog space. Closed-form warping functions cover the space forms
(h = r, sinh r, sin r); Schwarzschild and Reissner-Nordstrom spaces are
defined by the first-order profile h'(r)^2 = F(h(r)) with h'(0) = 0,
integrated as the equivalent smooth second-order system h'' = F'(h)/2
with a fixed-step classical Runge-Kutta scheme. Admissibility of a
profile is never assumed: `check_conditions` is the decision procedure
for the growth conditions (H1)-(H4) used by the verification suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import ConstructionError, DomainError

__all__ = [
    "WarpedSpace",
    "RicciCoefficients",
    "ConditionVerdict",
    "ConditionReport",
    "make_space",
    "potential",
    "conformal_radial_component",
    "ricci_coeffs",
    "ric_mixed",
    "check_conditions",
    "CATALOG",
]

CATALOG = (
    "euclidean",
    "hyperbolic",
    "spherical_hemisphere",
    "schwarzschild",
    "reissner_nordstrom",
)


def unit_sphere_area(dim: int) -> float:
    """Surface measure of the unit sphere S^dim embedded in R^{dim+1}."""
    return 2.0 * math.pi ** ((dim + 1) / 2.0) / math.gamma((dim + 1) / 2.0)


@dataclass(frozen=True)
class WarpedSpace:
    """Immutable ambient space: all evaluations are pure and vectorized."""

    name: str
    n: int
    fiber_curvature: float
    r_max: float
    sample_r_max: float
    fiber_volume: float
    _h: Callable = field(repr=False)
    _dh: Callable = field(repr=False)
    _d2h: Callable = field(repr=False)
    closed_end: bool = False
    params: dict = field(default_factory=dict)
    profile_drift: float = 0.0

    def _checked(self, r):
        arr = np.asarray(r, dtype=float)
        if self.closed_end:
            bad = (arr < 0.0) | (arr > self.r_max)
        else:
            bad = (arr < 0.0) | (arr >= self.r_max)
        if np.any(bad):
            raise DomainError(
                f"radius outside the domain [0, {self.r_max}) of {self.name}"
            )
        return arr

    def h(self, r):
        """Warping function h(r)."""
        arr = self._checked(r)
        out = self._h(arr)
        return float(out) if np.isscalar(r) else np.asarray(out)

    def dh(self, r):
        """First derivative h'(r)."""
        arr = self._checked(r)
        out = self._dh(arr)
        return float(out) if np.isscalar(r) else np.asarray(out)

    def d2h(self, r):
        """Second derivative h''(r)."""
        arr = self._checked(r)
        out = self._d2h(arr)
        return float(out) if np.isscalar(r) else np.asarray(out)


@dataclass(frozen=True)
class RicciCoefficients:
    """Ric = -alpha * g - beta * dr x dr at a fixed radius.

    alpha = h''/h - (n-2)(K - h'^2)/h^2
    beta  = (n-2) * (h''/h + (K - h'^2)/h^2)
    """

    alpha: np.ndarray
    beta: np.ndarray


@dataclass(frozen=True)
class ConditionVerdict:
    passed: bool
    margin: float
    detail: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ConditionReport:
    """Verdicts for the four warping-function conditions on a sampled grid.

    h1: h'(0) = 0 and h''(0) > 0 (endpoint evaluation)
    h2: h' > 0 on the grid
    h3: 2h''/h - (n-2)(K - h'^2)/h^2 non-decreasing (weak monotonicity)
    h4: h''/h + (K - h'^2)/h^2 > 0 on the grid (strict)
    """

    h1: ConditionVerdict
    h2: ConditionVerdict
    h3: ConditionVerdict
    h4: ConditionVerdict
    grid: np.ndarray
    tol: float

    @property
    def all_passed(self) -> bool:
        return self.h1.passed and self.h2.passed and self.h3.passed and self.h4.passed

    def as_dict(self) -> dict:
        out = {}
        for key in ("h1", "h2", "h3", "h4"):
            v = getattr(self, key)
            out[key] = {"passed": bool(v.passed), "margin": float(v.margin), **v.detail}
        out["all_passed"] = self.all_passed
        out["tol"] = self.tol
        return out


def potential(space: WarpedSpace, r):
    """Potential function f(r) = h'(r) of the conformal field."""
    return space.dh(r)


def conformal_radial_component(space: WarpedSpace, r):
    """Magnitude h(r) of the conformal field X = h(r) d/dr along d/dr."""
    return space.h(r)


def ricci_coeffs(space: WarpedSpace, r) -> RicciCoefficients:
    """Coefficients (alpha, beta) of the ambient Ricci tensor at radius r."""
    arr = np.asarray(r, dtype=float)
    if np.any(arr <= 0.0) and space.h(0.0) == 0.0:
        raise DomainError("Ricci coefficients are singular where h(r) = 0")
    h = space.h(r)
    dh = space.dh(r)
    d2h = space.d2h(r)
    defect = (space.fiber_curvature - dh**2) / h**2
    alpha = d2h / h - (space.n - 2) * defect
    beta = (space.n - 2) * (d2h / h + defect)
    return RicciCoefficients(alpha=alpha, beta=beta)


def ric_mixed(space: WarpedSpace, r, dr_e, dr_nu):
    """Ric(e, nu) for ambient-orthonormal e perpendicular to nu.

    Only the dr x dr part survives: Ric(e, nu) = -beta(r) * dr_e * dr_nu,
    where dr_e and dr_nu are the radial components of e and nu.
    """
    beta = ricci_coeffs(space, r).beta
    return -beta * np.asarray(dr_e, dtype=float) * np.asarray(dr_nu, dtype=float)


def check_conditions(space: WarpedSpace, grid=None, tol: float = 1e-9) -> ConditionReport:
    """Evaluate the four admissibility conditions on a radial grid.

    The grid must be sorted and lie in (0, r_max); the h1 condition is
    always evaluated at the left endpoint r = 0. Monotonicity for h3 is
    judged weakly (consecutive differences >= -tol), strict positivity
    for h4 as margin > tol. Margins are reported either way.
    """
    if grid is None:
        grid = np.linspace(space.sample_r_max / 200.0, space.sample_r_max, 200)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise DomainError("condition check requires a non-empty grid")
    if np.any(grid <= 0.0):
        raise DomainError("condition grid must lie in (0, r_max)")

    dh0 = space.dh(0.0)
    d2h0 = space.d2h(0.0)
    h1 = ConditionVerdict(
        passed=(abs(dh0) <= tol) and (d2h0 > tol),
        margin=min(tol - abs(dh0), d2h0 - tol),
        detail={"dh_at_0": float(dh0), "d2h_at_0": float(d2h0)},
    )

    h = space.h(grid)
    dh = space.dh(grid)
    d2h = space.d2h(grid)
    defect = (space.fiber_curvature - dh**2) / h**2

    h2_margin = float(np.min(dh))
    h2 = ConditionVerdict(passed=h2_margin > 0.0, margin=h2_margin)

    q = 2.0 * d2h / h - (space.n - 2) * defect
    diffs = np.diff(q)
    h3_margin = float(np.min(diffs)) if diffs.size else 0.0
    h3 = ConditionVerdict(passed=h3_margin >= -tol, margin=h3_margin)

    h4_vals = d2h / h + defect
    h4_margin = float(np.min(h4_vals))
    h4 = ConditionVerdict(passed=h4_margin > tol, margin=h4_margin)

    return ConditionReport(h1=h1, h2=h2, h3=h3, h4=h4, grid=grid, tol=tol)


# ---------------------------------------------------------------------------
# catalog construction


def _closed_form_space(name, n, h, dh, d2h, r_max, sample_r_max, params):
    return WarpedSpace(
        name=name,
        n=n,
        fiber_curvature=1.0,
        r_max=r_max,
        sample_r_max=sample_r_max,
        fiber_volume=unit_sphere_area(n - 1),
        _h=h,
        _dh=dh,
        _d2h=d2h,
        params=params,
    )


def _rk4_profile(fp_half, h0, r_end, step):
    n_steps = int(math.ceil(r_end / step))
    rs = np.linspace(0.0, n_steps * step, n_steps + 1)
    hs = np.empty(n_steps + 1)
    vs = np.empty(n_steps + 1)
    h, v = h0, 0.0
    hs[0], vs[0] = h, v
    for i in range(n_steps):
        k1h, k1v = v, fp_half(h)
        k2h, k2v = v + 0.5 * step * k1v, fp_half(h + 0.5 * step * k1h)
        k3h, k3v = v + 0.5 * step * k2v, fp_half(h + 0.5 * step * k2h)
        k4h, k4v = v + step * k3v, fp_half(h + step * k3h)
        h += step * (k1h + 2.0 * k2h + 2.0 * k3h + k4h) / 6.0
        v += step * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
        hs[i + 1], vs[i + 1] = h, v
    return rs, hs, vs


def _profile_space(name, n, f_profile, fp_profile, h0, r_end, params,
                   drift_tol=1e-10, step=1.0 / 1024.0):
    # Integrate h'' = F'(h)/2 from (h0, 0); the first integral h'^2 - F(h)
    # starts at zero and its drift is the accuracy monitor.
    fp_half = lambda s: 0.5 * fp_profile(s)
    for _ in range(4):
        rs, hs, vs = _rk4_profile(fp_half, h0, r_end, step)
        drift = float(np.max(np.abs(vs**2 - f_profile(hs))))
        if drift <= drift_tol:
            break
        step *= 0.5
    else:
        raise ConstructionError(
            f"{name}: first-integral drift {drift:.3e} above {drift_tol:.1e}"
        )
    h_spline = CubicHermiteSpline(rs, hs, vs)
    v_spline = CubicHermiteSpline(rs, vs, fp_half(hs))
    return WarpedSpace(
        name=name,
        n=n,
        fiber_curvature=1.0,
        r_max=float(rs[-1]),
        sample_r_max=float(rs[-1]),
        fiber_volume=unit_sphere_area(n - 1),
        _h=h_spline,
        _dh=v_spline,
        _d2h=lambda r: fp_half(h_spline(r)),
        closed_end=True,
        params=params,
        profile_drift=drift,
    )


def make_space(kind: str, n: int = 3, mass: float = 1.0, charge: float = 0.0,
               r_end: float = 10.0) -> WarpedSpace:
    """Build a catalog ambient space.

    Parameters
    ----------
    kind : one of "euclidean", "hyperbolic", "spherical_hemisphere",
        "schwarzschild", "reissner_nordstrom"
    n : ambient dimension, >= 3
    mass, charge : profile parameters for the black-hole spaces
    r_end : integration end for profile-defined spaces, also the
        sampling truncation for the unbounded space forms

    Raises
    ------
    ConstructionError for invalid parameters, e.g. a Reissner-Nordstrom
    profile with no positive root for h'(0) = 0.
    """
    if n < 3:
        raise ConstructionError(f"ambient dimension must be >= 3, got {n}")
    if kind == "euclidean":
        return _closed_form_space(
            f"euclidean({n})", n,
            h=lambda r: np.asarray(r, dtype=float),
            dh=lambda r: np.ones_like(np.asarray(r, dtype=float)),
            d2h=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
            r_max=math.inf, sample_r_max=r_end, params={"n": n},
        )
    if kind == "hyperbolic":
        return _closed_form_space(
            f"hyperbolic({n})", n, h=np.sinh, dh=np.cosh, d2h=np.sinh,
            r_max=math.inf, sample_r_max=r_end, params={"n": n},
        )
    if kind == "spherical_hemisphere":
        # domain truncated just below the equator for sampling
        return _closed_form_space(
            f"spherical_hemisphere({n})", n,
            h=np.sin, dh=np.cos, d2h=lambda r: -np.sin(np.asarray(r, dtype=float)),
            r_max=math.pi / 2.0, sample_r_max=math.pi / 2.0 - 1e-6, params={"n": n},
        )
    if kind == "schwarzschild":
        if mass <= 0.0:
            raise ConstructionError(f"schwarzschild needs mass > 0, got {mass}")
        h0 = (2.0 * mass) ** (1.0 / (n - 2))
        f = lambda s: 1.0 - 2.0 * mass * s ** (2 - n)
        fp = lambda s: 2.0 * mass * (n - 2) * s ** (1 - n)
        return _profile_space(
            f"schwarzschild(n={n}, m={mass})", n, f, fp, h0, r_end,
            params={"n": n, "mass": mass},
        )
    if kind == "reissner_nordstrom":
        if mass <= 0.0:
            raise ConstructionError(f"reissner_nordstrom needs mass > 0, got {mass}")
        disc = mass**2 - charge**2
        if disc < 0.0:
            raise ConstructionError(
                f"reissner_nordstrom(m={mass}, q={charge}): no positive root "
                "for h'(0) = 0 (requires |charge| <= mass)"
            )
        u_plus = mass + math.sqrt(disc)
        h0 = u_plus ** (1.0 / (n - 2))
        f = lambda s: 1.0 - 2.0 * mass * s ** (2 - n) + charge**2 * s ** (4 - 2 * n)
        fp = lambda s: 2.0 * (n - 2) * s ** (1 - n) * (mass - charge**2 * s ** (2 - n))
        return _profile_space(
            f"reissner_nordstrom(n={n}, m={mass}, q={charge})", n, f, fp, h0, r_end,
            params={"n": n, "mass": mass, "charge": charge},
        )
    raise ConstructionError(f"unknown space kind {kind!r}; catalog: {CATALOG}")
