"""Quadrature checks of the curvature integral identities and inequalities.

Implemented checks, all over a SurfaceCloud:

* classical Minkowski-type identity in Euclidean space,
  integral of H_j equals integral of H_{j+1} <X, nu>;
* its weighted warped-product generalization for order k with a radial
  weight phi, where the Newton-tensor divergence term is evaluated
  algebraically from the ambient Ricci coefficients (never by numerical
  surface differentiation);
* the closed-surface divergence-theorem form of the same identity (must
  vanish, and must agree with the residual above up to re-association);
* the pointwise sign of the tangential-conformal-field Ricci terms on
  star-shaped surfaces in spaces with positive radial Ricci defect;
* the Heintze-Karcher-type mean-curvature gap (Brendle's inequality),
  integral of f/H_1 minus the enclosed conformal volume term.

Reductions are plain numpy sums (pairwise), so every reported number is
bit-stable across runs and thread counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import symfun
from .ambient import WarpedSpace, check_conditions, ricci_coeffs
from .errors import DomainError, HypothesisViolation
from .radial import RadialFunction
from .surfaces import SurfaceCloud, star_shapedness

__all__ = [
    "IdentityResidual",
    "SignCheck",
    "BrendleResult",
    "classical_hm_residual",
    "weighted_hm_residual",
    "divergence_theorem_check",
    "xi_ric_sign_check",
    "brendle_gap",
    "newton_gradr_quadratic",
    "div_t_xi",
    "convergence_order",
]


@dataclass(frozen=True)
class IdentityResidual:
    """lhs, rhs and their difference for one integral identity check.

    relative scales the residual by max(|lhs|, |rhs|, area) so that
    identities whose two sides both vanish (slices) stay well defined.
    """

    name: str
    lhs: float
    rhs: float
    residual: float
    relative: float
    area: float
    resolution: object = None
    order: float | None = None

    def as_dict(self) -> dict:
        return {
            "name": self.name, "lhs": self.lhs, "rhs": self.rhs,
            "residual": self.residual, "relative": self.relative,
            "area": self.area, "resolution": self.resolution, "order": self.order,
        }


@dataclass(frozen=True)
class SignCheck:
    name: str
    passed: bool
    min_margin: float
    n_samples: int


@dataclass(frozen=True)
class BrendleResult:
    gap: float
    area: float
    equality: bool
    tol: float


def _residual(name, lhs, rhs, area, resolution=None, order=None):
    residual = lhs - rhs
    scale = max(abs(lhs), abs(rhs), area)
    return IdentityResidual(
        name=name, lhs=lhs, rhs=rhs, residual=residual,
        relative=residual / scale, area=area, resolution=resolution, order=order,
    )


def convergence_order(coarse: IdentityResidual, fine: IdentityResidual) -> float:
    """Empirical order from a resolution doubling: log2 |r_coarse / r_fine|."""
    denom = max(abs(fine.relative), 1e-300)
    return math.log2(max(abs(coarse.relative), 1e-300) / denom)


def classical_hm_residual(cloud: SurfaceCloud, j: int) -> IdentityResidual:
    """Euclidean identity: integral of H_j minus integral of H_{j+1} <X, nu>."""
    if not cloud.space.name.startswith("euclidean"):
        raise DomainError("the classical identity is checked in Euclidean ambient space")
    m = cloud.m
    if not 0 <= j <= m - 1:
        raise DomainError(f"order j={j} outside [0, {m - 1}]")
    h = symfun.h_table(cloud.lambdas)
    lhs = cloud.integrate(h[:, j])
    rhs = cloud.integrate(h[:, j + 1] * cloud.support)
    return _residual(f"classical_hm[j={j}]", lhs, rhs, cloud.area,
                     resolution=cloud.spec.resolution if cloud.spec else None)


def div_t_xi(cloud: SurfaceCloud, space: WarpedSpace, k: int) -> np.ndarray:
    """Per-sample divergence term (div T_{k-1})(xi), evaluated algebraically.

    For k >= 2 this is C(n-3, k-2) * beta(r) * h(r) * <dr, nu> *
    sum_j H_{k-2;j} <dr, e_j>^2 with beta the dr x dr Ricci coefficient;
    the order-zero Newton tensor is divergence free, so k = 1 gives zeros.
    """
    n = space.n
    if not 1 <= k <= n - 1:
        raise DomainError(f"order k={k} outside [1, {n - 1}]")
    if k == 1:
        return np.zeros(cloud.r.size)
    beta = ricci_coeffs(space, cloud.r).beta
    restricted = symfun.restricted_h_table(cloud.lambdas)[:, :, k - 2]
    quad = np.sum(restricted * cloud.dr_e**2, axis=1)
    return math.comb(n - 3, k - 2) * beta * cloud.h_r * cloud.dr_nu * quad


def newton_gradr_quadratic(cloud: SurfaceCloud, k: int) -> np.ndarray:
    """Per-sample <T_{k-1} grad r, grad r> in the principal frame.

    The tangential radial gradient has components <dr, e_j>, so this is
    sum_j Lambda_j^{(k-1)} <dr, e_j>^2.
    """
    eig = symfun.newton_eigen_table(k - 1, cloud.lambdas)
    return np.sum(eig * cloud.dr_e**2, axis=1)


def _weighted_terms(cloud, space, k, phi):
    n = space.n
    if not 1 <= k <= n - 1:
        raise DomainError(f"order k={k} outside [1, {n - 1}]")
    h = symfun.h_table(cloud.lambdas)
    f = space.dh(cloud.r)
    phi_v = phi(cloud.r)
    dphi = phi.derivative(cloud.r)
    pointwise = phi_v * (f * h[:, k - 1] - h[:, k] * cloud.support)
    div_term = phi_v * div_t_xi(cloud, space, k)
    grad_term = cloud.h_r * dphi * newton_gradr_quadratic(cloud, k)
    return pointwise, div_term, grad_term, f, h


def weighted_hm_residual(cloud: SurfaceCloud, space: WarpedSpace, k: int,
                         phi: RadialFunction) -> IdentityResidual:
    """Weighted warped-product identity for order k and radial weight phi.

    lhs collects the potential/support terms and the algebraic divergence
    term; rhs is the Newton-tensor pairing with the weight gradient. The
    residual vanishes (to quadrature accuracy) on every closed surface.
    """
    pointwise, div_term, grad_term, _, _ = _weighted_terms(cloud, space, k, phi)
    coeff = 1.0 / (k * math.comb(space.n - 1, k))
    lhs = cloud.integrate(pointwise) + coeff * cloud.integrate(div_term)
    rhs = -coeff * cloud.integrate(grad_term)
    return _residual(f"weighted_hm[k={k}, phi={phi.name}]", lhs, rhs, cloud.area,
                     resolution=cloud.spec.resolution if cloud.spec else None)


def divergence_theorem_check(cloud: SurfaceCloud, space: WarpedSpace, k: int,
                             phi: RadialFunction) -> IdentityResidual:
    """Quadrature of the full surface divergence; must vanish on a closed surface.

    This regroups the weighted identity without moving any term across the
    equality sign: the integrand is (n-k) f sigma_{k-1} phi - k sigma_k phi
    <X, nu> + phi (div T_{k-1})(xi) + <T_{k-1} xi, grad phi>. Divided by
    k C(n-1, k) it must agree with weighted_hm_residual up to floating-point
    re-association.
    """
    pointwise_unused, div_term, grad_term, f, h = _weighted_terms(cloud, space, k, phi)
    del pointwise_unused
    n = space.n
    phi_v = phi(cloud.r)
    sigma_km1 = math.comb(n - 1, k - 1) * h[:, k - 1]
    sigma_k = math.comb(n - 1, k) * h[:, k]
    integrand = ((n - k) * f * sigma_km1 * phi_v
                 - k * sigma_k * phi_v * cloud.support
                 + div_term + grad_term)
    value = cloud.integrate(integrand)
    return _residual(f"divergence_theorem[k={k}, phi={phi.name}]",
                     value, 0.0, cloud.area,
                     resolution=cloud.spec.resolution if cloud.spec else None)


def xi_ric_sign_check(cloud: SurfaceCloud, space: WarpedSpace,
                      tol: float = 1e-9, require_hypotheses: bool = True) -> SignCheck:
    """Pointwise sign of -xi^j Ric(e_j, nu) = beta h <dr, nu> <dr, e_j>^2.

    Requires the strict positivity condition h''/h + (K - h'^2)/h^2 > 0 on
    the surface's radial range and a strictly star-shaped cloud; violations
    raise HypothesisViolation so runners can report a skipped check. Pass
    require_hypotheses=False to evaluate the values regardless (the flat
    cases are identically zero whether or not the hypotheses hold).
    """
    if require_hypotheses:
        star = star_shapedness(cloud)
        if not star.strict:
            raise HypothesisViolation(
                f"cloud is not strictly star-shaped (min <dr, nu> = {star.min_dr_nu:.3e})"
            )
        r_lo, r_hi = float(np.min(cloud.r)), float(np.max(cloud.r))
        grid = np.linspace(r_lo, r_hi, 64)
        report = check_conditions(space, grid=grid, tol=tol)
        if not report.h4.passed:
            raise HypothesisViolation(
                f"ambient fails the strict Ricci-defect condition on [{r_lo:.3g}, {r_hi:.3g}]"
                f" (margin {report.h4.margin:.3e})"
            )
    beta = ricci_coeffs(space, cloud.r).beta
    values = beta[:, None] * (cloud.h_r * cloud.dr_nu)[:, None] * cloud.dr_e**2
    return SignCheck(
        name="xi_ric_sign", passed=bool(np.min(values) >= -tol * max(1.0, float(np.max(np.abs(values))))),
        min_margin=float(np.min(values)), n_samples=values.size,
    )


def brendle_gap(cloud: SurfaceCloud, space: WarpedSpace, tol: float = 1e-8) -> BrendleResult:
    """Heintze-Karcher-type gap: integral of f/H_1 minus integral of <X, nu>.

    Nonnegative for closed embedded mean-convex surfaces in admissible
    ambients (and in the space forms); zero exactly on umbilical members
    of the catalog. Requires H_1 > 0 at every sample; embeddedness is the
    caller's responsibility (catalog families are embedded).
    """
    h1 = symfun.h_table(cloud.lambdas)[:, 1]
    if np.any(h1 <= 0.0):
        bad = int(np.argmin(h1))
        raise HypothesisViolation(
            f"mean curvature is not positive everywhere (min H_1 = {h1[bad]:.3e} "
            f"at sample {bad}, r = {cloud.r[bad]:.3g})"
        )
    f = space.dh(cloud.r)
    gap = cloud.integrate(f / h1) - cloud.integrate(cloud.support)
    return BrendleResult(gap=gap, area=cloud.area,
                         equality=abs(gap) < tol * cloud.area, tol=tol)
