"""Experiment runner: build spaces and surfaces, dispatch checks, emit reports.

Subcommands: run, plot, check-conditions, verify-hm, verify-weighted-hm,
brendle, torus-counterexample, soliton-check, newton-props, paper-suite.
Reports are JSON (schema version 1) plus CSV profile tables and optional
SVG plots. Exit status: 0 when every check passes, 1 when any check fails
or is skipped for violated hypotheses, 2 for config/usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import ambient, radial, rigidity, surfaces, symfun, verify
from .errors import ConstructionError, CurvlabError, DomainError, HypothesisViolation
from .report import (VerificationReport, check_record, load_report,
                     skipped_record, strip_timestamps, write_profile_csv)

DEFAULT_TOL_CLOSED = 1e-9
DEFAULT_TOL_ENGINE = 1e-6


# ---------------------------------------------------------------------------
# builders shared by CLI flags and config files


def space_from_options(opts: dict) -> ambient.WarpedSpace:
    kind = opts.get("space", opts.get("kind", "euclidean"))
    return ambient.make_space(
        kind,
        n=int(opts.get("n", 3)),
        mass=float(opts.get("m", opts.get("mass", 1.0))),
        charge=float(opts.get("q", opts.get("charge", 0.0))),
        r_end=float(opts.get("r_end", 10.0)),
    )


def parse_resolution(value):
    if value is None:
        return 64
    if isinstance(value, int):
        return value
    if isinstance(value, (list, tuple)):
        return tuple(int(v) for v in value)
    text = str(value)
    if "," in text:
        return tuple(int(v) for v in text.split(","))
    return int(text)


def surface_from_options(opts: dict, space) -> surfaces.SurfaceSpec:
    family = opts.get("surface", opts.get("family"))
    if family is None:
        raise ConstructionError("no surface family given")
    resolution = parse_resolution(opts.get("resolution"))
    source = opts.get("source", "auto")
    if family == "sphere":
        params = {"radius": float(opts.get("radius", 1.0)),
                  "offset": float(opts.get("offset", 0.0))}
    elif family == "slice":
        params = {"r0": float(opts.get("r0", 1.0))}
    elif family in ("torus3", "torus4"):
        params = {"R1": float(opts.get("R1", 2.0)), "R2": float(opts.get("R2", 0.5))}
    elif family == "ellipsoid":
        axes = opts.get("semi_axes", "1,1,1")
        if isinstance(axes, str):
            axes = tuple(float(v) for v in axes.split(","))
        params = {"semi_axes": tuple(float(v) for v in axes)}
    elif family == "radial_graph":
        expr = opts.get("rho")
        if expr is None:
            raise ConstructionError("radial_graph needs a rho expression in theta")
        profile = radial.from_expression(str(expr).replace("theta", "r"), name="rho")
        params = {"rho": lambda ang: profile(ang[0]), "n": space.n}
    else:
        raise ConstructionError(f"unknown surface family {family!r}")
    return surfaces.SurfaceSpec(family, params, resolution, source)


def radial_from_options(value, name, monotonicity="none"):
    if value is None:
        return None
    return radial.from_expression(str(value), name=name, monotonicity=monotonicity)


def soliton_from_options(opts: dict) -> rigidity.SolitonSpec:
    mu = opts.get("mu")
    mu = float(mu) if mu is not None else None
    if opts.get("uniform_mix"):
        return rigidity.SolitonSpec.uniform_mix(int(opts["uniform_mix"]), mu=mu)
    pairs = opts.get("pairs") or []
    if isinstance(pairs, str):
        pairs = [pairs]
    weights = {}
    for entry in pairs:
        if isinstance(entry, str):
            i, j = (int(v) for v in entry.split(","))
        else:
            i, j = int(entry[0]), int(entry[1])
        weights[(i, j)] = 1.0
    if not weights:
        raise ConstructionError("soliton check needs --pairs i,j or --uniform-mix m")
    total = sum(weights.values())
    return rigidity.SolitonSpec({p: w / total for p, w in weights.items()}, mu=mu)


# ---------------------------------------------------------------------------
# experiments (each appends records/profiles to a report)


def exp_check_conditions(report: VerificationReport, space, tol=1e-9, grid_points=200):
    grid = np.linspace(space.sample_r_max / grid_points, space.sample_r_max, grid_points)
    cond = ambient.check_conditions(space, grid=grid, tol=tol)
    for key in ("h1", "h2", "h3", "h4"):
        verdict = getattr(cond, key)
        report.add(check_record(
            f"condition_{key}[{space.name}]", verdict.passed, "is_true",
            margin=verdict.margin, tol=tol, **verdict.detail,
        ))
    h = space.h(grid)
    dh = space.dh(grid)
    d2h = space.d2h(grid)
    defect = (space.fiber_curvature - dh**2) / h**2
    report.add_profile(f"h4_margin[{space.name}]", grid, d2h / h + defect,
                       xlabel="r", ylabel="h4_value")
    report.add_profile(f"h3_quantity[{space.name}]", grid,
                       2.0 * d2h / h - (space.n - 2) * defect, xlabel="r", ylabel="q")
    return cond


def exp_classical_hm(report, space, spec, j, tol, convergence=False):
    cloud = surfaces.build_surface(spec, space)
    res = verify.classical_hm_residual(cloud, j)
    label = f"classical_hm[{spec.family}, j={j}, res={spec.resolution}]"
    if convergence:
        coarse_res = _halve_resolution(spec.resolution)
        coarse_cloud = surfaces.build_surface(
            surfaces.SurfaceSpec(spec.family, spec.params, coarse_res, spec.source), space)
        coarse = verify.classical_hm_residual(coarse_cloud, j)
        order = verify.convergence_order(coarse, res)
        report.add(check_record(label, res.relative, "abs_le", tol,
                                lhs=res.lhs, rhs=res.rhs, order=order))
        report.add(check_record(f"{label} order", order, "ge", 2.0))
    else:
        report.add(check_record(label, res.relative, "abs_le", tol,
                                lhs=res.lhs, rhs=res.rhs))
    return res


def _halve_resolution(resolution):
    if isinstance(resolution, int):
        return resolution // 2
    return tuple(v // 2 for v in resolution)


def exp_weighted_hm(report, space, spec, k, phi, tol, convergence=False):
    cloud = surfaces.build_surface(spec, space)
    res = verify.weighted_hm_residual(cloud, space, k, phi)
    div = verify.divergence_theorem_check(cloud, space, k, phi)
    coeff = k * math.comb(space.n - 1, k)
    agree = abs(div.residual / coeff - res.residual) / max(abs(res.residual), cloud.area)
    label = f"weighted_hm[{spec.family}, k={k}, phi={phi.name}, res={spec.resolution}]"
    report.add(check_record(label, res.relative, "abs_le", tol, lhs=res.lhs, rhs=res.rhs))
    report.add(check_record(f"divergence_theorem[{spec.family}, k={k}]",
                            div.relative, "abs_le", tol))
    report.add(check_record(f"divergence_regrouping_agreement[{spec.family}, k={k}]",
                            agree, "abs_le", 1e-12))
    if convergence:
        coarse_cloud = surfaces.build_surface(
            surfaces.SurfaceSpec(spec.family, spec.params,
                                 _halve_resolution(spec.resolution), spec.source), space)
        coarse = verify.weighted_hm_residual(coarse_cloud, space, k, phi)
        order = verify.convergence_order(coarse, res)
        report.add(check_record(f"{label} order", order, "ge", 2.0))
    return res


def exp_brendle(report, space, spec, tol=1e-8):
    cloud = surfaces.build_surface(spec, space)
    try:
        out = verify.brendle_gap(cloud, space, tol=tol)
    except HypothesisViolation as exc:
        report.add(skipped_record(f"brendle_gap[{spec.family}]", str(exc)))
        return None
    report.add(check_record(
        f"brendle_gap[{spec.family}, res={spec.resolution}]", out.gap, "ge",
        -tol * out.area, area=out.area, equality=out.equality,
    ))
    return out


def exp_xi_ric(report, space, spec, tol=1e-9):
    cloud = surfaces.build_surface(spec, space)
    try:
        out = verify.xi_ric_sign_check(cloud, space, tol=tol)
    except HypothesisViolation as exc:
        report.add(skipped_record(f"xi_ric_sign[{spec.family}]", str(exc)))
        return None
    report.add(check_record(f"xi_ric_sign[{spec.family}]", out.min_margin, "ge",
                            -tol, n_samples=out.n_samples))
    return out


def exp_torus_counterexample(report, family, r1, r2, resolution,
                             spread_tol=1e-8, endpoint_tol=1e-9):
    n = 3 if family == "torus3" else 4
    space = ambient.make_space("euclidean", n=n)
    spec = surfaces.SurfaceSpec(family, {"R1": r1, "R2": r2}, parse_resolution(resolution))
    prof = surfaces.torus_profiles(spec, space)
    h1_span = float(prof.h1.max() - prof.h1.min())
    ratio_span = float(prof.h2_over_h1.max() - prof.h2_over_h1.min())
    report.add(check_record(f"{family}_thinness_flag", prof.thin, "is_true",
                            R1=r1, R2=r2))
    report.add(check_record(f"{family}_h1_radial", prof.h1_spread / max(h1_span, 1e-300),
                            "le", spread_tol))
    report.add(check_record(f"{family}_h1_increasing", prof.h1_increasing, "is_true"))
    cloud_spec_is_engine = family == "torus4"
    if family == "torus3":
        report.add(check_record(f"{family}_h1_inner_endpoint",
                                prof.h1[0] - (1.0 / r2 - 1.0 / (r1 - r2)) / 2.0,
                                "abs_le", endpoint_tol, value_at=float(prof.r[0])))
        report.add(check_record(f"{family}_h1_outer_endpoint",
                                prof.h1[-1] - (1.0 / r2 + 1.0 / (r1 + r2)) / 2.0,
                                "abs_le", endpoint_tol, value_at=float(prof.r[-1])))
    if cloud_spec_is_engine:
        report.add(check_record(f"{family}_h2_over_h1_radial",
                                prof.h2_over_h1_spread / max(ratio_span, 1e-300),
                                "le", spread_tol))
        report.add(check_record(f"{family}_h2_over_h1_increasing",
                                prof.h2_over_h1_increasing, "is_true"))
    report.add_profile(f"{family}_h1", prof.r, prof.h1, ylabel="H1")
    report.add_profile(f"{family}_h2_over_h1", prof.r, prof.h2_over_h1, ylabel="H2/H1")
    if prof.printed_h1 is not None:
        # comparison table only; deliberately carries no verdict
        report.add_profile(f"{family}_h1_printed_formula", prof.r, prof.printed_h1,
                           ylabel="H1_printed")
    return prof


def exp_soliton(report, space, spec, soliton_spec, tol=1e-10, expect="soliton"):
    cloud = surfaces.build_surface(spec, space)
    try:
        out = rigidity.soliton_residual(cloud, soliton_spec)
        chain = rigidity.soliton_proof_chain(cloud, soliton_spec,
                                             integrated=expect == "soliton")
    except HypothesisViolation as exc:
        report.add(skipped_record(f"soliton[{spec.family}]", str(exc)))
        return None
    pair_label = ",".join(f"({i},{j})" for i, j in soliton_spec.pairs)
    label = f"soliton[{spec.family}, pairs={pair_label}]"
    if expect == "soliton":
        report.add(check_record(f"{label} residual", out.sup_residual, "le", tol,
                                mu=out.mu, integral_residual=out.integral_residual))
        report.add(check_record(f"{label} mu", out.mu - 1.0, "abs_le", tol))
    else:
        report.add(check_record(f"{label} residual (expected off-soliton lower bound)",
                                out.sup_residual, "ge", tol, mu=out.mu))
    for rec in chain:
        report.add(check_record(f"{label} {rec.name}", rec.passed, "is_true",
                                min_slack=rec.min_slack))
    return out


def exp_newton_props(report, seed=0, sigma_samples=10_000, sweep_samples=100_000,
                     m_max_sigma=6, m_max_sweep=8, tol=1e-12):
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(sigma_samples):
        m = int(rng.integers(2, m_max_sigma + 1))
        lam = rng.normal(0.0, 1.5, m)
        table = symfun.sigma_table(lam)[0]
        abs_table = symfun.sigma_table(np.abs(lam))[0]
        for k in range(m + 1):
            slow = symfun.sigma_subset_sum(k, lam)
            scale = max(1.0, abs_table[k])
            worst = max(worst, abs(table[k] - slow) / scale)
    report.add(check_record("sigma_recurrence_vs_subset_sum", worst, "le", tol,
                            samples=sigma_samples, seconds=time.perf_counter() - t0))

    t0 = time.perf_counter()
    worst_oracle = 0.0
    for m in range(2, 6):
        lam = rng.normal(0.0, 1.2, m)
        for k in range(1, m):
            t = symfun.newton_matrix_oracle(k, np.diag(lam))
            expect = np.diag(symfun.newton_eigen_table(k, lam)[0])
            worst_oracle = max(worst_oracle, float(np.max(np.abs(t - expect))))
    report.add(check_record("newton_delta_formula_vs_spectrum", worst_oracle, "le",
                            1e-10, seconds=time.perf_counter() - t0))

    t0 = time.perf_counter()
    combos = [(m, p) for m in range(2, m_max_sweep + 1) for p in range(1, m + 1)]
    per_combo = max(1, sweep_samples // len(combos))
    worst_ratio = math.inf
    worst_lemma_c = math.inf
    worst_split = 0.0
    total = 0
    for m, p in combos:
        lam = symfun.garding_sample(m, p, rng, size=per_combo)
        total += lam.shape[0]
        h = symfun.h_table(lam)
        restricted = symfun.restricted_h_table(lam)
        for i in range(1, p):
            for j in range(i + 1, p + 1):
                gaps = h[:, j - 1] / h[:, j] - h[:, i - 1] / h[:, i]
                scale = np.abs(h[:, j - 1] / h[:, j]) + np.abs(h[:, i - 1] / h[:, i])
                worst_ratio = min(worst_ratio, float(np.min(gaps / scale)))
                for l in range(m):
                    lemma = j * h[:, i] * restricted[:, l, j - 1] - i * h[:, j] * restricted[:, l, i - 1]
                    worst_lemma_c = min(worst_lemma_c, float(np.min(lemma)))
        sig = symfun.sigma_table(lam)
        for l in range(m):
            keep = np.concatenate([lam[:, :l], lam[:, l + 1:]], axis=1)
            sig_rest = symfun.sigma_table(keep)
            for i in range(1, m + 1):
                rest_i = sig_rest[:, i] if i <= m - 1 else 0.0
                resid = sig[:, i] - (lam[:, l] * sig_rest[:, i - 1] + rest_i)
                scale = np.maximum(1.0, np.abs(sig[:, i]))
                worst_split = max(worst_split, float(np.max(np.abs(resid / scale))))
    seconds = time.perf_counter() - t0
    report.add(check_record("maclaurin_ratio_gap_nonnegative", worst_ratio, "ge", -tol,
                            samples=total, seconds=seconds))
    report.add(check_record("restricted_maclaurin_gap_positive", worst_lemma_c, "gt", 0.0,
                            samples=total))
    report.add(check_record("sigma_splitting_identity", worst_split, "le", tol,
                            samples=total))
    return report


# ---------------------------------------------------------------------------
# the builtin acceptance battery


def run_paper_suite(report: VerificationReport, seed=0, fast=False):
    e3 = ambient.make_space("euclidean", n=3)
    e4 = ambient.make_space("euclidean", n=4)
    hyp = ambient.make_space("hyperbolic", n=3)
    schw3 = ambient.make_space("schwarzschild", n=3, mass=1.0)
    schw4 = ambient.make_space("schwarzschild", n=4, mass=1.0)
    phi = radial.monomial(2)
    scale = 0.5 if fast else 1.0
    res2 = lambda base: int(base * scale)

    # symmetric-function properties
    exp_newton_props(report, seed=seed,
                     sigma_samples=2000 if fast else 10_000,
                     sweep_samples=20_000 if fast else 100_000)

    # ambient conditions and Ricci structure
    cond = exp_check_conditions(report, schw3)
    cond4 = exp_check_conditions(report, schw4)
    eu_cond = ambient.check_conditions(ambient.make_space("euclidean", n=3))
    report.add(check_record("euclidean_h1_fails", eu_cond.h1.passed, "is_false"))
    report.add(check_record("euclidean_h4_not_strict", eu_cond.h4.passed, "is_false"))
    hyp_cond = ambient.check_conditions(hyp)
    report.add(check_record("hyperbolic_h4_borderline", hyp_cond.h4.margin, "abs_le", 1e-9))
    grid = np.linspace(0.05, 5.0, 100)
    rc = ambient.ricci_coeffs(hyp, grid)
    report.add(check_record("hyperbolic_einstein_alpha",
                            float(np.max(np.abs(rc.alpha - (hyp.n - 1)))), "le", 1e-9))
    report.add(check_record("hyperbolic_einstein_beta",
                            float(np.max(np.abs(rc.beta))), "le", 1e-9))
    rc_e = ambient.ricci_coeffs(e3, grid)
    report.add(check_record("euclidean_flat_ricci",
                            float(max(np.max(np.abs(rc_e.alpha)), np.max(np.abs(rc_e.beta)))),
                            "le", 1e-12))

    # classical identity
    for space, res in ((e3, (32, 64)), (e4, (16, 16, 32))):
        for offset in (0.0, 0.3):
            spec = surfaces.SurfaceSpec("sphere", {"radius": 1.0, "offset": offset}, res)
            exp_classical_hm(report, space, spec, 0, 1e-8)
    torus_fine = surfaces.SurfaceSpec("torus3", {"R1": 2.0, "R2": 0.5},
                                      (res2(256), res2(256)), "engine")
    exp_classical_hm(report, e3, torus_fine, 1, 1e-6, convergence=True)

    # weighted identity
    for k in (1, 2):
        exp_weighted_hm(report, e3, torus_fine, k, phi, 1e-6, convergence=True)
    slice3 = surfaces.SurfaceSpec("slice", {"r0": 2.0}, (16, 32))
    for k in (1, 2):
        exp_weighted_hm(report, schw3, slice3, k, phi, 1e-12)
    slice4 = surfaces.SurfaceSpec("slice", {"r0": 2.0}, (12, 12, 24))
    for k in (1, 2, 3):
        exp_weighted_hm(report, schw4, slice4, k, phi, 1e-12)

    # sign lemma on a star-shaped graph
    graph = surfaces.SurfaceSpec(
        "radial_graph",
        {"rho": lambda ang: 2.0 * (1.0 + 0.1 * np.cos(ang[0])), "n": 3}, (32, 64))
    exp_xi_ric(report, schw3, graph)

    # mean-curvature gap
    exp_brendle(report, e3, surfaces.SurfaceSpec("sphere", {"radius": 1.0}, (32, 64)))
    exp_brendle(report, schw3, surfaces.SurfaceSpec("slice", {"r0": 2.5}, (16, 32)))
    torus_gap = exp_brendle(report, e3, surfaces.SurfaceSpec(
        "torus3", {"R1": 2.0, "R2": 0.5}, (res2(128), res2(128))))
    if torus_gap is not None:
        report.add(check_record("brendle_gap_margin[torus3]", torus_gap.gap, "gt",
                                10.0 * 1e-8 * torus_gap.area))

    # torus counterexamples
    exp_torus_counterexample(report, "torus3", 2.0, 0.5, (res2(256), 64),
                             spread_tol=1e-8)
    exp_torus_counterexample(report, "torus4", 2.0, 0.5,
                             (res2(64), res2(24), res2(24)), spread_tol=1e-6)

    # soliton suite
    sphere4 = surfaces.SurfaceSpec("sphere", {"radius": 1.0}, (16, 16, 32))
    for spec in (rigidity.SolitonSpec.single_pair(0, 1),
                 rigidity.SolitonSpec.single_pair(1, 3),
                 rigidity.SolitonSpec.uniform_mix(3)):
        exp_soliton(report, e4, sphere4, spec, tol=1e-10)
    translated = surfaces.SurfaceSpec("sphere", {"radius": 1.0, "offset": 0.3}, (32, 64))
    exp_soliton(report, e3, translated, rigidity.SolitonSpec.single_pair(0, 1),
                tol=0.25, expect="off-soliton")
    ellipsoid = surfaces.SurfaceSpec("ellipsoid", {"semi_axes": (1.0, 1.0, 1.2)}, (48, 48))
    exp_soliton(report, e3, ellipsoid, rigidity.SolitonSpec.single_pair(0, 1),
                tol=10.0 * DEFAULT_TOL_ENGINE, expect="off-soliton")
    return report


# ---------------------------------------------------------------------------
# dispatch


def _finish(report: VerificationReport, out_dir, quiet=False):
    report.finish()
    out = Path(out_dir) if out_dir else Path.cwd()
    out.mkdir(parents=True, exist_ok=True)
    json_path = out / f"{report.experiment.replace(' ', '_')}.json"
    report.write(json_path)
    for name, profile in report.profiles.items():
        safe = name.replace("/", "_").replace(" ", "_").replace("[", "_").replace("]", "")
        write_profile_csv(out / f"{safe}.csv", profile)
    if not quiet:
        for line in report.summary_lines():
            print(line)
        print(f"report: {json_path}")
    return report.exit_status()


def _space_opts_from_args(args):
    return {
        "space": args.space, "n": args.n, "m": args.mass, "q": args.charge,
        "r_end": args.r_end,
    }


def _surface_opts_from_args(args):
    opts = {
        "surface": args.surface, "resolution": args.resolution, "source": args.source,
        "radius": args.radius, "offset": args.offset, "R1": args.R1, "R2": args.R2,
        "r0": args.r0, "semi_axes": args.semi_axes,
    }
    if getattr(args, "rho", None):
        opts["rho"] = args.rho
    return opts


def _add_space_args(p):
    p.add_argument("--space", default="euclidean", choices=ambient.CATALOG)
    p.add_argument("--n", type=int, default=3, help="ambient dimension")
    p.add_argument("--m", "--mass", dest="mass", type=float, default=1.0)
    p.add_argument("--q", "--charge", dest="charge", type=float, default=0.0)
    p.add_argument("--r-end", dest="r_end", type=float, default=10.0)


def _add_surface_args(p, default_surface="sphere"):
    p.add_argument("--surface", default=default_surface,
                   choices=surfaces.FAMILIES)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--offset", type=float, default=0.0)
    p.add_argument("--R1", type=float, default=2.0)
    p.add_argument("--R2", type=float, default=0.5)
    p.add_argument("--r0", type=float, default=2.0)
    p.add_argument("--semi-axes", dest="semi_axes", default="1,1,1")
    p.add_argument("--rho", default=None, help="radial graph profile, expression in theta")
    p.add_argument("--resolution", default="64")
    p.add_argument("--source", default="auto", choices=("auto", "closed_form", "engine"))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="curvlab",
        description="numerical checks of curvature integral identities on hypersurfaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run experiments from a JSON config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("plot", help="plot a profile table from a report")
    p.add_argument("--report", required=True)
    p.add_argument("--quantity", required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("check-conditions", help="evaluate the warping-function conditions")
    _add_space_args(p)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--grid-points", dest="grid_points", type=int, default=200)
    p.add_argument("--out", default=None)

    p = sub.add_parser("verify-hm", help="classical Minkowski-type identity (Euclidean)")
    _add_space_args(p)
    _add_surface_args(p, default_surface="torus3")
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL_ENGINE)
    p.add_argument("--convergence", action="store_true")
    p.add_argument("--out", default=None)

    p = sub.add_parser("verify-weighted-hm", help="weighted warped-product identity")
    _add_space_args(p)
    _add_surface_args(p, default_surface="torus3")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--phi", default="r^2")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL_ENGINE)
    p.add_argument("--convergence", action="store_true")
    p.add_argument("--out", default=None)

    p = sub.add_parser("brendle", help="mean-curvature gap (Heintze-Karcher type)")
    _add_space_args(p)
    _add_surface_args(p)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out", default=None)

    p = sub.add_parser("torus-counterexample", help="radial monotone curvature profiles of thin tori")
    p.add_argument("--family", default="torus3", choices=("torus3", "torus4"))
    p.add_argument("--R1", type=float, default=2.0)
    p.add_argument("--R2", type=float, default=0.5)
    p.add_argument("--resolution", default=None)
    p.add_argument("--spread-tol", dest="spread_tol", type=float, default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("soliton-check", help="inverse-curvature-flow soliton residual")
    _add_space_args(p)
    _add_surface_args(p)
    p.add_argument("--pairs", action="append", default=None, help="weight pair i,j (repeatable)")
    p.add_argument("--uniform-mix", dest="uniform_mix", type=int, default=None,
                   help="equal weights over all pairs up to order m")
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--expect", default="soliton", choices=("soliton", "off-soliton"))
    p.add_argument("--out", default=None)

    p = sub.add_parser("newton-props", help="symmetric-function property sweeps")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--sweep-samples", dest="sweep_samples", type=int, default=100_000)
    p.add_argument("--m-max", dest="m_max", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--out", default=None)

    p = sub.add_parser("paper-suite", help="run the full builtin verification battery")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fast", action="store_true", help="reduced resolutions and sample counts")
    p.add_argument("--out", default=None)
    return parser


def cmd_run(args):
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    report = VerificationReport("run", config=config).start()
    experiments = config.get("experiments")
    if not isinstance(experiments, list) or not experiments:
        print("config error: 'experiments' must be a non-empty list", file=sys.stderr)
        return 2
    seed = int(config.get("seed", 0))
    try:
        for entry in experiments:
            _dispatch_config_experiment(report, entry, seed)
    except (ConstructionError, DomainError, KeyError, ValueError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return _finish(report, args.out)


def _dispatch_config_experiment(report, entry, seed):
    op = entry.get("operation")
    if op == "check-conditions":
        exp_check_conditions(report, space_from_options(entry.get("space", {})),
                             tol=float(entry.get("tol", 1e-9)),
                             grid_points=int(entry.get("grid_points", 200)))
    elif op == "verify-hm":
        space = space_from_options(entry.get("space", {}))
        spec = surface_from_options(entry.get("surface", {}), space)
        _validate_convergence(entry)
        exp_classical_hm(report, space, spec, int(entry.get("j", 1)),
                         float(entry.get("tol", DEFAULT_TOL_ENGINE)),
                         convergence=bool(entry.get("convergence", False)))
    elif op == "verify-weighted-hm":
        space = space_from_options(entry.get("space", {}))
        spec = surface_from_options(entry.get("surface", {}), space)
        _validate_convergence(entry)
        phi = radial_from_options(entry.get("phi", "r^2"), "phi")
        exp_weighted_hm(report, space, spec, int(entry.get("k", 1)), phi,
                        float(entry.get("tol", DEFAULT_TOL_ENGINE)),
                        convergence=bool(entry.get("convergence", False)))
    elif op == "brendle":
        space = space_from_options(entry.get("space", {}))
        spec = surface_from_options(entry.get("surface", {}), space)
        exp_brendle(report, space, spec, tol=float(entry.get("tol", 1e-8)))
    elif op == "xi-ric-sign":
        space = space_from_options(entry.get("space", {}))
        spec = surface_from_options(entry.get("surface", {}), space)
        exp_xi_ric(report, space, spec)
    elif op == "torus-counterexample":
        family = entry.get("family", "torus3")
        res = entry.get("resolution") or ((256, 64) if family == "torus3" else (64, 24, 24))
        exp_torus_counterexample(report, family, float(entry.get("R1", 2.0)),
                                 float(entry.get("R2", 0.5)), res,
                                 spread_tol=float(entry.get("spread_tol",
                                                            1e-8 if family == "torus3" else 1e-6)))
    elif op == "soliton-check":
        space = space_from_options(entry.get("space", {}))
        spec = surface_from_options(entry.get("surface", {}), space)
        exp_soliton(report, space, spec, soliton_from_options(entry),
                    tol=float(entry.get("tol", 1e-10)),
                    expect=entry.get("expect", "soliton"))
    elif op == "newton-props":
        exp_newton_props(report, seed=int(entry.get("seed", seed)),
                         sigma_samples=int(entry.get("samples", 10_000)),
                         sweep_samples=int(entry.get("sweep_samples", 100_000)))
    else:
        raise ConstructionError(f"unknown operation {op!r}")


def _validate_convergence(entry):
    if not entry.get("convergence"):
        return
    resolutions = entry.get("resolutions")
    if resolutions is not None:
        coarse = parse_resolution(resolutions.get("coarse"))
        fine = parse_resolution(resolutions.get("fine"))
        if _halve_resolution(fine) != coarse:
            raise ConstructionError("convergence mode requires fine = 2 x coarse")


def cmd_plot(args):
    try:
        data = load_report(args.report)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"report error: {exc}", file=sys.stderr)
        return 2
    profile = data.get("profiles", {}).get(args.quantity)
    if profile is None:
        known = ", ".join(sorted(data.get("profiles", {}))) or "(none)"
        print(f"no profile table {args.quantity!r} in report; available: {known}",
              file=sys.stderr)
        return 2
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(profile["x"], profile["y"], marker=".", lw=1)
    ax.set_xlabel(profile.get("xlabel", "r"))
    ax.set_ylabel(profile.get("ylabel", "value"))
    ax.set_title(args.quantity)
    ax.grid(True, alpha=0.3)
    out = args.out or f"{args.quantity}.svg"
    fig.savefig(out, format="svg")
    plt.close(fig)
    print(f"plot: {out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "plot":
            return cmd_plot(args)
        if args.command == "check-conditions":
            report = VerificationReport(
                f"check-conditions_{args.space}", config=vars(args)).start()
            exp_check_conditions(report, space_from_options(_space_opts_from_args(args)),
                                 tol=args.tol, grid_points=args.grid_points)
            return _finish(report, args.out)
        if args.command == "verify-hm":
            space = space_from_options(_space_opts_from_args(args))
            spec = surface_from_options(_surface_opts_from_args(args), space)
            report = VerificationReport("verify-hm", config=vars(args)).start()
            exp_classical_hm(report, space, spec, args.j, args.tol,
                             convergence=args.convergence)
            return _finish(report, args.out)
        if args.command == "verify-weighted-hm":
            space = space_from_options(_space_opts_from_args(args))
            spec = surface_from_options(_surface_opts_from_args(args), space)
            report = VerificationReport("verify-weighted-hm", config=vars(args)).start()
            exp_weighted_hm(report, space, spec, args.k,
                            radial_from_options(args.phi, "phi"), args.tol,
                            convergence=args.convergence)
            return _finish(report, args.out)
        if args.command == "brendle":
            space = space_from_options(_space_opts_from_args(args))
            spec = surface_from_options(_surface_opts_from_args(args), space)
            report = VerificationReport("brendle", config=vars(args)).start()
            exp_brendle(report, space, spec, tol=args.tol)
            return _finish(report, args.out)
        if args.command == "torus-counterexample":
            report = VerificationReport("torus-counterexample", config=vars(args)).start()
            res = args.resolution or ("256,64" if args.family == "torus3" else "64,24,24")
            spread = args.spread_tol or (1e-8 if args.family == "torus3" else 1e-6)
            exp_torus_counterexample(report, args.family, args.R1, args.R2, res,
                                     spread_tol=spread)
            return _finish(report, args.out)
        if args.command == "soliton-check":
            space = space_from_options(_space_opts_from_args(args))
            spec = surface_from_options(_surface_opts_from_args(args), space)
            soliton_spec = soliton_from_options(vars(args))
            report = VerificationReport("soliton-check", config={
                k: v for k, v in vars(args).items() if k != "func"}).start()
            exp_soliton(report, space, spec, soliton_spec, tol=args.tol,
                        expect=args.expect)
            return _finish(report, args.out)
        if args.command == "newton-props":
            report = VerificationReport("newton-props", config=vars(args)).start()
            exp_newton_props(report, seed=args.seed, sigma_samples=args.samples,
                             sweep_samples=args.sweep_samples,
                             m_max_sigma=args.m_max, tol=args.tol)
            return _finish(report, args.out)
        if args.command == "paper-suite":
            report = VerificationReport("paper-suite",
                                        config={"seed": args.seed, "fast": args.fast}).start()
            run_paper_suite(report, seed=args.seed, fast=args.fast)
            return _finish(report, args.out)
    except (ConstructionError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HypothesisViolation as exc:
        print(f"hypothesis violation: {exc}", file=sys.stderr)
        return 1
    parser.error(f"unhandled command {args.command}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
