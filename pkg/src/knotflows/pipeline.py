"""Synthesis and verification orchestration.

synthesize: link -> tube charts -> strip Cauchy data -> error budget -> basis
-> fitted global Beltrami expansion.

verify: expansion + link -> strip residual recheck, eigen-relation spot check,
orbit refinement with Floquet data, confinement and winding certificates,
pairwise linking numbers, optional C0/C1 cross-validation against the marched
local field. Emits a machine-readable report with per-criterion pass/fail.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .charts import build_charts
from .config import RunConfig
from .curves import LinkSpec
from .dynamics import (IntegrationError, NewtonFailure, OrbitEscape,
                       TransversalityError, monodromy, refine_orbit)
from .field import BeltramiExpansion, make_basis
from .fileio import REPORT_SCHEMA
from .fitting import ErrorBudget, FitReport, fit_global, make_error_budget
from .marcher import MarchError, cross_validate
from .strip import build_cauchy_data, closedness_check
from .topology import LinkingError, hausdorff_distance, linking_number, tube_confinement


class PipelineError(RuntimeError):
    """Hard failure of a synthesis gate (an existence hypothesis is violated)."""


def _reconcile(link: LinkSpec, config: RunConfig | None) -> RunConfig:
    if config is None:
        return RunConfig(lam=link.lam)
    if config.lam != link.lam:
        return config.replace(lam=link.lam)
    return config


def build_geometry(link: LinkSpec, config: RunConfig):
    """Deterministic chart + Cauchy-data construction shared by both commands."""
    charts = build_charts(link, config)
    cauchy = [build_cauchy_data(ch, config) for ch in charts]
    return charts, cauchy


def fd_curl_divergence(field, points: np.ndarray, h: float = 5e-3):
    """Finite-difference curl and divergence checks at the given points.

    Five-point central stencils, truncation O(h^4). The step default balances
    h^4 truncation against round-off from summing the expansion; for coefficient
    totals up to ~1e5 and lam near 1 the divergence error stays below 1e-8.
    Returns (max relative |curl u - lam u| error, max |div u|). The relative
    error is measured against max(|lam u|, 1e-12) pointwise.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    jac = np.empty((pts.shape[0], 3, 3))
    for j in range(3):
        dx = np.zeros(3)
        dx[j] = h
        jac[:, :, j] = (-field(pts + 2 * dx) + 8.0 * field(pts + dx)
                        - 8.0 * field(pts - dx) + field(pts - 2 * dx)) / (12.0 * h)
    curl = np.stack([jac[:, 2, 1] - jac[:, 1, 2],
                     jac[:, 0, 2] - jac[:, 2, 0],
                     jac[:, 1, 0] - jac[:, 0, 1]], axis=1)
    target = field.lam * field(pts)
    scale = np.maximum(np.linalg.norm(target, axis=1), 1e-12)
    rel = np.linalg.norm(curl - target, axis=1) / scale
    div = np.abs(jac[:, 0, 0] + jac[:, 1, 1] + jac[:, 2, 2])
    return float(np.max(rel)), float(np.max(div))


def check_points(link: LinkSpec, n: int, seed: int) -> np.ndarray:
    """Deterministic sample points in the inflated bounding box of the link."""
    rng = np.random.default_rng(seed + 1)
    samples = np.vstack([c.point(np.linspace(0, 2 * np.pi, 64, endpoint=False))
                         for c in link.components])
    lo, hi = samples.min(axis=0) - 0.5, samples.max(axis=0) + 0.5
    return lo + (hi - lo) * rng.random((n, 3))


@dataclass
class SynthesisResult:
    link: LinkSpec
    config: RunConfig
    charts: list
    cauchy: list
    closedness: list
    budget: ErrorBudget
    expansion: BeltramiExpansion
    fit: FitReport
    timings: dict

    @property
    def success(self) -> bool:
        return self.fit.success


def synthesize(link: LinkSpec, config: RunConfig | None = None) -> SynthesisResult:
    """Fit a global Beltrami expansion to the Cauchy data of every tube.

    Raises PipelineError when the closedness gate fails (the strip data would
    violate the local existence theorem); a fit residual over budget is not an
    exception, it is reported through FitReport.success.
    """
    config = _reconcile(link, config)
    timings = {}
    t0 = time.perf_counter()
    charts, cauchy = build_geometry(link, config)
    closedness = [closedness_check(d) for d in cauchy]
    timings["geometry_s"] = time.perf_counter() - t0
    worst = max(closedness)
    if worst > config.closedness_tol:
        raise PipelineError(
            f"Cauchy-data closedness residual {worst:.3e} exceeds "
            f"{config.closedness_tol:g}; the pullback of gamma is not closed")

    budget = make_error_budget([config.eps_tilde] * len(charts), config.budget_order)
    t0 = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    k, e = make_basis(config.directions, rng)
    expansion, fit = fit_global(cauchy, budget, k, e, link.lam,
                                ridge=config.ridge,
                                stride_s=config.fit_stride_s,
                                stride_t=config.fit_stride_t)
    timings["fit_s"] = time.perf_counter() - t0
    return SynthesisResult(link, config, charts, cauchy, closedness, budget,
                           expansion, fit, timings)


def fit_report_dict(fit: FitReport) -> dict:
    return {"basis_members": fit.basis_members, "n_points": fit.n_points,
            "tube_residuals": fit.tube_residuals, "tube_budgets": fit.tube_budgets,
            "success": fit.success, "condition": fit.condition, "rank": fit.rank,
            "weighted_objective": fit.weighted_objective, "ridge": fit.ridge,
            "advice": fit.advice}


@dataclass
class VerificationOutcome:
    report: dict
    passed: bool
    budget_ok: bool
    dynamics_ok: bool
    topology_ok: bool


def _criterion(criteria: list, name: str, passed: bool, detail: str) -> bool:
    criteria.append({"name": name, "passed": bool(passed), "detail": detail})
    return bool(passed)


def verify(link: LinkSpec, expansion: BeltramiExpansion,
           config: RunConfig | None = None) -> VerificationOutcome:
    """Check every claim the synthesized field makes about the link.

    Dynamics failures (orbit escape, Newton breakdown) are recorded per
    component and verification continues for the remaining components.
    """
    if expansion.lam != link.lam:
        raise ValueError(f"lambda mismatch: field has {expansion.lam!r}, "
                         f"link has {link.lam!r}")
    config = _reconcile(link, config)
    timings = {}
    criteria: list[dict] = []

    t0 = time.perf_counter()
    charts, cauchy = build_geometry(link, config)
    closedness = [closedness_check(d) for d in cauchy]
    budget = make_error_budget([config.eps_tilde] * len(charts), config.budget_order)
    strip_residuals = []
    for data in cauchy:
        u = expansion(data.points.reshape(-1, 3))
        strip_residuals.append(
            float(np.max(np.linalg.norm(u - data.w.reshape(-1, 3), axis=1))))
    timings["geometry_s"] = time.perf_counter() - t0

    closed_ok = _criterion(
        criteria, "cauchy_closedness", max(closedness) <= config.closedness_tol,
        f"max residual {max(closedness):.3e} vs {config.closedness_tol:g}")
    budget_ok = _criterion(
        criteria, "strip_residual_budget",
        all(r < b for r, b in zip(strip_residuals, budget.eps_tilde)),
        "per-tube max |u - w| on the strip vs eps~")

    t0 = time.perf_counter()
    pts = check_points(link, config.curl_check_points, config.seed)
    curl_rel, div_max = fd_curl_divergence(expansion, pts)
    timings["eigen_check_s"] = time.perf_counter() - t0
    eigen_ok = _criterion(
        criteria, "eigen_relation",
        curl_rel < config.curl_tol and div_max < config.div_tol,
        f"FD curl rel {curl_rel:.3e} vs {config.curl_tol:g}, "
        f"FD div {div_max:.3e} vs {config.div_tol:g}")

    components = []
    orbits = []
    t0 = time.perf_counter()
    for i, chart in enumerate(charts):
        entry: dict = {"index": i,
                       "strip_residual": strip_residuals[i],
                       "strip_budget": budget.eps_tilde[i],
                       "closedness": closedness[i],
                       "tube_radius": chart.radius,
                       "strip_half_width": chart.w_half,
                       "core_length": chart.length}
        try:
            orbit = refine_orbit(expansion, chart,
                                 rtol=config.rtol, atol=config.atol,
                                 method=config.method,
                                 closure_tol=config.closure_tol,
                                 max_iter=config.newton_max_iter,
                                 t_max_factor=config.t_max_factor,
                                 n_samples=config.orbit_samples)
            flo = monodromy(expansion, orbit, rtol=min(config.rtol, 1e-11),
                            atol=min(config.atol, 1e-13), method=config.method)
            cert = tube_confinement(orbit.points, chart)
            haus = hausdorff_distance(orbit.points, chart.frame.arc.points)
            entry.update({
                "status": "ok",
                "period": orbit.period,
                "closure_residual": orbit.closure_residual,
                "newton_iterations": orbit.newton_iterations,
                "multipliers": [flo.multipliers[0], flo.multipliers[1]],
                "det_monodromy": flo.det,
                "classification": flo.classification,
                "margin": flo.margin,
                "flow_eigen_residual": flo.flow_eigen_residual,
                "confined": cert.confined,
                "winding": cert.winding,
                "margin_rho": cert.margin_rho,
                "margin_z": cert.margin_z,
                "hausdorff": haus,
                "hausdorff_tol": config.hausdorff_tol,
            })
            orbits.append(orbit)
        except (OrbitEscape, NewtonFailure, IntegrationError,
                TransversalityError) as exc:
            entry.update({"status": "dynamics_error",
                          "error": f"{type(exc).__name__}: {exc}"})
            orbits.append(None)
        if config.cross_validate:
            try:
                cv = cross_validate(expansion, chart, link.lam,
                                    rho_frac=config.march_rho_frac,
                                    m_max=config.march_m_max,
                                    growth_cap=config.march_growth_cap)
                entry["local_field_distance"] = cv
            except MarchError as exc:
                entry["local_field_distance"] = {
                    "error": f"MarchError: {exc}"}
        components.append(entry)
    timings["dynamics_s"] = time.perf_counter() - t0

    converged = [o is not None for o in orbits]
    dynamics_ok = _criterion(
        criteria, "orbits_converged", all(converged),
        f"{sum(converged)}/{len(orbits)} orbits refined to closure "
        f"{config.closure_tol:g}")
    hyper_ok = _criterion(
        criteria, "orbits_hyperbolic",
        all(c.get("classification") == "hyperbolic_saddle" and c.get("margin", 0) > 0
            for c in components if c["status"] == "ok") and all(converged),
        "Floquet multipliers off the unit circle with positive margin")
    det_ok = _criterion(
        criteria, "unit_determinant",
        all(abs(c["det_monodromy"] - 1.0) < 1e-4
            for c in components if c["status"] == "ok") and all(converged),
        "|det M(T) - 1| < 1e-4 (Liouville)")
    confine_ok = _criterion(
        criteria, "orbits_confined",
        all(c.get("confined") and c.get("winding") == 1
            for c in components if c["status"] == "ok") and all(converged),
        "each orbit stays in its tube and winds once")
    haus_ok = _criterion(
        criteria, "hausdorff_distance",
        all(c.get("hausdorff", np.inf) < config.hausdorff_tol
            for c in components if c["status"] == "ok") and all(converged),
        f"orbit-to-core Hausdorff distance < {config.hausdorff_tol:g}")

    t0 = time.perf_counter()
    pairs = []
    linking_ok = True
    arcs = [ch.frame.arc for ch in charts]
    for i in range(len(charts)):
        for j in range(i + 1, len(charts)):
            pair: dict = {"a": i, "b": j}
            try:
                target = linking_number(arcs[i].points, arcs[j].points,
                                        defect_tol=config.defect_tol)
                pair["target"] = target.link
                pair["target_defect"] = target.defect
            except LinkingError as exc:
                pair["error"] = f"LinkingError(target): {exc}"
                linking_ok = False
                pairs.append(pair)
                continue
            if orbits[i] is None or orbits[j] is None:
                pair["error"] = "orbit missing; linking not computed"
                linking_ok = False
                pairs.append(pair)
                continue
            try:
                got = linking_number(orbits[i].points, orbits[j].points,
                                     defect_tol=config.defect_tol)
                pair["linking"] = got.link
                pair["defect"] = got.defect
                pair["match"] = bool(got.link == target.link)
                linking_ok = linking_ok and pair["match"]
            except LinkingError as exc:
                pair["error"] = f"LinkingError(orbit): {exc}"
                linking_ok = False
            pairs.append(pair)
    timings["topology_s"] = time.perf_counter() - t0
    linking_ok = _criterion(
        criteria, "linking_matrix", linking_ok,
        "orbit pairwise Gauss linking numbers equal the core link's")

    topology_ok = bool(confine_ok and haus_ok and linking_ok)
    passed = bool(closed_ok and budget_ok and eigen_ok and dynamics_ok
                  and hyper_ok and det_ok and topology_ok)
    report = {
        "schema": REPORT_SCHEMA,
        "lambda": link.lam,
        "config": config.to_dict(),
        "basis_size": expansion.n_members,
        "closedness": closedness,
        "strip_residuals": strip_residuals,
        "strip_budgets": list(budget.eps_tilde),
        "eigen_relation": {"curl_rel_max": curl_rel, "div_max": div_max,
                           "points": int(pts.shape[0])},
        "components": components,
        "pairs": pairs,
        "criteria": criteria,
        "passed": passed,
        "timings": timings,
    }
    return VerificationOutcome(report, passed, bool(budget_ok and closed_ok),
                               bool(dynamics_ok and hyper_ok and det_ok),
                               topology_ok)
