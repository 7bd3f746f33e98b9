"""Acceptance suite behind `odp verify`."""

import math
import time
import logging
from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from odp.annulus2d.branch import trace_branch
from odp.annulus2d.dtn_map import jacobian_check
from odp.annulus2d.field import make_annulus_grid
from odp.bifurcate.lambda_star import BifurcationCertificate, find_lambda_star, parity_diagnostics
from odp.cli.rescale import rescale_to_unit_sphere
from odp.cli.run_config import RunConfig
from odp.core.errors import OdpError
from odp.dtn.forms import trace_inequality
from odp.dtn.modes import mode_entry
from odp.dtn.report import form_identity_residual, orthogonality_check
from odp.exterior.window import Window, select_window
from odp.geometry.grid import make_sphere_grid
from odp.numerics.eigen import smallest_eigenpairs
from odp.radial.convergence import convergence_study
from odp.radial.solver import ProfileCache, RadialProfile
from odp.spectrum.dirichlet import dense_oracle, dirichlet_form_identity, mode_operator, principal_dirichlet_pair

logger = logging.getLogger(__name__)

CHECK_DEGREES = range(1, 7)
DENSE_ORACLE_N = 400
RANDOM_PROFILES = 20


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: Optional[float] = None
    threshold: Optional[float] = None
    seconds: float = 0.0
    detail: Dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None


class VerifyContext:
    """Shared, lazily computed objects for the checks of one preset."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.group = config.symmetry
        self.params = config.params

    @cached_property
    def window(self) -> Window:
        return select_window(self.params, self.group)

    @cached_property
    def lam_mid(self) -> float:
        w = self.window
        return 0.5 * (w.lambda0 + w.lambda1)

    @cached_property
    def cache(self) -> ProfileCache:
        return ProfileCache(self.params, n=self.config.n_r)

    @cached_property
    def profile(self) -> RadialProfile:
        return self.cache.get(self.lam_mid)

    @cached_property
    def certificate(self) -> BifurcationCertificate:
        return find_lambda_star(self.params, self.group, self.window.as_tuple(), cache=self.cache)

    @cached_property
    def branch(self) -> pd.DataFrame:
        cert = self.certificate
        grid = make_annulus_grid(self.params.k, self.group.first_degree, self.config.n_r, self.config.n_theta, radial=self.cache.grid)
        return trace_branch(self.cache, grid, self.config.amplitudes, cert.lambda_star, self.config.n_modes)


def check_radial_residual(ctx: VerifyContext) -> CheckResult:
    w = ctx.window
    worst = 0.0
    table = {}
    for k in ctx.config.k_list[:3]:
        cache = ProfileCache(ctx.params.with_k(k), n=ctx.config.n_r)
        for lam in (w.lambda0, ctx.lam_mid, w.lambda1):
            res = cache.get(lam).residual_norm
            table[f"k={k:g},lambda={lam:.6g}"] = res
            worst = max(worst, res)
    return CheckResult("radial_residual", worst < 1e-10, worst, 1e-10, detail=table)


def check_limit_convergence(ctx: VerifyContext) -> CheckResult:
    table = convergence_study(ctx.params.with_lambda(1.0), ctx.config.k_list)
    errors = table["error"].to_numpy(dtype=float)
    ok = bool(np.all(np.isfinite(errors)) and np.all(np.diff(errors) < 0))
    failures = {f"k={k:g}": msg for k, msg in zip(table["k"], table["failure"]) if msg}
    return CheckResult("limit_convergence", ok, float(errors[-1]), detail={"errors": errors.tolist(), "failures": failures})


def check_energy_identity(ctx: VerifyContext) -> CheckResult:
    q, rel = dirichlet_form_identity(ctx.profile)
    return CheckResult("dirichlet_energy_identity", rel < 1e-8, rel, 1e-8, detail={"Q": q})


def check_principal_pair(ctx: VerifyContext) -> CheckResult:
    pair = principal_dirichlet_pair(ctx.profile)
    small = ProfileCache(ctx.params, grid=make_sphere_grid(ctx.params.k, ctx.params.d, n=DENSE_ORACLE_N)).get(ctx.lam_mid)
    op = mode_operator(small, 0)
    sparse, _ = smallest_eigenpairs(op.matrix, op.mass, 2)
    dense = dense_oracle(op, 2)
    gap = float(np.max(np.abs(sparse - dense)))
    ok = pair.tau < 0.0 < pair.second_eig and pair.morse_index == 1 and gap < 1e-9
    detail = {"tau": pair.tau, "second_eig": pair.second_eig, "morse_index": pair.morse_index}
    return CheckResult("principal_pair", ok, gap, 1e-9, detail=detail)


def check_orthogonality(ctx: VerifyContext) -> CheckResult:
    pair = principal_dirichlet_pair(ctx.profile)
    worst = 0.0
    for degree in CHECK_DEGREES:
        entry = mode_entry(ctx.profile, degree, pair=pair)
        worst = max(worst, *orthogonality_check(entry.psi, pair, ctx.profile, degree))
    return CheckResult("orthogonality", worst < 1e-10, worst, 1e-10)


def check_form_identity(ctx: VerifyContext) -> CheckResult:
    worst = max(form_identity_residual(ctx.profile, mode_entry(ctx.profile, degree)) for degree in CHECK_DEGREES)
    return CheckResult("sigma_form_identity", worst < 1e-8, worst, 1e-8)


def check_mode_monotonicity(ctx: VerifyContext) -> CheckResult:
    w = ctx.window
    failures = []
    for lam in np.linspace(w.lambda0, w.lambda1, 5):
        u = ctx.cache.get(float(lam))
        h = [mode_entry(u, degree).h for degree in CHECK_DEGREES]
        if np.any(np.diff(h) <= 0):
            failures.append(float(lam))
    return CheckResult("mode_monotonicity", not failures, float(len(failures)), 0.0, detail={"failing_lambdas": failures})


def check_certificate(ctx: VerifyContext) -> CheckResult:
    cert = ctx.certificate
    lam0, lam1 = cert.window
    fine = find_lambda_star(ctx.params, ctx.group, cert.window, n_r=2 * ctx.config.n_r, check_margin=False)
    shift = abs(fine.lambda_star - cert.lambda_star)
    problems = parity_diagnostics(cert)
    ok = (
        lam0 < cert.lambda_star < lam1
        and abs(cert.h_at_star) < 1e-8
        and cert.sigma1_below * cert.sigma1_above < 0
        and cert.index_drop == 1
        and not problems
        and shift < 1e-6
    )
    detail = {"certificate": cert.to_dict(), "grid_doubling_shift": shift, "parity_problems": problems}
    return CheckResult("lambda_star_certificate", ok, cert.lambda_star, detail=detail)


def check_linearization(ctx: VerifyContext) -> CheckResult:
    n = ctx.group.first_degree
    grid = make_annulus_grid(ctx.params.k, n, ctx.config.n_r, ctx.config.n_theta, radial=ctx.cache.grid)
    u = ctx.cache.get(ctx.lam_mid)
    detail = {}
    ok = True
    worst = 0.0
    for j in ctx.config.modes:
        table = jacobian_check(u, grid, j, ctx.config.eps_list)
        order = float(table["observed_order"].iloc[-1])
        rel = float(table.attrs.get("extrapolated_rel_error", table["rel_error"].iloc[-1]))
        detail[f"j={j}"] = {"observed_order": order, "rel_error": rel, "h": table.attrs["h"]}
        ok = ok and order >= 1.9 and rel < 1e-4
        worst = max(worst, rel)
    return CheckResult("linearization", ok, worst, 1e-4, detail=detail)


def check_branch(ctx: VerifyContext) -> CheckResult:
    table = ctx.branch
    gaps = np.abs(table["lambda"].to_numpy() - ctx.certificate.lambda_star)
    coeffs = table[[c for c in table.columns if c.startswith("a_")]].to_numpy()
    ok = (
        bool(np.all(table["F_residual"] < 1e-8))
        and bool(np.all(table["neumann_stddev"] < 1e-6))
        and bool(np.all(np.diff(gaps) >= 0))
        and bool(np.all(np.any(coeffs != 0.0, axis=1)))
    )
    detail = {"rate": table.attrs.get("rate"), "gaps": gaps.tolist()}
    return CheckResult("branch", ok, float(table["F_residual"].max()), 1e-8, detail=detail)


def _random_profiles(grid, count: int, seed: int = 0) -> List[np.ndarray]:
    rng = np.random.default_rng(seed)
    s = (grid.nodes - grid.r_inner) / (grid.r_end - grid.r_inner)
    profiles = []
    for _ in range(count):
        c = rng.normal(size=4)
        decay = rng.uniform(0.5, 5.0)
        phi = np.exp(-decay * s) * (1.0 + sum(c[m] * np.cos((m + 1) * math.pi * s) for m in range(4)))
        profiles.append(phi)
    return profiles


def check_trace_inequality(ctx: VerifyContext) -> CheckResult:
    u = ctx.profile
    grid = u.grid
    d = ctx.params.d
    worst = -math.inf
    for degree in CHECK_DEGREES:
        lhs, rhs, _ = trace_inequality(mode_entry(u, degree).psi, grid, d, degree)
        worst = max(worst, lhs - rhs)
    for i, phi in enumerate(_random_profiles(grid, RANDOM_PROFILES)):
        lhs, rhs, _ = trace_inequality(phi, grid, d, 1 + i % 6)
        worst = max(worst, lhs - rhs)
    return CheckResult("trace_inequality", worst <= 0.0, worst, 0.0)


def check_rescale(ctx: VerifyContext) -> CheckResult:
    row = ctx.branch.iloc[0]
    coeffs = [float(row[c]) for c in ctx.branch.columns if c.startswith("a_")]
    report = {
        "k": ctx.params.k,
        "d": ctx.params.d,
        "p": ctx.params.p,
        "n": ctx.group.first_degree,
        "n_r": ctx.config.n_r,
        "n_theta": ctx.config.n_theta,
        "lambda": float(row["lambda"]),
        "coefficients": coeffs,
    }
    out = rescale_to_unit_sphere(report)
    value = max(out["mapped_residual"], out["F_residual_original_scale"])
    return CheckResult("rescale", value < 1e-8, value, 1e-8, detail=out)


CHECKS: List[Callable[[VerifyContext], CheckResult]] = [
    check_radial_residual,
    check_limit_convergence,
    check_energy_identity,
    check_principal_pair,
    check_orthogonality,
    check_form_identity,
    check_mode_monotonicity,
    check_certificate,
    check_linearization,
    check_branch,
    check_trace_inequality,
    check_rescale,
]


def run_verify(config: RunConfig) -> Dict[str, Any]:
    """
    Run every check; a failing check does not stop the others.

    Returns:
        Summary dict with passed (all checks) and the per-check results
    """
    ctx = VerifyContext(config)
    results = []
    for check in CHECKS:
        start = time.perf_counter()
        name = check.__name__.replace("check_", "")
        try:
            result = check(ctx)
        except OdpError as e:
            logger.error(f"Check {name} failed with {type(e).__name__}: {e}")
            result = CheckResult(name, False, error=f"{type(e).__name__}: {e}")
        result.seconds = time.perf_counter() - start
        logger.info(f"{'PASS' if result.passed else 'FAIL'} {result.name} ({result.seconds:.1f} s) value={result.value}")
        results.append(result)
    return {
        "preset": config.preset,
        "passed": all(r.passed for r in results),
        "checks": [asdict(r) for r in results],
    }
