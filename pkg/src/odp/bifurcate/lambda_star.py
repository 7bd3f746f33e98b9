"""Degeneracy parameter lambda*(k) and its odd-crossing certificate."""

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import brentq

from odp.core.config import solver_section
from odp.core.errors import BracketError, DegenerateEndpointError, SolverError
from odp.dtn.modes import mode_entry
from odp.dtn.report import dtn_report
from odp.exterior.window import locate_thresholds, padded_bracket, window_settings
from odp.geometry.params import ProblemParams
from odp.geometry.symmetry import SymmetryGroup, validate_group
from odp.radial.solver import ProfileCache
from odp.spectrum.dirichlet import dirichlet_margin, margin_row

logger = logging.getLogger(__name__)


@dataclass
class BifurcationCertificate:
    """lambda*(k) with sigma_1 and the index on both sides of it."""

    k: float
    d: int
    p: float
    group: str
    lambda_star: float
    kernel_degree: int
    kernel_mult: int
    sigma1_below: float
    sigma1_above: float
    index_below: int
    index_above: int
    window: Tuple[float, float]
    h_at_star: float
    delta: float
    n_r: int
    du_at_1: float
    h_below: Dict[int, float] = field(default_factory=dict)
    h_above: Dict[int, float] = field(default_factory=dict)
    margin: Optional[float] = None
    reselected: bool = False

    @property
    def index_drop(self) -> int:
        return self.index_below - self.index_above

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["window"] = list(self.window)
        out["h_below"] = {str(l): h for l, h in self.h_below.items()}
        out["h_above"] = {str(l): h for l, h in self.h_above.items()}
        return out

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BifurcationCertificate":
        data = dict(data)
        data["window"] = tuple(data["window"])
        data["h_below"] = {int(l): float(h) for l, h in data.get("h_below", {}).items()}
        data["h_above"] = {int(l): float(h) for l, h in data.get("h_above", {}).items()}
        known = set(cls.__dataclass_fields__)
        return cls(**{key: value for key, value in data.items() if key in known})


def _settings() -> Dict[str, Any]:
    cfg = {"delta_rel": 1e-3, "h_tol": 1e-8, "degeneracy_tol": 1e-6, "xtol": 1e-13}
    cfg.update(solver_section("bifurcate"))
    return cfg


def h_scan(cache: ProfileCache, degree: int, lambdas) -> pd.DataFrame:
    rows = [{"lambda": float(lam), f"h_{degree}": mode_entry(cache.get(lam), degree).h} for lam in lambdas]
    return pd.DataFrame(rows)


class SphereProblem:
    """h_{i_1} and the Dirichlet margin along lambda at fixed k."""

    def __init__(self, cache: ProfileCache, group: SymmetryGroup):
        self.cache = cache
        self.group = validate_group(group)

    def h(self, lam: float) -> float:
        return mode_entry(self.cache.get(lam), self.group.first_degree).h

    def margin(self, lam: float) -> float:
        return float(margin_row(self.cache.get(lam), self.group)["margin"])

    def scan(self, lambdas) -> pd.DataFrame:
        """lambda, margin and h rows; lambdas whose solve fails are left out."""
        rows = []
        for lam in lambdas:
            lam = float(lam)
            try:
                rows.append({"lambda": lam, "margin": self.margin(lam), "h": self.h(lam)})
            except SolverError as e:
                logger.warning(f"Sphere scan skips lambda={lam:g} at k={self.cache.params_base.k:g}: {e}")
        return pd.DataFrame(rows, columns=["lambda", "margin", "h"])


def reselect_window(
    cache: ProfileCache,
    group: SymmetryGroup,
    window: Tuple[float, float],
    settings: Optional[Dict[str, Any]] = None,
) -> Tuple[float, float]:
    """
    Window for this k from a sphere scan around a window that failed.

    The scan spans [lambda0 / f, lambda1 * f] with f = window.reselect_factor,
    and the bracket is located like the limit window: past the last loss of
    Dirichlet margin, sampling h just above it.

    Raises:
        BracketError: carrying the sphere scan when no bracket is found
    """
    cfg = window_settings(settings)
    factor = float(cfg.get("reselect_factor", 1.5))
    lambdas = np.geomspace(window[0] / factor, window[1] * factor, int(cfg.get("reselect_points", 24)))
    problem = SphereProblem(cache, group)
    scan = problem.scan(lambdas)
    if scan.empty:
        raise BracketError(f"No lambda of the sphere scan at k={cache.params_base.k:g} could be solved", scan=scan)
    try:
        found = locate_thresholds(
            problem.h,
            problem.margin,
            scan["lambda"].to_numpy(),
            scan["h"].to_numpy(),
            scan["margin"].to_numpy(),
            cfg["pole_offsets"],
            label=f"h_{group.first_degree}",
        )
    except BracketError as e:
        raise BracketError(f"Window reselection at k={cache.params_base.k:g} failed: {e}", scan=scan) from e
    bounds = padded_bracket(found.candidates, found.index, int(cfg["padding"]))
    logger.info(
        f"Reselected window at k={cache.params_base.k:g}: [{bounds[0]:.8g}, {bounds[1]:.8g}] "
        f"(Lambda0 {found.Lambda0}, crossing near {found.Lambda_star:.8g})"
    )
    return bounds


def _checked_bracket(
    cache: ProfileCache,
    group: SymmetryGroup,
    lam0: float,
    lam1: float,
    check_margin: bool,
) -> Optional[float]:
    """Dirichlet margin (when checked) after confirming h_{i_1} goes from - to + on the window."""
    margin = dirichlet_margin(cache, group, (lam0, lam1)) if check_margin else None
    i1 = group.first_degree
    h0 = mode_entry(cache.get(lam0), i1).h
    h1 = mode_entry(cache.get(lam1), i1).h
    if not (h0 < 0.0 < h1):
        scan = h_scan(cache, i1, np.linspace(lam0, lam1, 9))
        raise BracketError(
            f"h_{i1} does not change sign from - to + on [{lam0:.6g}, {lam1:.6g}] "
            f"at k={cache.params_base.k:g} ({h0:.4g}, {h1:.4g}); reselect the window",
            scan=scan,
        )
    return margin


def find_lambda_star(
    params_base: ProblemParams,
    group: SymmetryGroup,
    window: Tuple[float, float],
    cache: Optional[ProfileCache] = None,
    n_r: Optional[int] = None,
    check_margin: bool = True,
    reselect: bool = True,
) -> BifurcationCertificate:
    """
    Brent root of lambda -> h_{i_1}(k, lambda) on the window, with the endpoint data.

    A window taken from the limit problem can miss the sphere thresholds at
    larger k. With reselect, a window that fails the margin or bracket test
    is replaced once by reselect_window.

    Args:
        params_base: d, p and k
        group: Symmetry group satisfying (G)
        window: (lambda0, lambda1)
        cache: Sphere profiles at this k (built when omitted)
        n_r: Radial cells when the cache is built here
        check_margin: Require a positive Dirichlet margin on the window first
        reselect: Rescan around a failing window instead of raising

    Returns:
        BifurcationCertificate

    Raises:
        BracketError: h_{i_1} has one sign on the window, or the root is a pole
        SpectrumError: nonpositive Dirichlet margin
    """
    group = validate_group(group)
    cfg = _settings()
    lam0, lam1 = float(window[0]), float(window[1])
    if not lam0 < lam1:
        raise BracketError(f"Window ({lam0}, {lam1}) is empty")
    cache = cache or ProfileCache(params_base, n=n_r)
    i1 = group.first_degree

    reselected = False
    try:
        margin = _checked_bracket(cache, group, lam0, lam1, check_margin)
    except SolverError as e:
        if not reselect:
            raise
        logger.warning(f"Window [{lam0:.8g}, {lam1:.8g}] fails at k={params_base.k:g}: {e}")
        lam0, lam1 = reselect_window(cache, group, (lam0, lam1))
        reselected = True
        margin = _checked_bracket(cache, group, lam0, lam1, check_margin)

    def h(lam: float) -> float:
        return mode_entry(cache.get(lam), i1).h

    lam_star = float(brentq(h, lam0, lam1, xtol=cfg["xtol"], rtol=4 * np.finfo(float).eps))
    h_star = h(lam_star)
    if abs(h_star) > cfg["h_tol"]:
        scan = h_scan(cache, i1, np.linspace(lam0, lam1, 9))
        raise BracketError(f"Sign change of h_{i1} at lambda={lam_star:.10g} is a pole (h={h_star:.3e})", scan=scan)

    delta = cfg["delta_rel"] * (lam1 - lam0)
    below = dtn_report(cache.get(lam_star - delta), group)
    above = dtn_report(cache.get(lam_star + delta), group)
    profile = cache.get(lam_star)

    cert = BifurcationCertificate(
        k=params_base.k,
        d=params_base.d,
        p=params_base.p,
        group=group.name,
        lambda_star=lam_star,
        kernel_degree=i1,
        kernel_mult=group.first_mult,
        sigma1_below=below.sigma1,
        sigma1_above=above.sigma1,
        index_below=below.index,
        index_above=above.index,
        window=(lam0, lam1),
        h_at_star=h_star,
        delta=delta,
        n_r=cache.grid.n,
        du_at_1=profile.du_at_1,
        h_below={e.l: e.h for e in below.entries},
        h_above={e.l: e.h for e in above.entries},
        margin=margin,
        reselected=reselected,
    )
    logger.info(
        f"lambda*({params_base.k:g}) = {lam_star:.10g}, sigma1 {below.sigma1:.3e} -> {above.sigma1:.3e}, "
        f"index {below.index} -> {above.index}"
    )
    return cert


def parity_diagnostics(cert: BifurcationCertificate, tol: Optional[float] = None) -> List[str]:
    """Reasons the certificate fails the odd-crossing test (empty when it passes)."""
    tol = _settings()["degeneracy_tol"] if tol is None else tol
    problems = []
    if cert.index_drop % 2 == 0:
        problems.append(f"index changes by {cert.index_drop} (even)")
    for side, sigma in (("below", cert.sigma1_below), ("above", cert.sigma1_above)):
        if abs(sigma) <= tol:
            problems.append(f"sigma1 {side} lambda* is {sigma:.2e}")
    for side, table in (("below", cert.h_below), ("above", cert.h_above)):
        for degree, h in table.items():
            if degree != cert.kernel_degree and abs(h) <= tol:
                problems.append(f"mode {degree} degenerate {side} lambda* (h={h:.2e})")
    crossing = [
        degree
        for degree in cert.h_below
        if degree in cert.h_above and np.sign(cert.h_below[degree]) != np.sign(cert.h_above[degree])
    ]
    extra = [degree for degree in crossing if degree != cert.kernel_degree]
    if extra:
        problems.append(f"modes {extra} also cross zero across lambda*")
    return problems


def parity_certificate(cert: BifurcationCertificate, tol: Optional[float] = None, strict: bool = False) -> bool:
    """
    True iff the index changes by an odd number across lambda* at nondegenerate endpoints.

    Raises:
        DegenerateEndpointError: with strict=True, naming the first offending mode
    """
    problems = parity_diagnostics(cert, tol)
    if not problems:
        return True
    logger.warning(f"Parity certificate fails at k={cert.k:g}: {'; '.join(problems)}")
    if strict:
        tol = _settings()["degeneracy_tol"] if tol is None else tol
        degree = next(
            (l for table in (cert.h_below, cert.h_above) for l, h in table.items() if l != cert.kernel_degree and abs(h) <= tol),
            cert.kernel_degree,
        )
        raise DegenerateEndpointError("; ".join(problems), degree)
    return False
