"""Selection of the working window [lambda0, lambda1] from the limit problem."""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import brentq

from odp.core.config import solver_section
from odp.core.errors import BracketError, SolverError
from odp.core.store import LambdaStore
from odp.exterior.profile import ExteriorProfile, default_r_max, rescaled_guess, solve_exterior_radial
from odp.geometry.grid import make_exterior_grid
from odp.exterior.spectrum import (
    exterior_linearized_spectrum,
    limit_dtn_value,
    limit_mode_eigenvalue,
    limit_radial_eigenvalues,
)
from odp.geometry.params import ProblemParams
from odp.geometry.symmetry import SymmetryGroup, validate_group

logger = logging.getLogger(__name__)

POLE_OFFSETS = (1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 3e-2, 1e-1)


def window_settings(settings: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    cfg: Dict[str, Any] = {
        "lambda_min": 0.05,
        "lambda_max": 1000.0,
        "n_scan": 56,
        "lambda_start": 1.0,
        "padding": 1,
        "pole_offsets": list(POLE_OFFSETS),
    }
    cfg.update(solver_section("window"))
    if settings:
        cfg.update(settings)
    return cfg


class LimitProblem:
    """
    Limit problem solved along lambda with continuation.

    Solved profiles are kept in a bounded store; a new lambda starts Newton
    from the stored profile with the nearest lambda, transplanted in
    (r-1)/sqrt(lambda).
    """

    def __init__(
        self,
        params_base: ProblemParams,
        group: SymmetryGroup,
        n: Optional[int] = None,
        cache_size: Optional[int] = None,
    ):
        cfg = solver_section("grid")
        self.params_base = params_base
        self.group = validate_group(group)
        self.n = n or int(cfg.get("n_exterior", 4000))
        self._profiles: LambdaStore[ExteriorProfile] = LambdaStore(cache_size or int(cfg.get("cache_size", 64)))

    def profile(self, lam: float) -> ExteriorProfile:
        cached = self._profiles.get(lam)
        if cached is not None:
            return cached
        params = self.params_base.with_lambda(lam)
        guess = None
        nearest = self._profiles.nearest(lam)
        if nearest is not None:
            grid = make_exterior_grid(params.d, default_r_max(lam), self.n)
            guess = rescaled_guess(self._profiles.get(nearest), grid, lam)
        try:
            profile = solve_exterior_radial(params, n=self.n, guess=guess)
        except SolverError:
            if guess is None:
                raise
            logger.warning(f"Continuation guess failed at lambda={lam:g}, retrying from the bump")
            profile = solve_exterior_radial(params, n=self.n)
        self._profiles.put(lam, profile)
        return profile

    def h(self, lam: float, degree: Optional[int] = None) -> float:
        degree = self.group.first_degree if degree is None else degree
        return limit_dtn_value(self.profile(lam), degree)

    def margin(self, lam: float) -> float:
        """Smallest eigenvalue over the G-admissible Dirichlet modes (second one for l = 0)."""
        profile = self.profile(lam)
        values = [float(limit_radial_eigenvalues(profile, 2)[1])]
        values += [limit_mode_eigenvalue(profile, degree) for degree in self.group.degrees]
        return float(min(values))

    def row(self, lam: float) -> Dict[str, Any]:
        """One scan-table row."""
        profile = self.profile(lam)
        row: Dict[str, Any] = {"lambda": lam}
        try:
            spectrum = exterior_linearized_spectrum(profile)
            row["tau_tilde"] = spectrum.tau_tilde
            row["second_eig"] = spectrum.second_eig
        except SolverError as e:
            logger.warning(f"Limit spectrum failed at lambda={lam:g}: {e}")
            row["tau_tilde"] = np.nan
            try:
                row["second_eig"] = float(limit_radial_eigenvalues(profile, 2)[1])
            except SolverError:
                row["second_eig"] = np.nan
        eigs = [limit_mode_eigenvalue(profile, degree) for degree in self.group.degrees]
        row["margin"] = float(np.min([row["second_eig"]] + eigs))
        row["dirichlet_l1"] = limit_mode_eigenvalue(profile, 1)
        for degree in self.group.degrees:
            try:
                row[f"h_tilde_{degree}"] = limit_dtn_value(profile, degree)
            except SolverError:
                row[f"h_tilde_{degree}"] = np.nan
        return row


@dataclass
class Thresholds:
    """
    Loss of Dirichlet margin and the first - to + sign change of h above it.

    candidates holds the (lambda, h) samples the sign change was searched
    on: points just above Lambda0 followed by the scan nodes with positive
    margin. index is the candidate just below Lambda*.
    """

    Lambda0: Optional[float]
    Lambda_star: float
    candidates: pd.DataFrame
    index: int


def locate_thresholds(
    h: Callable[[float], float],
    margin: Callable[[float], float],
    lams: np.ndarray,
    h_values: np.ndarray,
    margins: np.ndarray,
    pole_offsets: Sequence[float] = POLE_OFFSETS,
    xtol: float = 1e-12,
    label: str = "h",
) -> Thresholds:
    """
    Lambda0 and Lambda* from a lambda scan of h and of the Dirichlet margin.

    Lambda0 is the Brent root of the margin across its last nonpositive scan
    node. When h has a pole there it rises from -infinity just above Lambda0,
    so h is sampled at Lambda0 (1 + delta) for each pole offset below the
    first scan node with positive margin before looking for the sign change.

    Args:
        h: lambda -> h value of the first admissible mode
        margin: lambda -> smallest admissible Dirichlet eigenvalue
        lams: Increasing scan lambdas
        h_values: h on the scan (NaN where unavailable)
        margins: Margin on the scan
        pole_offsets: Relative offsets above Lambda0
        xtol: Brent tolerance for Lambda*
        label: Name of h in messages

    Raises:
        BracketError: if the margin never turns positive or h has no - to + change above Lambda0
    """
    lams = np.asarray(lams, dtype=float)
    h_values = np.asarray(h_values, dtype=float)
    margins = np.asarray(margins, dtype=float)

    bad = np.nonzero(~(margins > 0))[0]
    Lambda0 = None
    first_good = 0
    if bad.size:
        last_bad = int(bad[-1])
        first_good = last_bad + 1
        if first_good >= len(lams):
            raise BracketError(
                f"Dirichlet margin is not positive anywhere up to lambda={lams[-1]:g}; extend the scan"
            )
        try:
            Lambda0 = float(brentq(margin, lams[last_bad], lams[first_good], xtol=1e-10 * lams[first_good]))
        except ValueError:
            logger.warning(f"Margin has no sign change on [{lams[last_bad]:g}, {lams[first_good]:g}], using the scan node")
            Lambda0 = float(lams[last_bad])

    samples: List[Tuple[float, float]] = []
    if Lambda0 is not None:
        for delta in sorted(pole_offsets):
            lam = Lambda0 * (1.0 + float(delta))
            if lam >= lams[first_good]:
                break
            try:
                samples.append((lam, float(h(lam))))
            except SolverError as e:
                logger.debug(f"{label} unavailable at Lambda0 (1 + {delta:g}): {e}")
    samples += [(float(lams[i]), float(h_values[i])) for i in range(first_good, len(lams)) if np.isfinite(h_values[i])]
    candidates = pd.DataFrame(samples, columns=["lambda", "h"])

    for i in range(len(samples) - 1):
        (a, ha), (b, hb) = samples[i], samples[i + 1]
        if ha < 0.0 < hb:
            Lambda_star = float(brentq(h, a, b, xtol=xtol))
            logger.debug(f"{label} changes sign on [{a:.8g}, {b:.8g}], root {Lambda_star:.10g}")
            return Thresholds(Lambda0, Lambda_star, candidates, i)
    above = f"Lambda0={Lambda0:.8g}" if Lambda0 is not None else "the scan start"
    raise BracketError(f"{label} has no sign change from - to + above {above}", scan=candidates)


def limit_thresholds(
    problem: LimitProblem,
    scan: pd.DataFrame,
    pole_offsets: Sequence[float] = POLE_OFFSETS,
) -> Thresholds:
    """Lambda0 (last loss of Dirichlet margin) and Lambda* (sign change of h~_{i_1} above it)."""
    column = f"h_tilde_{problem.group.first_degree}"
    try:
        return locate_thresholds(
            problem.h,
            problem.margin,
            scan["lambda"].to_numpy(),
            scan[column].to_numpy(),
            scan["margin"].to_numpy(),
            pole_offsets,
            label=f"h~_{problem.group.first_degree}",
        )
    except BracketError as e:
        raise BracketError(str(e), scan=scan) from e


def padded_bracket(candidates: pd.DataFrame, index: int, padding: int) -> Tuple[float, float]:
    """Widen [candidates[index], candidates[index + 1]] by up to padding points keeping the h signs."""
    lams = candidates["lambda"].to_numpy()
    h = candidates["h"].to_numpy()
    lo, hi = index, index + 1
    for _ in range(int(padding)):
        if lo - 1 >= 0 and h[lo - 1] < 0:
            lo -= 1
        if hi + 1 < len(lams) and h[hi + 1] > 0:
            hi += 1
    return float(lams[lo]), float(lams[hi])


def scan_lambda(problem: LimitProblem, lambdas: np.ndarray, start: float) -> pd.DataFrame:
    """
    Evaluate scan rows, marching outward from the lambda closest to start.

    A failed solve ends the march in that direction.
    """
    i0 = int(np.argmin(np.abs(np.log(lambdas / start))))
    rows: Dict[int, Dict[str, Any]] = {}
    for direction in (range(i0, len(lambdas)), range(i0 - 1, -1, -1)):
        for i in direction:
            try:
                rows[i] = problem.row(float(lambdas[i]))
            except SolverError as e:
                logger.warning(f"Scan stopped at lambda={lambdas[i]:g}: {e}")
                break
    if not rows:
        raise BracketError("No lambda of the scan could be solved", scan=pd.DataFrame())
    return pd.DataFrame([rows[i] for i in sorted(rows)])


@dataclass
class Window:
    """Working window with the limit thresholds and the scan behind it."""

    lambda0: float
    lambda1: float
    Lambda0: Optional[float]
    Lambda_star: float
    scan: pd.DataFrame

    def as_tuple(self) -> Tuple[float, float]:
        return (self.lambda0, self.lambda1)


def select_window(
    params_base: ProblemParams,
    group: SymmetryGroup,
    settings: Optional[Dict[str, Any]] = None,
    n: Optional[int] = None,
) -> Window:
    """
    Bracket the zero of h~_{i_1}(lambda) inside the region of positive Dirichlet margin.

    The endpoints are padded over the candidate points of the sign-change
    search, so lambda0 may sit between Lambda0 and the first scan node.

    Args:
        params_base: d and p (k and lambda are ignored)
        group: Symmetry group satisfying (G)
        settings: Overrides for the window section of solver.yaml
        n: Exterior grid cells

    Returns:
        Window with Lambda0 < lambda0 < Lambda* < lambda1

    Raises:
        BracketError: carrying the scan table when no sign change is found
    """
    cfg = window_settings(settings)
    problem = LimitProblem(params_base, group, n)
    lambdas = np.geomspace(cfg["lambda_min"], cfg["lambda_max"], int(cfg["n_scan"]))
    scan = scan_lambda(problem, lambdas, cfg["lambda_start"])
    found = limit_thresholds(problem, scan, cfg["pole_offsets"])
    lambda0, lambda1 = padded_bracket(found.candidates, found.index, int(cfg["padding"]))

    window = Window(lambda0, lambda1, found.Lambda0, found.Lambda_star, scan)
    logger.info(
        f"Window for d={params_base.d}, p={params_base.p}, {group.name}: "
        f"[{window.lambda0:.8g}, {window.lambda1:.8g}], Lambda*={found.Lambda_star:.8g}, Lambda0={found.Lambda0}"
    )
    return window


def scan_columns(group: SymmetryGroup) -> List[str]:
    return ["lambda", "tau_tilde", "second_eig", "margin", "dirichlet_l1"] + [f"h_tilde_{d}" for d in group.degrees]
