"""Symmetry groups acting on S^{d-1} and their admissible harmonic modes."""

from dataclasses import dataclass
from typing import List, Optional, Tuple

from odp.core.config import solver_section
from odp.core.errors import ConfigurationError
from odp.geometry.harmonics import sphere_eigen

DEFAULT_MAX_DEGREE = 16


def configured_max_degree() -> int:
    """Highest harmonic degree kept in DtN spectra (dtn.max_degree)."""
    degree = int(solver_section("dtn").get("max_degree", DEFAULT_MAX_DEGREE))
    if degree < 2:
        raise ConfigurationError(f"dtn.max_degree must be >= 2, got {degree}")
    return degree


@dataclass(frozen=True)
class SymmetryGroup:
    """Admissible modes (degree i_l, multiplicity m_l) of G-invariant functions."""

    allowed_modes: Tuple[Tuple[int, int], ...]
    name: str
    d: int = 2

    @property
    def degrees(self) -> List[int]:
        return [degree for degree, _ in self.allowed_modes]

    @property
    def first_degree(self) -> int:
        return self.allowed_modes[0][0]

    @property
    def first_mult(self) -> int:
        return self.allowed_modes[0][1]

    def multiplicity(self, degree: int) -> int:
        for i, m in self.allowed_modes:
            if i == degree:
                return m
        raise ConfigurationError(f"Degree {degree} is not admissible for group {self.name}")

    def truncate(self, max_degree: int) -> "SymmetryGroup":
        modes = tuple((i, m) for i, m in self.allowed_modes if i <= max_degree)
        return validate_group(SymmetryGroup(modes, self.name, self.d))

    def mu(self, degree: int) -> float:
        return sphere_eigen(degree, self.d)[0]


def validate_group(group: SymmetryGroup) -> SymmetryGroup:
    """
    Check assumption (G): i_1 >= 2, m_1 odd, degrees strictly increasing.

    Returns:
        The group unchanged

    Raises:
        ConfigurationError: naming the violated rule
    """
    if not group.allowed_modes:
        raise ConfigurationError(f"Group {group.name} has no admissible modes")
    degrees = group.degrees
    if any(b <= a for a, b in zip(degrees, degrees[1:])):
        raise ConfigurationError(f"Group {group.name}: degrees must be strictly increasing, got {degrees}")
    if any(m <= 0 for _, m in group.allowed_modes):
        raise ConfigurationError(f"Group {group.name}: multiplicities must be positive")
    if group.first_degree < 2:
        raise ConfigurationError(f"Group {group.name} violates (G): i_1={group.first_degree} < 2")
    if group.first_mult % 2 == 0:
        raise ConfigurationError(f"Group {group.name} violates (G): m_1={group.first_mult} is even")
    return group


def dihedral_group(n: int, d: int = 2, max_degree: Optional[int] = None) -> SymmetryGroup:
    """
    Dihedral group D_n acting on S^1: admissible modes cos(j n theta), j >= 1.

    Args:
        n: Order (>= 2)
        d: Dimension (must be 2)
        max_degree: Truncation degree (default dtn.max_degree)

    Returns:
        SymmetryGroup with modes (n,1), (2n,1), ...
    """
    if d != 2:
        raise ConfigurationError(f"Dihedral preset needs d=2, got d={d}")
    if n < 2:
        raise ConfigurationError(f"Dihedral order n={n} violates (G): i_1=n must be >= 2")
    if max_degree is None:
        max_degree = configured_max_degree()
    modes = tuple((j * n, 1) for j in range(1, max_degree // n + 1))
    return validate_group(SymmetryGroup(modes, f"dihedral:{n}", d))


def group_from_spec(spec: str, d: int = 2, max_degree: Optional[int] = None) -> SymmetryGroup:
    """
    Parse "dihedral:n" or "modes:i/m,i/m,..." into a validated group.

    Dihedral modes stop at max_degree (default dtn.max_degree); explicit mode
    lists are kept as given.
    """
    kind, _, rest = spec.partition(":")
    try:
        if kind == "dihedral":
            return dihedral_group(int(rest), d, max_degree)
        if kind == "modes":
            pairs = []
            for item in rest.split(","):
                degree, _, mult = item.partition("/")
                pairs.append((int(degree), int(mult) if mult else 1))
            return validate_group(SymmetryGroup(tuple(pairs), spec, d))
    except ValueError as e:
        raise ConfigurationError(f"Cannot parse group spec {spec!r}: {e}") from e
    raise ConfigurationError(f"Unknown group spec {spec!r} (use dihedral:n or modes:i/m,...)")
