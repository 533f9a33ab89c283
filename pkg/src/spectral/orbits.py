"""
Symbolic eigenvalue classes of the torus walk on Z_p^d.

The Fourier character k in Z_p^d has eigenvalue (1/d) sum_i cos(2 pi k_i / p),
which is invariant under permuting and negating coordinates. The orbits of
index vectors under that signed-permutation group are the candidate classes.
"""

import itertools
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from config.settings import ToleranceConfig
from src.models.spectrum import EigenvalueClasses, Spectrum
from src.utils.errors import InvariantViolation
from src.utils.logger import get_logger
from src.utils.validators import is_prime

logger = get_logger(__name__)

OrbitKey = Tuple[int, ...]


@dataclass(frozen=True)
class Orbit:
    """One signed-permutation orbit of Z_p^d."""
    key: OrbitKey
    members: Tuple[OrbitKey, ...]
    eigenvalue: float

    @property
    def size(self) -> int:
        return len(self.members)


def orbit_key(k: OrbitKey, p: int) -> OrbitKey:
    """Canonical orbit representative: sorted folded coordinates min(k_i, p - k_i)."""
    return tuple(sorted(min(ki % p, (-ki) % p) for ki in k))


def character_eigenvalue(k: OrbitKey, p: int) -> float:
    return float(np.mean([math.cos(2 * math.pi * ki / p) for ki in k]))


def enumerate_orbits(p: int, d: int) -> List[Orbit]:
    """
    All signed-permutation orbits of Z_p^d, sorted by descending eigenvalue.

    Args:
        p: Side length
        d: Dimension

    Returns:
        Orbits with their members and the shared eigenvalue
    """
    members: Dict[OrbitKey, List[OrbitKey]] = {}
    for k in itertools.product(range(p), repeat=d):
        members.setdefault(orbit_key(k, p), []).append(k)
    orbits = [
        Orbit(key=key, members=tuple(group), eigenvalue=character_eigenvalue(key, p))
        for key, group in members.items()
    ]
    orbits.sort(key=lambda orbit: (-orbit.eigenvalue, orbit.key))
    return orbits


def check_orbit_preconditions(p: int, d: int) -> None:
    """
    Reject non-prime p and warn when p <= 4d.

    Raises:
        InvariantViolation: If p is not prime
    """
    if not is_prime(p):
        raise InvariantViolation("prime-modulus", f"symbolic orbit classes require prime p, got {p}")
    if p <= 4 * d:
        logger.warning(
            f"p={p} does not exceed 4d={4 * d}; orbit classes are still checked but carry no guarantee"
        )


def coincident_orbits(orbits: List[Orbit], tol: float) -> List[Tuple[Orbit, Orbit]]:
    """Pairs of distinct orbits whose eigenvalues agree within tol."""
    pairs = []
    for first, second in zip(orbits, orbits[1:]):
        if abs(first.eigenvalue - second.eigenvalue) <= tol:
            pairs.append((first, second))
    return pairs


def torus_orbit_classes(
    spectrum: Spectrum,
    p: int,
    d: int,
    tol: Optional[float] = None,
    tolerances: Optional[ToleranceConfig] = None
) -> EigenvalueClasses:
    """
    Eigenvalue classes of torus(p, d) built from signed-permutation orbits.

    Orbits are laid over the descending numerical spectrum in order of
    descending eigenvalue; each block must reproduce its orbit eigenvalue.
    Orbits sharing an eigenvalue cannot be separated in the numerical
    eigenbasis, so they are merged into one class and a warning is logged.

    Args:
        spectrum: Numerical spectrum of torus(p, d)
        p: Side length (prime)
        d: Dimension
        tol: Agreement tolerance between orbit and numerical eigenvalues
        tolerances: Numeric tolerances (defaults used when omitted)

    Returns:
        EigenvalueClasses flagged as symbolic

    Raises:
        InvariantViolation: If p is not prime or the spectrum disagrees with the orbits
    """
    tolerances = tolerances or ToleranceConfig()
    check_orbit_preconditions(p, d)
    if spectrum.n_states != p ** d:
        raise InvariantViolation("orbit-dimension", f"spectrum has {spectrum.n_states} states, expected {p ** d}")
    if tol is None:
        tol = tolerances.class_relative * 2.0

    orbits = enumerate_orbits(p, d)
    for first, second in coincident_orbits(orbits, tol):
        logger.warning(
            f"Orbits {first.key} and {second.key} of Z_{p}^{d} share eigenvalue {first.eigenvalue:.12f}; merged"
        )

    classes: List[Tuple[int, ...]] = []
    class_values: List[float] = []
    start = 0
    for orbit in orbits:
        block = tuple(range(start, start + orbit.size))
        numerical = spectrum.eigenvalues[list(block)]
        deviation = float(np.abs(numerical - orbit.eigenvalue).max())
        if deviation > tol:
            raise InvariantViolation(
                "orbit-eigenvalue", f"orbit {orbit.key} expects {orbit.eigenvalue:.12f}, spectrum deviates by {deviation:.3e}"
            )
        if class_values and abs(class_values[-1] - orbit.eigenvalue) <= tol:
            classes[-1] = classes[-1] + block
        else:
            classes.append(block)
            class_values.append(orbit.eigenvalue)
        start += orbit.size

    return EigenvalueClasses(classes=classes, class_values=class_values, tolerance=tol, symbolic=True)
