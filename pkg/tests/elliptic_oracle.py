"""Independent force oracle for coaxial circular loops.

Derivation path deliberately disjoint from the package kernel: the mutual
inductance of two coaxial loops has a closed form in complete elliptic
integrals,

    M(a, b, c) = mu0 * sqrt(a b) * [ (2/k - k) K(k) - (2/k) E(k) ],
    k^2 = 4 a b / ((a + b)^2 + c^2),

with loop radii a, b and axial center separation c.  The axial force on the
second loop is the coenergy gradient F = I1 * I2 * dM/dc, evaluated here by
Richardson-extrapolated central differences.  Positive F pushes the loops
apart; parallel currents give F < 0 (attraction).

scipy's ellipk/ellipe take the parameter m = k^2.
"""

from __future__ import annotations

import math

from scipy.special import ellipe, ellipk

MU0 = 4e-7 * math.pi


def mutual_inductance(a: float, b: float, c: float) -> float:
    """Mutual inductance (henries) of coaxial loops, radii a and b, offset c."""
    if a <= 0 or b <= 0:
        raise ValueError("loop radii must be positive")
    m = 4.0 * a * b / ((a + b) ** 2 + c**2)
    k = math.sqrt(m)
    return MU0 * math.sqrt(a * b) * ((2.0 / k - k) * ellipk(m) - (2.0 / k) * ellipe(m))


def coaxial_loop_force(
    a: float, b: float, c: float, i1: float = 1.0, i2: float = 1.0
) -> float:
    """Axial force (newtons) on loop 2; positive = pushed away from loop 1."""
    if c <= 0:
        raise ValueError("need a positive axial separation")
    h = c * 1e-4
    # five-point central difference, O(h^4)
    dm = (
        mutual_inductance(a, b, c - 2 * h)
        - 8.0 * mutual_inductance(a, b, c - h)
        + 8.0 * mutual_inductance(a, b, c + h)
        - mutual_inductance(a, b, c + 2 * h)
    ) / (12.0 * h)
    return i1 * i2 * dm


def dipole_force(a: float, b: float, c: float, i1: float = 1.0, i2: float = 1.0) -> float:
    """Far-field check: two coaxial moments m = I*pi*r^2 attract as 1/c^4."""
    m1 = i1 * math.pi * a**2
    m2 = i2 * math.pi * b**2
    return -3.0 * MU0 * m1 * m2 / (2.0 * math.pi * c**4)
