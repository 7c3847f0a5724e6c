"""Complete elliptic integrals and their closed-form derivatives.

Evaluation goes through the Carlson symmetric forms R_F, R_D, R_J
(scipy.special), which converge for every modulus in [0, 1) at full
double precision:

    K(k)      = R_F(0, 1-k^2, 1)
    E(k)      = R_F(0, 1-k^2, 1) - (k^2/3) R_D(0, 1-k^2, 1)
    Pi(n, k)  = R_F(0, 1-k^2, 1) + (n/3) R_J(0, 1-k^2, 1, 1-n)

Convention warning: everything here is parameterized by the elliptic
MODULUS k, not by the parameter m = k^2 that Abramowitz & Stegun (and
Mathematica, and scipy.special.ellipk) use.  Keep the two straight when
cross-checking values.
"""

from __future__ import annotations

import numpy as np
from scipy.special import elliprd, elliprf, elliprj

from .errors import DomainError, SingularConfigurationError

__all__ = ["ellip_K", "ellip_E", "ellip_Pi", "ellip_derivatives"]


def ellip_K(k: float) -> float:
    """Complete elliptic integral of the first kind.

    K(k) = integral of dtheta / sqrt(1 - k^2 sin^2 theta) over [0, pi/2].

    Parameters
    ----------
    k : modulus, 0 <= k < 1.  K diverges logarithmically as k -> 1,
        so k = 1 is rejected.
    """
    k = float(k)
    if not 0.0 <= k < 1.0:
        raise DomainError(f"ellip_K requires 0 <= k < 1, got k={k}")
    return float(elliprf(0.0, 1.0 - k * k, 1.0))


def ellip_E(k: float) -> float:
    """Complete elliptic integral of the second kind.

    E(k) = integral of sqrt(1 - k^2 sin^2 theta) dtheta over [0, pi/2].
    Defined on the closed interval: E(1) = 1.
    """
    k = float(k)
    if not 0.0 <= k <= 1.0:
        raise DomainError(f"ellip_E requires 0 <= k <= 1, got k={k}")
    if k == 1.0:
        return 1.0  # Carlson form is 0*inf here; the limit is exact
    ksq = k * k
    return float(elliprf(0.0, 1.0 - ksq, 1.0) - (ksq / 3.0) * elliprd(0.0, 1.0 - ksq, 1.0))


def ellip_Pi(n: float, k: float) -> float:
    """Complete elliptic integral of the third kind.

    Pi(n, k) = integral of dtheta / ((1 - n sin^2 theta) sqrt(1 - k^2 sin^2 theta)).

    Parameters
    ----------
    n : characteristic, 0 <= n < 1
    k : modulus, 0 <= k < 1
    """
    n = float(n)
    k = float(k)
    if not 0.0 <= k < 1.0:
        raise DomainError(f"ellip_Pi requires 0 <= k < 1, got k={k}")
    if not 0.0 <= n < 1.0:
        raise DomainError(f"ellip_Pi requires 0 <= n < 1, got n={n}")
    ksq = k * k
    if n == 0.0:
        return float(elliprf(0.0, 1.0 - ksq, 1.0))  # Pi(0,k) = K(k) identically
    return float(elliprf(0.0, 1.0 - ksq, 1.0) + (n / 3.0) * elliprj(0.0, 1.0 - ksq, 1.0, 1.0 - n))


def ellip_derivatives(
    n: float, k: float, singular_tol: float = 1e-12
) -> tuple[float, float, float, float]:
    """Closed-form derivatives (dK/dk, dE/dk, dPi/dn, dPi/dk).

        dK/dk   = E / (k (1-k^2)) - K / k
        dE/dk   = (E - K) / k
        dPi/dn  = -E / (2(1-n)(k^2-n)) - K / (2n(1-n))
                  + (k^2 - n^2) Pi / (2n(k^2-n)(1-n))
        dPi/dk  = k E / ((k^2-n)(1-k^2)) - k Pi / (k^2-n)

    The Pi derivatives divide by (k^2 - n); configurations with
    |n - k^2| <= singular_tol * max(n, k^2) are rejected.  Callers that
    need that regime must fall back to numerical differentiation of
    ellip_Pi.

    Parameters
    ----------
    n : characteristic, 0 < n < 1
    k : modulus, 0 < k < 1 (open interval: the formulas divide by k and 1-k^2)
    singular_tol : relative half-width of the rejected band around n = k^2
    """
    n = float(n)
    k = float(k)
    if not 0.0 < k < 1.0:
        raise DomainError(f"ellip_derivatives requires 0 < k < 1, got k={k}")
    if not 0.0 < n < 1.0:
        raise DomainError(f"ellip_derivatives requires 0 < n < 1, got n={n}")
    ksq = k * k
    if abs(n - ksq) <= singular_tol * max(n, ksq):
        raise SingularConfigurationError(
            f"Pi derivatives are singular at n = k^2 (n={n}, k^2={ksq})"
        )
    K = ellip_K(k)
    E = ellip_E(k)
    Pi = ellip_Pi(n, k)
    dK = E / (k * (1.0 - ksq)) - K / k
    dE = (E - K) / k
    dPi_dn = (
        -E / (2.0 * (1.0 - n) * (ksq - n))
        - K / (2.0 * n * (1.0 - n))
        + (ksq - n * n) * Pi / (2.0 * n * (ksq - n) * (1.0 - n))
    )
    dPi_dk = k * E / ((ksq - n) * (1.0 - ksq)) - k * Pi / (ksq - n)
    return dK, dE, dPi_dn, dPi_dk
