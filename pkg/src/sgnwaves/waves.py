"""Exact periodic traveling-wave (cnoidal) solutions of the SGN equations.

A wave is parameterized by the three roots h0 < h1 < h2 of the cubic

    F3(h) = 3 - (6 i / m^2) h + 6 eps h^2 - (3 g / m^2) h^3
          = (3 / I3) (h - h0)(h - h1)(h2 - h),

where (h')^2 = F3(h) along the profile.  The depth oscillates between
h1 and h2; h0 stays below the trough but controls the shape.  All
derived constants follow from the roots by Vieta's formulas:

    I1 = h0+h1+h2,  I2 = h0 h1 + h1 h2 + h0 h2,  I3 = h0 h1 h2,
    m = sign_m * sqrt(g I3),  i = g I2 / 2,  eps = I1 / (2 I3).

The profile is h(xi) = h1 + (h2-h1) cn^2(alpha xi; k) with
alpha^2 = (3/4)(h2-h0)/I3 and k^2 = (h2-h1)/(h2-h0); the crest sits at
xi = 0.  Horizontal velocity follows from the mass constraint
h (u - D) = m, so u = m/h + D.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .elliptic import ellip_K, ellip_E, ellip_Pi
from .errors import InvalidRootsError, QuadratureError

__all__ = [
    "RootTriple",
    "WaveConstants",
    "CnoidalWave",
    "constants_from_roots",
    "oscillation_rhs",
    "jacobi_cn",
    "build_wave",
    "profile",
    "velocity_from_depth",
    "wavelength",
    "average",
    "averaged_h",
    "averaged_hinv",
]

# Triples closer to the soliton (h1->h0) or zero-amplitude (h1->h2) limit
# than this are rejected: the periodic construction degenerates there.
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class RootTriple:
    """Roots of the oscillation cubic, 0 < h0 < h1 < h2 (meters)."""

    h0: float
    h1: float
    h2: float

    def __post_init__(self):
        h0, h1, h2 = self.h0, self.h1, self.h2
        if not (math.isfinite(h0) and math.isfinite(h1) and math.isfinite(h2)):
            raise InvalidRootsError(f"roots must be finite, got ({h0}, {h1}, {h2})")
        if not 0.0 < h0 < h1 < h2:
            raise InvalidRootsError(
                f"roots must satisfy 0 < h0 < h1 < h2, got ({h0}, {h1}, {h2})"
            )
        if h1 - h0 < DEGENERACY_TOL * h2 or h2 - h1 < DEGENERACY_TOL * h2:
            raise InvalidRootsError(
                f"degenerate root triple ({h0}, {h1}, {h2}): root gaps below "
                f"{DEGENERACY_TOL} * h2"
            )

    @property
    def modulus(self) -> float:
        """Elliptic modulus k, k^2 = (h2-h1)/(h2-h0)."""
        return math.sqrt((self.h2 - self.h1) / (self.h2 - self.h0))

    @property
    def characteristic(self) -> float:
        """Elliptic characteristic n = (h2-h1)/h2."""
        return (self.h2 - self.h1) / self.h2


@dataclass(frozen=True)
class WaveConstants:
    """Constants of the traveling-wave ODE derived from a root triple."""

    g: float
    m: float        # mass flux in the moving frame, h(u-D); signed
    i: float        # momentum constant, g I2 / 2
    epsilon: float  # Bernoulli-type constant, I1 / (2 I3)
    I1: float
    I2: float
    I3: float
    sign_m: int


@dataclass(frozen=True)
class CnoidalWave:
    """A fully constructed periodic traveling wave."""

    roots: RootTriple
    constants: WaveConstants
    alpha: float  # spatial rate (1/m) in cn(alpha xi; k)
    k: float      # elliptic modulus
    L: float      # wavelength (m)
    D: float      # phase speed (m/s)


def constants_from_roots(roots: RootTriple, g: float, sign_m: int) -> WaveConstants:
    """Derive (m, i, eps, I1, I2, I3) from the roots via Vieta's formulas."""
    if g <= 0.0:
        raise InvalidRootsError(f"gravity must be positive, got g={g}")
    if sign_m not in (-1, 1):
        raise InvalidRootsError(f"sign_m must be -1 or +1, got {sign_m}")
    h0, h1, h2 = roots.h0, roots.h1, roots.h2
    I1 = h0 + h1 + h2
    I2 = h0 * h1 + h1 * h2 + h0 * h2
    I3 = h0 * h1 * h2
    m = sign_m * math.sqrt(g * I3)
    return WaveConstants(
        g=g, m=m, i=g * I2 / 2.0, epsilon=I1 / (2.0 * I3),
        I1=I1, I2=I2, I3=I3, sign_m=sign_m,
    )


def oscillation_rhs(h, constants: WaveConstants):
    """F3(h), the square of dh/dxi along the wave.

    Evaluated in the factored form (3/I3)(I3 - I2 h + I1 h^2 - h^3),
    which equals 3 - (6i/m^2) h + 6 eps h^2 - (3g/m^2) h^3 identically
    (m^2 = g I3 makes the coefficient pairs equal term by term).
    """
    c = constants
    h = np.asarray(h, dtype=float)
    out = (3.0 / c.I3) * (c.I3 - c.I2 * h + c.I1 * h * h - h ** 3)
    return float(out) if out.ndim == 0 else out


def jacobi_cn(u, k: float):
    """Jacobi elliptic cn(u; k) by the AGM / descending Landen transformation.

    The AGM scale factors a_i, c_i depend only on k; the amplitude phi is
    recovered by the standard backward recurrence
    phi_{i-1} = (phi_i + arcsin((c_i/a_i) sin phi_i)) / 2, and cn = cos(phi_0).

    In floating point c_i stalls around half an ulp of a_i, so the descent
    stops at c_i <= 2.5e-16 a_i (with a hard cap) rather than at zero.
    """
    u = np.asarray(u, dtype=float)
    k = float(k)
    if not 0.0 <= k < 1.0:
        raise InvalidRootsError(f"jacobi_cn requires 0 <= k < 1, got k={k}")
    if k < 1e-12:
        out = np.cos(u)
        return float(out) if out.ndim == 0 else out
    a_seq = [1.0]
    c_seq = [k]
    a = 1.0
    b = math.sqrt(1.0 - k * k)
    for _ in range(64):
        a_next = 0.5 * (a + b)
        c_next = 0.5 * (a - b)
        b = math.sqrt(a * b)
        a = a_next
        a_seq.append(a)
        c_seq.append(c_next)
        if abs(c_next) <= 2.5e-16 * a:
            break
    N = len(a_seq) - 1
    phi = (2.0 ** N) * a_seq[N] * u
    for i in range(N, 0, -1):
        s = np.clip(c_seq[i] / a_seq[i] * np.sin(phi), -1.0, 1.0)
        phi = 0.5 * (phi + np.arcsin(s))
    out = np.cos(phi)
    return float(out) if out.ndim == 0 else out


def wavelength(roots: RootTriple) -> float:
    """Wavelength L = 4 sqrt(I3/3) K(k) / sqrt(h2-h0).

    Equals 2 * integral of dh/sqrt(F3(h)) over [h1, h2].
    """
    h0, h1, h2 = roots.h0, roots.h1, roots.h2
    I3 = h0 * h1 * h2
    return 4.0 * math.sqrt(I3 / 3.0) * ellip_K(roots.modulus) / math.sqrt(h2 - h0)


def averaged_h(roots: RootTriple) -> float:
    """Period average of h: h0 + (h2-h0) E(k)/K(k)."""
    k = roots.modulus
    return roots.h0 + (roots.h2 - roots.h0) * ellip_E(k) / ellip_K(k)


def averaged_hinv(roots: RootTriple) -> float:
    """Period average of 1/h: Pi(n, k) / (h2 K(k))."""
    k = roots.modulus
    return ellip_Pi(roots.characteristic, k) / (roots.h2 * ellip_K(k))


def build_wave(
    roots: RootTriple, g: float, sign_m: int, D: float | None = None
) -> CnoidalWave:
    """Assemble a CnoidalWave; D defaults to -m/h_bar (zero mean velocity)."""
    constants = constants_from_roots(roots, g, sign_m)
    if D is None:
        D = -constants.m / averaged_h(roots)
    alpha = math.sqrt(0.75 * (roots.h2 - roots.h0) / constants.I3)
    return CnoidalWave(
        roots=roots, constants=constants, alpha=alpha,
        k=roots.modulus, L=wavelength(roots), D=float(D),
    )


def profile(wave: CnoidalWave, xi):
    """Depth h(xi) = h1 + (h2-h1) cn^2(alpha xi; k); crest at xi = 0."""
    r = wave.roots
    cn = jacobi_cn(np.asarray(xi, dtype=float) * wave.alpha, wave.k)
    out = r.h1 + (r.h2 - r.h1) * np.square(cn)
    return float(out) if np.ndim(out) == 0 else out


def velocity_from_depth(h, constants: WaveConstants, D: float):
    """u = m/h + D from the mass constraint h(u - D) = m."""
    out = constants.m / np.asarray(h, dtype=float) + D
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=16)
def _gauss_nodes(n: int):
    # nodes/weights for [0, pi/2]
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.25 * np.pi * (x + 1.0), 0.25 * np.pi * w


def average(f: Callable, roots: RootTriple, rtol: float = 1e-12) -> float:
    """Period average of f(h): (integral f/sqrt(P3)) / (integral 1/sqrt(P3)).

    P3(h) = (h-h0)(h-h1)(h2-h) has inverse-square-root singularities at
    both endpoints of [h1, h2].  The substitution h = h1 + (h2-h1) sin^2(phi)
    absorbs them: both integrals become smooth integrals over [0, pi/2]
    with weight 1/sqrt(h(phi) - h0), evaluated by Gauss-Legendre quadrature
    doubled from 64 nodes until the average changes by less than rtol
    relative to the mean magnitude of f (not of the average itself, which
    can be exactly zero by cancellation, e.g. the momentum of a wave in
    its zero-mean frame).

    f must accept a numpy array of depths.
    """
    h0, h1, h2 = roots.h0, roots.h1, roots.h2
    prev = None
    n = 64
    while n <= 4096:
        phi, w = _gauss_nodes(n)
        h = h1 + (h2 - h1) * np.sin(phi) ** 2
        weight = w / np.sqrt(h - h0)
        fv = np.asarray(f(h), dtype=float)
        wsum = float(np.sum(weight))
        val = float(np.dot(fv, weight) / wsum)
        scale = float(np.dot(np.abs(fv), weight) / wsum)
        if prev is not None and abs(val - prev) <= rtol * max(1e-300, scale):
            return val
        prev = val
        n *= 2
    raise QuadratureError(
        f"period average did not converge to rtol={rtol} within 4096 nodes"
    )
