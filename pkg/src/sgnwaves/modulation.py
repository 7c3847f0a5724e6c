"""Whitham modulation system of the SGN cnoidal waves.

Four slowly varying parameters U = (D, h0, h1, h2) obey the averaged
conservation laws (wave number, mass, momentum, energy):

    (1/L)_T + (D/L)_X = 0
    (h_bar)_T + (m + h_bar D)_X = 0
    (m + h_bar D)_T + (h_bar D^2 + g I2/2 + 2 m D)_X = 0
    (E)_T + (Q)_X = 0,
        E = h_bar D^2/2 + g I1 h_bar/2 - g I2/2 + g I3 hinv_bar + m D
        Q = h_bar D^3/2 + g I1 h_bar D/2 + g I3 hinv_bar D
            + 3 m D^2/2 + m g I1/2

with m = sign_m sqrt(g I3) per wave.  Expanding through the closed-form
differentials of h_bar, hinv_bar and L gives the quasilinear form
A U_T + B U_X = 0, whose characteristic roots det(B - lam A) = 0 decide
hyperbolicity, i.e. modulational stability of the wave train.

The quasilinear matrices are stored exactly as the expanded equations
give them; the first row is the L-form (L_T - L D_X + D L_X = 0), which
differs from the conservative 1/L-form by the row factor -1/L^2.  Row
scaling leaves the eigenvalues untouched; the Jacobian tests account
for the factor explicitly.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .elliptic import ellip_K, ellip_E, ellip_Pi
from .errors import DegeneratePencilError
from .waves import RootTriple, averaged_h, averaged_hinv, constants_from_roots, wavelength

__all__ = [
    "ModulationState",
    "DifferentialCoefficients",
    "QuasilinearSystem",
    "EigenClassification",
    "ScanPoint",
    "ScanResult",
    "conserved_vector",
    "differential_coefficients",
    "assemble_AB",
    "characteristic_eigenvalues",
    "resultant_quartic",
    "scan_region",
    "write_scan_csv",
]

REAL_TOL = 1e-9       # |Im| <= REAL_TOL * max(1, |Re|) counts as real
DISTINCT_TOL = 1e-8   # min root gap must exceed DISTINCT_TOL * max|root|
PENCIL_TOL = 1e-12    # |c4| <= PENCIL_TOL * max|c| means a degenerate pencil


@dataclass(frozen=True)
class ModulationState:
    """One point of the modulation system: phase speed plus root triple."""

    D: float
    h0: float
    h1: float
    h2: float
    g: float = 9.81
    sign_m: int = -1

    def __post_init__(self):
        self.roots  # triggers root validation

    @property
    def roots(self) -> RootTriple:
        return RootTriple(self.h0, self.h1, self.h2)

    @property
    def U(self) -> float:
        """Depth-averaged mean velocity m/h_bar + D."""
        c = constants_from_roots(self.roots, self.g, self.sign_m)
        return c.m / averaged_h(self.roots) + self.D


def state_at_rest(
    roots: RootTriple, g: float, sign_m: int = -1
) -> ModulationState:
    """State with D = -m/h_bar, the Galilean frame where U = 0."""
    c = constants_from_roots(roots, g, sign_m)
    D = -c.m / averaged_h(roots)
    return ModulationState(D=D, h0=roots.h0, h1=roots.h1, h2=roots.h2, g=g, sign_m=sign_m)


@dataclass(frozen=True)
class DifferentialCoefficients:
    """Partials of (h_bar, hinv_bar, L) with respect to (h0, h1, h2)."""

    Phi: tuple[float, float, float]
    Psi: tuple[float, float, float]
    Lambda: tuple[float, float, float]


@dataclass(frozen=True)
class QuasilinearSystem:
    """Matrices of A U_T + B U_X = 0 and the pencil polynomial det(B - lam A)."""

    A: np.ndarray
    B: np.ndarray
    charpoly: np.ndarray  # c0..c4, ascending powers


@dataclass(frozen=True)
class EigenClassification:
    roots: np.ndarray  # 4 complex numbers, sorted by real part
    all_real: bool
    distinct: bool
    n_positive: int
    n_negative: int
    resultant: float


def conserved_vector(state: ModulationState):
    """Densities and fluxes of the four averaged conservation laws.

    Order: wave conservation (1/L), mass, momentum, energy.
    """
    r = state.roots
    c = constants_from_roots(r, state.g, state.sign_m)
    D = state.D
    g = state.g
    hb = averaged_h(r)
    hi = averaged_hinv(r)
    L = wavelength(r)
    m = c.m
    densities = np.array([
        1.0 / L,
        hb,
        m + hb * D,
        0.5 * hb * D * D + 0.5 * g * c.I1 * hb - 0.5 * g * c.I2 + g * c.I3 * hi + m * D,
    ])
    fluxes = np.array([
        D / L,
        m + hb * D,
        hb * D * D + 0.5 * g * c.I2 + 2.0 * m * D,
        0.5 * hb * D ** 3 + 0.5 * g * c.I1 * hb * D + g * c.I3 * hi * D
        + 1.5 * m * D * D + 0.5 * m * g * c.I1,
    ])
    return densities, fluxes


def differential_coefficients(roots: RootTriple) -> DifferentialCoefficients:
    """Closed-form gradients Phi^i, Psi^i, Lambda^i of h_bar, hinv_bar, L.

    Built from the ratios E/K and Pi/K; each matches central finite
    differences of the corresponding closed-form average.
    """
    h0, h1, h2 = roots.h0, roots.h1, roots.h2
    k = roots.modulus
    n = roots.characteristic
    K = ellip_K(k)
    E = ellip_E(k)
    Pi = ellip_Pi(n, k)
    EK = E / K
    PK = Pi / K
    d20 = h2 - h0
    d21 = h2 - h1
    d10 = h1 - h0
    Phi = (
        0.5 - d20 / (2 * d10) * EK ** 2,
        d20 / (2 * d21) - d20 / d21 * EK + d20 ** 2 / (2 * d21 * d10) * EK ** 2,
        -d10 / (2 * d21) + d20 / d21 * EK - d20 / (2 * d21) * EK ** 2,
    )
    Psi = (
        EK / (2 * h0 * d10) - PK / (2 * h0 * h2) - PK * EK / (2 * h2 * d10),
        1 / (2 * h1 * d21) - d20 / (2 * h1 * d21 * d10) * EK
        - PK / (2 * h1 * d21) + d20 / (2 * h2 * d21 * d10) * PK * EK,
        -1 / (2 * h2 * d21) + EK / (2 * h2 * d21)
        + h1 * PK / (2 * h2 ** 2 * d21) - PK * EK / (2 * h2 * d21),
    )
    I3 = h0 * h1 * h2
    sI3 = np.sqrt(I3)
    s20 = np.sqrt(d20)
    pre = 2.0 / np.sqrt(3.0)
    Lambda = (
        pre * (sI3 / (d10 * s20) * E + h1 * h2 / (s20 * sI3) * K),
        pre * (-s20 * sI3 / (d21 * d10) * E + h0 * h2 ** 2 / (d21 * s20 * sI3) * K),
        pre * (sI3 / (d21 * s20) * E - h0 * h1 ** 2 / (d21 * s20 * sI3) * K),
    )
    return DifferentialCoefficients(Phi=Phi, Psi=Psi, Lambda=Lambda)


# Column subsets for det(B - lam A): picking S columns from -A and the rest
# from B contributes det * lam^|S|; summing over all 16 subsets gives the
# exact polynomial coefficients.
_SUBSETS = [np.array(s, dtype=bool) for s in itertools.product((False, True), repeat=4)]
_SUBSET_SIZES = np.array([s.sum() for s in _SUBSETS])


def _pencil_charpoly(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    stack = np.empty((16, 4, 4))
    for idx, pick in enumerate(_SUBSETS):
        M = B.copy()
        M[:, pick] = -A[:, pick]
        stack[idx] = M
    dets = np.linalg.det(stack)
    c = np.zeros(5)
    np.add.at(c, _SUBSET_SIZES, dets)
    return c


def assemble_AB(state: ModulationState) -> QuasilinearSystem:
    """Fill A and B of A U_T + B U_X = 0, U = (D, h0, h1, h2).

    Row order: wavelength, mass, momentum, energy.  Rows mass..energy are
    the exact Jacobians of the conservative densities/fluxes; the
    wavelength row carries the extra -L^2 factor (see module docstring).
    """
    r = state.roots
    c = constants_from_roots(r, state.g, state.sign_m)
    D, g, m = state.D, state.g, c.m
    hs = np.array([r.h0, r.h1, r.h2])
    hb = averaged_h(r)
    hi = averaged_hinv(r)
    L = wavelength(r)
    dc = differential_coefficients(r)
    Phi = np.array(dc.Phi)
    Psi = np.array(dc.Psi)
    Lam = np.array(dc.Lambda)
    # for root index i, the product and sum of the other two roots
    prod_other = np.array([hs[1] * hs[2], hs[0] * hs[2], hs[0] * hs[1]])
    sum_other = np.array([hs[1] + hs[2], hs[0] + hs[2], hs[0] + hs[1]])

    A = np.zeros((4, 4))
    B = np.zeros((4, 4))
    A[0, 1:] = Lam
    A[1, 1:] = Phi
    A[2, 0] = hb
    A[2, 1:] = D * Phi + m / (2.0 * hs)
    A[3, 0] = hb * D + m
    A[3, 1:] = (
        0.5 * (D * D + g * c.I1) * Phi + m * m * Psi
        + 0.5 * g * (hb - sum_other) + g * prod_other * hi
        + m / (2.0 * hs) * D
    )
    B[0, 0] = -L
    B[0, 1:] = D * Lam
    B[1, 0] = hb
    B[1, 1:] = D * Phi + m / (2.0 * hs)
    B[2, 0] = 2.0 * hb * D + 2.0 * m
    B[2, 1:] = D * D * Phi + 0.5 * g * sum_other + m / hs * D
    B[3, 0] = 1.5 * hb * D * D + 0.5 * g * c.I1 * hb + m * m * hi + 3.0 * m * D
    B[3, 1:] = (
        0.5 * (D * D + g * c.I1) * D * Phi + m * m * D * Psi
        + 0.5 * g * hb * D + g * prod_other * hi * D
        + 0.75 * m / hs * D * D + 0.25 * g * m * c.I1 / hs + 0.5 * g * m
    )
    return QuasilinearSystem(A=A, B=B, charpoly=_pencil_charpoly(A, B))


def resultant_quartic(charpoly) -> float:
    """Res(p, p') of a quartic via the 7x7 Sylvester determinant.

    The polynomial is normalized to monic first so magnitudes stay
    comparable across parameter scans; zero iff p has a multiple root.

    charpoly: coefficients c0..c4, ascending powers, c4 != 0.
    """
    c = np.asarray(charpoly, dtype=float)
    if c.shape != (5,) or c[4] == 0.0:
        raise DegeneratePencilError("resultant_quartic needs a degree-4 polynomial")
    c = c / c[4]
    p = c[::-1]                      # monic, descending: 1, c3, c2, c1, c0
    dp = np.array([4.0, 3.0 * c[3], 2.0 * c[2], c[1]])
    S = np.zeros((7, 7))
    for i in range(3):
        S[i, i:i + 5] = p
    for i in range(4):
        S[3 + i, i:i + 4] = dp
    return float(np.linalg.det(S))


def characteristic_eigenvalues(sys: QuasilinearSystem) -> EigenClassification:
    """Roots of det(B - lam A) = 0 with realness/distinctness classification.

    Roots come from the companion matrix of the quartic (numpy.roots),
    which is robust where closed-form quartic solvers lose digits.
    """
    c = sys.charpoly
    scale = np.max(np.abs(c))
    if scale == 0.0 or abs(c[4]) <= PENCIL_TOL * scale:
        raise DegeneratePencilError(
            f"leading charpoly coefficient {c[4]!r} is negligible against {scale!r}"
        )
    lam = np.roots(c[::-1])
    lam = lam[np.argsort(lam.real)]
    re, im = lam.real, lam.imag
    all_real = bool(np.all(np.abs(im) <= REAL_TOL * np.maximum(1.0, np.abs(re))))
    max_mag = float(np.max(np.abs(lam)))
    gaps = [abs(lam[i] - lam[j]) for i in range(4) for j in range(i + 1, 4)]
    distinct = bool(min(gaps) > DISTINCT_TOL * max_mag)
    n_positive = int(np.sum(re > 0.0))
    return EigenClassification(
        roots=lam,
        all_real=all_real,
        distinct=distinct,
        n_positive=n_positive,
        n_negative=4 - n_positive,
        resultant=resultant_quartic(c),
    )


@dataclass(frozen=True)
class ScanPoint:
    s: float
    tau: float
    classification: EigenClassification | None
    error: str | None = None


@dataclass(frozen=True)
class ScanResult:
    """Hyperbolicity classification over the (s, tau) plane, h0 = 1."""

    s_values: np.ndarray
    tau_values: np.ndarray
    points: list  # row-major: index i*len(tau_values)+j is (s_i, tau_j)
    g: float
    sign_m: int
    errors: list = field(default_factory=list)

    @property
    def all_hyperbolic(self) -> bool:
        return all(
            p.classification is not None
            and p.classification.all_real
            and p.classification.distinct
            for p in self.points
        )

    @property
    def resultant_sign_constant(self) -> bool:
        signs = {
            np.sign(p.classification.resultant)
            for p in self.points
            if p.classification is not None
        }
        return len(signs) == 1

    def sign_pattern_grid(self) -> np.ndarray:
        """n_positive per point, shape (len(s_values), len(tau_values)); -1 on error."""
        n_tau = len(self.tau_values)
        grid = np.full((len(self.s_values), n_tau), -1, dtype=int)
        for idx, p in enumerate(self.points):
            if p.classification is not None:
                grid[idx // n_tau, idx % n_tau] = p.classification.n_positive
        return grid


def _classify_point(s: float, tau: float, g: float, sign_m: int) -> ScanPoint:
    try:
        state = state_at_rest(RootTriple(1.0, s, s + tau), g, sign_m)
        cls = characteristic_eigenvalues(assemble_AB(state))
        return ScanPoint(s=s, tau=tau, classification=cls)
    except Exception as exc:  # per-point failure must not kill the scan
        return ScanPoint(s=s, tau=tau, classification=None, error=str(exc))


def scan_region(
    s_min: float,
    s_max: float,
    tau_min: float,
    tau_max: float,
    grid_n: int,
    g: float,
    sign_m: int = -1,
    n_workers: int = 1,
    margin: float = 1e-3,
) -> ScanResult:
    """Classify hyperbolicity on a grid over the open window (s, tau).

    Each grid point builds the wave with roots (1, s, s+tau) in the U = 0
    frame (D = -m/h_bar).  The s = 1 and tau = 0 edges are degenerate
    waves, so the grid is clamped away from them by `margin`.
    """
    if grid_n < 2:
        raise ValueError(f"grid_n must be >= 2, got {grid_n}")
    if not (s_min < s_max and tau_min < tau_max):
        raise ValueError("scan window is empty")
    s_lo = max(s_min, 1.0 + margin)
    t_lo = max(tau_min, margin)
    s_values = np.linspace(s_lo, s_max, grid_n)
    tau_values = np.linspace(t_lo, tau_max, grid_n)
    tasks = [(s, t) for s in s_values for t in tau_values]
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            points = list(pool.map(lambda st: _classify_point(*st, g, sign_m), tasks))
    else:
        points = [_classify_point(s, t, g, sign_m) for s, t in tasks]
    errors = [(p.s, p.tau, p.error) for p in points if p.error is not None]
    return ScanResult(
        s_values=s_values, tau_values=tau_values, points=points,
        g=g, sign_m=sign_m, errors=errors,
    )


def write_scan_csv(result: ScanResult, path) -> None:
    """Serialize a scan as CSV; floats use repr so parsing round-trips."""
    cols = (
        "s,tau,lambda1,lambda2,lambda3,lambda4,"
        "max_imag,resultant,n_positive,n_negative,all_real,distinct"
    )
    lines = [cols]
    for p in result.points:
        if p.classification is None:
            lam = [float("nan")] * 4
            mx, res = float("nan"), float("nan")
            npos = nneg = -1
            ar = di = False
        else:
            c = p.classification
            lam = list(c.roots.real)
            mx = float(np.max(np.abs(c.roots.imag)))
            res = c.resultant
            npos, nneg, ar, di = c.n_positive, c.n_negative, c.all_real, c.distinct
        vals = [repr(float(v)) for v in (p.s, p.tau, *lam, mx, res)]
        vals += [str(npos), str(nneg), str(ar).lower(), str(di).lower()]
        lines.append(",".join(vals))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
