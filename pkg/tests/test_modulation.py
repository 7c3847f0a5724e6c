"""Tests for the averaged (modulation) system and its characteristics.

Oracles:
  * central finite differences of the closed-form averages for every
    gradient entry (the quasilinear matrices are Jacobians, so FD of the
    conservative densities/fluxes pins each coefficient independently);
  * direct determinant evaluation det(B - lam A) at spot values of lam
    for the pencil polynomial;
  * the product formula Res(p, p') = prod p'(r_i) over the roots, and
    hand-factored quartics, for the resultant;
  * exact symmetries (Galilean shift, depth scaling, sign flip) that the
    eigenvalues must inherit from the underlying equations.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import sgnwaves as sw
from sgnwaves.cli import reemit_csv
from sgnwaves.errors import DegeneratePencilError, InvalidRootsError

BASE = sw.RootTriple(1.0, 1.5, 2.0)
G = 10.0

HBAR = 1.7284732905222318
MOMENTUM_FLUX_REST = 15.143642707990033  # i - m^2/hbar at the base state

# eigenvalues of the base state (g=10, zero-mean frame, sign_m = -1),
# frozen from the companion-matrix solve and verified real and distinct
EIGS_BASE = np.array([
    -4.146905508565024,
    1.6115979306128627,
    2.0831871789583656,
    4.104425314178053,
])
RESULTANT_BASE = 494770.1009671891


def rest_state(roots=BASE, g=G, sign_m=-1):
    return sw.state_at_rest(roots, g, sign_m)


def fd_gradient(f, values, step):
    grad = []
    for j, v in enumerate(values):
        up = list(values)
        dn = list(values)
        up[j] = v + step
        dn[j] = v - step
        grad.append((f(up) - f(dn)) / (2.0 * step))
    return np.array(grad)


# --- conserved densities and fluxes -----------------------------------------

def test_conserved_vector_rest_frame():
    dens, flux = sw.conserved_vector(rest_state())
    assert dens[1] == pytest.approx(HBAR, rel=1e-14)        # mean depth
    assert abs(dens[2]) <= 1e-12                            # mean momentum
    assert abs(flux[1]) <= 1e-9                             # mass flux = hbar U = 0
    assert flux[2] == pytest.approx(MOMENTUM_FLUX_REST, rel=1e-12)
    assert flux[2] > 0.0
    assert dens[0] == pytest.approx(1.0 / sw.wavelength(BASE), rel=1e-14)


def test_mass_flux_equals_mean_depth_times_mean_velocity():
    for D in (-1.0, 0.7, 2.5):
        state = sw.ModulationState(D=D, h0=1.0, h1=1.4, h2=3.0, g=G, sign_m=-1)
        _, flux = sw.conserved_vector(state)
        hb = sw.averaged_h(state.roots)
        assert flux[1] == pytest.approx(hb * state.U, rel=1e-12)


def test_state_validation_and_mean_velocity():
    with pytest.raises(InvalidRootsError):
        sw.ModulationState(D=0.0, h0=1.0, h1=2.0, h2=1.5, g=G)
    state = rest_state()
    assert abs(state.U) <= 1e-14
    shifted = sw.ModulationState(
        D=state.D + 2.0, h0=1.0, h1=1.5, h2=2.0, g=G, sign_m=-1
    )
    assert shifted.U == pytest.approx(2.0, abs=1e-13)


# --- gradients of the averages ----------------------------------------------

TRIPLES = [
    (1.0, 1.5, 2.0),
    (1.0, 1.2, 3.5),
    (1.0, 4.0, 4.5),
    (2.0, 2.5, 6.0),
]


@pytest.mark.parametrize("triple", TRIPLES)
def test_differential_coefficients_match_finite_differences(triple):
    roots = sw.RootTriple(*triple)
    step = 1e-7 * roots.h2
    dc = sw.differential_coefficients(roots)
    for closed, f in (
        (dc.Phi, lambda v: sw.averaged_h(sw.RootTriple(*v))),
        (dc.Psi, lambda v: sw.averaged_hinv(sw.RootTriple(*v))),
        (dc.Lambda, lambda v: sw.wavelength(sw.RootTriple(*v))),
    ):
        fd = fd_gradient(f, triple, step)
        for a, b in zip(closed, fd):
            assert a == pytest.approx(b, rel=1e-6, abs=1e-6)


@pytest.mark.parametrize("triple", TRIPLES)
def test_gradients_satisfy_scaling_homogeneity(triple):
    # h_bar and L are homogeneous of degree 1 in the roots, 1/h_bar of
    # degree -1, so the root-weighted gradient sums collapse to the
    # functions themselves; the derivative along the ray alpha * roots
    # gives the same number by an independent finite difference
    roots = sw.RootTriple(*triple)
    dc = sw.differential_coefficients(roots)
    hs = np.array(triple)
    assert float(hs @ np.array(dc.Phi)) == pytest.approx(
        sw.averaged_h(roots), rel=1e-8
    )
    assert float(hs @ np.array(dc.Psi)) == pytest.approx(
        -sw.averaged_hinv(roots), rel=1e-8
    )
    assert float(hs @ np.array(dc.Lambda)) == pytest.approx(
        sw.wavelength(roots), rel=1e-8
    )
    eps = 1e-7
    ray = lambda f, a: f(sw.RootTriple(a * hs[0], a * hs[1], a * hs[2]))
    fd_L = (ray(sw.wavelength, 1 + eps) - ray(sw.wavelength, 1 - eps)) / (2 * eps)
    assert fd_L == pytest.approx(sw.wavelength(roots), rel=1e-6)
    fd_hi = (ray(sw.averaged_hinv, 1 + eps) - ray(sw.averaged_hinv, 1 - eps)) / (2 * eps)
    assert fd_hi == pytest.approx(-sw.averaged_hinv(roots), rel=1e-6)


# --- quasilinear assembly -----------------------------------------------------

STATES = [
    ("rest", None),
    ("moving", sw.ModulationState(D=1.3, h0=1.0, h1=1.2, h2=3.5, g=9.81, sign_m=1)),
]


def _resolve(state):
    return rest_state() if state is None else state


@pytest.mark.parametrize("label,state", STATES)
def test_matrices_are_jacobians_of_conservation_laws(label, state):
    state = _resolve(state)
    sys = sw.assemble_AB(state)
    L = sw.wavelength(state.roots)
    step = 1e-7 * state.h2

    def dens(v):
        return sw.conserved_vector(
            sw.ModulationState(D=v[0], h0=v[1], h1=v[2], h2=v[3],
                               g=state.g, sign_m=state.sign_m)
        )[0]

    def flux(v):
        return sw.conserved_vector(
            sw.ModulationState(D=v[0], h0=v[1], h1=v[2], h2=v[3],
                               g=state.g, sign_m=state.sign_m)
        )[1]

    v0 = [state.D, state.h0, state.h1, state.h2]
    # fd_gradient stacks d(vector)/d(v_j) as rows, so transposing gives
    # the Jacobian with J[i, j] = d component_i / d variable_j
    A_fd = fd_gradient(dens, v0, step).T
    B_fd = fd_gradient(flux, v0, step).T
    # rows mass/momentum/energy are the plain Jacobians; the wave-phase
    # row was multiplied through by -L^2 to clear 1/L from the densities
    A_fd[0] *= -(L * L)
    B_fd[0] *= -(L * L)
    scale_A = max(1.0, np.max(np.abs(sys.A)))
    scale_B = max(1.0, np.max(np.abs(sys.B)))
    assert np.max(np.abs(sys.A - A_fd)) <= 1e-6 * scale_A
    assert np.max(np.abs(sys.B - B_fd)) <= 1e-6 * scale_B


def test_matrix_structure():
    state = rest_state()
    sys = sw.assemble_AB(state)
    hb = sw.averaged_h(BASE)
    m = sw.constants_from_roots(BASE, G, -1).m
    assert sys.A[0, 0] == 0.0
    assert sys.A[1, 0] == 0.0
    assert sys.A[2, 0] == pytest.approx(hb, rel=1e-14)
    assert sys.A[3, 0] == pytest.approx(hb * state.D + m, abs=1e-12)
    assert sys.B[0, 0] == pytest.approx(-sw.wavelength(BASE), rel=1e-14)
    # flux of mass is the density of momentum: the rows must be identical
    assert np.array_equal(sys.B[1], sys.A[2])


@pytest.mark.parametrize("label,state", STATES)
def test_charpoly_matches_direct_determinant(label, state):
    state = _resolve(state)
    sys = sw.assemble_AB(state)
    scale = np.max(np.abs(sys.charpoly))
    for lam in (-2.3, -0.4, 0.7, 1.9, 4.2):
        direct = np.linalg.det(sys.B - lam * sys.A)
        poly = float(np.polyval(sys.charpoly[::-1], lam))
        assert poly == pytest.approx(direct, rel=1e-10, abs=1e-10 * scale)
    assert sys.charpoly[4] == pytest.approx(np.linalg.det(sys.A), rel=1e-12)


# --- eigenvalues ---------------------------------------------------------------

def test_base_state_eigenvalues_frozen():
    cls = sw.characteristic_eigenvalues(sw.assemble_AB(rest_state()))
    assert cls.all_real
    assert cls.distinct
    assert cls.n_positive == 3
    assert cls.n_negative == 1
    assert np.allclose(cls.roots.real, EIGS_BASE, rtol=1e-9, atol=0.0)
    assert np.max(np.abs(cls.roots.imag)) <= 1e-12
    assert cls.resultant == pytest.approx(RESULTANT_BASE, rel=1e-9)


@pytest.mark.parametrize("c", [-2.0, 0.5, 3.0])
def test_galilean_shift_translates_eigenvalues(c):
    state = rest_state()
    base = sw.characteristic_eigenvalues(sw.assemble_AB(state)).roots.real
    shifted_state = sw.ModulationState(
        D=state.D + c, h0=1.0, h1=1.5, h2=2.0, g=G, sign_m=-1
    )
    shifted = sw.characteristic_eigenvalues(sw.assemble_AB(shifted_state)).roots.real
    assert np.max(np.abs(shifted - (base + c))) <= 1e-9


@pytest.mark.parametrize("alpha", [0.25, 4.0])
def test_depth_scaling_stretches_eigenvalues(alpha):
    base = sw.characteristic_eigenvalues(sw.assemble_AB(rest_state())).roots.real
    scaled_roots = sw.RootTriple(alpha * 1.0, alpha * 1.5, alpha * 2.0)
    scaled = sw.characteristic_eigenvalues(
        sw.assemble_AB(rest_state(scaled_roots))
    ).roots.real
    assert np.max(np.abs(scaled - math.sqrt(alpha) * base)) <= 1e-8 * math.sqrt(alpha)


def test_sign_flip_negates_eigenvalues():
    minus = sw.characteristic_eigenvalues(sw.assemble_AB(rest_state(sign_m=-1)))
    plus = sw.characteristic_eigenvalues(sw.assemble_AB(rest_state(sign_m=1)))
    assert np.max(np.abs(np.sort(plus.roots.real) + np.sort(minus.roots.real)[::-1])) <= 1e-10
    assert plus.n_positive == minus.n_negative


def test_degenerate_pencil_is_reported():
    sys = sw.QuasilinearSystem(
        A=np.eye(4), B=np.eye(4), charpoly=np.array([1.0, 2.0, 3.0, 4.0, 1e-15])
    )
    with pytest.raises(DegeneratePencilError):
        sw.characteristic_eigenvalues(sys)


# --- resultant -----------------------------------------------------------------

def test_resultant_of_factored_quartics():
    # p = (x-1)(x-2)(x-3)(x-4): prod of p'(r_i) = (-6)(2)(-2)(6) = 144
    p = np.array([24.0, -50.0, 35.0, -10.0, 1.0])
    assert sw.resultant_quartic(p) == pytest.approx(144.0, rel=1e-10)
    # repeated root collapses the resultant to zero
    # (x-1)^2 (x-2)(x-3) = x^4 - 7x^3 + 17x^2 - 17x + 6
    pd = np.array([6.0, -17.0, 17.0, -7.0, 1.0])
    assert abs(sw.resultant_quartic(pd)) <= 1e-9
    # x^4 - 1, roots (1, -1, i, -i): prod 4 r^3 = 256 (prod r)^3 = -256
    assert sw.resultant_quartic(np.array([-1.0, 0.0, 0.0, 0.0, 1.0])) == pytest.approx(
        -256.0, rel=1e-12
    )
    with pytest.raises(DegeneratePencilError):
        sw.resultant_quartic(np.array([1.0, 2.0, 3.0, 4.0, 0.0]))


def test_resultant_matches_product_formula():
    rng = np.random.default_rng(11)
    for _ in range(10):
        c = rng.standard_normal(5)
        c[4] = c[4] if abs(c[4]) > 0.3 else 1.0
        monic = c / c[4]
        roots = np.roots(monic[::-1])
        dp = np.polyder(monic[::-1])
        product = np.prod(np.polyval(dp, roots))
        assert sw.resultant_quartic(c) == pytest.approx(
            float(product.real), rel=1e-8, abs=1e-8
        )


# --- parameter-plane scan -------------------------------------------------------

def test_scan_region_structure():
    res = sw.scan_region(1.0, 20.0, 0.0, 20.0, 12, g=G, sign_m=-1)
    assert res.errors == []
    assert res.all_hyperbolic
    assert res.resultant_sign_constant
    grid = res.sign_pattern_grid()
    assert grid.shape == (12, 12)
    classes = set(grid.flatten().tolist())
    assert classes == {2, 3}
    # along each fixed-s line the pattern flips at most once
    for row in grid:
        assert np.count_nonzero(np.diff(row)) <= 1


def test_scan_clamps_degenerate_edges():
    res = sw.scan_region(1.0, 5.0, 0.0, 5.0, 4, g=G)
    assert res.s_values[0] == pytest.approx(1.001, rel=1e-12)
    assert res.tau_values[0] == pytest.approx(0.001, rel=1e-12)
    with pytest.raises(ValueError):
        sw.scan_region(5.0, 4.0, 0.0, 5.0, 4, g=G)
    with pytest.raises(ValueError):
        sw.scan_region(1.0, 5.0, 0.0, 5.0, 1, g=G)


def test_scan_workers_do_not_change_results():
    serial = sw.scan_region(1.0, 10.0, 0.0, 10.0, 6, g=G, n_workers=1)
    threaded = sw.scan_region(1.0, 10.0, 0.0, 10.0, 6, g=G, n_workers=4)
    for a, b in zip(serial.points, threaded.points):
        assert (a.s, a.tau) == (b.s, b.tau)
        assert np.array_equal(a.classification.roots, b.classification.roots)


def test_scan_csv_round_trip(tmp_path):
    res = sw.scan_region(1.0, 6.0, 0.0, 6.0, 5, g=G)
    out = tmp_path / "scan.csv"
    sw.write_scan_csv(res, out)
    text = out.read_text()
    header = text.splitlines()[0]
    assert header == (
        "s,tau,lambda1,lambda2,lambda3,lambda4,"
        "max_imag,resultant,n_positive,n_negative,all_real,distinct"
    )
    assert len(text.splitlines()) == 26
    assert reemit_csv(out) == text


@given(
    s=st.floats(min_value=1.01, max_value=60.0),
    tau=st.floats(min_value=0.01, max_value=60.0),
)
@settings(max_examples=25, deadline=None)
def test_hyperbolicity_property(s, tau):
    state = sw.state_at_rest(sw.RootTriple(1.0, s, s + tau), G, -1)
    cls = sw.characteristic_eigenvalues(sw.assemble_AB(state))
    assert cls.all_real
    assert cls.distinct
    assert cls.n_positive in (2, 3)
