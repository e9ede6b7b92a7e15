"""Unit tests for backgrounds, metric states, curvature, and inversion.

The heavyweight oracle here recomputes Ricci eigenvalues in the cylinder
coordinate by plain five-point finite differences, with its own derivative
of the interpolated potential -- no shared differentiation matrices, no
eigenvalue bookkeeping from the package.  Everything else is anchored to
closed forms of the round reference or to brute-force enumeration.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from kahler_lab.errors import (NotKahlerError, ParameterError,
                               UnsupportedModelError)
from kahler_lab.families import generate_probe
from kahler_lab.geometry import (FormSlot, fs_background, integrate,
                                 laplacian, laplacian_matrix, make_metric,
                                 normalize, osc, potential_from_density,
                                 ricci_potential, sigma_k, slot_gradsq,
                                 slot_hessian, slot_metric, slot_reference,
                                 slot_ricci, spectral_tail, wedge_density)


# ---------------------------------------------------------------------------
# frozen anchors of the round reference


@pytest.mark.parametrize("n,size", [(1, 64), (2, 72), (3, 80), (4, 96)])
def test_round_reference_frozen_anchors(n, size):
    bg = fs_background("cpn", n, size)
    # volume of the anticanonical class: (2 pi)^n (n+1)^n
    assert abs(bg.volume - (2.0 * np.pi) ** n * (n + 1) ** n) < 1e-9 * bg.volume
    # average of the moment coordinate against x^{n-1} dx on [0, n+1] is n
    assert bg.moment_mean == float(n)
    assert bg.mean(bg.x) == pytest.approx(float(n), abs=1e-11)
    # quadrature of the constant density recovers the volume
    assert integrate(bg, np.ones(size)) == pytest.approx(bg.volume, rel=1e-13)
    # unit curvature: both eigenvalue fields identically one
    ref = bg.reference
    assert np.abs(ref.lam_r - 1.0).max() < 1e-10
    assert np.abs(ref.lam_s - 1.0).max() < 1e-10
    # class constants all equal one
    assert len(bg.mu) == n + 1
    assert max(abs(m - 1.0) for m in bg.mu) < 1e-11


@pytest.mark.parametrize("n,size", [(1, 64), (2, 72), (4, 96)])
def test_round_laplacian_of_moment_coordinate(n, size):
    # closed form: applying the reference Laplacian to x gives n - x
    bg = fs_background("cpn", n, size)
    out = laplacian(bg.reference, bg.x)
    assert np.abs(out - (n - bg.x)).max() < 5e-11


def test_round_ricci_potential_vanishes(bg_cp2):
    f, defect = ricci_potential(bg_cp2.reference)
    assert np.abs(f.values).max() < 1e-11
    assert defect < 1e-10
    # normalization: exp(f) averages to one in the reference volume
    mass = bg_cp2.integrate(bg_cp2.reference.rho * np.exp(f.values))
    assert mass == pytest.approx(bg_cp2.volume, rel=1e-12)


def test_flat_torus_background_anchors(bg_torus):
    assert bg_torus.volume == 1.0
    assert bg_torus.length == 1.0
    ref = bg_torus.reference
    assert np.abs(ref.lam_r).max() < 1e-12
    assert np.abs(ref.rho - 1.0).max() < 1e-12


def test_torus_grid_size_rounded_up_to_even():
    bg = fs_background("torus", 1, 33)
    assert bg.size == 34


def test_background_request_validation():
    with pytest.raises(ParameterError):
        fs_background("cpn", 5, 64)
    with pytest.raises(ParameterError):
        fs_background("torus", 2, 64)
    with pytest.raises(ParameterError):
        fs_background("cpn", 2, 8)
    with pytest.raises((ParameterError, UnsupportedModelError)):
        fs_background("sphere", 1, 64)


def test_background_arrays_are_frozen(bg_cp2):
    with pytest.raises(ValueError):
        bg_cp2.x[0] = 1.0
    with pytest.raises(ValueError):
        bg_cp2.reference.rho[0] = 2.0


# ---------------------------------------------------------------------------
# finite-difference curvature oracle (cylinder coordinate)


def _fd1(y: np.ndarray, h: float) -> np.ndarray:
    """Interior five-point first derivative; output loses two points per end."""
    return (y[:-4] - 8.0 * y[1:-3] + 8.0 * y[3:-1] - y[4:]) / (12.0 * h)


def _fd_ricci_oracle(bg, phi, t_grid):
    """Ricci eigenvalues relative to the metric, from scratch.

    Work in the cylinder coordinate t with x(t) = L e^t / (1 + e^t).  The
    moment profile of the perturbed metric is m(t) = x(t) + dPhi/dt with
    Phi(t) = phi(x(t)); the volume density along the axis is W m^{n-1}
    with W = dm/dt, up to the flat factor e^{-nt}.  Taking q = log(W
    m^{n-1}), the eigenvalues of the curvature form relative to the metric
    are -q'' / W radially and (n - q') / m transversely.  All derivatives
    here are five-point stencils in t on a uniform grid.
    """
    h = t_grid[1] - t_grid[0]
    L = bg.length
    x_t = L / (1.0 + np.exp(-t_grid))
    phi_t = bg.interp(np.asarray(phi, dtype=float), x_t)

    m = x_t[2:-2] + _fd1(phi_t, h)                # valid on t[2:-2]
    W = _fd1(m, h)                                # valid on t[4:-4]
    q = np.log(W) + (bg.n - 1) * np.log(m[2:-2])  # on t[4:-4]
    qp = _fd1(q, h)                               # valid on t[6:-6]
    qpp = _fd1(qp, h)                             # valid on t[8:-8]

    lam_r = -qpp / W[4:-4]                        # aligned with t[8:-8]
    lam_s = (bg.n - qp[2:-2]) / m[6:-6]           # aligned with t[8:-8]
    return x_t[8:-8], lam_r, lam_s


@pytest.mark.parametrize("fixture", ["bg_cp1", "bg_cp2", "bg_cp3", "bg_cp4"])
def test_ricci_eigenvalues_match_finite_difference_oracle(fixture, request):
    bg = request.getfixturevalue(fixture)
    phi = generate_probe(bg, seed=11, scenario="oracle", index=2)
    state = make_metric(bg, phi)

    t_grid = np.arange(-4.5, 4.5 + 1e-9, 0.01)
    xq, lam_r_o, lam_s_o = _fd_ricci_oracle(bg, phi, t_grid)

    lam_r_pkg = bg.interp(state.lam_r, xq)
    assert np.abs(lam_r_pkg - lam_r_o).max() < 1e-4
    if bg.n > 1:
        lam_s_pkg = bg.interp(state.lam_s, xq)
        assert np.abs(lam_s_pkg - lam_s_o).max() < 1e-4


def test_round_metric_passes_finite_difference_oracle(bg_cp2):
    t_grid = np.arange(-4.5, 4.5 + 1e-9, 0.01)
    _, lam_r_o, lam_s_o = _fd_ricci_oracle(bg_cp2, np.zeros(bg_cp2.size), t_grid)
    assert np.abs(lam_r_o - 1.0).max() < 1e-5
    assert np.abs(lam_s_o - 1.0).max() < 1e-5


def test_torus_curvature_matches_periodic_finite_differences(bg_torus, probe_torus):
    # the probe's top mode has only ~10 grid points per wavelength, so a
    # five-point stencil at the native spacing is too coarse; refine by
    # trigonometric zero-padding (plain numpy FFT, no package machinery)
    # before differencing
    state = make_metric(bg_torus, probe_torus)
    N = bg_torus.size
    K = 16 * N
    h = 1.0 / K

    def refine(y):
        c = np.fft.rfft(y)
        out = np.zeros(K // 2 + 1, dtype=complex)
        out[:len(c)] = c
        out[len(c) - 1] *= 0.5  # split the even-grid Nyquist bin
        return np.fft.irfft(out, K) * (K / N)

    def pfd2(y):
        return (-np.roll(y, 2) + 16.0 * np.roll(y, 1) - 30.0 * y
                + 16.0 * np.roll(y, -1) - np.roll(y, -2)) / (12.0 * h * h)

    lr_fine = refine(state.log_rho)
    rho_fine = refine(state.rho)
    oracle = (-pfd2(lr_fine) / rho_fine)[:: K // N]
    assert np.abs(state.lam_r - oracle).max() < 1e-3


# ---------------------------------------------------------------------------
# metric-state structure


def test_moment_profile_endpoints_pinned(bg_cp2, probe_cp2):
    state = make_metric(bg_cp2, probe_cp2)
    L = bg_cp2.length
    assert abs(state.m[0]) < 1e-12
    assert abs(state.m[-1] - L) < 1e-12
    # the curvature moment profile shares the endpoint normalization
    assert abs(state.G[0]) < 1e-9
    assert abs(state.G[-1] - L) < 1e-9


def test_constant_shift_leaves_state_unchanged(bg_cp2, probe_cp2):
    # the differentiation matrix annihilates constants to ~1e-12; two more
    # derivative passes amplify that roundoff into the curvature fields
    a = make_metric(bg_cp2, probe_cp2)
    b = make_metric(bg_cp2, probe_cp2 + 17.25)
    assert np.abs(a.rho - b.rho).max() < 1e-10
    assert np.abs(a.lam_r - b.lam_r).max() < 1e-6


def test_n1_transverse_eigenvalue_mirrors_radial(bg_cp1, probe_cp1):
    state = make_metric(bg_cp1, probe_cp1)
    assert np.array_equal(state.lam_r, state.lam_s)


def test_inadmissible_potential_raises(bg_cp2):
    s = 2.0 * bg_cp2.x / bg_cp2.length - 1.0
    with pytest.raises(NotKahlerError):
        make_metric(bg_cp2, 5.0 * s ** 2)


def test_wrong_shape_raises(bg_cp2):
    with pytest.raises(ParameterError):
        make_metric(bg_cp2, np.zeros(bg_cp2.size + 1))


def test_torus_inadmissible_potential_raises(bg_torus):
    bad = 0.2 * np.cos(2.0 * np.pi * bg_torus.x)  # rho dips below zero
    with pytest.raises(NotKahlerError):
        make_metric(bg_torus, bad)


# ---------------------------------------------------------------------------
# wedge products against brute-force permanents


def _permanent(rows) -> float:
    size = len(rows)
    return sum(
        math.prod(rows[i][perm[i]] for i in range(size))
        for perm in itertools.permutations(range(size)))


@pytest.mark.parametrize("fixture", ["bg_cp1", "bg_cp2", "bg_cp3", "bg_cp4"])
def test_wedge_density_matches_permanent_oracle(fixture, request):
    bg = request.getfixturevalue(fixture)
    n = bg.n
    rng = np.random.default_rng(5)
    slots = [FormSlot("perturbed_metric",
                      rng.uniform(0.5, 2.0, bg.size),
                      rng.uniform(0.5, 2.0, bg.size))
             for _ in range(n)]
    density = wedge_density(bg, slots)

    # a rotation-invariant (1,1)-form has one radial eigenvalue and n-1
    # equal transverse ones; the wedge of n of them, relative to the
    # reference frame, is the permanent of the eigenvalue rows over n!
    for idx in rng.integers(0, bg.size, 6):
        rows = [[s.ar[idx]] + [s.as_[idx]] * (n - 1) for s in slots]
        expected = _permanent(rows) / math.factorial(n)
        assert density[idx] == pytest.approx(expected, rel=1e-12)


def test_wedge_of_references_is_unit_density(bg_cp3):
    slots = [slot_reference(bg_cp3)] * bg_cp3.n
    assert np.abs(wedge_density(bg_cp3, slots) - 1.0).max() < 1e-14


def test_wedge_of_metric_slots_is_volume_density(bg_cp2, probe_cp2):
    state = make_metric(bg_cp2, probe_cp2)
    density = wedge_density(bg_cp2, [slot_metric(state)] * bg_cp2.n)
    assert np.abs(density - state.rho).max() < 1e-12


def test_wedge_density_requires_exactly_n_slots(bg_cp2):
    with pytest.raises(ParameterError):
        wedge_density(bg_cp2, [slot_reference(bg_cp2)])


def test_hessian_slot_closed_form_on_moment_coordinate(bg_cp2):
    bg = bg_cp2
    slot = slot_hessian(bg, bg.x)
    L = bg.length
    assert np.abs(slot.ar - (L - 2.0 * bg.x) / L).max() < 1e-10
    assert np.abs(slot.as_ - (L - bg.x) / L).max() < 1e-10


def test_gradsq_slot_structure(bg_cp2, probe_cp2):
    slot = slot_gradsq(bg_cp2, probe_cp2)
    phi_x = bg_cp2.deriv(probe_cp2)
    assert np.abs(slot.ar - bg_cp2.w0 * phi_x ** 2).max() < 1e-12
    assert np.abs(slot.as_).max() == 0.0


def test_ricci_slot_of_round_metric_is_reference(bg_cp2):
    slot = slot_ricci(bg_cp2.reference)
    assert np.abs(slot.ar - 1.0).max() < 1e-10
    assert np.abs(slot.as_ - 1.0).max() < 1e-10


# ---------------------------------------------------------------------------
# symmetric curvature functions


@pytest.mark.parametrize("fixture", ["bg_cp2", "bg_cp3", "bg_cp4"])
def test_sigma_k_matches_subset_enumeration(fixture, request):
    bg = request.getfixturevalue(fixture)
    phi = generate_probe(bg, seed=4, scenario="sigma", index=1)
    state = make_metric(bg, phi)
    n = bg.n
    for idx in (3, bg.size // 2, bg.size - 4):
        eigs = [state.lam_r[idx]] + [state.lam_s[idx]] * (n - 1)
        for k in range(n + 1):
            expected = sum(math.prod(sub)
                           for sub in itertools.combinations(eigs, k))
            assert sigma_k(state, k)[idx] == pytest.approx(expected, rel=1e-10)


def test_sigma_zero_is_one_and_bad_index_raises(bg_cp2):
    state = bg_cp2.reference
    assert np.all(sigma_k(state, 0) == 1.0)
    with pytest.raises(ParameterError):
        sigma_k(state, 3)
    with pytest.raises(ParameterError):
        sigma_k(state, -1)


def test_round_scalar_curvature_is_n(bg_cp3):
    # sigma_1 of n unit eigenvalues
    from kahler_lab.geometry import scalar_curvature
    assert np.abs(scalar_curvature(bg_cp3.reference) - 3.0).max() < 1e-9


# ---------------------------------------------------------------------------
# Laplacian


def test_laplacian_self_adjoint_in_state_volume(bg_cp2, probe_cp2):
    bg = bg_cp2
    state = make_metric(bg, probe_cp2)
    weight = bg.ref_measure * state.rho
    u = bg.x ** 2
    v = np.sin(bg.x)
    lhs = float(weight @ (u * laplacian(state, v)))
    rhs = float(weight @ (v * laplacian(state, u)))
    assert lhs == pytest.approx(rhs, abs=1e-9 * max(1.0, abs(lhs)))


def test_laplacian_annihilates_constants(bg_cp2, probe_cp2):
    state = make_metric(bg_cp2, probe_cp2)
    assert np.abs(laplacian(state, np.ones(bg_cp2.size))).max() < 1e-11


def test_laplacian_integrates_to_zero(bg_cp2, probe_cp2):
    # divergence structure: the Laplacian of anything has zero mean in the
    # state's own volume form
    state = make_metric(bg_cp2, probe_cp2)
    u = np.cos(bg_cp2.x)
    total = bg_cp2.integrate(laplacian(state, u) * state.rho)
    assert abs(total) < 1e-9


def test_laplacian_matrix_agrees_with_apply(bg_cp2, probe_cp2):
    state = make_metric(bg_cp2, probe_cp2)
    u = bg_cp2.x ** 3 - bg_cp2.x
    A = laplacian_matrix(state)
    assert np.abs(A @ u - laplacian(state, u)).max() < 1e-10


def test_torus_laplacian_is_flat_second_derivative_over_density(
        bg_torus, probe_torus):
    state = make_metric(bg_torus, probe_torus)
    u = np.sin(2.0 * np.pi * bg_torus.x)
    expected = (bg_torus.D2 @ u) / state.rho
    assert np.abs(laplacian(state, u) - expected).max() < 1e-12


# ---------------------------------------------------------------------------
# prescribed-density inversion


def test_density_inversion_round_trip(bg_cp2, probe_cp2):
    state = make_metric(bg_cp2, probe_cp2)
    recovered = potential_from_density(bg_cp2, state.rho)
    target = probe_cp2 - bg_cp2.mean(probe_cp2)
    assert np.abs(recovered - target).max() < 1e-8


def test_density_inversion_polish_tightens_curvature(bg_cp2, probe_cp2):
    state = make_metric(bg_cp2, probe_cp2)
    raw = potential_from_density(bg_cp2, state.rho)
    polished = potential_from_density(bg_cp2, state.rho, polish=2)
    target = probe_cp2 - bg_cp2.mean(probe_cp2)
    err_raw = np.abs(make_metric(bg_cp2, raw).lam_r
                     - state.lam_r).max()
    err_pol = np.abs(make_metric(bg_cp2, polished).lam_r
                     - state.lam_r).max()
    assert np.abs(polished - target).max() < 1e-9
    assert err_pol <= err_raw + 1e-12
    assert err_pol < 1e-7


def test_density_inversion_rescales_mass(bg_cp2, probe_cp2):
    # a mis-normalized target is projected back into the class
    state = make_metric(bg_cp2, probe_cp2)
    recovered = potential_from_density(bg_cp2, 3.7 * state.rho)
    target = probe_cp2 - bg_cp2.mean(probe_cp2)
    assert np.abs(recovered - target).max() < 1e-8


def test_density_inversion_rejects_sign_changing_target(bg_cp2):
    bad = np.linspace(-0.5, 2.0, bg_cp2.size)
    with pytest.raises(NotKahlerError):
        potential_from_density(bg_cp2, bad)


def test_torus_density_inversion_round_trip(bg_torus, probe_torus):
    state = make_metric(bg_torus, probe_torus)
    recovered = potential_from_density(bg_torus, state.rho)
    target = probe_torus - probe_torus.mean()
    assert np.abs(recovered - recovered.mean()
                  - (target - target.mean())).max() < 1e-10


# ---------------------------------------------------------------------------
# small diagnostics


def test_normalize_modes(bg_cp2, probe_cp2):
    shifted = probe_cp2 + 3.0
    zero_mean = normalize(bg_cp2, shifted)
    assert abs(bg_cp2.mean(zero_mean.values)) < 1e-12
    assert zero_mean.normalization == "integral-zero"
    sup = normalize(bg_cp2, shifted, "sup-zero")
    assert sup.values.max() == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(ParameterError):
        normalize(bg_cp2, shifted, "median")


def test_osc_frozen_value():
    assert osc(np.array([1.0, 4.0, 2.0])) == 3.0


def test_spectral_tail_separates_smooth_from_noise(bg_cp2):
    smooth = np.sin(bg_cp2.x)
    noisy = smooth + 1e-3 * np.random.default_rng(0).standard_normal(bg_cp2.size)
    assert spectral_tail(bg_cp2, smooth) < 1e-12
    assert spectral_tail(bg_cp2, noisy) > 1e-6


def test_lowpass_keeps_low_modes_exactly(bg_cp2):
    u = 2.0 * bg_cp2.x / bg_cp2.length - 1.0
    vals = 1.0 + u + (2.0 * u ** 2 - 1.0)  # T_0 + T_1 + T_2
    assert np.abs(bg_cp2.lowpass(vals, 8) - vals).max() < 1e-12
    # truncating everything but the constant leaves the mean alone
    flat = bg_cp2.lowpass(vals, 1)
    assert np.abs(flat - flat[0]).max() < 1e-12
