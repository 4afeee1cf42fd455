import numpy as np
import pytest
import scipy.linalg

from pdhyp import spectra
from pdhyp.errors import DegenerateSpectrum, OutOfBand
from pdhyp.grid import SpectralGrid


def test_linear_symbol_at_zero():
    m = spectra.three_component_model()
    E = spectra.build_linear_symbol(m, (0.0, 0.0, 0.0))
    assert np.array_equal(E, m.B.astype(complex))


def test_linear_symbol_unit_mode():
    m = spectra.three_component_model()
    E = spectra.build_linear_symbol(m, (1.0, 0.0, 0.0))
    expect = np.array([[0, -1j, 0], [-1j, -1, 0], [0, 0, -1j]])
    assert np.max(np.abs(E - expect)) == 0.0


def test_linear_symbol_half_norm():
    # |xi| = 0.5 for xi = (0.3, 0.4, 0): same pattern with -0.5i
    m = spectra.three_component_model()
    E = spectra.build_linear_symbol(m, (0.3, 0.4, 0.0))
    expect = np.array([[0, -0.5j, 0], [-0.5j, -1, 0], [0, 0, -0.5j]])
    assert np.max(np.abs(E - expect)) < 1e-15


def test_eigen_at_zero():
    m = spectra.three_component_model()
    lam, V, P = spectra.eigen_decompose(spectra.build_linear_symbol(m, (0, 0, 0)))
    assert np.allclose(lam, [0.0, -1.0, 0.0])
    assert np.allclose(P.sum(0), np.eye(3))


def test_eigen_at_0p3():
    m = spectra.three_component_model()
    E = spectra.build_linear_symbol(m, (0.3, 0.0, 0.0))
    lam, V, P = spectra.eigen_decompose(E)
    assert np.allclose(lam, [-0.1, -0.9, -0.3j], atol=1e-14)
    # oracle: dense eigensolver on the same matrix
    dense = np.sort_complex(np.linalg.eigvals(E))
    assert np.allclose(np.sort_complex(lam), dense, atol=1e-12)
    # paper-form eigenvectors up to scalar: V1 = (1, -i(1-sqrt(1-4s^2))/(2s), 0)
    s = 0.3
    root = np.sqrt(1 - 4 * s ** 2)
    v1_expect = np.array([1.0, -1j * (1 - root) / (2 * s), 0.0])
    ratio = V[:2, 0] / v1_expect[:2]
    assert np.allclose(ratio, ratio[0])
    # eigen relations and projector algebra
    for i in range(3):
        assert np.max(np.abs(E @ V[:, i] - lam[i] * V[:, i])) < 1e-13
        assert np.max(np.abs(P[i] @ P[i] - P[i])) < 1e-13
    assert np.max(np.abs(sum(l * p for l, p in zip(lam, P)) - E)) < 1e-13


def test_eigen_small_xi_expansion():
    # lam1 = -|xi|^2 + O(|xi|^3) at |xi| = 0.05
    m = spectra.two_component_model()
    E = spectra.build_linear_symbol(m, (0.05, 0.0))
    lam, _, _ = spectra.eigen_decompose(E)
    assert abs(lam[0] + 0.0025) <= 8 * 0.05 ** 3


def test_eigen_degenerate_band():
    m = spectra.three_component_model()
    E = spectra.build_linear_symbol(m, (0.5, 0.0, 0.0))
    with pytest.raises(DegenerateSpectrum):
        spectra.eigen_decompose(E)
    # just outside the band it works
    E = spectra.build_linear_symbol(m, (0.502, 0.0, 0.0))
    lam, _, _ = spectra.eigen_decompose(E)
    assert abs(lam[0].real + 0.5) < 1e-12 and lam[0].imag > 0


def test_branch_continuation_above_half():
    lam1, lam2, _ = spectra._branch_eigvals(np.array([0.8]))
    q = np.sqrt(4 * 0.64 - 1) / 2
    assert np.allclose(lam1, -0.5 + 1j * q)
    assert np.allclose(lam2, -0.5 - 1j * q)


def test_projector_invariants_random_modes():
    rng = np.random.default_rng(7)
    lo = rng.uniform(1e-3, 0.45, size=5000)
    hi = rng.uniform(0.55, 10.0, size=5000)
    s = np.concatenate([lo, hi])
    cache = spectra.build_symbol_cache_from_norms(
        s, spectra.three_component_model())
    P = cache.projectors
    eye = np.eye(3)
    assert np.max(np.abs(P.sum(0) - eye)) < 1e-12
    for i in range(3):
        for j in range(3):
            prod = np.einsum("mab,mbc->mac", P[i], P[j])
            target = P[i] if i == j else 0.0
            assert np.max(np.abs(prod - target)) < 1e-10
    recon = np.einsum("km,kmij->mij", cache.eigvals, P)
    assert np.max(np.abs(recon - cache.E)) < 1e-10


def test_green_function_identity_and_zero_mode():
    g = SpectralGrid(8, 16.0)
    cache = spectra.build_symbol_cache(g, spectra.three_component_model())
    G0 = spectra.green_function(cache, 0.0)
    assert np.max(np.abs(G0 - np.eye(3))) < 1e-14
    G2 = spectra.green_function(cache, 2.0)
    i0 = 0  # flattened index of xi = 0
    assert abs(G2[i0, 0, 0] - 1.0) < 1e-14
    assert abs(G2[i0, 1, 1] - np.exp(-2.0)) < 1e-14
    assert abs(G2[i0, 2, 2] - 1.0) < 1e-14


def test_green_semigroup_and_expm_oracle():
    g = SpectralGrid(8, 16.0)
    cache = spectra.build_symbol_cache(g, spectra.three_component_model())
    Ga = spectra.green_function(cache, 1.3)
    Gb = spectra.green_function(cache, 0.9)
    Gab = spectra.green_function(cache, 2.2)
    comp = np.einsum("mij,mjk->mik", Ga, Gb)
    assert np.max(np.abs(comp - Gab)) < 1e-9
    rng = np.random.default_rng(8)
    for i in rng.choice(cache.E.shape[0], 32, replace=False):
        oracle = scipy.linalg.expm(cache.E[i] * 5.0)
        G5 = spectra.green_function(cache, 5.0)
        assert np.max(np.abs(G5[i] - oracle)) < 1e-10


def test_green_continuous_across_band():
    # spectral and expm paths agree at the band edges
    model = spectra.three_component_model()
    for s_edge in (0.5 - spectra.DEGENERATE_BAND * 1.01,
                   0.5 + spectra.DEGENERATE_BAND * 1.01):
        cache = spectra.build_symbol_cache_from_norms([s_edge], model)
        G = spectra.green_function(cache, 3.0)[0]
        oracle = scipy.linalg.expm(cache.E[0] * 3.0)
        assert np.max(np.abs(G - oracle)) < 1e-8


def test_decompose_green():
    g = SpectralGrid(16, 64.0)
    cache = spectra.build_symbol_cache(g, spectra.three_component_model())
    parts = spectra.decompose_green(cache, 0.0)
    total = parts.K + parts.Kexp + parts.W
    assert np.max(np.abs(total - np.eye(3))) < 1e-12
    # W carries only the (3,3) entry, modulus one
    t = 10.0
    parts = spectra.decompose_green(cache, t)
    W = parts.W.copy()
    assert np.max(np.abs(W[:, :2, :])) == 0.0
    assert np.max(np.abs(W[:, :, :2])) == 0.0
    assert np.max(np.abs(np.abs(W[:, 2, 2]) - 1.0)) < 1e-12
    # sum equals the full Green function on the band
    G = spectra.green_function(cache, t)[parts.modes]
    assert np.max(np.abs(parts.K + parts.Kexp + parts.W - G)) < 1e-10
    # K decays like the slow branch: within a factor 2 of e^{-|xi|^2 t}
    s = cache.xi_norm[parts.modes]
    for i in np.nonzero((s > 0.05) & (s < 0.15))[0]:
        knorm = np.linalg.norm(parts.K[i], 2)
        heat = np.exp(-s[i] ** 2 * t)
        assert heat / 2 <= knorm <= 2 * heat


def test_decompose_green_out_of_band():
    g = SpectralGrid(16, 16.0)
    cache = spectra.build_symbol_cache(g, spectra.three_component_model())
    bad = int(np.argmax(cache.xi_norm))
    with pytest.raises(OutOfBand):
        spectra.decompose_green(cache, 1.0, modes=[bad])


def test_check_sk_three_component_violates():
    report = spectra.check_sk(spectra.three_component_model(),
                              [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0)])
    assert not report.satisfies_sk
    z = report.violating_directions[0][0]
    assert np.allclose(np.abs(z), [0.0, 0.0, 1.0], atol=1e-12)


def test_check_sk_two_component_satisfies():
    report = spectra.check_sk(spectra.two_component_model(), [(1.0, 0.0)])
    assert report.satisfies_sk
    assert report.violating_directions == []


def test_check_sk_full_dissipation_vacuous():
    model = spectra.ModelMatrices(np.diag([1.0, 1.0, 1.0]), -np.eye(3), 3)
    report = spectra.check_sk(model, [(1.0, 0.0, 0.0)])
    assert report.satisfies_sk
