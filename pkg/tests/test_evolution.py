import numpy as np
import pytest

from pdhyp import evolution as ev
from pdhyp import norms, spectra
from pdhyp import symbols as sy
from pdhyp.errors import StepRejected
from pdhyp.grid import SpectralGrid


def bump_state(g, dim, amp, widths=None):
    widths = widths or [1.5] * dim
    data = np.zeros((dim,) + g.shape, complex)
    for i in range(dim):
        f = amp * (1 + 0.1 * i) * np.exp(-g.r2_centered / (2 * widths[i] ** 2))
        data[i] = g.dealias(g.to_spectral(f))
    return ev.StateField(g, data, ev.T_INITIAL)


@pytest.fixture(scope="module")
def grid():
    return SpectralGrid(16, 16.0)


def test_rhs_zero_state(grid):
    model = ev.ModelSpec("pk_system",
                         ev.Coefficients(a_u=1, b_u=1, c_u=1, a_v=1, b_v=1,
                                         c_v=1, d_v=1),
                         w_symbol=sy.symbol_preset("null_b"))
    out = ev.rhs(model, ev.zero_state(grid, 3))
    assert np.all(out == 0.0)


def test_rhs_single_cosine_closed_form(grid):
    # k_system with a_u = 1, rest 0; u = A cos(k.x) gives
    # u^2 = A^2/2 + (A^2/4)(e^{2ik.x} + e^{-2ik.x})
    model = ev.ModelSpec("k_system", ev.Coefficients(a_u=1.0))
    A = 0.7
    st = ev.zero_state(grid, 2)
    k_vec = grid.xi[1, 0, 0]
    u_phys = A * np.cos(grid.x[0] * k_vec[0])
    st.data[0] = grid.to_spectral(u_phys)
    out = ev.rhs(model, st)
    expect = grid.to_spectral(A ** 2 * (1 + np.cos(2 * grid.x[0] * k_vec[0])) / 2)
    # three surviving modes: 0 and +-2k
    assert np.max(np.abs(out[0] - expect)) < 1e-14 * np.max(np.abs(expect))
    nonzero = np.argwhere(np.abs(out[0]) > 1e-12)
    assert {tuple(i) for i in nonzero} == {(0, 0, 0), (2, 0, 0),
                                           (grid.n - 2, 0, 0)}
    assert np.max(np.abs(out[1])) == 0.0


def test_rhs_w_zero_for_pksw(grid):
    # with w = 0 both vw and T_m(w, w) vanish
    model = ev.ModelSpec("pk_system_w", w_symbol=sy.symbol_preset("null_b"))
    st = bump_state(grid, 3, 0.1)
    st.data[2] = 0.0
    out = ev.rhs(model, st)
    assert np.max(np.abs(out[2])) == 0.0


def test_coupling_placement(grid):
    st = bump_state(grid, 3, 0.1)
    base = ev.Coefficients(d_v=1.0)
    sym = sy.symbol_preset("one")
    uw = ev.rhs(ev.ModelSpec("pk_system", base, w_symbol=None,
                             coupling="uw"), st)
    vw_u = ev.rhs(ev.ModelSpec("pk_system", base, w_symbol=None,
                               coupling="vw_in_u"), st)
    vw_v = ev.rhs(ev.ModelSpec("pk_system", base, w_symbol=None,
                               coupling="vw_in_v"), st)
    g = grid
    prod_uw = g.dealias(g.to_spectral(g.to_physical(st.data[0])
                                      * g.to_physical(st.data[2])))
    prod_vw = g.dealias(g.to_spectral(g.to_physical(st.data[1])
                                      * g.to_physical(st.data[2])))
    assert np.allclose(uw[1], prod_uw) and np.max(np.abs(uw[0])) == 0.0
    assert np.allclose(vw_u[0], prod_vw) and np.max(np.abs(vw_u[1])) == 0.0
    assert np.allclose(vw_v[1], prod_vw) and np.max(np.abs(vw_v[0])) == 0.0
    # pk_system_w fixes unit sources (v^2, v^2, vw + T_m)
    pksw = ev.ModelSpec("pk_system_w", w_symbol=sym)
    assert pksw.coefficients.as_dict() == ev.Coefficients(
        b_u=1.0, b_v=1.0, d_v=1.0).as_dict()
    assert pksw.coupling == "vw_in_w"


def test_model_validation():
    with pytest.raises(ValueError):
        ev.ModelSpec("pk_system", coupling="vw_in_w", w_symbol=None)
    with pytest.raises(ValueError):
        ev.ModelSpec("pk_system_w", w_symbol=None)
    with pytest.raises(ValueError):
        ev.ModelSpec("bogus")


def test_linear_step_is_exact(grid):
    model = ev.ModelSpec("pk_system", ev.Coefficients(), w_symbol=None)
    st0 = bump_state(grid, 3, 1.0)
    for scheme in ("ifrk2", "ifrk4"):
        stepper = ev.Stepper(model, grid, dt=1.7, scheme=scheme)
        st = st0.copy()
        for _ in range(4):
            st = stepper.step(st)
        exact = ev.linear_evolve(stepper.cache, st0.copy(), st.t)
        exact.dealias()
        assert np.max(np.abs(st.data - exact.data)) <= 1e-10


def test_linear_step_matches_green_parts(grid):
    # the integrator and the K + Kexp + W splitting agree on the band
    model = ev.ModelSpec("pk_system", ev.Coefficients(), w_symbol=None)
    st0 = bump_state(grid, 3, 1.0)
    stepper = ev.Stepper(model, grid, dt=2.0, scheme="ifrk2")
    st = stepper.step(st0.copy())
    parts = spectra.decompose_green(stepper.cache, 2.0)
    flat0 = st0.data.reshape(3, -1)[:, parts.modes]
    total = parts.K + parts.Kexp + parts.W
    expect = np.einsum("mij,jm->im", total, flat0)
    got = st.data.reshape(3, -1)[:, parts.modes]
    assert np.max(np.abs(got - expect)) <= 1e-10


def test_pure_wave_time_reversal(grid):
    model = ev.ModelSpec("pk_system", ev.Coefficients(), w_symbol=None)
    st0 = bump_state(grid, 3, 1.0)
    cache = spectra.build_symbol_cache(grid, model.matrices())
    w0 = st0.data[2].copy()
    fwd = np.exp(-1j * grid.xi_norm * 0.9) * w0
    back = np.exp(+1j * grid.xi_norm * 0.9) * fwd
    assert np.max(np.abs(back - w0)) <= 1e-12 * np.max(np.abs(w0))


def test_self_convergence_orders(grid):
    model = ev.ModelSpec(
        "pk_system",
        ev.Coefficients(a_u=1.0, b_u=0.5, c_u=0.3, a_v=0.2, b_v=1.0,
                        c_v=0.1, d_v=1.0),
        w_symbol=sy.symbol_preset("null_b"), coupling="uw")
    st0 = bump_state(grid, 3, 0.2)
    t_end = 2.0

    def terminal(dt, scheme):
        stepper = ev.Stepper(model, grid, dt, scheme)
        st = st0.copy()
        for _ in range(round((t_end - st.t) / dt)):
            st = stepper.step(st)
        return st.data

    ref = terminal(1.0 / 128, "ifrk4")
    for scheme, target in (("ifrk2", 2.0), ("ifrk4", 4.0)):
        errs = [float(np.max(np.abs(terminal(dt, scheme) - ref)))
                for dt in (0.25, 0.125)]
        order = float(np.log2(errs[0] / errs[1]))
        assert abs(order - target) <= 0.3


def test_conjugate_symmetry_of_sources(grid):
    # quadratic sources preserve conjugate symmetry; the linear flow of
    # this Fourier-side model does not (the symbol is even in xi), which is
    # why no reality projection is applied during stepping
    model = ev.ModelSpec("pk_system",
                         ev.Coefficients(a_u=1, b_u=1, c_u=1, a_v=1, b_v=1,
                                         c_v=1, d_v=1),
                         w_symbol=sy.symbol_preset("null_b"))
    st = bump_state(grid, 3, 0.5)
    assert st.conjugate_symmetry_defect() < 1e-13
    out = ev.rhs(model, st)
    for comp in out:
        assert grid.conjugate_symmetry_defect(comp) < 1e-12
    stepper = ev.Stepper(model, grid, dt=0.5, scheme="ifrk2")
    st1 = stepper.step(st)
    assert st1.conjugate_symmetry_defect() > 1e-6   # the flow is complex


def test_blowup_guard():
    g = SpectralGrid(16, 16.0)
    model = ev.ModelSpec("k_system",
                         ev.Coefficients(a_u=5.0, a_v=5.0, b_u=5.0, b_v=5.0))
    st = bump_state(g, 2, 30.0)
    guard = ev.BlowupGuard.for_state(st)
    stepper = ev.Stepper(model, g, dt=0.5, scheme="ifrk2")
    with pytest.raises(StepRejected):
        for _ in range(60):
            st = stepper.step(st, guard)


def test_extract_profile_roundtrip(grid):
    model = ev.ModelSpec("pk_system", ev.Coefficients(), w_symbol=None)
    st0 = bump_state(grid, 3, 1.0)
    cache = spectra.build_symbol_cache(grid, model.matrices())
    st = ev.linear_evolve(cache, st0.copy(), 5.0)
    prof = ev.extract_profile(st, cache)
    # per-mode |f_w| = |w_hat| (unitary factor)
    assert np.max(np.abs(np.abs(prof.f_w) - np.abs(st.w_hat))) < 1e-10
    # linear evolution has a time-constant profile
    prof0 = ev.extract_profile(st0, cache)
    assert np.max(np.abs(prof.data - prof0.data)) <= 1e-9
    # reconstruction returns the state
    back = ev.linear_evolve(cache, ev.StateField(grid, prof.data, 0.0), st.t)
    assert np.max(np.abs(back.data - st.data)) < 1e-9
    # t = 0 profile equals the state (to rounding of the projector sum)
    st_t0 = ev.StateField(grid, st0.data, 0.0)
    assert np.max(np.abs(ev.extract_profile(st_t0, cache).data
                         - st_t0.data)) < 1e-14


def test_extract_profile_warns_at_large_t(grid):
    model = ev.ModelSpec("pk_system", ev.Coefficients(), w_symbol=None)
    cache = spectra.build_symbol_cache(grid, model.matrices())
    st = bump_state(grid, 3, 1.0)
    st.t = 60.0
    with pytest.warns(UserWarning):
        ev.extract_profile(st, cache)


def test_wave_profile_unitary(grid):
    st = bump_state(grid, 3, 1.0)
    st.t = 7.0
    fw = ev.wave_profile(st)
    assert np.max(np.abs(np.abs(fw) - np.abs(st.w_hat))) < 1e-13


def test_frequency_split(grid):
    st = bump_state(grid, 3, 1.0)
    low, high = ev.frequency_split(st, 0.25)
    assert np.array_equal(low.data + high.data, st.data)
    # mode counts match the lattice geometry
    n_low = int(np.sum(grid.xi_norm <= 0.25))
    assert np.sum(np.any(low.data != 0, axis=0)
                  | ~(grid.xi_norm <= 0.25)) >= 0  # structural sanity
    assert np.all((low.data != 0).any(axis=0) <= (grid.xi_norm <= 0.25))
    # splitting at the Nyquist scale keeps everything in the low part
    low2, high2 = ev.frequency_split(st, 100.0)
    assert np.max(np.abs(high2.data)) == 0.0
    # idempotence
    low3, _ = ev.frequency_split(low, 0.25)
    assert np.array_equal(low3.data, low.data)


def test_high_frequency_exponential_decay(grid):
    # |xi| > a content of the dissipative pair decays at a fitted
    # exponential rate bounded below (conservative floor)
    model = ev.ModelSpec("k_system", ev.Coefficients())
    st0 = bump_state(grid, 2, 1.0, widths=[0.8, 0.8])
    cache = spectra.build_symbol_cache(grid, model.matrices())
    ts = np.arange(1.0, 21.0, 1.0)
    vals = []
    for t in ts:
        st = ev.linear_evolve(cache, st0.copy(), t)
        _, high = ev.frequency_split(st, 0.25)
        vals.append(norms.total_sobolev(grid, high.data, 0))
    rate, _ = norms.fit_exponential_rate(ts, np.asarray(vals), (1.0, 20.0))
    assert rate >= 0.05


def test_profile_derivative_series_vanishes_for_linear_flow(grid):
    # the wave profile is time-constant under the free flow, so the
    # finite-difference diagnostic is zero there and nonzero with a source
    st = bump_state(grid, 3, 1.0)
    times = np.array([1.0, 2.0, 3.0])
    profiles = []
    for t in times:
        evolved = ev.StateField(
            grid, st.data * np.exp(-1j * grid.xi_norm * (t - 1.0)), t)
        profiles.append(ev.wave_profile(evolved))
    mids, vals = ev.profile_derivative_series(grid, times, profiles)
    assert mids.tolist() == [1.5, 2.5]
    assert np.max(vals) < 1e-12
    profiles[1] = profiles[1] + 1e-3
    _, vals = ev.profile_derivative_series(grid, times, profiles)
    assert np.min(vals) > 0


def test_checkpoint_roundtrip(tmp_path, grid):
    st = bump_state(grid, 3, 0.3)
    st.t = 4.5
    path = tmp_path / "state.npz"
    ev.save_checkpoint(st, path)
    loaded = ev.load_checkpoint(path)
    assert loaded.t == st.t
    assert loaded.grid.n == grid.n and loaded.grid.length == grid.length
    assert np.array_equal(loaded.data, st.data)
