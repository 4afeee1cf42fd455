"""Time integration of the model systems in spectral form.

The linear part is advanced exactly through the per-mode matrix exponential
(integrating factor); only the quadratic sources see explicit Runge-Kutta
stages (Lawson schemes of order 2 and 4).  Polynomial sources are formed by
physical-space products, the bilinear pseudoproduct source through
pseudoproduct.apply; everything is dealiased with the strict 2/3 rule.

Initial time is t = 1 by convention and all decay fits start there.

Physical-space realness is not an invariant of these models: the convection
symbol -i|xi| A is even in xi, so the flow maps conjugate-symmetric spectral
data to data that is merely smooth, and the physical fields are genuinely
complex for t > 1.  Initial data is real; no reality projection is applied
during stepping (it would replace the half-wave factor e^{-i|xi| dt} by
cos(|xi| dt) per step and destroy the wave invariants).
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import norms, pseudoproduct, spectra
from .errors import StepRejected
from .grid import SpectralGrid

T_INITIAL = 1.0
BLOWUP_FACTOR = 1e3
PROFILE_PRECISION_GUARD = 40.0   # warn when t * spectral gap exceeds this

MODEL_KINDS = ("pk_system", "k_system", "pk_system_w")
COUPLINGS = ("uw", "vw_in_v", "vw_in_u", "vw_in_w")


@dataclass
class Coefficients:
    a_u: float = 0.0
    b_u: float = 0.0
    c_u: float = 0.0
    a_v: float = 0.0
    b_v: float = 0.0
    c_v: float = 0.0
    d_v: float = 0.0    # coefficient of the mixed u/v-w coupling term

    def as_dict(self):
        return {k: getattr(self, k) for k in
                ("a_u", "b_u", "c_u", "a_v", "b_v", "c_v", "d_v")}


@dataclass
class ModelSpec:
    """kind selects the system; coupling selects where the mixed term sits.

    pk_system:    quadratic u/v sources plus one mixed coupling term
                  (uw or vw in the v-equation, or vw in the u-equation)
                  and a pseudoproduct source T_m(w, w) in the w-equation.
    k_system:     the 2-component dissipative block with general quadratic
                  sources; w_symbol, d_v and coupling are ignored.
    pk_system_w:  sources fixed to (v^2, v^2, vw + T_m(w, w)) with unit
                  coefficients; the coupling lives in the w-equation.
    """
    kind: str
    coefficients: Coefficients = field(default_factory=Coefficients)
    w_symbol: object = None
    coupling: str = "uw"

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.coupling not in COUPLINGS:
            raise ValueError(f"unknown coupling {self.coupling!r}")
        if self.kind == "pk_system_w":
            self.coupling = "vw_in_w"
            self.coefficients = Coefficients(a_u=0.0, b_u=1.0, c_u=0.0,
                                             a_v=0.0, b_v=1.0, c_v=0.0,
                                             d_v=1.0)
        if self.kind == "pk_system" and self.coupling == "vw_in_w":
            raise ValueError("pk_system places the coupling in the u/v block")
        # pk_system with w_symbol=None is the linearized/decoupled variant
        if self.kind == "pk_system_w" and self.w_symbol is None:
            raise ValueError("pk_system_w needs a w_symbol")

    @property
    def dim_state(self):
        return 2 if self.kind == "k_system" else 3

    def matrices(self):
        if self.dim_state == 2:
            return spectra.two_component_model()
        return spectra.three_component_model()


@dataclass
class StateField:
    """Spectral state (u_hat, v_hat[, w_hat]) stacked as data[(d, *shape)]."""
    grid: SpectralGrid
    data: np.ndarray
    t: float

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.shape[1:] != self.grid.shape:
            raise ValueError("field shape does not match grid")

    @property
    def dim_state(self):
        return self.data.shape[0]

    @property
    def u_hat(self):
        return self.data[0]

    @property
    def v_hat(self):
        return self.data[1]

    @property
    def w_hat(self):
        if self.dim_state < 3:
            raise AttributeError("2-component state has no w")
        return self.data[2]

    def copy(self):
        return StateField(self.grid, self.data.copy(), self.t)

    def dealias(self):
        self.data = self.data * self.grid.dealias_mask
        return self

    def physical(self, component):
        return self.grid.to_physical(self.data[component])

    def conjugate_symmetry_defect(self):
        return max(self.grid.conjugate_symmetry_defect(self.data[i])
                   for i in range(self.dim_state))


def zero_state(grid, dim_state, t=T_INITIAL):
    return StateField(grid, np.zeros((dim_state,) + grid.shape, complex), t)


# ---------------------------------------------------------------------------
# quadratic sources
# ---------------------------------------------------------------------------

def rhs(model, state, plan=None):
    """Spectral quadratic source of the model; the linear part is excluded
    (it is advanced exactly by the integrating factor)."""
    g = state.grid
    c = model.coefficients
    d = model.dim_state
    out = np.zeros((d,) + g.shape, dtype=complex)

    u = g.to_physical(state.data[0])
    v = g.to_physical(state.data[1])
    w = g.to_physical(state.data[2]) if d == 3 else None

    def spec(prod):
        return g.dealias(g.to_spectral(prod))

    uu = spec(u * u) if (c.a_u or c.a_v) else 0.0
    vv = spec(v * v) if (c.b_u or c.b_v) else 0.0
    uv = spec(u * v) if (c.c_u or c.c_v) else 0.0

    out[0] = c.a_u * uu + c.b_u * vv + c.c_u * uv
    out[1] = c.a_v * uu + c.b_v * vv + c.c_v * uv

    if d == 3:
        if c.d_v:
            if model.coupling == "uw":
                out[1] += c.d_v * spec(u * w)
            elif model.coupling == "vw_in_v":
                out[1] += c.d_v * spec(v * w)
            elif model.coupling == "vw_in_u":
                out[0] += c.d_v * spec(v * w)
            elif model.coupling == "vw_in_w":
                out[2] += c.d_v * spec(v * w)
        if model.w_symbol is not None:
            if plan is None:
                plan = pseudoproduct.PseudoproductPlan(g, model.w_symbol)
            out[2] += pseudoproduct.apply(plan, state.data[2], state.data[2])
    return out


# ---------------------------------------------------------------------------
# stepping
# ---------------------------------------------------------------------------

@dataclass
class BlowupGuard:
    """Aborts a run when the total H^N norm exceeds a multiple of its
    initial value; a tripped guard means the simulation diverged, not that
    the method failed."""
    limit: float
    sobolev_n: int = 3

    @staticmethod
    def for_state(state, sobolev_n=3, factor=BLOWUP_FACTOR):
        n0 = norms.total_sobolev(state.grid, state.data, sobolev_n)
        return BlowupGuard(limit=factor * max(n0, 1e-300), sobolev_n=sobolev_n)

    def check(self, state):
        val = norms.total_sobolev(state.grid, state.data, self.sobolev_n)
        if not np.isfinite(val) or val > self.limit:
            raise StepRejected(state.t, val, self.limit)


class Stepper:
    """Integrating-factor Runge-Kutta stepper with frozen step size."""

    def __init__(self, model, grid, dt, scheme="ifrk2", plan=None):
        if scheme not in ("ifrk2", "ifrk4"):
            raise ValueError(f"unknown scheme {scheme!r}")
        self.model = model
        self.grid = grid
        self.dt = float(dt)
        self.scheme = scheme
        self.cache = spectra.build_symbol_cache(grid, model.matrices())
        self.G_full = spectra.green_function(self.cache, self.dt)
        self.G_half = (spectra.green_function(self.cache, self.dt / 2.0)
                       if scheme == "ifrk4" else None)
        if plan is None and model.dim_state == 3 and model.w_symbol is not None:
            plan = pseudoproduct.PseudoproductPlan(grid, model.w_symbol)
        self.plan = plan

    def _lin(self, G, flat):
        return spectra.propagator_apply(G, flat)

    def _rhs(self, flat, t):
        state = StateField(self.grid, flat.reshape(
            (self.model.dim_state,) + self.grid.shape), t)
        return rhs(self.model, state, self.plan).reshape(flat.shape)

    def step(self, state, guard=None):
        h = self.dt
        d = self.model.dim_state
        flat = state.data.reshape(d, -1)
        t = state.t

        if self.scheme == "ifrk2":
            n1 = self._rhs(flat, t)
            pred = self._lin(self.G_full, flat + h * n1)
            n2 = self._rhs(pred, t + h)
            new = self._lin(self.G_full, flat + 0.5 * h * n1) + 0.5 * h * n2
        else:
            e1, eh = self.G_full, self.G_half
            n1 = self._rhs(flat, t)
            ua = self._lin(eh, flat + 0.5 * h * n1)
            n2 = self._rhs(ua, t + 0.5 * h)
            ub = self._lin(eh, flat) + 0.5 * h * n2
            n3 = self._rhs(ub, t + 0.5 * h)
            uc = self._lin(e1, flat) + h * self._lin(eh, n3)
            n4 = self._rhs(uc, t + h)
            new = (self._lin(e1, flat + h / 6.0 * n1)
                   + h / 6.0 * (2.0 * self._lin(eh, n2 + n3) + n4))

        out = StateField(self.grid, new.reshape(state.data.shape), t + h)
        out.dealias()
        if guard is not None:
            guard.check(out)
        return out


def step(model, state, dt, scheme="ifrk2", guard=None, plan=None):
    """One-shot step; for many steps build a Stepper once and reuse it."""
    return Stepper(model, state.grid, dt, scheme, plan).step(state, guard)


def default_dt(grid):
    """CFL-like default on the sources only; the linear flow is exact."""
    return 0.5 * grid.dx


def linear_evolve(cache, state, t_target):
    """Exact linear flow exp(E (t_target - t)) applied per mode."""
    dt = t_target - state.t
    if dt < 0:
        raise ValueError("linear_evolve does not run backwards")
    G = spectra.green_function(cache, dt)
    d = state.dim_state
    flat = spectra.propagator_apply(G, state.data.reshape(d, -1))
    return StateField(state.grid, flat.reshape(state.data.shape), t_target)


# ---------------------------------------------------------------------------
# profiles and frequency splitting
# ---------------------------------------------------------------------------

@dataclass
class Profile:
    """State with the linear flow removed: f_hat = exp(-E(i xi) t) U_hat."""
    grid: SpectralGrid
    data: np.ndarray
    t: float

    @property
    def f_u(self):
        return self.data[0]

    @property
    def f_v(self):
        return self.data[1]

    @property
    def f_w(self):
        return self.data[2]


def extract_profile(state, cache):
    """exp(-E t) U_hat per mode.  The inverse flow amplifies the damped
    eigendirection like e^{t}, so precision degrades for large t; a warning
    is emitted past t * gap = 40 where the amplification reaches e^40."""
    t = state.t
    gap = float(np.max(np.abs(np.real(cache.eigvals))))
    if t * gap > PROFILE_PRECISION_GUARD:
        warnings.warn(
            f"profile extraction at t={t:.3g} amplifies by e^{t * gap:.3g}; "
            "expect severe cancellation", stacklevel=2)
    phase = np.exp(-cache.eigvals * t)
    inv = np.einsum("km,kmij->mij", phase, cache.projectors)
    if cache.degenerate_mask.any():
        for i in np.nonzero(cache.degenerate_mask)[0]:
            inv[i] = scipy.linalg.expm(-cache.E[i] * t)
    flat = spectra.propagator_apply(inv, state.data.reshape(state.dim_state, -1))
    return Profile(state.grid, flat.reshape(state.data.shape), t)


def wave_profile(state):
    """f_w = e^{+i|xi| t} w_hat: the unitary profile of the wave component
    (no amplification, safe at any t)."""
    g = state.grid
    return np.exp(1j * g.xi_norm * state.t) * state.w_hat


def profile_derivative_series(grid, times, profiles):
    """Optional finite-difference diagnostic: L^2 norms of d/dt f_w sampled
    midway between profile snapshots.  Not an acceptance quantity."""
    from . import norms
    times = np.asarray(times, dtype=float)
    mids, vals = [], []
    for i in range(len(times) - 1):
        dt = times[i + 1] - times[i]
        diff = (profiles[i + 1] - profiles[i]) / dt
        mids.append(0.5 * (times[i] + times[i + 1]))
        vals.append(norms.l2_norm(grid, diff))
    return np.asarray(mids), np.asarray(vals)


def frequency_split(state, cutoff):
    """Sharp spectral splitting at |xi| = cutoff; low + high == state."""
    if not 0.0 < cutoff:
        raise ValueError("cutoff must be positive")
    mask = state.grid.xi_norm <= cutoff
    low = StateField(state.grid, state.data * mask, state.t)
    high = StateField(state.grid, state.data * (~mask), state.t)
    return low, high


# ---------------------------------------------------------------------------
# checkpoints
# ---------------------------------------------------------------------------

CHECKPOINT_VERSION = 1


def save_checkpoint(state, path):
    """Self-describing npz dump: version, grid metadata, t, coefficients."""
    np.savez(path, version=CHECKPOINT_VERSION, n=state.grid.n,
             length=state.grid.length, ndim=state.grid.ndim,
             dim_state=state.dim_state, t=state.t, coefficients=state.data)


def load_checkpoint(path):
    with np.load(path) as z:
        if int(z["version"]) != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {z['version']}")
        grid = SpectralGrid(int(z["n"]), float(z["length"]), int(z["ndim"]))
        return StateField(grid, z["coefficients"], float(z["t"]))
