"""Norms of the decay bootstrap: Sobolev, L^inf, weighted profile norms,
the running-supremum functional M0, and power-law fitting.

Spectral Sobolev norms use the documented Parseval normalization

    ||f||_{L^2}^2 = (2 pi)^d * sum_k |f_hat_k|^2 * (2 pi / L)^d,

which makes sobolev(0) agree with the physical-space L^2 quadrature to
rounding.  Coordinate weights are applied in physical space, centered at
the box center.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import MissingSeries, NonPositiveValues
from .propagators import MultiplierSpec, apply_multiplier

SOBOLEV_N = 3          # smallest integer admissible for the paper's N > 5/2
EPSILON = 0.01         # the "arbitrarily small" weight offsets, fixed
GAMMA = 0.05
DELTA = 0.05
M0_BOUND_C = 5.0       # verdict threshold for M0(t) <= C * E_N


# ---------------------------------------------------------------------------
# scalar-field norms
# ---------------------------------------------------------------------------

def parseval_factor(grid):
    return (2.0 * np.pi) ** grid.ndim


def sobolev_norm(grid, fhat, order):
    w = (1.0 + grid.xi_norm ** 2) ** order
    val = parseval_factor(grid) * np.sum(w * np.abs(fhat) ** 2) * grid.d_eta
    return float(np.sqrt(val))


def l2_norm(grid, fhat):
    return sobolev_norm(grid, fhat, 0)


def l1_norm(grid, fhat):
    f = grid.to_physical(fhat)
    return float(np.sum(np.abs(f)) * grid.dx ** grid.ndim)


def linf_norm(grid, fhat):
    return float(np.max(np.abs(grid.to_physical(fhat))))


def riesz_linf_norm(grid, fhat):
    """max_j |R_j f|_inf (the paper's R carries no index; the max dominates
    every component choice)."""
    return max(linf_norm(grid, apply_multiplier(MultiplierSpec.riesz(j),
                                                grid, fhat))
               for j in range(grid.ndim))


def total_sobolev(grid, data, order):
    return float(np.sqrt(sum(sobolev_norm(grid, comp, order) ** 2
                             for comp in data)))


# -- coordinate-weighted norms (physical-space weights) ---------------------

def weighted_x_l2(grid, fhat):
    """||x f||_{L^2} = (integral |x - c|^2 |f|^2 dx)^(1/2)."""
    f = grid.to_physical(fhat)
    val = np.sum(grid.r2_centered * np.abs(f) ** 2) * grid.dx ** grid.ndim
    return float(np.sqrt(val))


def weighted_x_sobolev(grid, fhat, order):
    """(sum_j ||x_j f||_{H^order}^2)^(1/2), weights centered at the box."""
    f = grid.to_physical(fhat)
    total = 0.0
    for ax in grid.x_centered:
        comp = grid.to_spectral(ax * f)
        total += sobolev_norm(grid, comp, order) ** 2
    return float(np.sqrt(total))


def weighted_lambda_x_h1(grid, fhat):
    """||Lam x f||_{H^1} with the weight applied first."""
    f = grid.to_physical(fhat)
    total = 0.0
    for ax in grid.x_centered:
        comp = grid.to_spectral(ax * f)
        lam = apply_multiplier(MultiplierSpec.lambda_power(1), grid, comp)
        total += sobolev_norm(grid, lam, 1) ** 2
    return float(np.sqrt(total))


def weighted_x2_lambda_h1(grid, fhat):
    """|| |x|^2 Lam f ||_{H^1}: Lam applied spectrally, then the |x - c|^2
    weight, then the H^1 norm."""
    lam = apply_multiplier(MultiplierSpec.lambda_power(1), grid, fhat)
    weighted = grid.to_spectral(grid.r2_centered * grid.to_physical(lam))
    return sobolev_norm(grid, weighted, 1)


def weighted_lambda_x2_sobolev(grid, fhat, order):
    """||Lam (|x|^2 f)||_{H^order} (the initial-data flavour of the
    second-moment norm)."""
    weighted = grid.to_spectral(grid.r2_centered * grid.to_physical(fhat))
    lam = apply_multiplier(MultiplierSpec.lambda_power(1), grid, weighted)
    return sobolev_norm(grid, lam, order)


# ---------------------------------------------------------------------------
# norm specs over states
# ---------------------------------------------------------------------------

NORM_KINDS = ("sobolev", "linf", "linf_riesz", "weighted_x_l2",
              "weighted_lambda_x_h1", "weighted_x2_lambda_h1", "l1")
COMPONENTS = {"u": 0, "v": 1, "w": 2, "profile_w": None}
_WEIGHTED = {"weighted_x_l2", "weighted_lambda_x_h1", "weighted_x2_lambda_h1"}


@dataclass(frozen=True)
class NormSpec:
    kind: str
    component: str
    order: int = SOBOLEV_N

    def __post_init__(self):
        if self.kind not in NORM_KINDS:
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.component not in COMPONENTS:
            raise ValueError(f"unknown component {self.component!r}")
        if self.kind in _WEIGHTED and self.component != "profile_w":
            raise ValueError(f"{self.kind} applies only to profile_w")

    @property
    def name(self):
        return f"{self.component}_{self.kind}"


def evaluate_norm(spec, state, profile_w=None):
    grid = state.grid
    if spec.component == "profile_w":
        if profile_w is None:
            raise ValueError("profile_w norms need the wave profile")
        fhat = profile_w
    else:
        fhat = state.data[COMPONENTS[spec.component]]
    if spec.kind == "sobolev":
        return sobolev_norm(grid, fhat, spec.order)
    if spec.kind == "linf":
        return linf_norm(grid, fhat)
    if spec.kind == "linf_riesz":
        return riesz_linf_norm(grid, fhat)
    if spec.kind == "l1":
        return l1_norm(grid, fhat)
    if spec.kind == "weighted_x_l2":
        return weighted_x_l2(grid, fhat)
    if spec.kind == "weighted_lambda_x_h1":
        return weighted_lambda_x_h1(grid, fhat)
    if spec.kind == "weighted_x2_lambda_h1":
        return weighted_x2_lambda_h1(grid, fhat)
    raise ValueError(spec.kind)


def initial_energy(state, order=SOBOLEV_N):
    """E_N = max{ ||U||_{L^1},
                  ||x U||_{H^2} + ||Lam x^2 U||_{H^1} + ||U||_{H^N} },
    components aggregated by summation."""
    g = state.grid
    l1 = sum(l1_norm(g, comp) for comp in state.data)
    weighted = sum(weighted_x_sobolev(g, comp, 2) for comp in state.data)
    weighted += sum(weighted_lambda_x2_sobolev(g, comp, 1)
                    for comp in state.data)
    hn = sum(sobolev_norm(g, comp, order) for comp in state.data)
    return float(max(l1, weighted + hn))


# ---------------------------------------------------------------------------
# decay series and fitting
# ---------------------------------------------------------------------------

@dataclass
class DecaySeries:
    name: str
    times: np.ndarray
    values: np.ndarray
    fit_window: tuple = None
    fitted_exponent: float = None
    fit_residual: float = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.ndim != 1 or self.times.shape != self.values.shape:
            raise ValueError("times and values must be matching 1-d arrays")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("sample times must be strictly increasing")

    def fit(self, window=None):
        window = window or self.fit_window
        exponent, residual = fit_decay(self.times, self.values, window)
        self.fit_window = window
        self.fitted_exponent = exponent
        self.fit_residual = residual
        return exponent, residual


def _window_mask(times, window):
    lo, hi = window
    mask = (times >= lo) & (times <= hi)
    if mask.sum() < 8:
        raise ValueError(
            f"need >= 8 samples in window [{lo}, {hi}], have {mask.sum()}")
    return mask


def fit_decay(times, values, window):
    """OLS slope of log(value) against log(t); residual is the RMS misfit."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    mask = _window_mask(times, window)
    v = values[mask]
    if np.any(v <= 0):
        raise NonPositiveValues("series has values <= 0 inside the window")
    x = np.log(times[mask])
    y = np.log(v)
    A = np.vstack([x, np.ones_like(x)]).T
    sol, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.sqrt(np.mean((A @ sol - y) ** 2)))
    return float(sol[0]), resid


def fit_exponential_rate(times, values, window):
    """OLS slope of log(value) against t; returns (rate, residual) with the
    convention value ~ e^{-rate t}."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    mask = _window_mask(times, window)
    v = values[mask]
    if np.any(v <= 0):
        raise NonPositiveValues("series has values <= 0 inside the window")
    x = times[mask]
    y = np.log(v)
    A = np.vstack([x, np.ones_like(x)]).T
    sol, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.sqrt(np.mean((A @ sol - y) ** 2)))
    return float(-sol[0]), resid


def default_fit_window(t_max):
    return (0.25 * t_max, 0.9 * t_max)


# ---------------------------------------------------------------------------
# the bootstrap functional M0
# ---------------------------------------------------------------------------

# (series name, weight exponent p in t^p)
_W_TERMS = (("w_sobolev", -EPSILON), ("w_linf", 1.0), ("w_linf_riesz", 1.0),
            ("profile_w_weighted_x_l2", -GAMMA),
            ("profile_w_weighted_lambda_x_h1", 0.0),
            ("profile_w_weighted_x2_lambda_h1", -1.0))

M0_WEIGHTS = {
    "pk_system": (("u_sobolev", 0.75), ("v_sobolev", 0.75 - EPSILON),
                  ("u_linf", 1.5 - 2 * EPSILON), ("v_linf", 0.75 - EPSILON))
                 + _W_TERMS,
    "pk_system_w": (("u_sobolev", 0.75), ("v_sobolev", 1.25),
                    ("u_linf", 1.5), ("v_linf", 2.5)) + _W_TERMS,
    # the 2-component functional uses max{1, t^p} weights
    "k_system": (("u_sobolev", 0.75), ("v_sobolev", 1.25)),
}


@dataclass
class BootstrapReport:
    model_kind: str
    times: np.ndarray
    m0: np.ndarray          # running supremum, nondecreasing
    e_n: float
    fitted_c: float
    bounded: bool

    def as_dict(self):
        return {"model_kind": self.model_kind,
                "times": self.times.tolist(),
                "m0": self.m0.tolist(),
                "e_n": self.e_n,
                "fitted_c": self.fitted_c,
                "bounded": bool(self.bounded)}


def m0_functional(model_kind, series, e_n, c_max=M0_BOUND_C):
    """Running supremum of the model's weighted norm sum.

    series maps series names to (times, values); all constituents must share
    one time grid with t >= 1.  The verdict compares sup M0 against
    c_max * E_N with the fitted constant reported.
    """
    if model_kind not in M0_WEIGHTS:
        raise ValueError(f"unknown model kind {model_kind!r}")
    weights = M0_WEIGHTS[model_kind]
    times = None
    total = None
    for name, p in weights:
        if name not in series:
            raise MissingSeries(f"M0 for {model_kind} needs series {name!r}")
        t, v = series[name]
        t = np.asarray(t, dtype=float)
        v = np.asarray(v, dtype=float)
        if times is None:
            times = t
            total = np.zeros_like(v)
        elif t.shape != times.shape or not np.allclose(t, times):
            raise MissingSeries(f"series {name!r} is on a different time grid")
        w = np.maximum(1.0, times ** p) if model_kind == "k_system" \
            else times ** p
        total = total + w * v
    m0 = np.maximum.accumulate(total)
    fitted_c = float(np.max(m0) / e_n) if e_n > 0 else np.inf
    return BootstrapReport(model_kind=model_kind, times=times, m0=m0,
                           e_n=e_n, fitted_c=fitted_c,
                           bounded=bool(fitted_c <= c_max))


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

def write_series_csv(path, series):
    """CSV with columns t, norm_name, value; deterministic float formatting."""
    names = list(series.keys())
    with open(path, "w") as fh:
        fh.write("t,norm_name,value\n")
        for name in names:
            t, v = series[name]
            for ti, vi in zip(t, v):
                fh.write(f"{float(ti)!r},{name},{float(vi)!r}\n")


def write_json_report(path, report):
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
