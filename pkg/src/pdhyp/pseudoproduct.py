"""Bilinear pseudoproduct T_m(f, g) on a spectral grid.

The operator acts on spectral scalar fields as

    h_hat(xi_k) = sum_j m(xi_k, eta_j) f_hat[(k - j) mod n] g_hat[j] * d_eta,

a Riemann sum of the continuum pseudoproduct integral (the grid's transform
convention makes m = 1 reduce exactly to a pointwise product in physical
space).  Two strategies:

  * direct_sum: the full O(n_out * n^d) mode convolution, chunk-tiled over
    output modes and optionally threaded; works for any symbol but refuses
    jobs above a term-evaluation cap.
  * separable_fft: for symbols with a factorization m = sum_k alpha_k(xi)
    beta_k(xi - eta) gamma_k(eta), each term costs three transforms.

With the strict 2/3-rule mask (|component| <= (n-1)//3) no aliased
interaction can land on a kept mode, so the two strategies agree to
rounding on dealiased fields.
"""

import os
import concurrent.futures
from dataclasses import dataclass

import numpy as np

from .bounds import default_ledger
from .errors import (CostCapExceeded, ExponentMismatch, GridMismatch,
                     StrategyUnavailable)
from . import propagators

TERM_CAP = int(2e9)
_ZERO = 0


def worker_count():
    try:
        return max(1, int(os.environ.get("PDHYP_WORKERS", "1")))
    except ValueError:
        return 1


@dataclass
class PseudoproductPlan:
    grid: object
    symbol: object
    strategy: str = "auto"     # auto | direct_sum | separable_fft
    dealias: bool = True

    def __post_init__(self):
        if self.strategy not in ("auto", "direct_sum", "separable_fft"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.strategy == "separable_fft" and not self.symbol.separable_terms:
            raise StrategyUnavailable(
                f"symbol {self.symbol.name!r} has no separable factorization")

    def resolved_strategy(self):
        if self.strategy != "auto":
            return self.strategy
        return "separable_fft" if self.symbol.separable_terms else "direct_sum"


def apply(plan, fhat, ghat, workers=None):
    """T_m(f, g) in spectral form; inputs and output on plan.grid."""
    grid = plan.grid
    if fhat.shape != grid.shape or ghat.shape != grid.shape:
        raise GridMismatch("field shapes do not match the plan grid")
    fh = grid.dealias(fhat) if plan.dealias else fhat.astype(complex)
    gh = grid.dealias(ghat) if plan.dealias else ghat.astype(complex)
    if plan.symbol.singular:
        # the singular lattice points {xi=0}u{eta=0}u{xi-eta=0} contribute 0
        fh = fh.copy()
        gh = gh.copy()
        fh[(_ZERO,) * grid.ndim] = 0.0
        gh[(_ZERO,) * grid.ndim] = 0.0

    strategy = plan.resolved_strategy()
    if strategy == "separable_fft":
        out = _apply_separable(plan, fh, gh)
    else:
        out = _apply_direct(plan, fh, gh, workers)

    if plan.symbol.singular:
        out[(_ZERO,) * grid.ndim] = 0.0
    if plan.dealias:
        out = grid.dealias(out)
    return out


def _apply_separable(plan, fh, gh):
    grid = plan.grid
    out = np.zeros(grid.shape, dtype=complex)
    for alpha, beta, gamma in plan.symbol.separable_terms:
        bf = grid.to_physical(beta(grid.xi) * fh)
        cg = grid.to_physical(gamma(grid.xi) * gh)
        out += alpha(grid.xi) * grid.to_spectral(bf * cg)
    return out


def _apply_direct(plan, fh, gh, workers=None):
    grid = plan.grid
    n, d = grid.n, grid.ndim
    eta_flat = grid.xi.reshape(-1, d)
    gh_flat = gh.reshape(-1)

    if plan.dealias:
        out_idx = np.argwhere(grid.dealias_mask)
    else:
        out_idx = np.argwhere(np.ones(grid.shape, dtype=bool))
    n_terms = out_idx.shape[0] * gh_flat.size
    if n_terms > TERM_CAP:
        raise CostCapExceeded(
            f"direct sum needs {n_terms:.3g} term evaluations "
            f"(cap {TERM_CAP:.3g}); use a separable symbol or a smaller grid")

    # doubled copy of f_hat(-xi): contiguous slices give f_hat[(k-j) mod n]
    frev = grid.reflect(fh)
    f2 = frev
    for ax in range(d):
        f2 = np.concatenate([f2, f2], axis=ax)

    symbol = plan.symbol
    dk = grid.dk
    out = np.zeros(grid.shape, dtype=complex)

    def run_chunk(rows):
        for k in rows:
            xi_k = dk * np.array([grid.k_int[i] for i in k], dtype=float)
            sl = tuple(slice(n - i, 2 * n - i) for i in k)
            mvals = symbol(xi_k, eta_flat)
            out[tuple(k)] = np.sum(mvals * f2[sl].reshape(-1) * gh_flat)

    nw = workers if workers is not None else worker_count()
    if nw <= 1:
        run_chunk(out_idx)
    else:
        chunks = np.array_split(out_idx, nw)
        with concurrent.futures.ThreadPoolExecutor(max_workers=nw) as pool:
            list(pool.map(run_chunk, chunks))
    return out * grid.d_eta


def holder_bound_ratio(plan, fhat, ghat, s, k, p, q, r, ledger=None):
    """Empirical constant of the bilinear Hoelder-type estimate

        ||Lam^k T_m(f, g)||_{L^r}
        -----------------------------------------------------------
        ||f||_{W^{s+k,p}} ||g||_{L^q} + ||f||_{L^p} ||g||_{W^{s+k,q}}

    with 1/r = 1/p + 1/q and s the symbol degree; the ratio is recorded
    into the bound ledger.  Zero fields return 0 by convention.
    """
    if abs(1.0 / r - 1.0 / p - 1.0 / q) > 1e-12:
        raise ExponentMismatch(f"1/r != 1/p + 1/q for p={p}, q={q}, r={r}")
    if abs(plan.symbol.degree - s) > 1e-12:
        raise ExponentMismatch(
            f"symbol degree {plan.symbol.degree} != declared s={s}")
    grid = plan.grid
    if not np.any(fhat) or not np.any(ghat):
        return 0.0
    t = apply(plan, fhat, ghat)
    if k != 0:
        t = propagators.apply_multiplier(
            propagators.MultiplierSpec.lambda_power(k), grid, t)
    num = propagators.lp_norm(grid, t, r)
    den = (propagators.sobolev_w_norm(grid, fhat, s + k, p)
           * propagators.lp_norm(grid, ghat, q)
           + propagators.lp_norm(grid, fhat, p)
           * propagators.sobolev_w_norm(grid, ghat, s + k, q))
    ratio = num / den
    (ledger or default_ledger).record(
        "holder", ratio, symbol=plan.symbol.name, s=s, k=k, p=p, q=q, r=r,
        n=grid.n)
    return ratio
