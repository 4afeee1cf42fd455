"""Linear operator of the model systems: eigenstructure, Green function,
and the Shizuta-Kawashima coupling checker.

The models couple a symmetric convection part with symbol -i|xi|*A to a
negative-semidefinite relaxation matrix B, so every per-mode operator is

    E(i xi) = -i|xi| A + B.

For the 2x2 dissipative block the eigenvalues are

    lam_1 = -1/2 + sqrt(1 - 4|xi|^2)/2,   lam_2 = -1/2 - sqrt(1 - 4|xi|^2)/2,

with the principal branch of the square root, so that for |xi| > 1/2 the
pair continues to -1/2 +- i sqrt(4|xi|^2 - 1)/2.  The third (transported)
component is decoupled with lam_3 = -i|xi|.  The two branch eigenvalues
coalesce at |xi| = 1/2 where the projectors blow up; a band of width
DEGENERATE_BAND around it is handled by a direct matrix exponential.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DegenerateSpectrum, OutOfBand

DEGENERATE_BAND = 1e-3      # half-width of the excluded band around |xi| = 1/2
LOW_FREQ_CUTOFF = 0.25      # band |xi| <= a for the Green-function splitting
_KERNEL_RTOL = 1e-10


@dataclass(frozen=True)
class ModelMatrices:
    """Symmetric convection matrix A and relaxation matrix B."""
    A: np.ndarray
    B: np.ndarray
    dim_state: int

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        B = np.asarray(self.B, dtype=float)
        d = self.dim_state
        if A.shape != (d, d) or B.shape != (d, d):
            raise ValueError("matrix shapes must match dim_state")
        if not np.allclose(A, A.T):
            raise ValueError("A must be symmetric")
        if not np.allclose(B, B.T):
            raise ValueError("B must be symmetric")
        if np.any(np.linalg.eigvalsh(B) > 1e-12):
            raise ValueError("B must be negative semidefinite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)


def three_component_model():
    """Dissipative (u, v) pair plus a transported w; violates [SK]."""
    A = np.array([[0.0, 1.0, 0.0],
                  [1.0, 0.0, 0.0],
                  [0.0, 0.0, 1.0]])
    B = np.diag([0.0, -1.0, 0.0])
    return ModelMatrices(A, B, 3)


def two_component_model():
    """The (u, v) dissipative block alone; satisfies [SK]."""
    A = np.array([[0.0, 1.0],
                  [1.0, 0.0]])
    B = np.diag([0.0, -1.0])
    return ModelMatrices(A, B, 2)


def build_linear_symbol(model, xi):
    """E(i xi) = -i|xi| A + B for a single wavevector."""
    xi = np.asarray(xi, dtype=float)
    s = float(np.linalg.norm(xi))
    return -1j * s * model.A + model.B.astype(complex)


def _branch_eigvals(s):
    """Branch-ordered eigenvalues of the 2x2 dissipative block at |xi| = s."""
    disc = np.asarray(1.0 - 4.0 * np.asarray(s, dtype=float) ** 2, dtype=complex)
    root = np.sqrt(disc)   # principal branch: i*sqrt(4 s^2 - 1) past the branch point
    lam1 = 0.5 * (-1.0 + root)
    lam2 = 0.5 * (-1.0 - root)
    return lam1, lam2, root


def eigen_decompose(E):
    """Eigenvalues, eigenvectors and spectral projectors of a model symbol.

    Eigenvalues are ordered by their |xi| -> 0 limits: lam_1 -> 0,
    lam_2 -> -1 and (for 3x3 symbols) lam_3 = -i|xi|.  Projectors for the
    dissipative block come from the resolvent form (E - lam_j I)/(lam_i -
    lam_j), which makes completeness exact and idempotence hold to rounding.

    Raises DegenerateSpectrum inside the coalescence band ||xi| - 1/2| <
    DEGENERATE_BAND; callers must fall back to a direct matrix exponential
    there.
    """
    E = np.asarray(E, dtype=complex)
    d = E.shape[0]
    if E.shape != (d, d) or d not in (2, 3):
        raise ValueError("expected a 2x2 or 3x3 model symbol")
    s = abs(E[0, 1])
    if abs(s - 0.5) < DEGENERATE_BAND:
        raise DegenerateSpectrum(
            f"|xi|={s:.6g} within {DEGENERATE_BAND} of the branch point 1/2")

    lam1, lam2, root = _branch_eigvals(s)
    E2 = E[:2, :2]
    eye2 = np.eye(2)
    P1_2 = (E2 - lam2 * eye2) / (lam1 - lam2)
    P2_2 = (E2 - lam1 * eye2) / (lam2 - lam1)

    if s > 1e-14:
        V1_2 = np.array([1.0, 1j * lam1 / s])
        V2_2 = np.array([1.0, 1j * lam2 / s])
    else:
        V1_2 = np.array([1.0, 0.0], dtype=complex)
        V2_2 = np.array([0.0, 1.0], dtype=complex)

    if d == 2:
        eigvals = np.array([lam1, lam2])
        eigvecs = np.stack([V1_2, V2_2], axis=1)
        projectors = np.stack([P1_2, P2_2])
        return eigvals, eigvecs, projectors

    lam3 = E[2, 2]
    eigvals = np.array([lam1, lam2, lam3])
    eigvecs = np.zeros((3, 3), dtype=complex)
    eigvecs[:2, 0] = V1_2
    eigvecs[:2, 1] = V2_2
    eigvecs[2, 2] = 1.0
    projectors = np.zeros((3, 3, 3), dtype=complex)
    projectors[0, :2, :2] = P1_2
    projectors[1, :2, :2] = P2_2
    projectors[2, 2, 2] = 1.0
    return eigvals, eigvecs, projectors


@dataclass
class LinearSymbolCache:
    """Per-mode symbol data for a whole grid, flattened over modes.

    E:          (m, d, d) symbols -i|xi|A + B
    eigvals:    (3 or 2, m) branch-ordered eigenvalues
    projectors: (3 or 2, m, d, d) spectral projectors (garbage on the band)
    degenerate_mask: (m,) True where ||xi| - 1/2| < DEGENERATE_BAND
    """
    grid: object
    model: ModelMatrices
    E: np.ndarray
    eigvals: np.ndarray
    projectors: np.ndarray
    degenerate_mask: np.ndarray
    xi_norm: np.ndarray = field(repr=False, default=None)

    @property
    def dim_state(self):
        return self.model.dim_state


def build_symbol_cache(grid, model):
    """Vectorized closed-form eigenstructure over every grid mode."""
    return build_symbol_cache_from_norms(grid.xi_norm.reshape(-1), model,
                                         grid=grid)


def build_symbol_cache_from_norms(xi_norms, model, grid=None):
    """Cache over an arbitrary list of |xi| values (grid optional)."""
    s = np.asarray(xi_norms, dtype=float).reshape(-1)
    m = s.size
    d = model.dim_state

    E = (-1j * s)[:, None, None] * model.A[None, :, :] + model.B[None, :, :]

    lam1, lam2, root = _branch_eigvals(s)
    degenerate = np.abs(s - 0.5) < DEGENERATE_BAND
    safe_root = np.where(degenerate, 1.0, root)   # placeholder on the band

    # resolvent projectors of the 2x2 block: P1 = (E2 - lam2)/(lam1 - lam2)
    P1 = np.zeros((m, d, d), dtype=complex)
    P2 = np.zeros((m, d, d), dtype=complex)
    P1[:, 0, 0] = -lam2 / safe_root
    P1[:, 0, 1] = P1[:, 1, 0] = -1j * s / safe_root
    P1[:, 1, 1] = (-1.0 - lam2) / safe_root
    P2[:, 0, 0] = lam1 / safe_root
    P2[:, 0, 1] = P2[:, 1, 0] = 1j * s / safe_root
    P2[:, 1, 1] = (1.0 + lam1) / safe_root

    if d == 3:
        lam3 = -1j * s
        P3 = np.zeros((m, d, d), dtype=complex)
        P3[:, 2, 2] = 1.0
        eigvals = np.stack([lam1, lam2, lam3])
        projectors = np.stack([P1, P2, P3])
    else:
        eigvals = np.stack([lam1, lam2])
        projectors = np.stack([P1, P2])

    return LinearSymbolCache(grid=grid, model=model, E=E, eigvals=eigvals,
                             projectors=projectors, degenerate_mask=degenerate,
                             xi_norm=s)


def _expm_on_band(cache, t, out):
    idx = np.nonzero(cache.degenerate_mask)[0]
    for i in idx:
        out[i] = scipy.linalg.expm(cache.E[i] * t)
    return out


def green_function(cache, t):
    """exp(E(i xi) t) for every mode, shape (m, d, d).

    Off the degenerate band this is the spectral sum over e^{lam_i t} P_i;
    on the band a scaling-and-squaring matrix exponential is used instead.
    """
    if t < 0:
        raise ValueError("green_function requires t >= 0")
    phase = np.exp(cache.eigvals * t)            # (k, m)
    G = np.einsum("km,kmij->mij", phase, cache.projectors)
    if cache.degenerate_mask.any():
        _expm_on_band(cache, t, G)
    return G


def propagator_apply(G, data):
    """Apply per-mode matrices (m,d,d) to stacked fields (d, m)."""
    return np.einsum("mij,jm->im", G, data)


@dataclass
class GreenParts:
    """Low-frequency Green splitting: diffusive K, damped Kexp, wave W."""
    modes: np.ndarray        # flat mode indices the parts are evaluated on
    K: np.ndarray
    Kexp: np.ndarray
    W: np.ndarray            # None for 2-component models


def decompose_green(cache, t, modes=None, cutoff=LOW_FREQ_CUTOFF):
    """Split exp(E t) into e^{lam1 t}P1 + e^{lam2 t}P2 (+ e^{-i|xi|t}P3).

    Only defined on the low-frequency band |xi| <= cutoff; raises OutOfBand
    for any explicitly requested mode outside it.  Default: all band modes.
    """
    s = cache.xi_norm
    if modes is None:
        modes = np.nonzero(s <= cutoff)[0]
    else:
        modes = np.asarray(modes, dtype=np.int64).reshape(-1)
        bad = s[modes] > cutoff
        if bad.any():
            worst = float(np.max(s[modes][bad]))
            raise OutOfBand(f"|xi|={worst:.6g} exceeds cutoff a={cutoff}")
    phase = np.exp(cache.eigvals[:, modes] * t)
    K = phase[0][:, None, None] * cache.projectors[0, modes]
    Kexp = phase[1][:, None, None] * cache.projectors[1, modes]
    W = None
    if cache.dim_state == 3:
        W = phase[2][:, None, None] * cache.projectors[2, modes]
    return GreenParts(modes=modes, K=K, Kexp=Kexp, W=W)


@dataclass
class SkReport:
    satisfies_sk: bool
    violating_directions: list   # (kernel vector z, wavevector xi, eigenvalue)


def check_sk(model, directions):
    """Test the [SK] coupling condition on a sample of unit wavevectors.

    For each unit direction the convection symbol is |xi| A (isotropic
    models), so the test reduces to: does ker B intersect an eigenspace of
    A?  Eigenspaces may be degenerate, so the test computes principal
    angles between ker B and each eigenspace rather than testing kernel
    basis vectors individually.
    """
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    if directions.size == 0:
        raise ValueError("need a nonempty direction sample")

    kernel = scipy.linalg.null_space(model.B, rcond=_KERNEL_RTOL)
    if kernel.shape[1] == 0:
        return SkReport(satisfies_sk=True, violating_directions=[])

    eigvals, eigvecs = np.linalg.eigh(model.A)
    groups = []
    start = 0
    for i in range(1, len(eigvals) + 1):
        if i == len(eigvals) or abs(eigvals[i] - eigvals[start]) > 1e-10:
            groups.append((eigvals[start], eigvecs[:, start:i]))
            start = i

    violations = []
    for xi in directions:
        nrm = np.linalg.norm(xi)
        if nrm == 0:
            continue
        unit = xi / nrm
        for mu, V in groups:
            # sigma ~ 1 <=> ker B and the eigenspace share a direction
            _, sigma, vt = np.linalg.svd(V.T @ kernel)
            hits = np.nonzero(sigma > 1.0 - 1e-8)[0]
            for h in hits:
                z = kernel @ vt[h]
                z = z / np.linalg.norm(z)
                violations.append((z, unit.copy(), float(mu)))
    return SkReport(satisfies_sk=len(violations) == 0,
                    violating_directions=violations)
