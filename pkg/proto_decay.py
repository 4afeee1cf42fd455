# throwaway prototype: pick gaussian width + windows for linear decay criteria
import numpy as np
from pdhyp.grid import SpectralGrid
from pdhyp import spectra

def spectral_gaussian(grid, amp, sigma):
    s = grid.xi_norm
    edge = grid.dealias_limit * grid.dk
    # smooth taper: cos^2 rolloff from 0.7*edge to edge
    t = np.clip((s - 0.7 * edge) / (0.3 * edge), 0.0, 1.0)
    taper = np.cos(0.5 * np.pi * t) ** 2
    amp_hat = amp * sigma**grid.ndim / (2*np.pi)**(grid.ndim/2)
    phase = np.exp(-1j * (grid.xi @ np.full(grid.ndim, grid.center)))
    fh = amp_hat * np.exp(-0.5 * sigma**2 * s**2) * taper * phase
    return grid.dealias(fh)

def l2(grid, fh):
    return np.sqrt((2*np.pi)**grid.ndim * np.sum(np.abs(fh)**2) * grid.d_eta)

def linf(grid, fh):
    return np.max(np.abs(grid.to_physical(fh)))

def fit(ts, vs, lo, hi):
    m = (ts >= lo) & (ts <= hi)
    A = np.vstack([np.log(ts[m]), np.ones(m.sum())]).T
    sol, *_ = np.linalg.lstsq(A, np.log(vs[m]), rcond=None)
    return sol[0]

g = SpectralGrid(64, 256.0)
cache2 = spectra.build_symbol_cache(g, spectra.two_component_model())

for sigma in [0.75, 1.0, 1.5, 2.0]:
    u0 = spectral_gaussian(g, 1.0, sigma).reshape(-1)
    data0 = np.stack([u0, u0.copy()])
    ts = np.arange(1.0, 60.0 + 0.5, 1.0)
    uL2, vL2, uLi, vLi = [], [], [], []
    for t in ts:
        G = spectra.green_function(cache2, t - 1.0)
        d = spectra.propagator_apply(G, data0)
        uL2.append(l2(g, d[0])); vL2.append(l2(g, d[1]))
        uLi.append(linf(g, d[0].reshape(g.shape))); vLi.append(linf(g, d[1].reshape(g.shape)))
    uL2, vL2, uLi, vLi = map(np.array, (uL2, vL2, uLi, vLi))
    lo, hi = 15.0, 54.0
    print(f"sigma={sigma}: uL2 {fit(ts,uL2,lo,hi):+.3f}  vL2 {fit(ts,vL2,lo,hi):+.3f}  "
          f"uLinf {fit(ts,uLi,lo,hi):+.3f}  vLinf {fit(ts,vLi,lo,hi):+.3f}")

# half-wave |w|_inf fit on same grid
sigma = 1.0
w0 = spectral_gaussian(g, 1.0, sigma)
ts = np.arange(1.0, 60.0 + 0.5, 1.0)
wLi, wL2 = [], []
for t in ts:
    wh = np.exp(-1j * g.xi_norm * (t - 1.0)) * w0
    wLi.append(linf(g, wh)); wL2.append(l2(g, wh))
wLi = np.array(wLi); wL2 = np.array(wL2)
print("w Linf exp:", fit(ts, wLi, 15.0, 54.0), " L2 drift:", np.max(np.abs(wL2/wL2[0]-1)))

# Kexp branch: P2-projected data, rate over [1,20]
u0 = spectral_gaussian(g, 1.0, 1.0).reshape(-1)
data0 = np.stack([u0, u0.copy()])
P2 = cache2.projectors[1].copy()
P2[cache2.degenerate_mask] = 0.0
dproj = spectra.propagator_apply(P2, data0)
ts = np.arange(1.0, 20.001, 0.5)
ns = []
for t in ts:
    G = spectra.green_function(cache2, t - 1.0)
    d = spectra.propagator_apply(G, dproj)
    ns.append(np.sqrt(l2(g, d[0])**2 + l2(g, d[1])**2))
ns = np.array(ns)
A = np.vstack([ts, np.ones_like(ts)]).T
sol, *_ = np.linalg.lstsq(A, np.log(ns), rcond=None)
print("Kexp fitted rate:", -sol[0])
