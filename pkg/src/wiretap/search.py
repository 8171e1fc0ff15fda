"""Global search helpers over probability simplices.

Two tools are used throughout the package:

* grid-seeded pattern search for linear combinations of I(X;Y) and I(X;Z)
  (f, f_mu and I(X;Y) itself are all of this form);
* convex envelopes of grid-sampled functions, which turn the inner
  minimizations over decompositions of a PMF into hull lookups.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from . import kernels
from .channel import WiretapChannel, mutual_information_batch
from .probability import as_pmf, resolution_for, simplex_grid

MIN_STEP = 1e-10
MAX_EVALS = 2_000_000
GRID_BUDGET = {2: 2001, 3: 5151, 4: 5456}
ENVELOPE_BUDGET = {2: 2001, 3: 1326, 4: 1771}


def search_grid(dim: int, budget: dict = GRID_BUDGET) -> np.ndarray:
    return simplex_grid(dim, resolution_for(dim, budget.get(dim, 5000)))


def _blocks(*sizes):
    out, start = [], 0
    for s in sizes:
        out.append((start, s))
        start += s
    return np.array(out, dtype=np.int64)


def polish_mixture(w: WiretapChannel, coefs, weights, comps, step0=0.05,
                   min_step=MIN_STEP, fixed_weights=False):
    """Maximize a1 I_B(m) + a2 I_E(m) - sum_i w_i (b1 I_B(P_i) + b2 I_E(P_i)).

    m is the mixture sum_i w_i P_i. Returns (weights, comps, value).
    """
    comps = np.atleast_2d(np.asarray(comps, dtype=float))
    k, n = comps.shape
    x0 = np.concatenate([np.asarray(weights, dtype=float), comps.ravel()])
    sizes = [k] + [n] * k
    blocks = _blocks(*sizes)
    if fixed_weights or k == 1:
        blocks = blocks[1:]
    layout = np.array([k, n], dtype=np.int64)
    x, val, _ = kernels.pattern_search(
        kernels.MIXTURE, x0, layout, blocks, *w.kernel_args(),
        np.asarray(coefs, dtype=float), step0, min_step, MAX_EVALS)
    return x[:k].copy(), x[k:].reshape(k, n).copy(), float(val)


@dataclass
class SimplexOptimum:
    value: float
    argopt: np.ndarray
    spread: float
    starts: int


def optimize_combination(w: WiretapChannel, cb: float, ce: float, maximize: bool = True,
                         n_starts: int = 8, extra_starts=(),
                         resolution: int | None = None) -> SimplexOptimum:
    """Global optimum of cb*I(X;Y) + ce*I(X;Z) over the input simplex.

    Coarse grid, then pattern search from the best grid points and any
    `extra_starts`.
    """
    sign = 1.0 if maximize else -1.0
    if resolution is None:
        resolution = resolution_for(w.in_dim, GRID_BUDGET.get(w.in_dim, 5000))
    grid = simplex_grid(w.in_dim, resolution)
    vals = sign * (cb * mutual_information_batch(w.main, grid)
                   + ce * mutual_information_batch(w.eavesdropper, grid))
    order = np.argsort(-vals, kind="stable")
    starts = [grid[i] for i in order[:n_starts]] + [as_pmf(s) for s in extra_starts]
    coefs = np.array([sign * cb, sign * ce, 0.0, 0.0])
    results = []
    step0 = 1.0 / max(2, resolution)
    for s in starts:
        _, comp, val = polish_mixture(w, coefs, [1.0], s[None, :], step0=step0)
        results.append((val, comp[0]))
    vals_r = np.array([r[0] for r in results])
    best = int(np.argmax(vals_r))
    return SimplexOptimum(value=sign * float(vals_r[best]), argopt=as_pmf(results[best][1]),
                          spread=float(vals_r.max() - vals_r.min()), starts=len(starts))


def f_extremes(w: WiretapChannel, mu: float = 0.0, resolution: int | None = None):
    """(min f_mu optimum, max f_mu optimum)."""
    lo = optimize_combination(w, mu + 1.0, -1.0, maximize=False, resolution=resolution)
    hi = optimize_combination(w, mu + 1.0, -1.0, maximize=True, resolution=resolution)
    return lo, hi


# --- envelopes ------------------------------------------------------------

@dataclass
class Envelope:
    """Lower convex envelope of sampled values on simplex grid points.

    ``vertices[i]`` are the grid indices spanning the hull facet under
    point i.
    """

    grid: np.ndarray
    values: np.ndarray
    env: np.ndarray
    vertices: np.ndarray

    def decomposition(self, i: int):
        """(vertex PMFs, weights) mixing to grid point i."""
        V = self.grid[self.vertices[i]]
        lam, *_ = np.linalg.lstsq(V.T, self.grid[i], rcond=None)
        lam = np.clip(lam, 0.0, None)
        s = lam.sum()
        if s <= 0:
            return self.grid[i][None, :], np.ones(1)
        return V, lam / s


def _affine_residual(grid, values):
    A = np.column_stack([grid[:, :-1], np.ones(len(grid))])
    coef, *_ = np.linalg.lstsq(A, values, rcond=None)
    return float(np.max(np.abs(A @ coef - values)))


def lower_envelope(grid: np.ndarray, values: np.ndarray) -> Envelope:
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    N, n = grid.shape
    if _affine_residual(grid, values) < 1e-13:
        return Envelope(grid, values, values.copy(), np.arange(N)[:, None])
    pts = np.column_stack([grid[:, :-1], values])
    try:
        hull = ConvexHull(pts)
    except QhullError:
        hull = ConvexHull(pts, qhull_options="QJ")
    eq = hull.equations
    lower = eq[:, -2] < -1e-12
    normals = eq[lower]
    simplices = hull.simplices[lower]
    planes = -(grid[:, :-1] @ normals[:, :-2].T + normals[:, -1]) / normals[:, -2]
    idx = np.argmax(planes, axis=1)
    env = np.minimum(planes[np.arange(N), idx], values)
    return Envelope(grid, values, env, simplices[idx])


def upper_envelope(grid: np.ndarray, values: np.ndarray) -> Envelope:
    low = lower_envelope(grid, -np.asarray(values, dtype=float))
    return Envelope(low.grid, -low.values, -low.env, low.vertices)
