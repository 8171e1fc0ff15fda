"""Probability-simplex primitives.

PMFs are plain 1-D float arrays. :func:`as_pmf` validates and (when the
drift is small) renormalizes them; everything else in the package goes
through it at its boundaries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

TAU_PMF = 1e-9
RENORM_LIMIT = 1e-6
GRID_CAP = 2_000_000


class PmfError(ValueError):
    pass


def as_pmf(weights, dim: int | None = None) -> np.ndarray:
    """Return `weights` as a validated PMF array.

    Sums off by less than ``RENORM_LIMIT`` are renormalized; anything
    further off, negative entries below ``-TAU_PMF`` or non-finite values
    raise :class:`PmfError`.
    """
    p = np.array(weights, dtype=float).reshape(-1)
    if p.size == 0:
        raise PmfError("empty PMF")
    if dim is not None and p.size != dim:
        raise PmfError(f"expected PMF of length {dim}, got {p.size}")
    if not np.all(np.isfinite(p)):
        raise PmfError("PMF has non-finite entries")
    if np.any(p < -TAU_PMF):
        raise PmfError(f"PMF has negative entries: {p}")
    p = np.clip(p, 0.0, None)
    s = p.sum()
    if abs(s - 1.0) >= RENORM_LIMIT:
        raise PmfError(f"PMF sums to {s!r}")
    # sums within rounding stay untouched so re-validation is idempotent
    return p if abs(s - 1.0) <= p.size * np.finfo(float).eps else p / s


def uniform(dim: int) -> np.ndarray:
    return np.full(dim, 1.0 / dim)


def basis(dim: int, j: int) -> np.ndarray:
    """Elementary PMF with all mass on index `j` (0-based)."""
    e = np.zeros(dim)
    e[j] = 1.0
    return e


def entropy(p) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    p = as_pmf(p)
    nz = p[p > 0]
    return float(max(0.0, -np.sum(nz * np.log2(nz))))


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary entropy argument {x} outside [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return float(-x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x))


# --- shift groups ---------------------------------------------------------
#
# "cyclic" is the rotation group Z_n acting on input labels. "xor" is
# Z_2^k acting by i -> i ^ k and only exists for power-of-two alphabets.
# Both act regularly, so averaging any PMF over a group orbit gives the
# uniform distribution.

SHIFT_GROUPS = ("cyclic", "xor")


def shift_indices(dim: int, k: int, group: str = "cyclic") -> np.ndarray:
    """Index array `idx` such that the k-th shift of `p` is ``p[idx]``."""
    i = np.arange(dim)
    if group == "cyclic":
        return (i - k) % dim
    if group == "xor":
        if dim & (dim - 1):
            raise ValueError(f"xor shifts need a power-of-two alphabet, got {dim}")
        return i ^ (k % dim)
    raise ValueError(f"unknown shift group {group!r}")


def cyclic_shift(p, k: int) -> np.ndarray:
    """Rotate `p` by `k` positions: ``cyclic_shift([1,0,0], 1) == [0,1,0]``."""
    p = as_pmf(p)
    return np.roll(p, k)


def group_shift(p, k: int, group: str = "cyclic") -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return p[..., shift_indices(p.shape[-1], k, group)]


def group_orbit(p, group: str = "cyclic") -> np.ndarray:
    """All |X| shifts of `p`, one per row, the unshifted PMF first."""
    p = np.asarray(p, dtype=float)
    return np.stack([group_shift(p, k, group) for k in range(p.size)])


# --- simplex decomposition ------------------------------------------------

@dataclass(frozen=True)
class SimplexDecomposition:
    """``target = q[0] * anchor + sum_i q[i+1] * e[basis_indices[i]]``.

    Indices are 0-based.
    """

    q: np.ndarray
    basis_indices: tuple[int, ...]
    anchor: np.ndarray

    def reconstruct(self) -> np.ndarray:
        out = self.q[0] * self.anchor
        for w, j in zip(self.q[1:], self.basis_indices):
            out = out.copy()
            out[j] += w
        return out

    @property
    def excluded_index(self) -> int:
        dim = self.anchor.size
        return (set(range(dim)) - set(self.basis_indices)).pop()


def decompose(target, anchor) -> SimplexDecomposition:
    """Write `target` as a mixture of `anchor` and dim-1 vertices.

    The sub-simplexes conv({e_j : j != i} U {anchor}) cover the simplex.
    Each candidate i is tried in ascending order by solving the barycentric
    system; the first with coordinates >= -TAU_PMF wins, so ties on shared
    faces go to the smallest excluded index.
    """
    target = as_pmf(target)
    anchor = as_pmf(anchor, dim=target.size)
    dim = target.size
    for i in range(dim):
        others = [j for j in range(dim) if j != i]
        a = np.zeros((dim, dim))
        a[:, 0] = anchor
        for col, j in enumerate(others, start=1):
            a[j, col] = 1.0
        if anchor[i] <= 0.0:
            # the determinant is +-anchor[i]: this sub-simplex is flat
            continue
        q = np.linalg.solve(a, target)
        if np.all(q >= -TAU_PMF):
            q = np.clip(q, 0.0, None)
            q = q / q.sum()
            return SimplexDecomposition(q=q, basis_indices=tuple(others), anchor=anchor)
    raise AssertionError("no sub-simplex contains the target")  # pragma: no cover


# --- grids ----------------------------------------------------------------

def grid_size(dim: int, resolution: int) -> int:
    return math.comb(resolution + dim - 1, dim - 1)


def simplex_grid(dim: int, resolution: int, cap: int = GRID_CAP) -> np.ndarray:
    """All PMFs whose entries are multiples of 1/resolution, one per row."""
    if dim < 2 or resolution < 1:
        raise ValueError("simplex_grid needs dim >= 2 and resolution >= 1")
    n = grid_size(dim, resolution)
    if n > cap:
        raise MemoryError(f"simplex grid of {n} points exceeds cap {cap}")
    # stars and bars: choose dim-1 bar positions among resolution+dim-1 slots
    out = np.empty((n, dim))
    for row, bars in enumerate(combinations(range(resolution + dim - 1), dim - 1)):
        prev = -1
        for k, b in enumerate(bars):
            out[row, k] = b - prev - 1
            prev = b
        out[row, dim - 1] = resolution + dim - 2 - prev
    return out / resolution


def resolution_for(dim: int, budget: int) -> int:
    """Largest grid resolution whose point count stays within `budget`."""
    r = 1
    while grid_size(dim, r + 1) <= budget:
        r += 1
    return r


def random_pmfs(rng: np.random.Generator, dim: int, count: int) -> np.ndarray:
    return rng.dirichlet(np.ones(dim), size=count)
