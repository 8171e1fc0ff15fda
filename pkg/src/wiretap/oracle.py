"""Exhaustive grid solvers used as ground truth in tests.

Both evaluate the objectives directly from the channel rows through their
own kernels and share no optimization code with the solver path.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .binary import TangentConfig
from .chain import AuxiliaryChain
from .channel import WiretapChannel
from .probability import simplex_grid

BINARY_CAP = 1_000_000_000
CHAIN_CAP = 100_000_000
MAX_CHAIN_RES = 10
MAX_CARD = 4


class ResourceCapError(RuntimeError):
    pass


def _require_binary(w):
    if w.in_dim != 2:
        raise ValueError(f"oracle needs a binary input alphabet, got |X| = {w.in_dim}")


def _matrices(w):
    return (np.ascontiguousarray(w.main.matrix), np.ascontiguousarray(w.eavesdropper.matrix))


@dataclass
class OracleResult:
    value: float
    lipschitz: float
    resolution: int
    evaluations: int

    @property
    def error_bound(self) -> float:
        """Worst-case gap to the continuous maximum: 1.5 grid steps times L."""
        return 1.5 * self.lipschitz / self.resolution


def binary_evaluations(resolution: int) -> int:
    return (resolution + 1) ** 3


def brute_binary(w: WiretapChannel, mu: float, resolution: int = 400):
    """(value, TangentConfig, OracleResult) over the (lambda, p1, p2) grid."""
    _require_binary(w)
    n_eval = binary_evaluations(resolution)
    if n_eval > BINARY_CAP:
        raise ResourceCapError(f"{n_eval} evaluations exceed the cap of {BINARY_CAP}")
    WB, WE = _matrices(w)
    best, bi, slope = kernels.brute_binary(WB, WE, float(mu), int(resolution))
    il, i1, i2 = (int(t) for t in bi)
    cfg = TangentConfig(il / resolution, i1 / resolution, i2 / resolution, float(best), "oracle")
    return float(best), cfg, OracleResult(float(best), float(slope), resolution, n_eval)


@dataclass
class ChainGrid:
    xs: np.ndarray
    vsets: np.ndarray
    rows: np.ndarray
    pus: np.ndarray
    combos: np.ndarray

    @property
    def evaluations(self) -> int:
        return len(self.vsets) * len(self.combos) * len(self.pus)


def chain_grid(card_u: int, card_v: int, resolution: int) -> ChainGrid:
    """Symmetry-reduced parameter grid.

    V labels are exchangeable, so the conditionals P(X=0|v) range over
    multisets; likewise U labels, so p(v|u) rows are non-decreasing tuples.
    """
    xs = np.arange(resolution + 1) / resolution
    vsets = np.array(list(itertools.combinations_with_replacement(range(resolution + 1), card_v)),
                     dtype=np.int64)
    rows = np.ones((1, 1)) if card_v == 1 else np.ascontiguousarray(simplex_grid(card_v, resolution))
    pus = np.ones((1, 1)) if card_u == 1 else np.ascontiguousarray(simplex_grid(card_u, resolution))
    combos = np.array(list(itertools.combinations_with_replacement(range(len(rows)), card_u)),
                      dtype=np.int64)
    return ChainGrid(xs, vsets, rows, pus, combos)


def chain_evaluations(card_u: int, card_v: int, resolution: int) -> int:
    nv = math.comb(resolution + card_v, card_v)
    nr = math.comb(resolution + card_v - 1, card_v - 1)
    return nv * math.comb(nr + card_u - 1, card_u) * math.comb(resolution + card_u - 1, card_u - 1)


def brute_chain(w: WiretapChannel, mu: float, card_u: int = 2, card_v: int = 4,
                resolution: int = 8):
    """(value, AuxiliaryChain, OracleResult) over all chains on the grid."""
    _require_binary(w)
    if not (1 <= card_u <= MAX_CARD and 1 <= card_v <= MAX_CARD):
        raise ValueError(f"cardinalities must lie in [1, {MAX_CARD}]")
    if resolution > MAX_CHAIN_RES:
        raise ResourceCapError(f"resolution {resolution} exceeds {MAX_CHAIN_RES}")
    n_eval = chain_evaluations(card_u, card_v, resolution)
    if n_eval > CHAIN_CAP:
        raise ResourceCapError(f"{n_eval} evaluations exceed the cap of {CHAIN_CAP}")
    G = chain_grid(card_u, card_v, resolution)
    WB, WE = _matrices(w)
    best, bm, bc, bp = kernels.brute_chain(WB, WE, float(mu), G.xs, G.vsets, G.rows, G.pus,
                                           G.combos)
    x0 = G.xs[G.vsets[int(bm)]]
    chain = AuxiliaryChain(G.pus[int(bp)], G.rows[G.combos[int(bc)]],
                           np.column_stack([x0, 1.0 - x0]), label="oracle")
    L = _chain_lipschitz(w, mu, G.xs)
    return float(best), chain, OracleResult(float(best), L, resolution, n_eval)


def _chain_lipschitz(w, mu, xs):
    """Largest finite-difference slope of f and f_mu on a fine grid, plus mu * slope of I(X;Y)."""
    from .channel import f_mu_batch, mutual_information_batch
    t = np.linspace(0.0, 1.0, 4001)
    P = np.column_stack([t, 1 - t])
    L = 0.0
    for vals in (f_mu_batch(w, P, 0.0), f_mu_batch(w, P, mu),
                 mu * mutual_information_batch(w.main, P)):
        L += float(np.max(np.abs(np.diff(vals))) * (len(t) - 1))
    return L
