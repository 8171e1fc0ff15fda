"""Discrete memoryless channels and wiretap pairs."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from . import kernels
from .probability import (
    SHIFT_GROUPS,
    PmfError,
    as_pmf,
    grid_size,
    group_shift,
    random_pmfs,
    resolution_for,
    simplex_grid,
    uniform,
)

TAU_CAP = 1e-10
CAP_MAX_ITER = 100_000
PRUNE_EVERY = 200
PRUNE_SETTLE = 50
PRUNE_THRESHOLDS = (1e-3, 1e-5, 1e-7, 1e-9)
TAU_SYM = 1e-9
SYM_RESOLUTION = 50
SYM_SAMPLES = 200
SYM_GRID_BUDGET = 200_000
EQ_TOL = 1e-12


class ChannelError(ValueError):
    pass


class CapacityError(RuntimeError):
    def __init__(self, message: str, gap: float):
        super().__init__(message)
        self.gap = gap


@dataclass(frozen=True, eq=False)
class ChannelMatrix:
    """Row-stochastic p(out | in); rows are indexed by the input symbol."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
            raise ChannelError(f"channel matrix must be 2-D and non-empty, got shape {m.shape}")
        try:
            m = np.stack([as_pmf(row) for row in m])
        except PmfError as exc:
            raise ChannelError(f"invalid channel row: {exc}") from None
        m = np.ascontiguousarray(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def in_dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def out_dim(self) -> int:
        return self.matrix.shape[1]

    @cached_property
    def row_entropy(self) -> np.ndarray:
        return kernels.row_entropies(self.matrix)

    def equals(self, other: "ChannelMatrix", tol: float = EQ_TOL) -> bool:
        return self.matrix.shape == other.matrix.shape and bool(
            np.all(np.abs(self.matrix - other.matrix) <= tol))

    def tolist(self) -> list[list[float]]:
        return self.matrix.tolist()


@dataclass(frozen=True, eq=False)
class WiretapChannel:
    main: ChannelMatrix
    eavesdropper: ChannelMatrix
    name: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.main, ChannelMatrix):
            object.__setattr__(self, "main", ChannelMatrix(self.main))
        if not isinstance(self.eavesdropper, ChannelMatrix):
            object.__setattr__(self, "eavesdropper", ChannelMatrix(self.eavesdropper))
        if self.main.in_dim < 2:
            raise ChannelError(f"input alphabet needs at least 2 symbols, got {self.main.in_dim}")
        if self.main.in_dim != self.eavesdropper.in_dim:
            raise ChannelError(
                f"input alphabets differ: main has {self.main.in_dim}, "
                f"eavesdropper has {self.eavesdropper.in_dim}")

    @property
    def in_dim(self) -> int:
        return self.main.in_dim

    @cached_property
    def C_B(self) -> float:
        return capacity(self.main)[0]

    @cached_property
    def C_E(self) -> float:
        return capacity(self.eavesdropper)[0]

    @cached_property
    def symmetry(self) -> str | None:
        """Shift group under which both channels are symmetric, if any."""
        for group in SHIFT_GROUPS:
            if (is_cyclic_shift_symmetric(self.main, group=group)
                    and is_cyclic_shift_symmetric(self.eavesdropper, group=group)):
                return group
        return None

    def swapped(self) -> "WiretapChannel":
        return WiretapChannel(self.eavesdropper, self.main, name=f"swap({self.name})")

    def kernel_args(self):
        m, e = self.main, self.eavesdropper
        return m.matrix, m.row_entropy, e.matrix, e.row_entropy


# --- information measures -------------------------------------------------

def mutual_information(ch: ChannelMatrix, px) -> float:
    """I(X;Y) in bits for input PMF `px`."""
    px = as_pmf(px)
    if px.size != ch.in_dim:
        raise ChannelError(f"input PMF has length {px.size}, channel expects {ch.in_dim}")
    return float(kernels.mi(ch.matrix, ch.row_entropy, px))


def mutual_information_batch(ch: ChannelMatrix, P: np.ndarray) -> np.ndarray:
    P = np.ascontiguousarray(P, dtype=float)
    if P.shape[-1] != ch.in_dim:
        raise ChannelError("dimension mismatch")
    return kernels.mi_batch(ch.matrix, ch.row_entropy, P.reshape(-1, ch.in_dim)).reshape(P.shape[:-1])


def f_mu(w: WiretapChannel, px, mu: float = 0.0) -> float:
    """(mu + 1) I(X;Y) - I(X;Z)."""
    if mu < 0:
        raise ValueError("mu must be non-negative")
    return (mu + 1.0) * mutual_information(w.main, px) - mutual_information(w.eavesdropper, px)


def f_mu_batch(w: WiretapChannel, P: np.ndarray, mu: float = 0.0) -> np.ndarray:
    return ((mu + 1.0) * mutual_information_batch(w.main, P)
            - mutual_information_batch(w.eavesdropper, P))


def _ba_terms(W, logW, p):
    """D(W_x || pW) per input and I(p), in bits."""
    q = p @ W
    with np.errstate(divide="ignore"):
        logq = np.where(q > 0, np.log2(np.where(q > 0, q, 1.0)), 0.0)
    D = np.sum(W * (logW - logq), axis=1)
    return D, float(p @ D)


def _prune(W, logW, p, tol):
    """Try to finish by dropping inputs whose divergence trails the maximum.

    Near-duplicate rows outside the optimal support otherwise lose mass only
    geometrically slowly. Returns a pruned PMF (after a few plain steps)
    whose gap max D - I is already below `tol`, or None. Since the gap
    bounds the error for any PMF, accepting only converged candidates keeps
    the stopping rule sound.
    """
    D, _ = _ba_terms(W, logW, p)
    upper = float(D.max())
    for t in PRUNE_THRESHOLDS:
        keep = (D >= upper - t) & (p > 0)
        if keep.all() or not keep.any():
            continue
        cand = np.where(keep, p, 0.0)
        cand /= cand.sum()
        for _ in range(PRUNE_SETTLE):
            Dc, Ic = _ba_terms(W, logW, cand)
            if float(Dc.max()) - Ic < tol:
                return cand
            cand = cand * np.exp2(Dc - Dc.max())
            cand /= cand.sum()
    return None


def capacity(ch: ChannelMatrix, tol: float = TAU_CAP, max_iter: int = CAP_MAX_ITER):
    """Blahut-Arimoto iteration; returns (capacity in bits, optimal input).

    Stops once max_x D(W_x || q) - I(p) < tol; that difference bounds the
    distance of I(p) from capacity. Each step also tries the over-relaxed
    update p * 2^(s D) with a growing exponent s and keeps it when it beats
    the plain update; nearly identical rows otherwise stall the iteration.
    """
    W = ch.matrix
    with np.errstate(divide="ignore"):
        logW = np.where(W > 0, np.log2(np.where(W > 0, W, 1.0)), 0.0)
    p = uniform(ch.in_dim)
    D, lower = _ba_terms(W, logW, p)
    gap = math.inf
    s = 2.0
    for it in range(int(max_iter)):
        upper = float(D.max())
        gap = upper - lower
        if gap < tol:
            return max(lower, 0.0), p
        base = p * np.exp2(D - upper)
        base /= base.sum()
        Db, Ib = _ba_terms(W, logW, base)
        cand = p * np.exp2(s * (D - upper))
        cand /= cand.sum()
        Dc, Ic = _ba_terms(W, logW, cand)
        if Ic > Ib:
            p, D, lower = cand, Dc, Ic
            s = min(2.0 * s, 2.0 ** 30)
        else:
            p, D, lower = base, Db, Ib
            s = 2.0
        if (it + 1) % PRUNE_EVERY == 0:
            done = _prune(W, logW, p, tol)
            if done is not None:
                p = done
                D, lower = _ba_terms(W, logW, p)
    raise CapacityError(f"capacity iteration did not converge (gap {gap:.3e})", gap)


def is_cyclic_shift_symmetric(ch: ChannelMatrix, samples: int = SYM_SAMPLES,
                              group: str = "cyclic", seed: int = 0,
                              resolution: int = SYM_RESOLUTION,
                              tol: float = TAU_SYM) -> bool:
    """Numerical certificate that I(X;Y) is invariant under input shifts.

    Checked on a deterministic simplex grid plus `samples` seeded random
    PMFs; a certificate, not a proof.
    """
    n = ch.in_dim
    if group == "xor" and n & (n - 1):
        return False
    res = resolution
    if grid_size(n, res) > SYM_GRID_BUDGET:
        res = resolution_for(n, SYM_GRID_BUDGET)
    P = simplex_grid(n, res)
    if samples:
        P = np.vstack([P, random_pmfs(np.random.default_rng(seed), n, samples)])
    base = mutual_information_batch(ch, P)
    for k in range(1, n):
        shifted = mutual_information_batch(ch, np.ascontiguousarray(group_shift(P, k, group)))
        if np.max(np.abs(shifted - base)) > tol:
            return False
    return True


def compose_prefix(prefix: ChannelMatrix, ch: ChannelMatrix) -> ChannelMatrix:
    """p(y|v) = sum_x p(x|v) p(y|x)."""
    if prefix.out_dim != ch.in_dim:
        raise ChannelError(f"prefix outputs {prefix.out_dim} symbols, channel takes {ch.in_dim}")
    return ChannelMatrix(prefix.matrix @ ch.matrix)


# --- constructors ---------------------------------------------------------

def bsc(eps: float) -> ChannelMatrix:
    return ChannelMatrix([[1 - eps, eps], [eps, 1 - eps]])


def bec(alpha: float) -> ChannelMatrix:
    """Binary erasure channel, outputs ordered (0, e, 1)."""
    return ChannelMatrix([[1 - alpha, alpha, 0.0], [0.0, alpha, 1 - alpha]])


def identity(n: int) -> ChannelMatrix:
    return ChannelMatrix(np.eye(n))


def z_channel(p: float) -> ChannelMatrix:
    return ChannelMatrix([[1.0, 0.0], [p, 1 - p]])


def _check(cond: bool, msg: str):
    if not cond:
        raise ChannelError(msg)


def make_standard(kind: str, *params: float) -> WiretapChannel:
    """Named wiretap channels.

    ``bsc_bec(eps, alpha)``, ``bec_bsc(alpha, eps)``, ``bsc_bsc(eps_b, eps_e)``,
    ``vandijk(p, q, r)`` and ``sec53(p, q, eps)`` (main BSC(eps), eavesdropper
    rows [1-p-q, q, p] and [q, 1-p-q, p]).
    """
    kind = kind.replace("-", "_").lower()
    if kind == "bsc_bec":
        eps, alpha = params
        _check(0 <= eps < 0.5, f"BSC crossover {eps} outside [0, 0.5)")
        _check(0 <= alpha <= 1, f"erasure probability {alpha} outside [0, 1]")
        return WiretapChannel(bsc(eps), bec(alpha), name=f"BSC({eps})-BEC({alpha})",
                              params={"kind": kind, "eps": eps, "alpha": alpha})
    if kind == "bec_bsc":
        alpha, eps = params
        _check(0 <= eps < 0.5, f"BSC crossover {eps} outside [0, 0.5)")
        _check(0 <= alpha <= 1, f"erasure probability {alpha} outside [0, 1]")
        return WiretapChannel(bec(alpha), bsc(eps), name=f"BEC({alpha})-BSC({eps})",
                              params={"kind": kind, "eps": eps, "alpha": alpha})
    if kind == "bsc_bsc":
        eb, ee = params
        _check(0 <= eb <= 1 and 0 <= ee <= 1, "BSC crossovers must lie in [0, 1]")
        return WiretapChannel(bsc(eb), bsc(ee), name=f"BSC({eb})-BSC({ee})",
                              params={"kind": kind, "eps_b": eb, "eps_e": ee})
    if kind == "vandijk":
        p, q, r = params
        _check(all(0 <= t <= 1 for t in (p, q, r)), "van Dijk parameters must lie in [0, 1]")
        main = 0.5 * np.array([
            [1 - p, p, 1 - q, q],
            [p, 1 - p, q, 1 - q],
            [1 - q, q, 1 - p, p],
            [q, 1 - q, p, 1 - p]])
        eve = 0.5 * np.array([
            [1 - r, 1 - r, r, r],
            [1 - r, 1 - r, r, r],
            [r, r, 1 - r, 1 - r],
            [r, r, 1 - r, 1 - r]])
        return WiretapChannel(ChannelMatrix(main), ChannelMatrix(eve),
                              name=f"vanDijk({p},{q},{r})",
                              params={"kind": kind, "p": p, "q": q, "r": r})
    if kind == "sec53":
        p, q, eps = params
        _check(p >= 0 and q >= 0 and p + q < 1, f"need p, q >= 0 and p + q < 1, got {p}, {q}")
        _check(0 <= eps < 0.5, f"BSC crossover {eps} outside [0, 0.5)")
        eve = [[1 - p - q, q, p], [q, 1 - p - q, p]]
        return WiretapChannel(bsc(eps), ChannelMatrix(eve), name=f"sec53({p},{q},{eps})",
                              params={"kind": kind, "p": p, "q": q, "eps": eps})
    raise ChannelError(f"unknown channel kind {kind!r}")


# --- JSON -----------------------------------------------------------------

def channel_from_dict(obj) -> WiretapChannel:
    if not isinstance(obj, dict):
        raise ChannelError("channel JSON must be an object with 'main' and 'eavesdropper'")
    mats = {}
    for key in ("main", "eavesdropper"):
        if key not in obj:
            raise ChannelError(f"missing field '{key}'")
        rows = obj[key]
        if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
            raise ChannelError(f"field '{key}' must be a non-empty array of arrays")
        for i, row in enumerate(rows):
            try:
                as_pmf(row)
            except (PmfError, TypeError, ValueError) as exc:
                raise ChannelError(f"field '{key}' row {i}: {exc}") from None
        if len({len(r) for r in rows}) != 1:
            raise ChannelError(f"field '{key}': rows have different lengths")
        mats[key] = ChannelMatrix(rows)
    name = obj.get("name", "")
    if not isinstance(name, str):
        raise ChannelError("field 'name' must be a string")
    return WiretapChannel(mats["main"], mats["eavesdropper"], name=name)


def load_channel(path) -> WiretapChannel:
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChannelError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return channel_from_dict(obj)


def channel_to_dict(w: WiretapChannel) -> dict:
    out = {"main": w.main.tolist(), "eavesdropper": w.eavesdropper.tolist()}
    if w.name:
        out["name"] = w.name
    return out
