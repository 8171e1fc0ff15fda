"""Upper-right boundary of the rate-equivocation region.

For a slope mu the boundary point maximizes
``mu I(V;Y) + I(V;Y|U) - I(V;Z|U)`` over chains U -> V -> X. Writing
phi_mu = f - (lower convex envelope of f_mu), the optimum equals the
maximum over P of ``mu I(X;Y)(P) + (upper concave envelope of phi_mu)(P)``:
the upper facet gives U, each facet vertex's lower facet gives V.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .chain import AuxiliaryChain, chain_quantities, evaluate_objective, rate_equivocation
from .channel import WiretapChannel, f_mu, f_mu_batch, mutual_information_batch
from .classify import ClassificationReport, PreconditionError, classify, f_min
from .probability import TAU_PMF, basis, group_orbit, group_shift, uniform
from .search import (ENVELOPE_BUDGET, MAX_EVALS, MIN_STEP, _blocks, lower_envelope,
                     polish_mixture, search_grid, upper_envelope)

TAU_NUM = 1e-9
TAU_OPT = 1e-6
MU_COUNT = 64
MU_MIN = 1e-3
MU_MAX = 32.0
N_GRID_STARTS = 16
N_EXTRA_STARTS = 16
MERGE_TOL = 1e-9

__all__ = [
    "AuxiliarySolution", "RegionPoint", "RegionBoundary", "FallbackWarning",
    "default_mu_grid", "evaluate_objective", "auxiliary_problem", "solve_boundary",
    "trace_more_capable", "construct_optimal_uv", "dominant_shortcut", "corner_CB_Cs",
    "secrecy_capacity", "secrecy_upper_bound", "trace_region", "frontier_violation",
]


class FallbackWarning(UserWarning):
    """No classification certificate; the general solver was used."""


def default_mu_grid(count: int = MU_COUNT, mu_max: float = MU_MAX) -> np.ndarray:
    """mu = 0 followed by `count` geometric points from 1e-3 to `mu_max`."""
    if count < 1:
        return np.array([0.0])
    return np.concatenate([[0.0], np.geomspace(MU_MIN, mu_max, count)])


def _compact(weights, comps):
    """Drop empty states and merge equal conditionals, sorted lexicographically."""
    weights = np.asarray(weights, dtype=float)
    comps = np.atleast_2d(np.asarray(comps, dtype=float))
    keep_w, keep_c = [], []
    for wt, c in zip(weights, comps):
        if wt <= TAU_PMF:
            continue
        for k, kc in enumerate(keep_c):
            if np.max(np.abs(kc - c)) <= MERGE_TOL:
                keep_w[k] += wt
                break
        else:
            keep_w.append(float(wt))
            keep_c.append(np.clip(c, 0.0, None) / np.clip(c, 0.0, None).sum())
    order = sorted(range(len(keep_c)), key=lambda k: tuple(keep_c[k]))
    w = np.array([keep_w[k] for k in order])
    return w / w.sum(), np.array([keep_c[k] for k in order])


def _pad(weights, comps, k):
    weights = list(weights)
    comps = [np.asarray(c, dtype=float) for c in comps]
    n = comps[0].size
    j = 0
    while len(weights) < k:
        weights.append(0.0)
        comps.append(basis(n, j % n))
        j += 1
    return np.array(weights[:k]), np.array(comps[:k])


# --- auxiliary problem -----------------------------------------------------

@dataclass
class AuxiliarySolution:
    """Best prefix V^ for the auxiliary problem at slope mu."""

    value: float
    raw_value: float
    weights: np.ndarray
    comps: np.ndarray
    mu: float
    starts: int
    spread: float
    clamped: bool

    @property
    def chain(self) -> AuxiliaryChain:
        return AuxiliaryChain.prefix(self.weights, self.comps, label="auxiliary")


def _aux_value(w, mu, weights, comps):
    m = weights @ comps
    P = np.vstack([m[None, :], comps])
    fb = mutual_information_batch(w.main, P)
    fe = mutual_information_batch(w.eavesdropper, P)
    return float(fb[0] - fe[0] - weights @ ((mu + 1.0) * fb[1:] - fe[1:]))


def auxiliary_problem(w: WiretapChannel, mu: float, seed: int = 0,
                      n_random: int = N_EXTRA_STARTS) -> AuxiliarySolution:
    """max over lambda and p_i of f(sum lambda_i p_i) - sum lambda_i f_mu(p_i), clamped at 0.

    Seeds: facets of the grid envelope of f_mu under the best grid points,
    V = X at the best grid input, V uniform over the shifts of argmin f_mu,
    the binary tangent configuration when |X| = 2, and random starts.
    """
    if mu < 0:
        raise ValueError("mu must be non-negative")
    n = w.in_dim
    rng = np.random.default_rng(seed)
    grid = search_grid(n, ENVELOPE_BUDGET)
    g = f_mu_batch(w, grid, mu)
    f0 = f_mu_batch(w, grid, 0.0)
    env = lower_envelope(grid, g)
    phi = f0 - env.env
    seeds = []
    for i in np.argsort(-phi, kind="stable")[:N_GRID_STARTS]:
        V, lam = env.decomposition(int(i))
        seeds.append(_pad(lam, V, n))
    seeds.append((grid[int(np.argmax(f0))], np.eye(n)))
    lo = grid[int(np.argmin(g))]
    for group in ("cyclic", "xor") if (n & (n - 1)) == 0 else ("cyclic",):
        seeds.append((np.full(n, 1.0 / n), group_orbit(lo, group)))
    if n == 2:
        from .binary import best_config
        cfg = best_config(w, mu)
        seeds.append(([cfg.lam, 1 - cfg.lam], [[cfg.p1, 1 - cfg.p1], [cfg.p2, 1 - cfg.p2]]))
    for _ in range(n_random):
        seeds.append((rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n), size=n)))

    coefs = (1.0, -1.0, mu + 1.0, -1.0)
    step0 = 1.0 / max(2, int(round(len(grid) ** (1.0 / max(n - 1, 1)))))
    results = []
    for lam, comps in seeds:
        lam, comps = _pad(*_compact(lam, comps), n)
        wt, cp, val = polish_mixture(w, coefs, lam, comps, step0=step0)
        results.append((val, wt, cp))
    vals = np.array([r[0] for r in results])
    top = float(vals.max())
    # among near-optimal starts prefer the smallest V support
    cands = [r for r in results if r[0] >= top - TAU_NUM]
    best = min(cands, key=lambda r: (len(_compact(r[1], r[2])[0]), -r[0]))
    wt, cp = _compact(best[1], best[2])
    raw = _aux_value(w, mu, wt, cp)
    clamped = raw <= TAU_OPT
    if clamped:
        wt, cp = np.array([1.0]), basis(n, 0)[None, :]
    return AuxiliarySolution(value=0.0 if clamped else raw, raw_value=raw, weights=wt,
                             comps=cp, mu=float(mu), starts=len(seeds),
                             spread=float(vals.max() - vals.min()), clamped=clamped)


# --- general envelope solver -----------------------------------------------

def _chain_from_blocks(pu, blocks):
    """AuxiliaryChain from p(u) and per-u (weights, conditionals) lists."""
    nv = sum(len(b[0]) for b in blocks)
    n = blocks[0][1].shape[1]
    pvu = np.zeros((len(pu), nv))
    pxv = np.zeros((nv, n))
    j = 0
    for u, (wt, cp) in enumerate(blocks):
        k = len(wt)
        pvu[u, j:j + k] = wt
        pxv[j:j + k] = cp
        j += k
    return pvu, pxv


def _polish_chain(w, mu, pu, pvu, pxv, prefix=True, step0=0.02):
    nu, nv = pvu.shape
    n = pxv.shape[1]
    x0 = np.concatenate([pu, pvu.ravel(), pxv.ravel()])
    sizes = [nu] + [nv] * nu + ([n] * nv if prefix else [])
    blocks = _blocks(*sizes)
    layout = np.array([nu, nv, n], dtype=np.int64)
    x, val, _ = kernels.pattern_search(kernels.CHAIN, x0, layout, blocks, *w.kernel_args(),
                                       np.array([float(mu)]), step0, MIN_STEP, MAX_EVALS)
    pu = x[:nu]
    pvu = x[nu:nu + nu * nv].reshape(nu, nv)
    pxv = x[nu + nu * nv:].reshape(nv, n)
    return pu, pvu, pxv, float(val)


def solve_boundary(w: WiretapChannel, mu: float, prefix: bool = True):
    """(value, chain) maximizing the boundary objective by envelopes.

    With ``prefix=False`` V = X is fixed, which is optimal for more
    capable channels.
    """
    n = w.in_dim
    grid = search_grid(n, ENVELOPE_BUDGET)
    f0 = f_mu_batch(w, grid, 0.0)
    if prefix:
        low = lower_envelope(grid, f_mu_batch(w, grid, mu))
        phi = f0 - low.env
    else:
        phi = f0
    up = upper_envelope(grid, phi)
    score = mu * mutual_information_batch(w.main, grid) + up.env
    i = int(np.argmax(score))
    U, pu = up.decomposition(i)
    blocks = []
    for u in range(len(pu)):
        j = int(up.vertices[i][u]) if len(up.vertices[i]) == len(pu) else None
        if prefix and j is not None:
            V, lam = low.decomposition(j)
            blocks.append(_pad(lam, V, n))
        else:
            blocks.append((U[u].copy(), np.eye(n)))
    pvu, pxv = _chain_from_blocks(pu, blocks)
    step0 = 1.0 / max(2, int(round(len(grid) ** (1.0 / max(n - 1, 1)))))
    pu, pvu, pxv, val = _polish_chain(w, mu, pu, pvu, pxv, prefix=prefix, step0=step0)
    chain = AuxiliaryChain(pu, pvu, pxv, label="envelope" if prefix else "envelope/V=X")
    return evaluate_objective(w, chain, mu), chain


# --- region points ---------------------------------------------------------

@dataclass
class RegionPoint:
    mu: float
    R: float
    Re: float
    chain: AuxiliaryChain
    objective: float

    @classmethod
    def from_chain(cls, w, chain, mu) -> "RegionPoint":
        obj = evaluate_objective(w, chain, mu)
        R, Re = rate_equivocation(w, chain)
        return cls(float(mu), R, Re, chain, obj)

    def to_dict(self) -> dict:
        return {"mu": self.mu, "R": self.R, "Re": self.Re, "objective": self.objective,
                "chain": self.chain.to_dict()}


@dataclass
class RegionBoundary:
    points: list
    C_B: float
    C_E: float
    secrecy_capacity: float
    method: str
    mu_star: float | None = None
    mu_star_bracket: tuple | None = None
    corner_segment: tuple | None = None
    warnings: list = field(default_factory=list)

    @property
    def fallback(self) -> bool:
        return bool(self.warnings)

    def arrays(self):
        mu = np.array([p.mu for p in self.points])
        R = np.array([p.R for p in self.points])
        Re = np.array([p.Re for p in self.points])
        return mu, R, Re

    def sidecar(self) -> dict:
        return {
            "method": self.method,
            "mu_star": self.mu_star,
            "mu_star_bracket": list(self.mu_star_bracket) if self.mu_star_bracket else None,
            "C_B": self.C_B, "C_E": self.C_E, "C_s": self.secrecy_capacity,
            "corner_segment": [p.to_dict() for p in self.corner_segment]
            if self.corner_segment else None,
            "warnings": list(self.warnings),
            "points": [p.to_dict() for p in self.points],
        }


def frontier_violation(points) -> float:
    """Largest amount by which a point beats another point's own supporting line.

    Zero (up to rounding) for a concave frontier whose points maximize
    mu R + Re at their own slope.
    """
    mu = np.array([p.mu for p in points])
    R = np.array([p.R for p in points])
    Re = np.array([p.Re for p in points])
    own = mu * R + Re
    cross = mu[:, None] * R[None, :] + Re[None, :]
    return float(np.max(cross - own[:, None]))


# --- more capable channels -------------------------------------------------

def _require_more_capable(w, report):
    rep = report or classify(w)
    if not rep.more_capable:
        raise PreconditionError("channel is not certified more capable")
    return rep


def trace_more_capable(w: WiretapChannel, mu_grid=None, report=None,
                       threads: int = 1) -> RegionBoundary:
    """Boundary with V = X; U from the concave envelope of f."""
    rep = _require_more_capable(w, report)
    mu_grid = default_mu_grid() if mu_grid is None else np.asarray(mu_grid, dtype=float)
    corner = corner_CB_Cs(w, rep) if rep.cyclic_shift_symmetric else None

    def point(mu):
        val, chain = solve_boundary(w, mu, prefix=False)
        if corner is not None and evaluate_objective(w, corner, mu) > val:
            chain = corner
        return RegionPoint.from_chain(w, chain, mu)

    pts = _map(point, mu_grid, threads)
    return RegionBoundary(pts, w.C_B, w.C_E, max(rep.f_max, 0.0), "more-capable")


def _map(fn, items, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


# --- cyclic shift symmetric channels ---------------------------------------

def _require_symmetric(w):
    if w.symmetry is None:
        raise PreconditionError("channel is not certified cyclic shift symmetric")
    return w.symmetry


def construct_optimal_uv(w: WiretapChannel, mu: float,
                         aux: AuxiliarySolution | None = None) -> AuxiliaryChain:
    """Uniform U over |X| values; block u holds p(V^) with conditionals shifted by u."""
    group = _require_symmetric(w)
    aux = aux if aux is not None else auxiliary_problem(w, mu)
    n = w.in_dim
    blocks = [(aux.weights, np.array([group_shift(c, u, group) for c in aux.comps]))
              for u in range(n)]
    pvu, pxv = _chain_from_blocks(np.full(n, 1.0 / n), blocks)
    chain = AuxiliaryChain(np.full(n, 1.0 / n), pvu, pxv, label="shift-construction")
    if np.max(np.abs(chain.px - uniform(n))) > TAU_PMF:
        raise AssertionError("construction does not induce a uniform input")
    val = evaluate_objective(w, chain, mu)
    target = mu * w.C_B + aux.value
    if abs(val - target) > TAU_NUM * (1.0 + mu):
        raise AssertionError(f"construction objective {val} differs from {target}")
    return chain


def dominant_shortcut(w: WiretapChannel, mu: float, report=None) -> AuxiliaryChain:
    """U absent; V uniform over the shifts of argmin f_mu."""
    group = _require_symmetric(w)
    rep = report or classify(w)
    if not rep.dominantly_cyclic:
        raise PreconditionError("channel is not certified dominantly cyclic shift symmetric")
    n = w.in_dim
    lo = f_min(w, mu)
    chain = AuxiliaryChain.prefix(np.full(n, 1.0 / n), group_orbit(lo.argopt, group),
                                  label="dominant")
    val = evaluate_objective(w, chain, mu)
    fu = f_mu(w, uniform(n))
    target = mu * w.C_B + fu - lo.value
    if abs(val - target) > TAU_NUM * (1.0 + mu):
        raise AssertionError(f"shortcut objective {val} differs from {target}")
    if mu == 0:
        R, Re = rate_equivocation(w, chain)
        if abs(Re - (rep.f_max - rep.f_min)) > TAU_NUM and abs(Re - (fu - lo.value)) > TAU_NUM:
            raise AssertionError("shortcut secrecy rate differs from max f - min f")
    return chain


def corner_CB_Cs(w: WiretapChannel, report=None) -> AuxiliaryChain:
    """V = X and U uniform over the shifts of argmax f; U = phi when dominant."""
    group = _require_symmetric(w)
    rep = _require_more_capable(w, report)
    n = w.in_dim
    if rep.dominantly_cyclic:
        chain = AuxiliaryChain.trivial(uniform(n), label="corner")
    else:
        chain = AuxiliaryChain.split(np.full(n, 1.0 / n), group_orbit(rep.f_max_witness, group),
                                     label="corner")
    q = chain_quantities(w, chain)
    if abs(q.I_XY - w.C_B) > TAU_NUM:
        raise AssertionError(f"corner rate {q.I_XY} differs from C_B = {w.C_B}")
    if abs((q.I_XY_U - q.I_XZ_U) - max(rep.f_max, 0.0)) > TAU_NUM:
        raise AssertionError("corner equivocation differs from C_s")
    return chain


# --- secrecy capacity ------------------------------------------------------

def secrecy_upper_bound(w: WiretapChannel, report=None) -> float:
    """max f - min f."""
    rep = report or classify(w)
    return rep.f_max - rep.f_min


def secrecy_capacity(w: WiretapChannel, report=None):
    """(C_s, achieving chain with U absent)."""
    rep = report or classify(w)
    if rep.dominantly_cyclic:
        chain = dominant_shortcut(w, 0.0, rep)
        q = chain_quantities(w, chain)
        return max(0.0, q.I_VY - q.I_VZ), chain
    if rep.more_capable:
        return max(0.0, rep.f_max), AuxiliaryChain.trivial(rep.f_max_witness, label="V=X")
    aux = auxiliary_problem(w, 0.0)
    return aux.value, aux.chain


# --- full trace ------------------------------------------------------------

def _binary_mu_star(w, rep):
    from .binary import mu_star
    if w.in_dim != 2 or rep.more_capable or not rep.cyclic_shift_symmetric:
        return None
    ms = mu_star(w)
    return ms if math.isfinite(ms.mu) and ms.mu > 0 else None


def _nontrivial_aux(w, mu):
    from .binary import find_configs
    cfgs = [c for c in find_configs(w, mu) if c.kind != "trivial"]
    if not cfgs:
        return auxiliary_problem(w, mu)
    c = max(cfgs, key=lambda c: c.objective)
    return AuxiliarySolution(value=c.objective, raw_value=c.objective,
                             weights=np.array([c.lam, 1 - c.lam]),
                             comps=np.array([[c.p1, 1 - c.p1], [c.p2, 1 - c.p2]]),
                             mu=float(mu), starts=len(cfgs), spread=0.0, clamped=False)


def trace_region(w: WiretapChannel, mu_grid=None, threads: int = 1,
                 report: ClassificationReport | None = None) -> RegionBoundary:
    """Boundary points for every mu in `mu_grid`, dispatched on the channel class.

    Binary symmetric channels also get mu* and the straight corner segment
    of slope mu* between the two optimal points at mu*.
    """
    mu_grid = default_mu_grid() if mu_grid is None else np.asarray(mu_grid, dtype=float)
    if mu_grid.size == 0 or np.any(np.diff(mu_grid) < 0) or np.any(mu_grid < 0):
        raise ValueError("mu grid must be non-empty, non-negative and ascending")
    rep = report or classify(w)
    cs, _ = secrecy_capacity(w, rep)
    if rep.more_capable:
        bd = trace_more_capable(w, mu_grid, rep, threads)
        bd.secrecy_capacity = cs
        return bd

    notes = []
    if rep.cyclic_shift_symmetric:
        method = "dominant" if rep.dominantly_cyclic else "cyclic"

        def point(mu):
            if rep.dominantly_cyclic:
                chain = dominant_shortcut(w, mu, rep)
            else:
                chain = construct_optimal_uv(w, mu)
            return RegionPoint.from_chain(w, chain, mu)
    else:
        method = "general"
        msg = "no symmetry or more-capable certificate; using the general envelope solver"
        warnings.warn(msg, FallbackWarning, stacklevel=2)
        notes.append(msg)

        def point(mu):
            return RegionPoint.from_chain(w, solve_boundary(w, mu)[1], mu)

    pts = _map(point, mu_grid, threads)
    bd = RegionBoundary(pts, w.C_B, w.C_E, cs, method, warnings=notes)
    ms = _binary_mu_star(w, rep)
    if ms is not None:
        # just below mu* the auxiliary value is below the clamp, so take the
        # non-trivial configuration directly for the left end of the segment
        left = RegionPoint.from_chain(w, construct_optimal_uv(w, ms.lo, _nontrivial_aux(w, ms.lo)),
                                      ms.lo)
        right = point(ms.hi + 1e-6)
        bd.mu_star, bd.mu_star_bracket = ms.mu, (ms.lo, ms.hi)
        bd.corner_segment = (left, right)
        bd.points = sorted(pts + [left, right], key=lambda p: p.mu)
    return bd
