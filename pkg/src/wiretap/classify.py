"""Placement of a wiretap channel among the more capable, less noisy and
(dominantly) cyclic shift symmetric classes."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chain import AuxiliaryChain, chain_quantities
from .channel import WiretapChannel, f_mu, f_mu_batch
from .probability import (TAU_PMF, as_pmf, decompose, group_orbit, random_pmfs,
                          simplex_grid, uniform)
from .search import SimplexOptimum, optimize_combination

TAU_CLASS = 1e-8
CLASS_RESOLUTION = {2: 200, 3: 40, 4: 20}
INTERIOR_MIN = 10 * TAU_PMF
LOCAL_STEPS = (1e-3, 1e-2)
PAIR_SAMPLES = 20_000
RANDOM_PAIRS = 2_000
N_STARTS = 8

NOTES = ("more capable: grid search plus local refinement (certificate); "
         "less noisy: midpoint concavity of f (certificate, relies on the external "
         "concavity characterization); cyclic symmetry: sampled invariance (certificate)")


class PreconditionError(ValueError):
    pass


def class_resolution(dim: int) -> int:
    return CLASS_RESOLUTION.get(dim, max(4, int(round(2000 ** (1.0 / max(dim - 1, 1))))))


def f_min(w: WiretapChannel, mu: float = 0.0) -> SimplexOptimum:
    return optimize_combination(w, mu + 1.0, -1.0, maximize=False, n_starts=N_STARTS,
                                resolution=class_resolution(w.in_dim))


def f_max(w: WiretapChannel, mu: float = 0.0) -> SimplexOptimum:
    return optimize_combination(w, mu + 1.0, -1.0, maximize=True, n_starts=N_STARTS,
                                extra_starts=[uniform(w.in_dim)],
                                resolution=class_resolution(w.in_dim))


def is_more_capable(w: WiretapChannel, tol: float = TAU_CLASS):
    """(f >= 0 on the simplex, argmin witness)."""
    lo = f_min(w)
    return bool(lo.value >= -tol), lo.argopt


@dataclass
class ConcavityCheck:
    concave: bool
    worst: float
    pair: tuple[np.ndarray, np.ndarray] | None
    tested: int


def _midpoint_gaps(w, A, B):
    M = 0.5 * (A + B)
    return f_mu_batch(w, M) - 0.5 * (f_mu_batch(w, A) + f_mu_batch(w, B))


def concavity_check(w: WiretapChannel, tol: float = TAU_CLASS, seed: int = 0,
                    resolution: int | None = None) -> ConcavityCheck:
    """Midpoint test of f((p+p')/2) >= (f(p)+f(p'))/2 - tol.

    Pairs come from three sources: short segments e_i - e_j through every
    grid point (catches local convexity), random grid pairs and random
    interior pairs.
    """
    n = w.in_dim
    rng = np.random.default_rng(seed)
    res = resolution or class_resolution(n)
    grid = simplex_grid(n, res)
    As, Bs = [], []
    for h in (1.0 / res,) + LOCAL_STEPS:
        for i in range(n):
            for j in range(i + 1, n):
                d = np.zeros(n)
                d[i], d[j] = h, -h
                A, B = grid + d, grid - d
                ok = (A.min(axis=1) >= 0) & (B.min(axis=1) >= 0)
                As.append(A[ok])
                Bs.append(B[ok])
    k = min(PAIR_SAMPLES, len(grid) ** 2)
    ia, ib = rng.integers(len(grid), size=(2, k))
    As.append(grid[ia])
    Bs.append(grid[ib])
    As.append(random_pmfs(rng, n, RANDOM_PAIRS))
    Bs.append(random_pmfs(rng, n, RANDOM_PAIRS))
    A = np.clip(np.concatenate(As), 0.0, None)
    B = np.clip(np.concatenate(Bs), 0.0, None)
    gaps = _midpoint_gaps(w, A, B)
    i = int(np.argmin(gaps))
    worst = float(gaps[i])
    ok = worst >= -tol
    return ConcavityCheck(ok, worst, None if ok else (A[i], B[i]), len(gaps))


def is_less_noisy(w: WiretapChannel, tol: float = TAU_CLASS) -> bool:
    return concavity_check(w, tol).concave


def is_dominantly_cyclic(w: WiretapChannel, tol: float = TAU_CLASS,
                         f_top: SimplexOptimum | None = None) -> bool:
    if w.symmetry is None:
        raise PreconditionError("channel is not certified cyclic shift symmetric")
    hi = f_top if f_top is not None else f_max(w)
    return bool(f_mu(w, uniform(w.in_dim)) >= hi.value - tol)


@dataclass
class ClassificationReport:
    more_capable: bool
    less_noisy: bool
    cyclic_shift_symmetric: bool
    dominantly_cyclic: bool
    f_min: float
    f_min_witness: np.ndarray
    f_max: float
    f_max_witness: np.ndarray
    symmetry_group: str | None = None
    notes: str = NOTES
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "more_capable": self.more_capable,
            "less_noisy": self.less_noisy,
            "cyclic_shift_symmetric": self.cyclic_shift_symmetric,
            "dominantly_cyclic": self.dominantly_cyclic,
            "symmetry_group": self.symmetry_group,
            "f_min": self.f_min,
            "f_min_witness": self.f_min_witness.tolist(),
            "f_max": self.f_max,
            "f_max_witness": self.f_max_witness.tolist(),
            "notes": self.notes,
            **self.extra,
        }


def classify(w: WiretapChannel, tol: float = TAU_CLASS, seed: int = 0) -> ClassificationReport:
    lo, hi = f_min(w), f_max(w)
    mc = bool(lo.value >= -tol)
    ln = mc and concavity_check(w, tol, seed=seed).concave
    sym = w.symmetry
    dom = sym is not None and is_dominantly_cyclic(w, tol, f_top=hi)
    return ClassificationReport(
        more_capable=mc, less_noisy=ln, cyclic_shift_symmetric=sym is not None,
        dominantly_cyclic=dom, f_min=lo.value, f_min_witness=lo.argopt,
        f_max=hi.value, f_max_witness=hi.argopt, symmetry_group=sym)


# --- strictly improving prefix -------------------------------------------

def lemma_prefix(w: WiretapChannel, p_star, p_hat) -> AuxiliaryChain:
    """V with p(x|v1) = p_hat and the remaining states on vertices, mixing to p_star."""
    dec = decompose(p_star, p_hat)
    n = w.in_dim
    rows = [dec.anchor] + [np.eye(n)[j] for j in dec.basis_indices]
    return AuxiliaryChain.prefix(dec.q, np.array(rows), label="lemma")


def orbit_prefix(w: WiretapChannel, p_hat, group: str) -> AuxiliaryChain:
    """V uniform over the group shifts of p_hat."""
    n = w.in_dim
    return AuxiliaryChain.prefix(np.full(n, 1.0 / n), group_orbit(as_pmf(p_hat), group),
                                 label="orbit")


def prefix_gain(w: WiretapChannel, chain: AuxiliaryChain) -> float:
    """I(V;Y) - I(V;Z)."""
    q = chain_quantities(w, chain)
    return q.I_VY - q.I_VZ


def improving_prefix(w: WiretapChannel, allow_orbit: bool = True,
                     tol: float = TAU_CLASS) -> AuxiliaryChain | None:
    """A prefix V -> X with I(V;Y) - I(V;Z) > max f, or None.

    Needs f_min < 0. With an interior maximizer P* the mixture of the
    argmin P^ and vertices through P* is returned. When the maximizer lies
    on a face and `allow_orbit` is set, a symmetric channel falls back to V
    uniform over the shifts of P^, kept only if it strictly improves.
    """
    lo = f_min(w)
    if lo.value >= -tol:
        return None
    hi = f_max(w)
    if np.all(hi.argopt >= INTERIOR_MIN):
        chain = lemma_prefix(w, hi.argopt, lo.argopt)
        if prefix_gain(w, chain) > hi.value + tol:
            return chain
    if allow_orbit and w.symmetry is not None:
        chain = orbit_prefix(w, lo.argopt, w.symmetry)
        if prefix_gain(w, chain) > hi.value + tol:
            return chain
    return None
