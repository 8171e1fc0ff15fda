"""Auxiliary Markov chains U -> V -> X and the quantities they induce."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelMatrix, WiretapChannel, mutual_information_batch
from .probability import TAU_PMF, as_pmf

TAU_NUM = 1e-9


class ChainError(ValueError):
    pass


class IdentityViolation(AssertionError):
    """The two evaluations of the boundary objective disagree."""


def _stochastic(m, name):
    m = np.atleast_2d(np.array(m, dtype=float))
    try:
        return np.stack([as_pmf(r) for r in m])
    except ValueError as exc:
        raise ChainError(f"{name}: {exc}") from None


@dataclass(frozen=True, eq=False)
class AuxiliaryChain:
    """Marginal p(u), conditionals p(v|u) and p(x|v).

    U = phi is a single-state U; V = X is ``px_given_v = I``.
    """

    pu: np.ndarray
    pv_given_u: np.ndarray
    px_given_v: np.ndarray
    label: str = ""

    def __post_init__(self):
        pu = as_pmf(self.pu)
        pvu = _stochastic(self.pv_given_u, "pv_given_u")
        pxv = _stochastic(self.px_given_v, "px_given_v")
        if pvu.shape[0] != pu.size:
            raise ChainError(f"pv_given_u has {pvu.shape[0]} rows for |U| = {pu.size}")
        if pxv.shape[0] != pvu.shape[1]:
            raise ChainError(f"px_given_v has {pxv.shape[0]} rows for |V| = {pvu.shape[1]}")
        for name, arr in (("pu", pu), ("pv_given_u", pvu), ("px_given_v", pxv)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    # shapes
    @property
    def card_u(self) -> int:
        return self.pu.size

    @property
    def card_v(self) -> int:
        return self.pv_given_u.shape[1]

    @property
    def in_dim(self) -> int:
        return self.px_given_v.shape[1]

    # induced distributions
    @property
    def pv(self) -> np.ndarray:
        return self.pu @ self.pv_given_u

    @property
    def px_given_u(self) -> np.ndarray:
        return self.pv_given_u @ self.px_given_v

    @property
    def px(self) -> np.ndarray:
        return self.pv @ self.px_given_v

    @property
    def support_v(self) -> int:
        return int(np.sum(self.pv > TAU_PMF))

    # constructors
    @classmethod
    def trivial(cls, px, label="trivial") -> "AuxiliaryChain":
        """U = phi, V = X with input `px`."""
        px = as_pmf(px)
        return cls([1.0], px[None, :], np.eye(px.size), label=label)

    @classmethod
    def prefix(cls, pv, px_given_v, label="prefix") -> "AuxiliaryChain":
        """U = phi with channel prefix V -> X."""
        return cls([1.0], np.atleast_2d(as_pmf(pv)), px_given_v, label=label)

    @classmethod
    def split(cls, pu, px_given_u, label="split") -> "AuxiliaryChain":
        """Rate splitting only: V = X."""
        pxu = np.atleast_2d(np.asarray(px_given_u, dtype=float))
        return cls(pu, pxu, np.eye(pxu.shape[1]), label=label)

    def with_v_equal_x(self) -> "AuxiliaryChain":
        """Same p(u) and p(x|u), prefix removed."""
        return AuxiliaryChain.split(self.pu, self.px_given_u, label=self.label + "/V=X")

    def to_dict(self) -> dict:
        return {"pu": self.pu.tolist(), "pv_given_u": self.pv_given_u.tolist(),
                "px_given_v": self.px_given_v.tolist(), "label": self.label}


@dataclass(frozen=True)
class ChainQuantities:
    I_XY: float
    I_XZ: float
    I_XY_U: float
    I_XZ_U: float
    I_XY_V: float
    I_XZ_V: float
    I_VY: float
    I_VZ: float
    I_VY_U: float
    I_VZ_U: float

    @property
    def rate(self) -> float:
        return self.I_VY

    @property
    def equivocation_bound(self) -> float:
        """I(V;Y|U) - I(V;Z|U)."""
        return self.I_VY_U - self.I_VZ_U


def _check_dims(w: WiretapChannel, chain: AuxiliaryChain):
    if chain.in_dim != w.in_dim:
        raise ChainError(f"chain acts on {chain.in_dim} inputs, channel has {w.in_dim}")


def chain_quantities(w: WiretapChannel, chain: AuxiliaryChain) -> ChainQuantities:
    """Every mutual information the boundary objective needs.

    The V-terms are computed directly from the composed channels
    p(y|v) and p(z|v), not through the Markov identity.
    """
    _check_dims(w, chain)
    B, E = w.main, w.eavesdropper
    px, pv, pu = chain.px, chain.pv, chain.pu
    pxu, pxv, pvu = chain.px_given_u, chain.px_given_v, chain.pv_given_u

    def mi(ch, P):
        return mutual_information_batch(ch, np.ascontiguousarray(P))

    VB = ChannelMatrix(pxv @ B.matrix)
    VE = ChannelMatrix(pxv @ E.matrix)
    return ChainQuantities(
        I_XY=float(mi(B, px)),
        I_XZ=float(mi(E, px)),
        I_XY_U=float(pu @ mi(B, pxu)),
        I_XZ_U=float(pu @ mi(E, pxu)),
        I_XY_V=float(pv @ mi(B, pxv)),
        I_XZ_V=float(pv @ mi(E, pxv)),
        I_VY=float(mi(VB, pv)),
        I_VZ=float(mi(VE, pv)),
        I_VY_U=float(pu @ mi(VB, pvu)),
        I_VZ_U=float(pu @ mi(VE, pvu)),
    )


def objective_direct(q: ChainQuantities, mu: float) -> float:
    """mu I(V;Y) + I(V;Y|U) - I(V;Z|U)."""
    return mu * q.I_VY + q.I_VY_U - q.I_VZ_U


def objective_identity(q: ChainQuantities, mu: float) -> float:
    """mu I(X;Y) + I(X;Y|U) - I(X;Z|U) - [(mu+1) I(X;Y|V) - I(X;Z|V)]."""
    return (mu * q.I_XY + q.I_XY_U - q.I_XZ_U
            - ((mu + 1.0) * q.I_XY_V - q.I_XZ_V))


def evaluate_objective(w: WiretapChannel, chain: AuxiliaryChain, mu: float,
                       tol: float = TAU_NUM) -> float:
    """Boundary objective of `chain` at slope `mu`, evaluated two ways.

    Raises :class:`IdentityViolation` if the forms disagree by more than
    `tol`.
    """
    if mu < 0:
        raise ValueError("mu must be non-negative")
    q = chain_quantities(w, chain)
    a = objective_direct(q, mu)
    b = objective_identity(q, mu)
    if abs(a - b) > tol:
        raise IdentityViolation(f"objective forms differ: {a!r} vs {b!r}")
    return a


def rate_equivocation(w: WiretapChannel, chain: AuxiliaryChain) -> tuple[float, float]:
    """(R, Re) supported by `chain`: R = I(V;Y), Re = min(R, bound)^+."""
    q = chain_quantities(w, chain)
    R = q.rate
    return R, min(R, max(0.0, q.equivocation_bound))
