"""Binary-input wiretap channels: f_mu curves, tangent configurations,
mu* thresholds and the closed-form constructions for BSC-BEC, BEC-BSC and
the three-output eavesdropper family."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .chain import AuxiliaryChain, evaluate_objective
from .channel import ChannelMatrix, WiretapChannel, make_standard
from .classify import ClassificationReport, classify
from .probability import binary_entropy

H_GRID = 1e-4
FD_STEP = 1e-5
TAU_TAN = 1e-6
TAU_NUM = 1e-9
TIE = 1e-9
XTOL = 1e-12
MU_TOL = 1e-8
MU_CAP = 1e6
KINDS = ("trivial", "boundary-left", "boundary-right", "interior-symmetric", "interior-tangent")


class BinaryError(ValueError):
    pass


def _require_binary(w: WiretapChannel):
    if w.in_dim != 2:
        raise BinaryError(f"binary input alphabet required, got |X| = {w.in_dim}")


# --- closed-form derivatives -----------------------------------------------
# p is P(X = 0); the input PMF is [p, 1 - p].

def _mi_derivs(ch: ChannelMatrix, p):
    W = ch.matrix
    p = np.asarray(p, dtype=float)
    d = W[0] - W[1]
    q = p[..., None] * W[0] + (1.0 - p[..., None]) * W[1]
    h = ch.row_entropy
    with np.errstate(divide="ignore", invalid="ignore"):
        lq = np.where(q > 0, np.log2(np.where(q > 0, q, 1.0)), 0.0)
        mi = -(q * lq).sum(-1) - p * h[0] - (1.0 - p) * h[1]
        # terms with d = 0 contribute nothing even where q = 0
        lq_d = np.where(d != 0, np.log2(q), 0.0)
        d1 = -(d * lq_d).sum(-1) - h[0] + h[1]
        d2 = -np.where(d != 0, d * d / q, 0.0).sum(-1) / math.log(2)
    return np.maximum(mi, 0.0), d1, d2


class BinaryCurve:
    """f_mu and f together with their first two derivatives."""

    def __init__(self, w: WiretapChannel, mu: float):
        _require_binary(w)
        self.w, self.mu = w, float(mu)

    def parts(self, p):
        return _mi_derivs(self.w.main, p), _mi_derivs(self.w.eavesdropper, p)

    def g(self, p, order=0):
        b, e = self.parts(p)
        return (self.mu + 1.0) * b[order] - e[order]

    def f(self, p, order=0):
        b, e = self.parts(p)
        return b[order] - e[order]

    def IB(self, p):
        return _mi_derivs(self.w.main, p)[0]


# --- curve sampling --------------------------------------------------------

@dataclass
class CurveSample:
    grid: np.ndarray
    f_values: np.ndarray
    fmu_values: np.ndarray
    dfmu: np.ndarray
    d2fmu: np.ndarray
    mu: float

    def rows(self):
        return np.column_stack([self.grid, self.f_values, self.fmu_values, self.dfmu, self.d2fmu])


def _fd(func, x, step):
    """Centered differences; second-order one-sided at 0 and 1."""
    x = np.asarray(x, dtype=float)
    d1 = np.empty_like(x)
    d2 = np.empty_like(x)
    mid = (x - step >= 0) & (x + step <= 1)
    xm = x[mid]
    fm, f0, fp = func(xm - step), func(xm), func(xm + step)
    d1[mid] = (fp - fm) / (2 * step)
    d2[mid] = (fp - 2 * f0 + fm) / step ** 2
    for sel, sgn in ((x - step < 0, 1.0), (~mid & (x - step >= 0), -1.0)):
        if not np.any(sel):
            continue
        xs = x[sel]
        v = [func(np.clip(xs + sgn * k * step, 0.0, 1.0)) for k in range(4)]
        d1[sel] = sgn * (-3 * v[0] + 4 * v[1] - v[2]) / (2 * step)
        d2[sel] = (2 * v[0] - 5 * v[1] + 4 * v[2] - v[3]) / step ** 2
    return d1, d2


def sample_curve(w: WiretapChannel, mu: float = 0.0, resolution: float = H_GRID,
                 step: float = FD_STEP) -> CurveSample:
    curve = BinaryCurve(w, mu)
    n = int(round(1.0 / resolution))
    grid = np.linspace(0.0, 1.0, n + 1)
    d1, d2 = _fd(curve.g, grid, step)
    return CurveSample(grid, curve.f(grid), curve.g(grid), d1, d2, float(mu))


# --- tangent configurations -----------------------------------------------

@dataclass
class TangentConfig:
    lam: float
    p1: float
    p2: float
    objective: float
    kind: str
    residuals: tuple = ()

    @property
    def mixture(self) -> float:
        return self.lam * self.p1 + (1.0 - self.lam) * self.p2

    @property
    def support(self) -> int:
        if self.lam <= TIE or self.lam >= 1 - TIE or abs(self.p1 - self.p2) <= TIE:
            return 1
        return 2

    def recompute(self, w: WiretapChannel, mu: float) -> float:
        c = BinaryCurve(w, mu)
        return float(c.f(self.mixture) - self.lam * c.g(self.p1) - (1 - self.lam) * c.g(self.p2))

    def chain(self) -> AuxiliaryChain:
        """Two-state V with p(v1) = lambda, p(x|v1) = [p1, 1-p1]."""
        return AuxiliaryChain.prefix([self.lam, 1 - self.lam],
                                     [[self.p1, 1 - self.p1], [self.p2, 1 - self.p2]],
                                     label=self.kind)

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "p1": self.p1, "p2": self.p2,
                "objective": self.objective, "kind": self.kind}


def _dense(n=None):
    n = n or int(round(1.0 / H_GRID))
    return np.linspace(0.0, 1.0, n + 1)


def _roots(func, xs, vals):
    """Refined roots of func from sign changes of sampled vals."""
    out = []
    s = np.sign(vals)
    for i in np.nonzero(s[:-1] * s[1:] < 0)[0]:
        out.append(brentq(func, xs[i], xs[i + 1], xtol=XTOL))
    out.extend(xs[np.nonzero(vals == 0.0)[0]].tolist())
    return out


def _best_mixture(curve: BinaryCurve, a: float, b: float, ga: float, gb: float):
    """argmax over m in [a, b] of f(m) minus the chord through (a, ga), (b, gb)."""
    lo, hi = min(a, b), max(a, b)
    slope = (gb - ga) / (b - a)

    def gap(m):
        return curve.f(m) - (ga + slope * (m - a))

    xs = np.linspace(lo, hi, 2001)
    v = gap(xs)
    i = int(np.argmax(v))
    left, right = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
    if right > left:
        r = minimize_scalar(lambda m: -gap(m), bounds=(left, right), method="bounded",
                            options={"xatol": XTOL})
        if -r.fun >= v[i]:
            return float(r.x), slope
    return float(xs[i]), slope


def _make_config(curve: BinaryCurve, p1: float, p2: float, kind: str):
    g1, g2 = float(curve.g(p1)), float(curve.g(p2))
    m, slope = _best_mixture(curve, p1, p2, g1, g2)
    lam = (m - p2) / (p1 - p2)
    if not (TIE < lam < 1 - TIE):
        return None
    obj = float(curve.f(m) - lam * g1 - (1 - lam) * g2)
    res = [abs(float(curve.f(m, 1)) - slope)]
    for p in (p1, p2):
        if 0 < p < 1:
            res.append(abs(float(curve.g(p, 1)) - slope))
    return TangentConfig(float(lam), float(p1), float(p2), obj, kind, tuple(res))


def _trivial(curve: BinaryCurve) -> TangentConfig:
    m, _ = _best_mixture(curve, 0.0, 1.0, 0.0, 0.0)
    return TangentConfig(1.0 - m, 0.0, 1.0, float(curve.f(m)), "trivial", ())


def _endpoint_tangents(curve: BinaryCurve, xs):
    """Interior p whose tangent to f_mu passes through an endpoint (e, 0)."""
    out = []
    for e in (0.0, 1.0):
        def T(p, e=e):
            return curve.g(p, 1) * (p - e) - curve.g(p)
        vals = T(xs)
        if np.max(np.abs(vals)) < 1e-14:
            continue
        out.extend((e, p) for p in _roots(T, xs, vals))
    return out


def _runs(s):
    """Index ranges on which the sampled slope is monotone."""
    ds = np.sign(np.diff(s))
    cuts = [0]
    for i in range(1, len(ds)):
        if ds[i] != 0 and ds[i - 1] != 0 and ds[i] != ds[i - 1]:
            cuts.append(i)
    cuts.append(len(s) - 1)
    return [(cuts[k], cuts[k + 1]) for k in range(len(cuts) - 1) if cuts[k + 1] > cuts[k]]


def _bitangents(curve: BinaryCurve, xs):
    """Pairs of interior points sharing one tangent line.

    In the dual (slope, intercept) plane each monotone-slope run of the
    curve is a graph c(s); bitangents are crossings of two such graphs.
    """
    s = curve.g(xs, 1)
    runs = _runs(s)
    out = []

    def inverse(run, ts):
        """p on `run` with g'(p) = t: interpolated start, then Newton on g'."""
        sv, xv = s[run[0]:run[1] + 1], xs[run[0]:run[1] + 1]
        o = np.argsort(sv)
        ts = np.asarray(ts, dtype=float)
        p = np.interp(ts, sv[o], xv[o])
        for _ in range(6):
            d2 = curve.g(p, 2)
            step = np.where(d2 != 0, (curve.g(p, 1) - ts) / np.where(d2 != 0, d2, 1.0), 0.0)
            p = np.clip(p - step, xv[0], xv[-1])
        return p

    def dual_gap(ri, rj, ts):
        pi, pj = inverse(ri, ts), inverse(rj, ts)
        return (curve.g(pi) - ts * pi) - (curve.g(pj) - ts * pj)

    for i in range(len(runs)):
        for j in range(i + 1, len(runs)):
            ri, rj = runs[i], runs[j]
            si, sj = s[ri[0]:ri[1] + 1], s[rj[0]:rj[1] + 1]
            lo = max(si.min(), sj.min())
            hi = min(si.max(), sj.max())
            if not hi > lo:
                continue
            ts = np.linspace(lo, hi, 401)[1:-1]
            diff = dual_gap(ri, rj, ts)
            sg = np.sign(diff)
            # mirror-symmetric curves cross on the grid slope t = 0, where the
            # gap is zero up to rounding
            hits = set(np.nonzero(sg[:-1] * sg[1:] < 0)[0].tolist())
            hits |= set(np.nonzero(np.abs(diff) <= 1e-13)[0].tolist())
            for k in sorted(hits):
                if abs(diff[k]) <= 1e-13:
                    t = ts[k]
                elif k + 1 < len(ts) and abs(diff[k + 1]) <= 1e-13:
                    continue
                else:
                    try:
                        t = brentq(lambda t: float(dual_gap(ri, rj, np.array([t]))[0]),
                                   ts[k], ts[k + 1], xtol=XTOL)
                    except ValueError:
                        continue
                p1, p2 = sorted((float(inverse(ri, t)), float(inverse(rj, t))))
                if p2 - p1 > 1e-6:
                    out.append((p1, p2))
    return out


def find_configs(w: WiretapChannel, mu: float = 0.0) -> list[TangentConfig]:
    """Every (lambda, p1, p2) meeting the tangency conditions, plus the trivial one."""
    curve = BinaryCurve(w, mu)
    xs = _dense()[1:-1]
    configs = [_trivial(curve)]
    for e, p in _endpoint_tangents(curve, xs):
        cfg = _make_config(curve, e, p, "boundary-left" if e == 0.0 else "boundary-right")
        if cfg is not None:
            configs.append(cfg)
    for p1, p2 in _bitangents(curve, xs):
        kind = "interior-symmetric" if abs(p1 + p2 - 1) < TAU_TAN else "interior-tangent"
        cfg = _make_config(curve, p1, p2, kind)
        if cfg is not None:
            configs.append(cfg)
    return [c for c in configs if all(r <= TAU_TAN for r in c.residuals)]


def best_config(w: WiretapChannel, mu: float = 0.0) -> TangentConfig:
    """Highest objective; near-ties go to smaller V support, then (p1, p2)."""
    configs = find_configs(w, mu)
    top = max(c.objective for c in configs)
    tied = [c for c in configs if c.objective >= top - TIE]
    return min(tied, key=lambda c: (c.support, c.p1, c.p2))


# --- mu* -------------------------------------------------------------------

def min_fmu(w: WiretapChannel, mu: float, interior: bool = False):
    """(min f_mu, argmin) by dense scan and bounded refinement."""
    curve = BinaryCurve(w, mu)
    xs = _dense()
    if interior:
        xs = xs[1:-1]
    v = curve.g(xs)
    i = int(np.argmin(v))
    left, right = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
    best, arg = float(v[i]), float(xs[i])
    r = minimize_scalar(lambda p: float(curve.g(p)), bounds=(left, right), method="bounded",
                        options={"xatol": XTOL})
    if r.fun < best:
        best, arg = float(r.fun), float(r.x)
    return best, arg


@dataclass
class MuStar:
    mu: float
    lo: float
    hi: float
    condition: str
    residual: float

    def __float__(self):
        return self.mu


def mu_star_condition(w: WiretapChannel, mu: float, condition: str) -> float:
    """Margin of the defining condition; the condition holds iff margin >= 0.

    ``reference``: min f_mu - f(0.5). ``nonnegative``: interior min of f_mu.
    """
    if condition == "reference":
        return min_fmu(w, mu)[0] - float(BinaryCurve(w, 0.0).f(0.5))
    if condition == "nonnegative":
        return min_fmu(w, mu, interior=True)[0]
    raise ValueError(f"unknown condition {condition!r}")


def default_condition(w: WiretapChannel) -> str:
    kind = w.params.get("kind")
    if kind == "bsc_bec":
        return "reference"
    if kind == "bec_bsc":
        return "nonnegative"
    # Eve dominating everywhere behaves like BSC-BEC, otherwise like BEC-BSC
    return "reference" if float(np.max(BinaryCurve(w, 0.0).f(_dense(2000)))) <= TAU_NUM else "nonnegative"


def mu_star(w: WiretapChannel, condition: str | None = None, tol: float = MU_TOL) -> MuStar:
    """Smallest mu at which the defining condition holds (bisection).

    Zero when f >= 0 already; inf when the condition fails up to MU_CAP.
    """
    _require_binary(w)
    cond = condition or default_condition(w)
    if float(np.min(BinaryCurve(w, 0.0).f(_dense(2000)))) >= -TAU_NUM and cond == "nonnegative":
        return MuStar(0.0, 0.0, 0.0, cond, mu_star_condition(w, 0.0, cond))

    def ok(mu):
        return mu_star_condition(w, mu, cond) >= 0.0

    margin0 = mu_star_condition(w, 0.0, cond)
    if margin0 >= -TAU_NUM:
        return MuStar(0.0, 0.0, 0.0, cond, margin0)
    hi = 1.0
    while not ok(hi):
        hi *= 2.0
        if hi > MU_CAP:
            return MuStar(math.inf, MU_CAP, math.inf, cond, mu_star_condition(w, MU_CAP, cond))
    lo = 0.0 if hi == 1.0 else hi / 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return MuStar(hi, lo, hi, cond, mu_star_condition(w, hi, cond))


# --- BEC-BSC chain ---------------------------------------------------------

def _kind_params(w):
    kind = w.params.get("kind")
    return kind, w.params.get("alpha"), w.params.get("eps")


def bec_bsc_chain(w: WiretapChannel, mu: float, config: TangentConfig | None = None,
                  check_generic: bool = True) -> AuxiliaryChain:
    """Two-state U, four-state V chain built from the boundary configuration.

    V states: x = 1 surely, x = 0 w.p. p, x = 0 surely, x = 0 w.p. 1 - p.
    """
    kind, alpha, eps = _kind_params(w)
    if kind != "bec_bsc" or alpha < binary_entropy(eps):
        raise BinaryError("needs a BEC(alpha)-BSC(eps) channel with alpha >= h(eps)")
    ms = mu_star(w, "nonnegative")
    if mu > ms.hi + MU_TOL:
        raise BinaryError(f"mu = {mu} exceeds mu* = {ms.mu}")
    if config is None:
        cands = [c for c in find_configs(w, mu) if c.kind == "boundary-left"]
        if not cands:
            raise BinaryError("no boundary tangent configuration found")
        config = max(cands, key=lambda c: c.objective)
    lam, p = config.lam, config.p2
    chain = AuxiliaryChain(
        [0.5, 0.5],
        [[lam, 1 - lam, 0, 0], [0, 0, lam, 1 - lam]],
        [[0.0, 1.0], [p, 1 - p], [1.0, 0.0], [1 - p, p]],
        label="bec-bsc")
    val = evaluate_objective(w, chain, mu)
    target = mu * w.C_B + config.objective
    if abs(val - target) > TAU_NUM + 1e-10 * mu:
        raise AssertionError(f"chain objective {val} differs from {target}")
    if check_generic:
        from .region import auxiliary_problem
        aux = auxiliary_problem(w, mu)
        if abs(mu * w.C_B + aux.value - val) > 1e-6:
            raise AssertionError(f"generic construction gives {mu * w.C_B + aux.value}, chain {val}")
    return chain


# --- three-output eavesdropper family --------------------------------------

def sec53_formulas(p: float, q: float):
    """(c, eps*, b) in bits; eps* zeroes the second derivative of f at p_x = 0."""
    if not (p > 0 and q > 0 and p + q < 1):
        raise ValueError(f"need p, q > 0 and p + q < 1, got {p}, {q}")
    k = 1 - p - 2 * q
    c = k * k * (1 - p) / ((1 - p - q) * q)
    eps = 0.5 - 0.5 * math.sqrt(c / (4 + c))
    b = (1 - 2 * eps) * math.log2((1 - eps) / eps) - k * math.log2((1 - p - q) / q)
    if abs(second_derivative_at_zero(p, q, eps)) > TAU_NUM:
        raise AssertionError("second derivative does not vanish at eps*")
    if b < -TAU_NUM:
        raise AssertionError(f"b = {b} is negative")
    return c, eps, b


def second_derivative_at_zero(p: float, q: float, eps: float) -> float:
    """f'' at p_x = 0 (natural-log units)."""
    k = 1 - p - 2 * q
    return -(2 * eps - 1) ** 2 / (eps * (1 - eps)) + k * k * (1 - p) / ((1 - p - q) * q)


def first_derivative_at_zero(p: float, q: float, eps: float) -> float:
    """f' at p_x = 0 in bits."""
    k = 1 - p - 2 * q
    return (1 - 2 * eps) * math.log2((1 - eps) / eps) - k * math.log2((1 - p - q) / q)


def sec53_window(p: float, q: float):
    """(eps*, eps* + delta): f'(0) stays positive on this crossover range."""
    _, es, _ = sec53_formulas(p, q)
    if first_derivative_at_zero(p, q, es) <= 0:
        return es, es
    top = brentq(lambda e: first_derivative_at_zero(p, q, e), es, 0.5 - 1e-12, xtol=1e-14)
    return es, top


def _inflections(d2, xs):
    s = np.sign(d2)
    idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
    return xs[idx]


def verify_sec53_instance(p: float, q: float, eps: float) -> ClassificationReport:
    """Classification plus the curve-shape checks for the family.

    The extra keys record f'(0), f''(0), interior inflection points on
    (0, 0.5), whether 0.5 maximizes f and the eps window.
    """
    w = make_standard("sec53", p, q, eps)
    rep = classify(w)
    xs = np.linspace(0.0, 0.5, 5001)
    curve = BinaryCurve(w, 0.0)
    d1, d2 = _fd(curve.f, xs, FD_STEP)
    interior = (xs > 0) & (xs < 0.5)
    # sign changes of the closed-form curvature; finite differences jitter at the crossing
    infl = _inflections(curve.f(xs[interior], 2), xs[interior])
    # p_x = 0.5 counts as maximizer when nothing beats it by more than tau
    at_half = float(BinaryCurve(w, 0.0).f(0.5)) >= rep.f_max - 1e-8
    lo, hi = sec53_window(p, q)
    rep.extra.update({
        "f_prime_0": float(d1[0]),
        "f_second_0": float(d2[0]),
        "inflections": infl.tolist(),
        "single_inflection": len(infl) == 1,
        "maximized_at_half": at_half,
        "eps_window": [lo, hi],
        "in_window": lo < eps < hi,
        "triple_property": bool(rep.more_capable and not rep.less_noisy
                                and rep.dominantly_cyclic),
    })
    return rep
