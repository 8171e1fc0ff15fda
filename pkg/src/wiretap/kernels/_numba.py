"""Loop kernels compiled with numba."""
import math

import numpy as np
from numba import njit

MIXTURE = 0
CHAIN = 1


@njit(cache=True)
def _entropy(q):
    s = 0.0
    for v in q:
        if v > 0.0:
            s -= v * math.log2(v)
    return s


@njit(cache=True)
def _mi_at(W, HW, x, off):
    """I(X;Y) for the input PMF stored at x[off:off + W.shape[0]]."""
    n, m = W.shape
    q = np.zeros(m)
    hyx = 0.0
    for i in range(n):
        pi = x[off + i]
        if pi > 0.0:
            hyx += pi * HW[i]
            for j in range(m):
                q[j] += pi * W[i, j]
    v = _entropy(q) - hyx
    return v if v > 0.0 else 0.0


@njit(cache=True)
def mi(W, HW, p):
    return _mi_at(W, HW, p, 0)


@njit(cache=True)
def mi_batch(W, HW, P):
    out = np.empty(P.shape[0])
    for r in range(P.shape[0]):
        out[r] = _mi_at(W, HW, P[r], 0)
    return out


@njit(cache=True)
def objective(code, x, layout, WB, HB, WE, HE, coefs):
    if code == MIXTURE:
        # a1 I_B(m) + a2 I_E(m) - sum_i w_i (b1 I_B(P_i) + b2 I_E(P_i))
        k = layout[0]
        n = layout[1]
        m = np.zeros(n)
        acc = 0.0
        for i in range(k):
            wi = x[i]
            if wi > 0.0:
                off = k + i * n
                for j in range(n):
                    m[j] += wi * x[off + j]
                acc += wi * (coefs[2] * _mi_at(WB, HB, x, off)
                             + coefs[3] * _mi_at(WE, HE, x, off))
        return coefs[0] * mi(WB, HB, m) + coefs[1] * mi(WE, HE, m) - acc
    # CHAIN: mu I(X;Y) + I(X;Y|U) - I(X;Z|U) - [(mu+1) I(X;Y|V) - I(X;Z|V)]
    nu = layout[0]
    nv = layout[1]
    n = layout[2]
    mu = coefs[0]
    ov = nu
    ox = nu + nu * nv
    P = np.zeros(n)
    pv = np.zeros(nv)
    val = 0.0
    for u in range(nu):
        pu = x[u]
        Pu = np.zeros(n)
        for v in range(nv):
            w = x[ov + u * nv + v]
            pv[v] += pu * w
            for j in range(n):
                Pu[j] += w * x[ox + v * n + j]
        if pu > 0.0:
            for j in range(n):
                P[j] += pu * Pu[j]
            val += pu * (mi(WB, HB, Pu) - mi(WE, HE, Pu))
    val += mu * mi(WB, HB, P)
    for v in range(nv):
        if pv[v] > 0.0:
            off = ox + v * n
            val -= pv[v] * ((mu + 1.0) * _mi_at(WB, HB, x, off) - _mi_at(WE, HE, x, off))
    return val


@njit(cache=True)
def objective_batch(code, X, layout, WB, HB, WE, HE, coefs):
    out = np.empty(X.shape[0])
    for r in range(X.shape[0]):
        out[r] = objective(code, X[r], layout, WB, HB, WE, HE, coefs)
    return out


@njit(cache=True)
def pattern_search(code, x0, layout, blocks, WB, HB, WE, HE, coefs,
                   step0, min_step, max_evals):
    """First-improvement pairwise mass-transfer search, maximizing.

    Each block of `x` is a PMF; a move shifts min(step, x[a]) from entry a
    to entry c of one block. The step halves once no move improves.
    """
    x = x0.copy()
    best = objective(code, x, layout, WB, HB, WE, HE, coefs)
    evals = 1
    step = step0
    while step >= min_step and evals < max_evals:
        improved = True
        while improved and evals < max_evals:
            improved = False
            for b in range(blocks.shape[0]):
                s0 = blocks[b, 0]
                sz = blocks[b, 1]
                for a in range(sz):
                    for c in range(sz):
                        if a == c:
                            continue
                        ia = s0 + a
                        ic = s0 + c
                        d = min(step, x[ia])
                        if d <= 0.0:
                            continue
                        xa = x[ia]
                        xc = x[ic]
                        x[ia] = xa - d
                        x[ic] = xc + d
                        val = objective(code, x, layout, WB, HB, WE, HE, coefs)
                        evals += 1
                        if val > best + 1e-16:
                            best = val
                            improved = True
                        else:
                            x[ia] = xa
                            x[ic] = xc
        step *= 0.5
    return x, best, evals


# --- oracle kernels ---------------------------------------------------------
# Binary-input only; mutual information is evaluated from the two channel
# rows directly so these share no code with the solver path above.

@njit(cache=True)
def _bin_mi(W, h0, h1, a):
    m = W.shape[1]
    hq = 0.0
    for j in range(m):
        q = a * W[0, j] + (1.0 - a) * W[1, j]
        if q > 0.0:
            hq -= q * math.log2(q)
    return hq - a * h0 - (1.0 - a) * h1


@njit(cache=True)
def brute_binary(WB, WE, mu, res):
    hb0 = _entropy(WB[0])
    hb1 = _entropy(WB[1])
    he0 = _entropy(WE[0])
    he1 = _entropy(WE[1])
    g = np.empty(res + 1)
    for i in range(res + 1):
        a = i / res
        g[i] = (mu + 1.0) * _bin_mi(WB, hb0, hb1, a) - _bin_mi(WE, he0, he1, a)
    best = -1e300
    bi = np.zeros(3, dtype=np.int64)
    slope = 0.0
    for i1 in range(res + 1):
        p1 = i1 / res
        for i2 in range(res + 1):
            p2 = i2 / res
            prev = 0.0
            for il in range(res + 1):
                lam = il / res
                m = lam * p1 + (1.0 - lam) * p2
                val = (_bin_mi(WB, hb0, hb1, m) - _bin_mi(WE, he0, he1, m)
                       - lam * g[i1] - (1.0 - lam) * g[i2])
                if il > 0:
                    d = abs(val - prev) * res
                    if d > slope:
                        slope = d
                prev = val
                if val > best:
                    best = val
                    bi[0] = il
                    bi[1] = i1
                    bi[2] = i2
    for i in range(res):
        d = abs(g[i + 1] - g[i]) * res
        if d > slope:
            slope = d
    return best, bi, slope


@njit(cache=True)
def brute_chain(WB, WE, mu, xs, vsets, rows, pus, combos):
    """Exhaustive max of the chain objective over a finite parameter grid.

    vsets: multisets of conditional P(X=0|v) indices into xs (one per V
    label, sorted); rows: candidate p(v|u) rows; pus: candidate p(u);
    combos: non-decreasing tuples of row indices, one row per U label.
    """
    hb0 = _entropy(WB[0])
    hb1 = _entropy(WB[1])
    he0 = _entropy(WE[0])
    he1 = _entropy(WE[1])
    nx = xs.shape[0]
    gx = np.empty(nx)
    for i in range(nx):
        a = xs[i]
        gx[i] = (mu + 1.0) * _bin_mi(WB, hb0, hb1, a) - _bin_mi(WE, he0, he1, a)
    nr = rows.shape[0]
    cv = rows.shape[1]
    cu = pus.shape[1]
    pu_x = np.empty(nr)
    A = np.empty(nr)
    best = -1e300
    bm = 0
    bc = 0
    bp = 0
    for mi_ in range(vsets.shape[0]):
        for r in range(nr):
            a = 0.0
            s = 0.0
            for v in range(cv):
                w = rows[r, v]
                a += w * xs[vsets[mi_, v]]
                s += w * gx[vsets[mi_, v]]
            pu_x[r] = a
            A[r] = _bin_mi(WB, hb0, hb1, a) - _bin_mi(WE, he0, he1, a) - s
        for ci in range(combos.shape[0]):
            for pi in range(pus.shape[0]):
                P = 0.0
                val = 0.0
                for u in range(cu):
                    w = pus[pi, u]
                    r = combos[ci, u]
                    P += w * pu_x[r]
                    val += w * A[r]
                val += mu * _bin_mi(WB, hb0, hb1, P)
                if val > best:
                    best = val
                    bm = mi_
                    bc = ci
                    bp = pi
    return best, bm, bc, bp
