"""Vectorized numpy versions of the loop kernels.

Same signatures and return values as the numba module. The pattern
search here takes the best of all candidate moves per iteration instead of
the first improving one, which lets each iteration be a single batched
objective evaluation; both variants stop at the same kind of local optimum.
"""
import numpy as np

MIXTURE = 0
CHAIN = 1


def _entropy_rows(Q):
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(Q > 0.0, Q * np.log2(np.where(Q > 0.0, Q, 1.0)), 0.0)
    return -t.sum(axis=-1)


def mi_batch(W, HW, P):
    P = np.asarray(P, dtype=float)
    v = _entropy_rows(P @ W) - P @ HW
    return np.maximum(v, 0.0)


def mi(W, HW, p):
    return float(mi_batch(W, HW, np.asarray(p, dtype=float)[None, :])[0])


def objective_batch(code, X, layout, WB, HB, WE, HE, coefs):
    X = np.asarray(X, dtype=float)
    K = X.shape[0]
    if code == MIXTURE:
        k, n = int(layout[0]), int(layout[1])
        w = X[:, :k]
        P = X[:, k:k + k * n].reshape(K, k, n)
        m = np.einsum("ki,kij->kj", w, P)
        comp = coefs[2] * mi_batch(WB, HB, P) + coefs[3] * mi_batch(WE, HE, P)
        return (coefs[0] * mi_batch(WB, HB, m) + coefs[1] * mi_batch(WE, HE, m)
                - np.einsum("ki,ki->k", w, comp))
    nu, nv, n = int(layout[0]), int(layout[1]), int(layout[2])
    mu = coefs[0]
    pu = X[:, :nu]
    pvu = X[:, nu:nu + nu * nv].reshape(K, nu, nv)
    pxv = X[:, nu + nu * nv:].reshape(K, nv, n)
    Pu = pvu @ pxv
    P = np.einsum("ku,kuj->kj", pu, Pu)
    pv = np.einsum("ku,kuv->kv", pu, pvu)
    fu = mi_batch(WB, HB, Pu) - mi_batch(WE, HE, Pu)
    gv = (mu + 1.0) * mi_batch(WB, HB, pxv) - mi_batch(WE, HE, pxv)
    return (mu * mi_batch(WB, HB, P) + np.einsum("ku,ku->k", pu, fu)
            - np.einsum("kv,kv->k", pv, gv))


def objective(code, x, layout, WB, HB, WE, HE, coefs):
    return float(objective_batch(code, np.asarray(x)[None, :], layout, WB, HB, WE, HE, coefs)[0])


def pattern_search(code, x0, layout, blocks, WB, HB, WE, HE, coefs,
                   step0, min_step, max_evals):
    x = np.array(x0, dtype=float)
    best = objective(code, x, layout, WB, HB, WE, HE, coefs)
    evals = 1
    src, dst = [], []
    for s0, sz in np.asarray(blocks):
        for a in range(sz):
            for c in range(sz):
                if a != c:
                    src.append(s0 + a)
                    dst.append(s0 + c)
    src = np.array(src, dtype=np.int64)
    dst = np.array(dst, dtype=np.int64)
    rows = np.arange(src.size)
    step = step0
    while step >= min_step and evals < max_evals:
        while evals < max_evals:
            d = np.minimum(step, x[src])
            X = np.repeat(x[None, :], src.size, axis=0)
            X[rows, src] -= d
            X[rows, dst] += d
            vals = objective_batch(code, X, layout, WB, HB, WE, HE, coefs)
            evals += src.size
            vals[d <= 0.0] = -np.inf
            j = int(np.argmax(vals))
            if vals[j] > best + 1e-16:
                best = float(vals[j])
                x = X[j]
            else:
                break
        step *= 0.5
    return x, best, evals


# --- oracle kernels ---------------------------------------------------------

def _bin_mi(W, a):
    a = np.asarray(a, dtype=float)
    q = a[..., None] * W[0] + (1.0 - a[..., None]) * W[1]
    h = _entropy_rows(W)
    return _entropy_rows(q) - a * h[0] - (1.0 - a) * h[1]


def brute_binary(WB, WE, mu, res):
    grid = np.arange(res + 1) / res
    g = (mu + 1.0) * _bin_mi(WB, grid) - _bin_mi(WE, grid)
    best = -np.inf
    bi = np.zeros(3, dtype=np.int64)
    slope = float(np.max(np.abs(np.diff(g))) * res)
    p1 = grid[:, None]
    p2 = grid[None, :]
    line0 = g[None, :]
    dg = g[:, None] - g[None, :]
    prev = None
    for il in range(res + 1):
        lam = il / res
        m = lam * p1 + (1.0 - lam) * p2
        val = _bin_mi(WB, m) - _bin_mi(WE, m) - line0 - lam * dg
        if prev is not None:
            slope = max(slope, float(np.max(np.abs(val - prev)) * res))
        prev = val
        j = int(np.argmax(val))
        if val.flat[j] > best:
            best = float(val.flat[j])
            bi[:] = (il, j // (res + 1), j % (res + 1))
    return best, bi, slope


def brute_chain(WB, WE, mu, xs, vsets, rows, pus, combos):
    gx = (mu + 1.0) * _bin_mi(WB, xs) - _bin_mi(WE, xs)
    best = -np.inf
    arg = (0, 0, 0)
    for mi_, vs in enumerate(vsets):
        px = rows @ xs[vs]
        A = _bin_mi(WB, px) - _bin_mi(WE, px) - rows @ gx[vs]
        P = pus @ px[combos].T  # (npu, ncombo)
        val = pus @ A[combos].T + mu * _bin_mi(WB, P)
        j = int(np.argmax(val))
        if val.flat[j] > best:
            best = float(val.flat[j])
            pi, ci = divmod(j, val.shape[1])
            arg = (mi_, ci, pi)
    return best, arg[0], arg[1], arg[2]
