import os
import subprocess
import sys

import numpy as np
import pytest

from wiretap import kernels
from wiretap.channel import make_standard
from wiretap.oracle import chain_grid
from wiretap.search import _blocks

needs_numba = pytest.mark.skipif(kernels.numba_impl is None, reason="numba not installed")
IMPLS = [kernels.numpy_impl] + ([kernels.numba_impl] if kernels.numba_impl is not None else [])


@pytest.fixture
def w():
    return make_standard("bsc_bec", 0.1, 0.6)


def test_backend_flag_selects_numpy():
    env = dict(os.environ, WIRETAP_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "from wiretap import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


@needs_numba
def test_backend_default_is_numba():
    env = {k: v for k, v in os.environ.items() if k != "WIRETAP_DISABLE_NUMBA"}
    out = subprocess.run([sys.executable, "-c", "from wiretap import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numba"


@pytest.mark.parametrize("impl", IMPLS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_mi_batch_edges(impl, w):
    WB, HB, _, _ = w.kernel_args()
    P = np.array([[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]])
    v = impl.mi_batch(WB, HB, P)
    assert v[0] == v[1] == 0.0
    assert v[2] == pytest.approx(w.C_B, abs=1e-12)


@needs_numba
def test_mi_batch_agree(w, rng):
    WB, HB, WE, HE = w.kernel_args()
    P = rng.dirichlet(np.ones(2), size=500)
    for W, H in ((WB, HB), (WE, HE)):
        assert np.allclose(kernels.numba_impl.mi_batch(W, H, P), kernels.numpy_impl.mi_batch(W, H, P),
                           atol=1e-13, rtol=0)


@needs_numba
@pytest.mark.parametrize("code", [kernels.MIXTURE, kernels.CHAIN])
def test_objective_batch_agree(code, rng):
    w = make_standard("vandijk", 0.1, 0.2, 0.45)
    args = w.kernel_args()
    if code == kernels.MIXTURE:
        layout = np.array([3, 4], dtype=np.int64)
        X = np.hstack([rng.dirichlet(np.ones(3), 50)] + [rng.dirichlet(np.ones(4), 50) for _ in range(3)])
        coefs = np.array([1.0, -1.0, 1.3, -1.0])
    else:
        layout = np.array([2, 3, 4], dtype=np.int64)
        X = np.hstack([rng.dirichlet(np.ones(2), 50)] + [rng.dirichlet(np.ones(3), 50) for _ in range(2)]
                      + [rng.dirichlet(np.ones(4), 50) for _ in range(3)])
        coefs = np.array([0.7])
    a = kernels.numba_impl.objective_batch(code, X, layout, *args, coefs)
    b = kernels.numpy_impl.objective_batch(code, X, layout, *args, coefs)
    assert np.allclose(a, b, atol=1e-12, rtol=0)


@needs_numba
def test_pattern_search_same_optimum(w):
    x0 = np.array([0.5, 0.5, 0.3, 0.7, 0.6, 0.4])
    layout = np.array([2, 2], dtype=np.int64)
    blocks = _blocks(2, 2, 2)
    coefs = np.array([1.0, -1.0, 1.0, -1.0])
    res = [impl.pattern_search(kernels.MIXTURE, x0, layout, blocks, *w.kernel_args(), coefs,
                               0.05, 1e-10, 2_000_000) for impl in IMPLS]
    # search orders differ; both must reach the known optimum
    for x, val, evals in res:
        assert val == pytest.approx(0.13903595255631879, abs=1e-8)
        assert evals > 0


@needs_numba
def test_brute_kernels_agree(w):
    mats = (np.ascontiguousarray(w.main.matrix), np.ascontiguousarray(w.eavesdropper.matrix))
    a = kernels.numba_impl.brute_binary(*mats, 0.1, 60)
    b = kernels.numpy_impl.brute_binary(*mats, 0.1, 60)
    assert a[0] == pytest.approx(b[0], abs=1e-12)
    G = chain_grid(2, 2, 4)
    a = kernels.numba_impl.brute_chain(*mats, 0.1, G.xs, G.vsets, G.rows, G.pus, G.combos)
    b = kernels.numpy_impl.brute_chain(*mats, 0.1, G.xs, G.vsets, G.rows, G.pus, G.combos)
    assert a[0] == pytest.approx(b[0], abs=1e-12)


def test_row_entropies():
    W = np.array([[1.0, 0.0], [0.5, 0.5]])
    assert kernels.row_entropies(W).tolist() == [0.0, 1.0]
