import math

import numpy as np
import pytest

from wiretap.binary import (BinaryCurve, BinaryError, TangentConfig, bec_bsc_chain, best_config,
                            find_configs, first_derivative_at_zero, mu_star, mu_star_condition,
                            sample_curve, sec53_formulas, sec53_window,
                            second_derivative_at_zero)
from wiretap.chain import evaluate_objective, rate_equivocation
from wiretap.channel import f_mu, make_standard
from wiretap.oracle import brute_binary

from reference_values import (ARGMAX_BEC045_BSC01, CS_BEC045_BSC01, CS_BEC05_BSC01,
                              CS_BSC01_BEC04, CS_BSC01_BEC06, MUSTAR_BEC05_BSC01,
                              MUSTAR_BSC01_BEC04, SEC53_C, SEC53_EPS_STAR, SEC53_EPS_TOP,
                              TANGENT_BEC05_BSC01)


def test_curve_derivatives_match_finite_differences():
    c = BinaryCurve(make_standard("bsc_bec", 0.1, 0.5), 0.3)
    p, h = 0.37, 1e-5
    assert c.g(p, 1) == pytest.approx((c.g(p + h) - c.g(p - h)) / (2 * h), abs=1e-8)
    assert c.g(p, 2) == pytest.approx((c.g(p + h) - 2 * c.g(p) + c.g(p - h)) / h**2, abs=1e-4)
    assert c.g(p) == pytest.approx(f_mu(make_standard("bsc_bec", 0.1, 0.5), [p, 1 - p], 0.3))


@pytest.mark.parametrize("alpha,ref", [(0.4, CS_BSC01_BEC04), (0.6, CS_BSC01_BEC06)])
def test_symmetric_config_bsc_bec(alpha, ref):
    cfg = best_config(make_standard("bsc_bec", 0.1, alpha))
    assert cfg.kind == "interior-symmetric"
    assert cfg.lam == pytest.approx(0.5, abs=1e-6)
    assert cfg.p1 + cfg.p2 == pytest.approx(1.0, abs=1e-6)
    assert cfg.objective == pytest.approx(ref, abs=1e-9)


def test_boundary_config_bec_bsc():
    w = make_standard("bec_bsc", 0.5, 0.1)
    cfg = best_config(w)
    assert cfg.kind == "boundary-left" and cfg.p1 == 0.0
    assert cfg.lam == pytest.approx(0.84, abs=1e-6)
    assert cfg.p2 == pytest.approx(TANGENT_BEC05_BSC01, abs=1e-8)
    assert cfg.objective == pytest.approx(CS_BEC05_BSC01, abs=1e-9)
    assert cfg.recompute(w, 0.0) == pytest.approx(cfg.objective, abs=1e-12)


def test_trivial_config_more_capable():
    cfg = best_config(make_standard("bec_bsc", 0.45, 0.1))
    # V = X written as (lambda, 0, 1)
    assert cfg.kind == "trivial" and (cfg.p1, cfg.p2) == (0.0, 1.0)
    assert cfg.mixture == pytest.approx(ARGMAX_BEC045_BSC01, abs=1e-7)
    assert cfg.objective == pytest.approx(CS_BEC045_BSC01, abs=1e-9)


@pytest.mark.parametrize("args", [("bsc_bec", 0.1, 0.4), ("bec_bsc", 0.5, 0.1), ("bsc_bec", 0.2, 0.5)])
def test_config_residuals(args):
    for cfg in find_configs(make_standard(*args), 0.01):
        assert all(r <= 1e-6 for r in cfg.residuals)


def test_trivial_beyond_mu_star():
    w = make_standard("bsc_bec", 0.1, 0.4)
    assert 0.05 > MUSTAR_BSC01_BEC04
    assert best_config(w, 0.05).kind == "trivial"


@pytest.mark.parametrize("args,ref,cond", [
    (("bsc_bec", 0.1, 0.4), MUSTAR_BSC01_BEC04, "reference"),
    (("bec_bsc", 0.5, 0.1), MUSTAR_BEC05_BSC01, "nonnegative"),
])
def test_mu_star(args, ref, cond):
    w = make_standard(*args)
    ms = mu_star(w)
    assert ms.condition == cond
    assert float(ms) == pytest.approx(ref, abs=1e-7)
    assert ms.hi - ms.lo <= 1e-8
    assert mu_star_condition(w, ms.mu / 2, cond) < 0 <= mu_star_condition(w, 2 * ms.mu, cond)
    assert mu_star_condition(w, ms.hi, cond) >= 0


def test_mu_star_zero_when_more_capable():
    assert mu_star(make_standard("bec_bsc", 0.45, 0.1)).mu == 0.0


def test_mu_star_unreachable_is_inf():
    # the reference level f(1/2) is positive for the dominant instance
    assert math.isinf(mu_star(make_standard("bsc_bec", 0.1, 0.6)).mu)


def test_mu_star_unknown_condition():
    with pytest.raises(ValueError):
        mu_star_condition(make_standard("bsc_bec", 0.1, 0.4), 0.0, "bogus")


def test_bec_bsc_chain_reaches_secrecy_capacity():
    w = make_standard("bec_bsc", 0.5, 0.1)
    chain = bec_bsc_chain(w, 0.0)
    R, Re = rate_equivocation(w, chain)
    assert Re == pytest.approx(CS_BEC05_BSC01, abs=1e-9)
    mu = 0.03
    assert evaluate_objective(w, bec_bsc_chain(w, mu), mu) == pytest.approx(
        mu * w.C_B + best_config(w, mu).objective, abs=1e-9)


def test_bec_bsc_chain_rejects():
    with pytest.raises(BinaryError):
        bec_bsc_chain(make_standard("bsc_bec", 0.1, 0.4), 0.0)
    with pytest.raises(BinaryError):
        bec_bsc_chain(make_standard("bec_bsc", 0.5, 0.1), 1.0)


def test_sec53_formulas():
    c, eps, b = sec53_formulas(0.6, 0.25)
    assert c == pytest.approx(SEC53_C, abs=1e-12)
    assert eps == pytest.approx(SEC53_EPS_STAR, abs=1e-12)
    assert abs(eps - 0.4194) <= 5e-5
    assert second_derivative_at_zero(0.6, 0.25, eps) == pytest.approx(0.0, abs=1e-12)
    assert b >= 0
    lo, hi = sec53_window(0.6, 0.25)
    assert lo == eps and hi == pytest.approx(SEC53_EPS_TOP, abs=1e-10)
    assert first_derivative_at_zero(0.6, 0.25, 0.49) < 0


def test_sec53_b_vanishes_on_degenerate_line():
    # p + 2q = 1 makes Eve's rows identical up to a swap of equal entries
    _, eps, b = sec53_formulas(0.5, 0.25)
    assert eps == 0.5 and b == pytest.approx(0.0, abs=1e-12)


def test_sec53_rejects():
    with pytest.raises(ValueError):
        sec53_formulas(0.6, 0.5)


def test_sample_curve_rows():
    s = sample_curve(make_standard("bsc_bec", 0.1, 0.4), 0.1, 1e-3)
    rows = np.asarray(s.rows())
    assert rows.shape[1] == 5 and rows[0, 0] == 0.0 and rows[-1, 0] == 1.0
    assert np.max(np.abs(rows[[0, -1], 1:3])) <= 1e-12


@pytest.mark.parametrize("args,mu", [(("bsc_bec", 0.1, 0.4), 0.0), (("bsc_bec", 0.15, 0.5), 0.0),
                                     (("bec_bsc", 0.5, 0.1), 0.02), (("bec_bsc", 0.45, 0.1), 0.0)])
def test_best_config_dominates_oracle(args, mu):
    w = make_standard(*args)
    cfg = best_config(w, mu)
    val, ocfg, res = brute_binary(w, mu, 150)
    assert isinstance(ocfg, TangentConfig)
    assert cfg.objective >= val - 1e-9
    # no phantom optima: the reported value is a genuine evaluation
    assert cfg.recompute(w, mu) == pytest.approx(cfg.objective, abs=1e-12)
    assert cfg.objective <= val + res.error_bound
