import numpy as np
import pytest
from hypothesis import given, settings

from wiretap.binary import sec53_window, verify_sec53_instance
from wiretap.chain import chain_quantities
from wiretap.channel import WiretapChannel, bsc, make_standard, z_channel
from wiretap.classify import (PreconditionError, classify, concavity_check, f_max, f_min,
                              improving_prefix, is_dominantly_cyclic, is_less_noisy,
                              is_more_capable, prefix_gain)
from wiretap.probability import binary_entropy

from reference_values import FMIN_BSC01_BEC04, H_01
from strategies import wiretap_channels


@pytest.mark.parametrize("args,mc,ln,dom", [
    (("bsc_bec", 0.1, 0.3), False, False, False),
    (("bsc_bec", 0.1, 0.4), False, False, False),
    (("bsc_bec", 0.1, 0.6), False, False, True),
    (("bec_bsc", 0.5, 0.1), False, False, False),
    (("bec_bsc", 0.45, 0.1), True, False, False),
    (("sec53", 0.6, 0.25, 0.4202), True, False, True),
    (("vandijk", 0.1, 0.2, 0.45), True, False, False),
    (("bsc_bsc", 0.1, 0.2), True, True, True),
])
def test_named_classifications(args, mc, ln, dom):
    r = classify(make_standard(*args))
    assert (r.more_capable, r.less_noisy, r.dominantly_cyclic) == (mc, ln, dom)
    assert r.cyclic_shift_symmetric
    assert r.f_min <= 0.0 <= r.f_max + 1e-12


def test_eve_side_swap_at_half_alpha():
    # alpha below 4 eps (1 - eps): Eve's channel is less noisy than Bob's
    w = make_standard("bsc_bec", 0.1, 0.3)
    assert is_less_noisy(w.swapped())
    assert not is_less_noisy(make_standard("bsc_bec", 0.1, 0.4).swapped())


def test_f_extremes_values():
    w = make_standard("bsc_bec", 0.1, 0.4)
    assert f_min(w).value == pytest.approx(FMIN_BSC01_BEC04, abs=1e-10)
    hi = f_max(make_standard("bsc_bec", 0.1, 0.5))
    assert hi.value == pytest.approx(1 - H_01 - 0.5, abs=1e-12)
    assert np.allclose(hi.argopt, [0.5, 0.5], atol=1e-6)


def test_more_capable_witness():
    ok, wit = is_more_capable(make_standard("bsc_bec", 0.1, 0.6))
    assert not ok
    assert wit.sum() == pytest.approx(1.0)


def test_concavity_check_reports_pair():
    chk = concavity_check(make_standard("bec_bsc", 0.45, 0.1))
    assert not chk.concave and chk.worst < 0
    a, b = chk.pair
    assert a.sum() == pytest.approx(1.0) and b.sum() == pytest.approx(1.0)


def test_dominant_needs_symmetry():
    w = WiretapChannel(z_channel(0.3), bsc(0.1))
    with pytest.raises(PreconditionError):
        is_dominantly_cyclic(w)
    assert not classify(w).cyclic_shift_symmetric


@settings(max_examples=25)
@given(wiretap_channels(max_in=3, max_out=3))
def test_less_noisy_implies_more_capable(w):
    r = classify(w)
    if r.less_noisy:
        assert r.more_capable
    if r.more_capable:
        assert r.f_min >= -1e-8


def test_no_prefix_for_more_capable():
    for args in (("bec_bsc", 0.45, 0.1), ("vandijk", 0.1, 0.2, 0.45)):
        assert improving_prefix(make_standard(*args)) is None


@pytest.mark.parametrize("args", [("bsc_bec", 0.1, 0.4), ("bsc_bec", 0.1, 0.6),
                                  ("bec_bsc", 0.5, 0.1)])
def test_improving_prefix_properties(args):
    w = make_standard(*args)
    c = improving_prefix(w)
    assert c is not None
    assert prefix_gain(w, c) > f_max(w).value
    # when the maximizer is interior the mixture hits it exactly
    if c.label == "lemma":
        assert np.allclose(c.px, f_max(w).argopt, atol=1e-9)


@pytest.mark.parametrize("args", [("bsc_bec", 0.1, 0.5), ("bec_bsc", 0.5, 0.1)])
def test_lemma_prefix_has_negative_conditional_gap(args):
    w = make_standard(*args)
    c = improving_prefix(w, allow_orbit=False)
    q = chain_quantities(w, c)
    assert q.I_XY_V - q.I_XZ_V < 0
    assert np.max(np.abs(c.px - f_max(w).argopt)) <= 1e-9


def _edge(pred, lo, hi, tol=1e-4):
    first = pred(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if pred(mid) == first else (lo, mid)
    return 0.5 * (lo + hi)


@pytest.mark.parametrize("eps", [0.1, 0.2])
def test_bec_bsc_thresholds(eps):
    # Bob's BEC(alpha) is less noisy up to 4 eps (1 - eps) and more capable up to h(eps)
    def w(a):
        return make_standard("bec_bsc", a, eps)
    ln = _edge(lambda a: is_less_noisy(w(a)), 0.05, 0.95 * binary_entropy(eps))
    mc = _edge(lambda a: is_more_capable(w(a))[0], 4 * eps * (1 - eps) + 0.01, 0.99)
    assert abs(ln - 4 * eps * (1 - eps)) <= 1e-3
    assert abs(mc - binary_entropy(eps)) <= 1e-3


@pytest.mark.parametrize("p,q", [(0.6, 0.25), (0.5, 0.2), (0.7, 0.1), (0.3, 0.3)])
def test_sec53_window_triple_property(p, q):
    lo, hi = sec53_window(p, q)
    inside = verify_sec53_instance(p, q, 0.5 * (lo + hi))
    assert inside.extra["triple_property"] and inside.extra["in_window"]
    # below eps* the curve turns concave (less noisy); above the window f'(0) < 0
    below = classify(make_standard("sec53", p, q, lo - 1e-3))
    above = classify(make_standard("sec53", p, q, hi + 1e-3))
    assert below.less_noisy and not above.more_capable
