"""Property-based checks of model and optimizer invariants."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from mimowpt import linalg
from mimowpt.rectenna import RectennaParams, make_coefficients, pout_dc_combining, posynomial_form, vout_single
from mimowpt.rf_combining import AnalogCombiner, mrc, mrt_against_combiner, optimize_rf_analog, optimize_rf_svd

COEFFS = make_coefficients(RectennaParams())

finite = st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False)


@st.composite
def channels(draw, max_q=4, max_m=3):
    q = draw(st.integers(1, max_q))
    m = draw(st.integers(1, max_m))
    re = np.array(draw(st.lists(finite, min_size=q * m, max_size=q * m))).reshape(q, m)
    im = np.array(draw(st.lists(finite, min_size=q * m, max_size=q * m))).reshape(q, m)
    H = (re + 1j * im) * 1e-3
    if np.linalg.norm(H) < 1e-6:
        H[0, 0] += 1e-3
    return H


@given(st.floats(0, 1, allow_nan=False), st.floats(0, 1, allow_nan=False))
def test_vout_monotone(a, b):
    lo, hi = sorted((a, b))
    assert vout_single(lo, COEFFS) <= vout_single(hi, COEFFS)


@given(channels(), st.integers(0, 2**32))
@settings(max_examples=60, deadline=None)
def test_posynomial_two_routes(H, seed):
    rng = np.random.default_rng(seed)
    w = rng.standard_normal(H.shape[1]) + 1j * rng.standard_normal(H.shape[1])
    posy = posynomial_form(H, COEFFS, 5000.0)
    direct = pout_dc_combining(H, w, COEFFS, 5000.0)
    assert np.isclose(posy.evaluate(np.abs(H @ w) ** 2), direct, rtol=1e-12, atol=0)


@given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=8))
def test_combiner_unit_norm(phases):
    w = AnalogCombiner(np.array(phases)).weights
    assert abs(np.linalg.norm(w) - 1.0) < 1e-12


@given(channels())
@settings(max_examples=40, deadline=None)
def test_rf_svd_dominates_analog_and_mrc(H):
    s = optimize_rf_svd(H, 1.0, COEFFS)
    a = optimize_rf_analog(H, 1.0, COEFFS)
    assert a.p_out <= s.p_out * (1 + 1e-9)
    assert 0.0 <= a.r2_ratio <= 1 + 1e-9
    g = a.w_R.conj() @ H
    assert np.linalg.norm(g) ** 2 >= (np.pi / 4) * a.sdp_objective * (1 - 1e-9)
    if H.shape[1] == 1:
        w = mrc(H[:, 0])
        assert np.isclose(abs(np.vdot(w, H[:, 0])) ** 2, np.linalg.norm(H) ** 2)


@given(channels(), st.integers(0, 2**32))
@settings(max_examples=40, deadline=None)
def test_mrt_cauchy_schwarz(H, seed):
    rng = np.random.default_rng(seed)
    w_R = rng.standard_normal(H.shape[0]) + 1j * rng.standard_normal(H.shape[0])
    w_R /= np.linalg.norm(w_R)
    g = w_R.conj() @ H
    if np.linalg.norm(g) < 1e-12:
        return
    w_T = mrt_against_combiner(H, w_R, 1.0)
    other = rng.standard_normal(H.shape[1]) + 1j * rng.standard_normal(H.shape[1])
    other *= np.sqrt(2.0) / np.linalg.norm(other)
    assert abs(g @ other) ** 2 <= abs(g @ w_T) ** 2 * (1 + 1e-12)


@given(channels(max_q=5, max_m=5))
@settings(max_examples=40, deadline=None)
def test_rank1_ratio_in_unit_interval(H):
    W = H.conj().T @ H
    if np.trace(W).real == 0:
        return
    r = linalg.rank1_ratio(W)
    assert 1.0 / W.shape[0] - 1e-12 <= r <= 1.0 + 1e-12
