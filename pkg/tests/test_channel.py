import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays
from scipy.optimize import minimize

from ldpcfloor.channel import (
    ChannelOutput,
    effective_distance,
    instanton_noise,
    instanton_scale,
    llr_from_output,
    noise_std,
    sample_awgn,
)

unit = st.floats(0.0, 1.0, allow_nan=False)
omegas = arrays(float, st.integers(1, 40), elements=unit).filter(lambda w: w.max() > 1e-3)
snrs = st.floats(0.05, 20.0)


def test_noise_variance_matches_transition_density():
    rng = np.random.default_rng(0)
    out = sample_awgn(np.zeros(200_000), 1.6, rng)
    assert out.x.std() == pytest.approx(noise_std(1.6), rel=5e-3)
    assert noise_std(1.6) ** 2 == pytest.approx(1 / (4 * 1.6))


def test_zero_noise_and_llr():
    out = sample_awgn(np.array([0, 1, 0]), 2.0, None, zero_noise=True)
    assert np.allclose(llr_from_output(out), [2.0, -2.0, 2.0])


def test_channel_output_validation():
    with pytest.raises(ValueError):
        ChannelOutput(np.array([0.0, np.nan]), 1.0)
    with pytest.raises(ValueError):
        ChannelOutput(np.zeros(3), 0.0)
    with pytest.raises(ValueError):
        noise_std(-1.0)


@given(arrays(float, 5, elements=st.floats(-3, 3)), snrs)
def test_llr_affine_and_antisymmetric(x, s2):
    h = llr_from_output(ChannelOutput(x, s2))
    flipped = llr_from_output(ChannelOutput(1.0 - x, s2))
    assert np.allclose(flipped, -h)
    mid = llr_from_output(ChannelOutput(0.5 * (x + 1.0 - x), s2))
    assert np.allclose(mid, 0.0)


@given(omegas, st.floats(1e-3, 1e3))
def test_effective_distance_scale_invariant(w, c):
    assert effective_distance(c * w) == pytest.approx(effective_distance(w), rel=1e-12)


@given(arrays(np.int64, st.integers(1, 60), elements=st.integers(0, 1)).filter(lambda w: w.any()))
def test_effective_distance_integral_is_weight(w):
    assert effective_distance(w) == int(w.sum())


def test_effective_distance_example():
    assert effective_distance([1.0, 0.5]) == pytest.approx(1.8)


def test_zero_vector_rejected():
    with pytest.raises(ValueError):
        effective_distance(np.zeros(4))
    with pytest.raises(ValueError):
        instanton_noise(np.zeros(4))


@given(omegas, snrs)
def test_instanton_lies_on_decision_plane(w, s2):
    h = llr_from_output(instanton_noise(w, s2))
    assert abs(h @ w) <= 1e-12 * max(1.0, s2 * w.sum())
    x = instanton_noise(w, s2).x
    assert 4 * x @ x == pytest.approx(effective_distance(w), rel=1e-12)


def test_integral_instanton_is_halfway():
    w = np.array([1, 0, 1, 1, 0], dtype=float)
    x = instanton_noise(w).x
    assert np.allclose(x, 0.5 * w)
    assert np.allclose(llr_from_output(instanton_noise(w, 3.0))[w > 0], 0.0)


def test_eps_moves_past_plane():
    w = np.array([1.0, 0.5, 0.5])
    h = llr_from_output(instanton_noise(w, 1.0, eps=1e-6))
    assert h @ w < 0  # omega now has lower energy than the zero word


@pytest.mark.parametrize("seed", range(5))
def test_instanton_is_minimum_norm_point(seed):
    """Constrained minimisation of |x|^2 on the plane reproduces lambda * omega."""
    w = np.random.default_rng(seed).uniform(0, 1, 6)
    cons = {"type": "eq", "fun": lambda x: (1 - 2 * x) @ w}
    res = minimize(lambda x: x @ x, np.full(6, 0.3), constraints=[cons], method="SLSQP", tol=1e-14)
    assert np.allclose(res.x, instanton_scale(w) * w, atol=1e-7)
    # the exponent 2 s2 |x|^2 equals d_eff s2 / 2
    assert 2 * res.fun == pytest.approx(effective_distance(w) / 2, rel=1e-7)


def test_instanton_grid_search_two_bits():
    w = np.array([1.0, 0.5])
    g = np.linspace(-1, 2, 3001)
    X, Y = np.meshgrid(g, g)
    on_plane = np.abs((1 - 2 * X) * w[0] + (1 - 2 * Y) * w[1]) < 2e-3
    norms = np.where(on_plane, X**2 + Y**2, np.inf)
    k = np.unravel_index(np.argmin(norms), norms.shape)
    assert np.allclose([X[k], Y[k]], instanton_noise(w).x, atol=2e-3)
