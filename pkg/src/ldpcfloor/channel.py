"""AWGN channel, log-likelihoods, pseudo-weights and instanton noise.

Bits are sent as 0/1 amplitudes. With ``s2`` the SNR parameter the transition
density is proportional to ``exp(-2 s2 (x - sigma)**2)``, i.e. the noise
variance is ``1 / (4 s2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ChannelOutput:
    x: np.ndarray
    s2: float

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.ndim != 1:
            raise ValueError("channel output must be one-dimensional")
        if not np.all(np.isfinite(x)):
            raise ValueError("channel output has non-finite entries")
        if not self.s2 > 0:
            raise ValueError(f"SNR parameter must be positive, got {self.s2}")
        object.__setattr__(self, "x", x)


def noise_std(s2: float) -> float:
    if not s2 > 0:
        raise ValueError(f"SNR parameter must be positive, got {s2}")
    return float(np.sqrt(1.0 / (4.0 * s2)))


def sample_awgn(sigma, s2: float, rng: np.random.Generator | None, zero_noise: bool = False) -> ChannelOutput:
    sigma = np.asarray(sigma, dtype=float)
    std = noise_std(s2)
    if zero_noise:
        return ChannelOutput(sigma.copy(), s2)
    return ChannelOutput(sigma + rng.normal(0.0, std, size=sigma.shape), s2)


def llr_from_output(out: ChannelOutput) -> np.ndarray:
    """h_i = s2 (1 - 2 x_i); positive values favour bit 0."""
    return out.s2 * (1.0 - 2.0 * out.x)


def _check_omega(omega) -> np.ndarray:
    w = np.asarray(omega, dtype=float)
    if w.ndim != 1:
        raise ValueError("pseudo-codeword must be one-dimensional")
    if not np.any(w):
        raise ValueError("pseudo-codeword is the zero vector")
    return w


def effective_distance(omega) -> float:
    """AWGN pseudo-weight (sum w)**2 / sum w**2."""
    w = _check_omega(omega)
    return float(w.sum() ** 2 / np.dot(w, w))


def instanton_scale(omega) -> float:
    """lambda = sum w / (2 sum w**2): x = lambda w is the closest point to 0
    on the plane sum_i (1 - 2 x_i) w_i = 0."""
    w = _check_omega(omega)
    return float(w.sum() / (2.0 * np.dot(w, w)))


def instanton_noise(omega, s2: float = 1.0, eps: float = 0.0) -> ChannelOutput:
    """Minimum-norm noise on the decision plane between 0 and ``omega``.

    ``eps > 0`` pushes the point just past the plane so that ``omega`` wins
    the LP strictly.
    """
    w = _check_omega(omega)
    return ChannelOutput(instanton_scale(w) * (1.0 + eps) * w, s2)
