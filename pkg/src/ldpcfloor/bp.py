"""Sum-product belief propagation, Bethe beliefs and the Bethe free energy.

Messages are half-log-likelihood fields: a bit belief is proportional to
``exp(field * s)`` with spin ``s = 1 - 2 sigma``. In these units the
check update is ``atanh(prod tanh(.))`` with no factors of two, and the
channel enters each bit as ``h_i / 2`` because ``exp(-h sigma)`` equals
``exp(h s / 2)`` up to a constant.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, logsumexp, xlogy

from .outcome import DecodeOutcome, Method, make_outcome
from .tanner import ParityCheckMatrix, local_codewords, syndrome

SATURATION = 1.0 - 1e-12
BELIEF_TOL = 1e-9


@dataclass(frozen=True)
class _EdgeLayout:
    edge_check: np.ndarray
    edge_bit: np.ndarray
    check_start: np.ndarray
    # checks grouped by degree: degree -> (check ids, edge-id matrix)
    groups: tuple


@functools.lru_cache(maxsize=32)
def _layout(H: ParityCheckMatrix) -> _EdgeLayout:
    edges = H.edges()
    ec = np.array([a for a, _ in edges], dtype=np.int64)
    eb = np.array([i for _, i in edges], dtype=np.int64)
    start = np.concatenate([[0], np.cumsum(H.check_degrees())])
    by_deg: dict[int, list[int]] = {}
    for a, row in enumerate(H.rows):
        by_deg.setdefault(len(row), []).append(a)
    groups = tuple(
        (d, np.array(cs), np.array([np.arange(start[a], start[a] + d) for a in cs]))
        for d, cs in sorted(by_deg.items())
    )
    return _EdgeLayout(ec, eb, start, groups)


@dataclass
class MessageState:
    bit_to_check: np.ndarray
    check_to_bit: np.ndarray
    iteration: int = 0

    @classmethod
    def zeros(cls, H: ParityCheckMatrix) -> MessageState:
        return cls(np.zeros(H.n_edges), np.zeros(H.n_edges), 0)


@dataclass
class BeliefState:
    """Bit beliefs ``bit[i] = (b_i(0), b_i(1))`` and check beliefs aligned
    with ``local_codewords(H, a)``."""

    bit: np.ndarray
    check: list[np.ndarray]

    @property
    def magnetization(self) -> np.ndarray:
        return self.bit[:, 0] - self.bit[:, 1]

    def compatibility_residual(self, H: ParityCheckMatrix) -> float:
        worst = 0.0
        for a, row in enumerate(H.rows):
            marg = self.check[a] @ local_codewords(H, a)
            worst = max(worst, float(np.abs(marg - self.bit[list(row), 1]).max()))
            worst = max(worst, abs(float(self.check[a].sum()) - 1.0))
        return worst


@dataclass(frozen=True)
class BetheEnergy:
    self_energy: float
    entropy: float
    free_energy: float

    @property
    def z0(self) -> float:
        return float(np.exp(-self.free_energy))


def _excluded_products(t: np.ndarray) -> np.ndarray:
    """Row-wise product of all entries except the one at each position."""
    k, d = t.shape
    left = np.ones((k, d))
    right = np.ones((k, d))
    left[:, 1:] = np.cumprod(t[:, :-1], axis=1)
    right[:, :-1] = np.cumprod(t[:, :0:-1], axis=1)[:, ::-1]
    return left * right


def _raw_update(H: ParityCheckMatrix, h: np.ndarray, check_to_bit: np.ndarray):
    lay = _layout(H)
    incoming = np.bincount(lay.edge_bit, weights=check_to_bit, minlength=H.n_bits)
    u = 0.5 * h[lay.edge_bit] + incoming[lay.edge_bit] - check_to_bit
    return u, _check_update(H, u)


def _check_update(H: ParityCheckMatrix, u: np.ndarray) -> np.ndarray:
    lay = _layout(H)
    t = np.tanh(u)
    v = np.empty_like(u)
    for _, _, eids in lay.groups:
        prod = _excluded_products(t[eids])
        v[eids] = np.arctanh(np.clip(prod, -SATURATION, SATURATION))
    return v


def bp_iterate(H: ParityCheckMatrix, h, state: MessageState, damping: float = 0.0) -> MessageState:
    """One flooding sweep: bit-to-check from the current check messages, then
    check-to-bit from the new bit messages; both damped toward the old state."""
    if not 0.0 <= damping < 1.0:
        raise ValueError("damping must lie in [0, 1)")
    h = np.asarray(h, dtype=float)
    if h.shape != (H.n_bits,) or state.check_to_bit.shape != (H.n_edges,):
        raise ValueError("message state or log-likelihoods do not match the code")
    lay = _layout(H)
    incoming = np.bincount(lay.edge_bit, weights=state.check_to_bit, minlength=H.n_bits)
    u = 0.5 * h[lay.edge_bit] + incoming[lay.edge_bit] - state.check_to_bit
    u = (1.0 - damping) * u + damping * state.bit_to_check
    v = (1.0 - damping) * _check_update(H, u) + damping * state.check_to_bit
    return MessageState(u, v, state.iteration + 1)


def fixed_point_residual(H: ParityCheckMatrix, h, state: MessageState) -> float:
    """Max violation of the undamped BP equations by ``state``."""
    u, v = _raw_update(H, np.asarray(h, dtype=float), state.check_to_bit)
    return float(max(np.abs(u - state.bit_to_check).max(), np.abs(v - state.check_to_bit).max()))


def beliefs_from_messages(H: ParityCheckMatrix, h, state: MessageState) -> BeliefState:
    h = np.asarray(h, dtype=float)
    lay = _layout(H)
    field = 0.5 * h + np.bincount(lay.edge_bit, weights=state.check_to_bit, minlength=H.n_bits)
    b1 = expit(-2.0 * field)
    bit = np.column_stack([expit(2.0 * field), b1])
    check = []
    for a in range(H.n_checks):
        spins = 1.0 - 2.0 * local_codewords(H, a)
        s, e = lay.check_start[a], lay.check_start[a + 1]
        logits = spins @ state.bit_to_check[s:e]
        check.append(np.exp(logits - logsumexp(logits)))
    return BeliefState(bit, check)


def bethe_free_energy(H: ParityCheckMatrix, h, beliefs: BeliefState) -> BetheEnergy:
    """E = sum_i h_i b_i(1); S = -sum_a sum b_a ln b_a + sum_i (q_i - 1) sum b_i ln b_i."""
    h = np.asarray(h, dtype=float)
    bit = beliefs.bit
    allb = np.concatenate([bit.ravel()] + [c.ravel() for c in beliefs.check])
    if allb.min() < -BELIEF_TOL or allb.max() > 1.0 + BELIEF_TOL:
        raise ValueError("beliefs outside [0, 1]")
    bit = np.clip(bit, 0.0, 1.0)
    energy = float(h @ bit[:, 1])
    check_term = sum(float(xlogy(c, np.clip(c, 0.0, 1.0)).sum()) for c in beliefs.check)
    q = H.bit_degrees()
    bit_term = float(((q - 1) * xlogy(bit, bit).sum(axis=1)).sum())
    entropy = -check_term + bit_term
    return BetheEnergy(energy, entropy, energy - entropy)


def run_bp(
    H: ParityCheckMatrix,
    h,
    max_iter: int = 200,
    tol: float = 1e-9,
    damping: float = 0.5,
    stop_on_codeword: bool = False,
) -> tuple[MessageState, bool]:
    """Iterate from zero messages; returns (state, converged)."""
    h = np.asarray(h, dtype=float)
    state = MessageState.zeros(H)
    lay = _layout(H)
    for _ in range(max_iter):
        new = bp_iterate(H, h, state, damping)
        delta = max(
            np.abs(new.bit_to_check - state.bit_to_check).max(initial=0.0),
            np.abs(new.check_to_bit - state.check_to_bit).max(initial=0.0),
        )
        state = new
        if delta < tol:
            return state, True
        if stop_on_codeword:
            field = 0.5 * h + np.bincount(lay.edge_bit, weights=state.check_to_bit, minlength=H.n_bits)
            if not syndrome(H, (field < 0).astype(np.uint8)).any():
                return state, False
    return state, False


def bp_decode(
    H: ParityCheckMatrix,
    h,
    max_iter: int = 200,
    tol: float = 1e-9,
    damping: float = 0.5,
    stop_on_codeword: bool = True,
) -> DecodeOutcome:
    """Hard decisions by the sign of the magnetisations.

    With ``stop_on_codeword`` the sweep ends as soon as the hard decision
    satisfies every check; ``converged`` still reports message convergence.
    """
    state, converged = run_bp(H, h, max_iter, tol, damping, stop_on_codeword)
    beliefs = beliefs_from_messages(H, h, state)
    hard = (beliefs.magnetization < 0).astype(float)
    h = np.asarray(h, dtype=float)
    out = make_outcome(H, Method.BP, hard, float(h @ hard), converged=converged)
    out.work["bp_iterations"] = state.iteration
    return out
