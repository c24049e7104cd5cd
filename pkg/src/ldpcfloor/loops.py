"""Loop series around a BP/LP solution and critical-loop search.

A generalized loop is a set of Tanner-graph edges in which no bit or check
has exactly one incident edge. Its term is

    r(C) = prod_checks mu_a * prod_bits mu_i

with mu_a = sum_c b_a(c) prod_{i in a, C} (s_i - m_i) and
mu_i = E[(s - m)**q_i] / (1 - m_i**2)**q_i over the bit belief, s = 1 - 2 sigma.
The code evaluates the same product with every edge normalisation split
evenly between its two ends, i.e. over standardised spins
z = (s - m) / sqrt(1 - m**2). For a loop in which every vertex has degree two
each check factor is then the correlation coefficient of its two loop bits
(the triad weight), so |r| <= 1.

A bit with |m| = 1 has zero variance; its standardised spin is taken as 0,
so any loop through it contributes nothing. This is the LP-limit value where
mu_a vanishes against a diverging mu_i.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import asdict, dataclass, field
from functools import cached_property

import numpy as np

from .bp import BeliefState, bethe_free_energy, beliefs_from_messages, run_bp
from .exact import log_partition_function
from .tanner import ParityCheckMatrix, local_codewords

DEFAULT_SCHEDULE = (0.999, 0.95, 0.9, 0.8, 0.7, 0.5, 0.3)
MAX_CYCLES = 50
MAX_LOOP_VERTICES = 24
MAX_LOOP_EDGES = 40
_VAR_FLOOR = 1e-24


@dataclass(frozen=True)
class GeneralizedLoop:
    edges: frozenset  # of (check, bit)

    @cached_property
    def bits(self) -> tuple[int, ...]:
        return tuple(sorted({i for _, i in self.edges}))

    @cached_property
    def checks(self) -> tuple[int, ...]:
        return tuple(sorted({a for a, _ in self.edges}))

    @cached_property
    def bit_degree(self) -> dict[int, int]:
        q: dict[int, int] = {}
        for _, i in self.edges:
            q[i] = q.get(i, 0) + 1
        return q

    @cached_property
    def check_bits(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for a, i in sorted(self.edges):
            out.setdefault(a, []).append(i)
        return out

    def validate(self, H: ParityCheckMatrix) -> None:
        for a, i in self.edges:
            if not (0 <= a < H.n_checks and i in H.rows[a]):
                raise ValueError(f"edge ({a}, {i}) is not in the Tanner graph")
        if any(q < 2 for q in self.bit_degree.values()) or any(
            len(b) < 2 for b in self.check_bits.values()
        ):
            raise ValueError("generalized loop has a vertex of degree one")

    @property
    def is_simple_cycle(self) -> bool:
        return all(q == 2 for q in self.bit_degree.values()) and all(
            len(b) == 2 for b in self.check_bits.values()
        )


def _standardized(m: np.ndarray):
    var = 1.0 - m**2
    ok = var > _VAR_FLOOR
    scale = np.where(ok, 1.0 / np.sqrt(np.where(ok, var, 1.0)), 0.0)
    return ok, scale


def _check_factor(H: ParityCheckMatrix, beliefs: BeliefState, a: int, loop_bits) -> float:
    m = beliefs.magnetization
    ok, scale = _standardized(m)
    row = H.rows[a]
    spins = 1.0 - 2.0 * local_codewords(H, a)
    prod = np.ones(len(spins))
    for i in loop_bits:
        t = row.index(i)
        prod *= (spins[:, t] - m[i]) * scale[i]
    return float(beliefs.check[a] @ prod)


def _bit_factor(m: float, q: int) -> float:
    """E[z**q] for a standardised +-1 spin with mean m."""
    var = 1.0 - m * m
    if var <= _VAR_FLOOR:
        return 0.0
    sd = np.sqrt(var)
    return float(0.5 * (1.0 + m) * ((1.0 - m) / sd) ** q + 0.5 * (1.0 - m) * ((-1.0 - m) / sd) ** q)


def bit_mu(m: float, q: int) -> float:
    """mu_i exactly as it enters the unnormalised product."""
    return float(((1.0 - m) ** (q - 1) + (-1.0) ** q * (1.0 + m) ** (q - 1)) / (2.0 * (1.0 - m * m) ** (q - 1)))


def check_mu(H: ParityCheckMatrix, beliefs: BeliefState, a: int, loop_bits) -> float:
    """mu_a without normalisation."""
    m = beliefs.magnetization
    row = H.rows[a]
    spins = 1.0 - 2.0 * local_codewords(H, a)
    prod = np.ones(len(spins))
    for i in loop_bits:
        prod *= spins[:, row.index(i)] - m[i]
    return float(beliefs.check[a] @ prod)


def loop_term(H: ParityCheckMatrix, beliefs: BeliefState, loop: GeneralizedLoop) -> float:
    m = beliefs.magnetization
    r = 1.0
    for a, bits in loop.check_bits.items():
        r *= _check_factor(H, beliefs, a, bits)
        if r == 0.0:
            return 0.0
    for i, q in loop.bit_degree.items():
        r *= _bit_factor(float(m[i]), q)
    return r


def triad_weight(H: ParityCheckMatrix, beliefs: BeliefState, alpha: int, i: int, j: int) -> float:
    """mu_a / sqrt((1 - m_i**2)(1 - m_j**2)) for loop bits i, j of check alpha."""
    row = H.rows[alpha]
    if i == j or i not in row or j not in row:
        raise ValueError(f"bits {i}, {j} are not two distinct neighbours of check {alpha}")
    return _check_factor(H, beliefs, alpha, (i, j))


# ------------------------------------------------------------ critical loops


@dataclass(frozen=True)
class CriticalLoop:
    bits: tuple[int, ...]  # cyclic order; checks[k] joins bits[k] and bits[k+1]
    checks: tuple[int, ...]
    weight: float
    triad_weights: tuple[float, ...]
    threshold_used: float

    @property
    def loop(self) -> GeneralizedLoop:
        n = len(self.bits)
        edges = set()
        for k, a in enumerate(self.checks):
            edges.add((a, self.bits[k]))
            edges.add((a, self.bits[(k + 1) % n]))
        return GeneralizedLoop(frozenset(edges))

    def to_dict(self) -> dict:
        return {"bits": list(self.bits), "checks": list(self.checks), "r": self.weight}


def all_triads(H: ParityCheckMatrix, beliefs: BeliefState) -> list[tuple[float, int, int, int]]:
    """(weight, check, i, j) for every check and pair of its bits, i < j."""
    out = []
    m = beliefs.magnetization
    ok, scale = _standardized(m)
    for a, row in enumerate(H.rows):
        if not any(ok[i] for i in row):
            continue
        spins = 1.0 - 2.0 * local_codewords(H, a)
        z = (spins - m[list(row)]) * scale[list(row)]
        cov = (z * beliefs.check[a][:, None]).T @ z
        d = len(row)
        for p in range(d):
            for q in range(p + 1, d):
                if ok[row[p]] and ok[row[q]]:
                    out.append((float(cov[p, q]), a, row[p], row[q]))
    return out


def _shortest_cycle_through(adj, start_edge):
    """Shortest bit path from j back to i avoiding the start edge's check."""
    _, a0, i, j = start_edge
    parent = {j: None}
    q = deque([j])
    while q:
        u = q.popleft()
        if u == i:
            break
        for v, a, w in adj[u]:
            if a == a0 or v in parent:
                continue
            parent[v] = (u, a, w)
            q.append(v)
    if i not in parent:
        return None
    bits, checks, weights = [i], [], []
    v = i
    while parent[v] is not None:
        u, a, w = parent[v]
        checks.append(a)
        weights.append(w)
        bits.append(u)
        v = u
    # bits runs i -> ... -> j; close with j -> i through the start check
    checks.append(a0)
    weights.append(start_edge[0])
    if len(set(checks)) != len(checks):
        return None
    return tuple(bits), tuple(checks), tuple(weights)


def _canonical(bits, checks, weights):
    n = len(bits)
    k = bits.index(min(bits))
    b = bits[k:] + bits[:k]
    c = checks[k:] + checks[:k]
    w = weights[k:] + weights[:k]
    if n > 2 and b[-1] < b[1]:
        b = (b[0],) + tuple(reversed(b[1:]))
        c = tuple(reversed(c))
        w = tuple(reversed(w))
    return b, c, w


def find_critical_loops(
    H: ParityCheckMatrix,
    beliefs: BeliefState,
    schedule=DEFAULT_SCHEDULE,
    max_cycles: int = MAX_CYCLES,
) -> list[CriticalLoop]:
    """Simple cycles of strong triads at the first threshold that yields any.

    Sorted by |r| descending, then length, then bit indices.
    """
    triads = sorted(all_triads(H, beliefs), key=lambda t: (-abs(t[0]), t[1], t[2], t[3]))
    for thr in schedule:
        kept = [t for t in triads if abs(t[0]) >= thr - 1e-12]
        if not kept:
            continue
        adj: dict[int, list] = {}
        for w, a, i, j in kept:
            adj.setdefault(i, []).append((j, a, w))
            adj.setdefault(j, []).append((i, a, w))
        found: dict[tuple, CriticalLoop] = {}
        covered: set = set()
        for t in kept:
            if len(found) >= max_cycles:
                break
            if (t[1], t[2], t[3]) in covered:
                continue
            cyc = _shortest_cycle_through(adj, t)
            if cyc is None:
                continue
            b, c, w = _canonical(*cyc)
            if (b, c) in found:
                continue
            n = len(b)
            for k, a in enumerate(c):
                covered.add((a, min(b[k], b[(k + 1) % n]), max(b[k], b[(k + 1) % n])))
            found[(b, c)] = CriticalLoop(b, c, float(np.prod(w)), w, thr)
        if found:
            return sorted(found.values(), key=lambda L: (-abs(L.weight), len(L.bits), L.bits))
    return []


def find_critical_loop(H: ParityCheckMatrix, beliefs: BeliefState, schedule=DEFAULT_SCHEDULE):
    """Best critical loop, or None when the schedule is exhausted."""
    loops = find_critical_loops(H, beliefs, schedule)
    return loops[0] if loops else None


# ------------------------------------------------------- exact verification


def enumerate_generalized_loops(
    H: ParityCheckMatrix, max_vertices: int = MAX_LOOP_VERTICES, max_edges: int = MAX_LOOP_EDGES
) -> list[GeneralizedLoop]:
    """Every nonempty edge subset with no degree-one vertex (exhaustive)."""
    if H.n_bits + H.n_checks > max_vertices or H.n_edges > max_edges:
        raise ValueError(
            f"graph with {H.n_bits + H.n_checks} vertices / {H.n_edges} edges exceeds the enumeration cap"
        )
    edges = H.edges()
    n = H.n_bits
    ends = [(n + a, i) for a, i in edges]
    remaining = [0] * (n + H.n_checks)
    for u, v in ends:
        remaining[u] += 1
        remaining[v] += 1
    degree = [0] * (n + H.n_checks)
    chosen: list[int] = []
    out: list[GeneralizedLoop] = []

    def rec(k: int) -> None:
        if k == len(edges):
            if chosen:
                out.append(GeneralizedLoop(frozenset(edges[e] for e in chosen)))
            return
        u, v = ends[k]
        remaining[u] -= 1
        remaining[v] -= 1
        for take in (False, True):
            if take:
                degree[u] += 1
                degree[v] += 1
                chosen.append(k)
            if not any(remaining[x] == 0 and degree[x] == 1 for x in (u, v)):
                rec(k + 1)
            if take:
                degree[u] -= 1
                degree[v] -= 1
                chosen.pop()
        remaining[u] += 1
        remaining[v] += 1

    rec(0)
    return out


@dataclass
class LoopSeriesReport:
    z_exact: float
    z0: float
    series_sum: float
    relative_error: float
    log_z_exact: float
    log_z0: float
    n_loops: int
    bp_converged: bool
    bp_iterations: int

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def verify_loop_series(
    H: ParityCheckMatrix, h, tol: float = 1e-13, max_iter: int = 20000, damping: float = 0.5
) -> LoopSeriesReport:
    """Compare Z by enumeration with Z0 (1 + sum_C r(C)) at a BP fixed point."""
    h = np.asarray(h, dtype=float)
    loops = enumerate_generalized_loops(H)
    state, converged = run_bp(H, h, max_iter=max_iter, tol=tol, damping=damping)
    beliefs = beliefs_from_messages(H, h, state)
    bethe = bethe_free_energy(H, h, beliefs)
    series = float(sum(loop_term(H, beliefs, C) for C in loops))
    log_z = log_partition_function(H, h)
    log_z0 = -bethe.free_energy
    rel = abs(1.0 - np.exp(log_z0 - log_z) * (1.0 + series))
    return LoopSeriesReport(
        float(np.exp(log_z)), float(np.exp(log_z0)), series, float(rel),
        log_z, log_z0, len(loops), converged, state.iteration,
    )
