"""Independent brute-force references used by the tests.

Nothing here calls into the package's own enumeration helpers; every quantity
is computed from the dense parity-check matrix by exhaustive search.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import linprog


def all_words(n: int) -> np.ndarray:
    return np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int64)


def brute_codewords(Hd: np.ndarray) -> np.ndarray:
    words = all_words(Hd.shape[1])
    ok = ((words @ Hd.T) % 2 == 0).all(axis=1)
    return words[ok]


def brute_partition(Hd: np.ndarray, h) -> float:
    """Z = sum over all 2^N words of prod_a delta(parity_a) * exp(-h . sigma)."""
    h = np.asarray(h, dtype=float)
    total = 0.0
    for sigma in all_words(Hd.shape[1]):
        if np.all((Hd @ sigma) % 2 == 0):
            total += np.exp(-h @ sigma)
    return total


def brute_marginals(Hd: np.ndarray, h) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    cw = brute_codewords(Hd)
    w = np.exp(-(cw @ h))
    return (w / w.sum()) @ cw


def brute_ml(Hd: np.ndarray, h) -> np.ndarray:
    cw = brute_codewords(Hd)
    return cw[np.argmin(cw @ np.asarray(h, dtype=float))]


def fundamental_polytope_lp(Hd: np.ndarray, h) -> tuple[float, np.ndarray]:
    """Minimise h . b over the projected polytope described by odd-set cuts.

    For each check and each odd subset S of its neighbourhood N:
    sum_{S} b_i - sum_{N \\ S} b_i <= |S| - 1. This is the bit-space
    projection of the large polytope, so the optimal values must agree.
    """
    n = Hd.shape[1]
    A, b = [], []
    for row in Hd:
        nb = np.flatnonzero(row)
        for k in range(1, len(nb) + 1, 2):
            for S in itertools.combinations(nb, k):
                a = np.zeros(n)
                a[nb] = -1.0
                a[list(S)] = 1.0
                A.append(a)
                b.append(len(S) - 1)
    res = linprog(np.asarray(h, dtype=float), A_ub=np.array(A), b_ub=np.array(b),
                  bounds=[(0, 1)] * n, method="highs")
    assert res.status == 0, res.message
    return float(res.fun), res.x


def leafless_edge_subsets(Hd: np.ndarray) -> list[frozenset]:
    """All nonempty edge sets of the Tanner graph with no degree-one vertex."""
    edges = [(a, i) for a, row in enumerate(Hd) for i in np.flatnonzero(row)]
    out = []
    for mask in range(1, 2 ** len(edges)):
        chosen = [edges[k] for k in range(len(edges)) if mask >> k & 1]
        deg: dict = {}
        for a, i in chosen:
            deg[("c", a)] = deg.get(("c", a), 0) + 1
            deg[("b", i)] = deg.get(("b", i), 0) + 1
        if min(deg.values()) >= 2:
            out.append(frozenset((int(a), int(i)) for a, i in chosen))
    return out


def parse_lp_text(text: str):
    """Tiny reader for the CPLEX LP subset emitted by the package."""
    lines = [ln.strip() for ln in text.splitlines()]
    sec = None
    names: dict[str, int] = {}
    obj: dict[str, float] = {}
    rows, rhs, bounds = [], [], {}

    def terms(expr: str) -> dict[str, float]:
        toks = expr.replace("- ", "-").replace("+ ", "").split()
        out = {}
        k = 0
        while k < len(toks):
            coef = float(toks[k])
            out[toks[k + 1]] = out.get(toks[k + 1], 0.0) + coef
            k += 2
        return out

    for ln in lines:
        if not ln or ln.startswith("\\"):
            continue
        if ln in ("Minimize", "Subject To", "Bounds", "End"):
            sec = ln
            continue
        if sec == "Minimize":
            obj = terms(ln.split(":", 1)[1])
        elif sec == "Subject To":
            body, r = ln.split(":", 1)[1].split("=")
            rows.append(terms(body))
            rhs.append(float(r))
        elif sec == "Bounds":
            lo, var, hi = ln.replace("<=", " ").split()
            bounds[var] = (float(lo), float(hi))
    for d in [obj, *rows]:
        for v in d:
            names.setdefault(v, len(names))
    for v in bounds:
        names.setdefault(v, len(names))
    c = np.zeros(len(names))
    for v, x in obj.items():
        c[names[v]] = x
    A = np.zeros((len(rows), len(names)))
    for r, d in enumerate(rows):
        for v, x in d.items():
            A[r, names[v]] = x
    bnds = [bounds.get(v, (0.0, np.inf)) for v in sorted(names, key=names.get)]
    return c, A, np.array(rhs), bnds
