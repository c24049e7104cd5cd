"""Small bundled codes used by tests and ``verify-loops``."""

from __future__ import annotations

import os

import numpy as np

from .tanner import ParityCheckMatrix, build_tanner_155, read_alist


def hamming_7_4() -> ParityCheckMatrix:
    return ParityCheckMatrix.from_rows(7, [[0, 1, 2, 4], [0, 1, 3, 5], [0, 2, 3, 6]])


def single_check(degree: int) -> ParityCheckMatrix:
    return ParityCheckMatrix.from_rows(degree, [list(range(degree))])


def single_cycle() -> ParityCheckMatrix:
    """One 4-cycle (bits 0, 1; checks 0, 1) with a pendant bit on each check.

    Without the pendant bits both checks force x0 = x1 and BP messages grow
    without bound around the cycle, so no finite fixed point exists.
    """
    return ParityCheckMatrix.from_rows(4, [[0, 1, 2], [0, 1, 3]])


def two_cycles() -> ParityCheckMatrix:
    """Two vertex-disjoint copies of :func:`single_cycle`."""
    return ParityCheckMatrix.from_rows(8, [[0, 1, 2], [0, 1, 3], [4, 5, 6], [4, 5, 7]])


def random_tree_code(n_bits: int, rng: np.random.Generator, max_check_degree: int = 4) -> ParityCheckMatrix:
    """Random connected cycle-free Tanner graph on exactly ``n_bits`` bits.

    Each new check hangs off an existing bit and brings 1 to
    ``max_check_degree - 1`` fresh bits.
    """
    if n_bits < 2:
        raise ValueError("a tree code needs at least two bits")
    rows: list[list[int]] = []
    n = 1
    while n < n_bits:
        parent = int(rng.integers(n))
        k = int(rng.integers(1, max_check_degree))
        k = min(k, n_bits - n)
        rows.append([parent] + list(range(n, n + k)))
        n += k
    return ParityCheckMatrix.from_rows(n_bits, rows)


BUILTIN = {
    "tanner155": build_tanner_155,
    "hamming74": hamming_7_4,
    "single_cycle": single_cycle,
    "two_cycles": two_cycles,
}


def load_code(source: str) -> ParityCheckMatrix:
    """A builtin name or a path to an alist file."""
    if source in BUILTIN:
        return BUILTIN[source]()
    if os.path.exists(source):
        return read_alist(source)
    raise ValueError(f"unknown code {source!r}: not a builtin ({', '.join(BUILTIN)}) or alist path")
