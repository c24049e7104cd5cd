"""Parity-check matrices, Tanner-graph adjacency and alist I/O."""

from __future__ import annotations

import functools
import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

LOCAL_CODEWORD_CAP = 20


class AlistError(ValueError):
    """Malformed alist input; ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class ParityCheckMatrix:
    """Sparse binary M x N parity-check matrix.

    ``rows[a]`` holds the sorted bit indices of check ``a`` and ``cols[i]``
    the sorted check indices touching bit ``i``. Indices are 0-based.
    """

    n_bits: int
    n_checks: int
    rows: tuple[tuple[int, ...], ...]
    cols: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.rows) != self.n_checks or len(self.cols) != self.n_bits:
            raise ValueError("rows/cols lengths do not match n_checks/n_bits")
        for a, row in enumerate(self.rows):
            if len(set(row)) != len(row):
                raise ValueError(f"check {a} repeats a bit index")
            if len(row) < 2:
                raise ValueError(f"check {a} has degree {len(row)} < 2")
            for i in row:
                if not 0 <= i < self.n_bits:
                    raise ValueError(f"check {a} references bit {i} out of range")
        for i, col in enumerate(self.cols):
            if len(set(col)) != len(col):
                raise ValueError(f"bit {i} repeats a check index")
            if not col:
                raise ValueError(f"bit {i} is not connected to any check")
        edges_r = {(a, i) for a, row in enumerate(self.rows) for i in row}
        edges_c = {(a, i) for i, col in enumerate(self.cols) for a in col}
        if edges_r != edges_c:
            raise ValueError("rows and cols are inconsistent")

    @classmethod
    def from_rows(cls, n_bits: int, rows: Iterable[Iterable[int]]) -> ParityCheckMatrix:
        rows_t = tuple(tuple(sorted(int(i) for i in r)) for r in rows)
        cols: list[list[int]] = [[] for _ in range(n_bits)]
        for a, row in enumerate(rows_t):
            for i in row:
                if 0 <= i < n_bits:
                    cols[i].append(a)
        return cls(n_bits, len(rows_t), rows_t, tuple(tuple(c) for c in cols))

    @classmethod
    def from_dense(cls, H) -> ParityCheckMatrix:
        H = np.asarray(H)
        if H.ndim != 2:
            raise ValueError("dense parity-check matrix must be 2-D")
        return cls.from_rows(H.shape[1], [np.flatnonzero(r).tolist() for r in H % 2])

    def dense(self) -> np.ndarray:
        H = np.zeros((self.n_checks, self.n_bits), dtype=np.uint8)
        for a, row in enumerate(self.rows):
            H[a, list(row)] = 1
        return H

    @property
    def n_edges(self) -> int:
        return sum(len(r) for r in self.rows)

    def edges(self) -> list[tuple[int, int]]:
        """(check, bit) pairs ordered by check, then bit."""
        return [(a, i) for a, row in enumerate(self.rows) for i in row]

    def bit_degrees(self) -> np.ndarray:
        return np.array([len(c) for c in self.cols])

    def check_degrees(self) -> np.ndarray:
        return np.array([len(r) for r in self.rows])


# ---------------------------------------------------------------- alist I/O


def parse_alist(text: str) -> ParityCheckMatrix:
    """Parse MacKay's alist format. Zero entries are padding and dropped."""
    lines = [(k + 1, ln.split()) for k, ln in enumerate(text.splitlines())]
    lines = [(k, toks) for k, toks in lines if toks]
    pos = 0

    def take(count: int | None, what: str) -> tuple[int, list[int]]:
        nonlocal pos
        if pos >= len(lines):
            raise AlistError(f"unexpected end of input while reading {what}", None)
        lineno, toks = lines[pos]
        pos += 1
        try:
            vals = [int(t) for t in toks]
        except ValueError:
            raise AlistError(f"non-integer token in {what}", lineno) from None
        if count is not None and len(vals) != count:
            raise AlistError(f"expected {count} values in {what}, got {len(vals)}", lineno)
        return lineno, vals

    lineno, (n, m) = take(2, "header")
    if n <= 0 or m <= 0:
        raise AlistError("header dimensions must be positive", lineno)
    lineno, (max_col, max_row) = take(2, "max degrees")
    lineno_cd, col_deg = take(n, "column degrees")
    lineno_rd, row_deg = take(m, "row degrees")
    if max(col_deg) > max_col:
        raise AlistError("column degree exceeds declared maximum", lineno_cd)
    if max(row_deg) > max_row:
        raise AlistError("row degree exceeds declared maximum", lineno_rd)

    def adjacency(count: int, degs: list[int], limit: int, what: str) -> list[tuple[int, list[int]]]:
        out = []
        for k in range(count):
            ln, vals = take(None, f"{what} {k + 1}")
            entries = [v for v in vals if v != 0]
            for v in entries:
                if not 1 <= v <= limit:
                    raise AlistError(f"index {v} out of range 1..{limit} in {what} {k + 1}", ln)
            if len(entries) != degs[k]:
                raise AlistError(
                    f"{what} {k + 1} lists {len(entries)} entries but degree is {degs[k]}", ln
                )
            out.append((ln, [v - 1 for v in entries]))
        return out

    col_adj = adjacency(n, col_deg, m, "column")
    row_adj = adjacency(m, row_deg, n, "row")

    row_sets = [set(r) for _, r in row_adj]
    col_sets = [set(c) for _, c in col_adj]
    for i, (ln, checks) in enumerate(col_adj):
        for a in checks:
            if i not in row_sets[a]:
                raise AlistError(f"column {i + 1} lists check {a + 1}, which omits it", ln)
    for a, (ln, bits) in enumerate(row_adj):
        for i in bits:
            if a not in col_sets[i]:
                raise AlistError(f"row {a + 1} lists bit {i + 1}, whose column omits it", ln)
    try:
        return ParityCheckMatrix.from_rows(n, [r for _, r in row_adj])
    except ValueError as exc:
        raise AlistError(str(exc)) from None


def emit_alist(H: ParityCheckMatrix) -> str:
    col_deg = H.bit_degrees()
    row_deg = H.check_degrees()
    out = [
        f"{H.n_bits} {H.n_checks}",
        f"{col_deg.max()} {row_deg.max()}",
        " ".join(map(str, col_deg)),
        " ".join(map(str, row_deg)),
    ]
    for col in H.cols:
        out.append(" ".join(str(a + 1) for a in col))
    for row in H.rows:
        out.append(" ".join(str(i + 1) for i in row))
    return "\n".join(out) + "\n"


def read_alist(path) -> ParityCheckMatrix:
    with open(path) as fh:
        return parse_alist(fh.read())


def write_alist(H: ParityCheckMatrix, path) -> None:
    with open(path, "w") as fh:
        fh.write(emit_alist(H))


# -------------------------------------------------------------- code algebra


def build_tanner_155() -> ParityCheckMatrix:
    """The [155,64,20] Tanner code: 3x5 array of 31x31 circulant permutations.

    Block (a, b) is the identity shifted by 5**a * 2**b mod 31.
    """
    p = 31
    rows = []
    for a in range(3):
        for r in range(p):
            rows.append([b * p + (r + pow(5, a, p) * pow(2, b, p)) % p for b in range(5)])
    return ParityCheckMatrix.from_rows(5 * p, rows)


def syndrome(H: ParityCheckMatrix, sigma: Sequence[int]) -> np.ndarray:
    sigma = np.asarray(sigma)
    if sigma.shape != (H.n_bits,):
        raise ValueError(f"bit vector has length {sigma.size}, code has {H.n_bits} bits")
    s = np.asarray(sigma, dtype=np.int64) & 1
    return np.array([s[list(row)].sum() & 1 for row in H.rows], dtype=np.uint8)


def is_codeword(H: ParityCheckMatrix, sigma: Sequence[int]) -> bool:
    return not syndrome(H, sigma).any()


@functools.lru_cache(maxsize=64)
def _even_weight_patterns(degree: int) -> np.ndarray:
    pats = [p for p in itertools.product((0, 1), repeat=degree) if sum(p) % 2 == 0]
    arr = np.array(pats, dtype=np.uint8)
    arr.setflags(write=False)
    return arr


def local_codewords(H: ParityCheckMatrix, alpha: int, cap: int = LOCAL_CODEWORD_CAP) -> np.ndarray:
    """Even-weight configurations on ``H.rows[alpha]``, shape (2**(d-1), d).

    Column ``t`` refers to bit ``H.rows[alpha][t]``.
    """
    if not 0 <= alpha < H.n_checks:
        raise IndexError(f"check {alpha} out of range")
    d = len(H.rows[alpha])
    if d > cap:
        raise ValueError(f"check {alpha} has degree {d}; local codeword enumeration capped at {cap}")
    return _even_weight_patterns(d)


def gf2_rank(H: ParityCheckMatrix) -> int:
    A = H.dense().copy()
    rank = 0
    for c in range(A.shape[1]):
        piv = np.flatnonzero(A[rank:, c])
        if piv.size == 0:
            continue
        p = rank + piv[0]
        A[[rank, p]] = A[[p, rank]]
        hit = np.flatnonzero(A[:, c])
        hit = hit[hit != rank]
        A[hit] ^= A[rank]
        rank += 1
        if rank == A.shape[0]:
            break
    return rank


def girth(H: ParityCheckMatrix) -> float:
    """Length of the shortest cycle of the Tanner graph (inf for a forest).

    BFS from every bit node; cycles in a bipartite graph have even length.
    """
    n = H.n_bits
    # node ids: bits 0..n-1, checks n..n+m-1
    adj = [[n + a for a in col] for col in H.cols] + [list(row) for row in H.rows]
    best = float("inf")
    for root in range(n):
        dist = {root: 0}
        parent = {root: -1}
        q = deque([root])
        while q:
            u = q.popleft()
            if 2 * dist[u] >= best:
                break
            for v in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    parent[v] = u
                    q.append(v)
                elif parent[u] != v:
                    best = min(best, dist[u] + dist[v] + 1)
    return best


def probe_min_weight(H: ParityCheckMatrix, trials: int, rng: np.random.Generator, p: int = 2):
    """Randomised information-set search for low-weight codewords.

    Each trial permutes the columns, row-reduces H, and inspects sums of up to
    two kernel basis vectors (``p`` in {1, 2}). Returns the lowest-weight nonzero codeword seen
    (an upper bound on the minimum distance, not a certificate).
    """
    Hd = H.dense()
    n = H.n_bits
    best = None
    for _ in range(trials):
        perm = rng.permutation(n)
        A = Hd[:, perm].copy()
        pivots = []
        r = 0
        for c in range(n):
            piv = np.flatnonzero(A[r:, c])
            if piv.size == 0:
                continue
            k = r + piv[0]
            A[[r, k]] = A[[k, r]]
            hit = np.flatnonzero(A[:, c])
            hit = hit[hit != r]
            A[hit] ^= A[r]
            pivots.append(c)
            r += 1
            if r == A.shape[0]:
                break
        free = [c for c in range(n) if c not in set(pivots)]
        # kernel basis: one vector per free column
        basis = np.zeros((len(free), n), dtype=np.uint8)
        for t, f in enumerate(free):
            basis[t, f] = 1
            for row, pc in enumerate(pivots):
                basis[t, pc] = A[row, f]
        w1 = basis.sum(axis=1)
        cands = [(int(w1.min()), basis[int(w1.argmin())])]
        if p >= 2 and len(free) > 1:
            pair = basis[:, None, :] ^ basis[None, :, :]
            w2 = pair.sum(axis=2).astype(np.int64)
            w2[np.diag_indices(len(free))] = n + 1
            a, b = np.unravel_index(int(w2.argmin()), w2.shape)
            cands.append((int(w2[a, b]), pair[a, b]))
        for w, v in cands:
            if best is None or w < best[0]:
                cw = np.zeros(n, dtype=np.uint8)
                cw[perm] = v
                best = (w, cw)
    return None if best is None else best[1]
