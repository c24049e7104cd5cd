"""Large-polytope LP decoding.

Variables are one b_i(1) per bit followed by one b_a(c) per (check, local
codeword) pair, in check order. Constraints: each check distribution sums to
one and reproduces every incident bit belief; all variables lie in [0, 1].
The objective is the self-energy sum_i h_i b_i(1).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import NamedTuple, TextIO

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .bp import BeliefState
from .tanner import ParityCheckMatrix, local_codewords, syndrome

INTEGRALITY_TOL = 1e-6
FEASIBILITY_TOL = 1e-8
PERTURBATION = 1e-9


class Status(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    NUMERICAL_FAILURE = "NumericalFailure"


class Classification(str, Enum):
    INTEGRAL_CODEWORD = "IntegralCodeword"
    FRACTIONAL = "FractionalPseudoCodeword"


@dataclass(frozen=True)
class _Structure:
    n_vars: int
    offsets: np.ndarray  # first variable of each check block; offsets[-1] == n_vars
    local: tuple  # local codeword arrays per check
    A_eq: sparse.csr_matrix
    b_eq: np.ndarray


@functools.lru_cache(maxsize=16)
def _structure(H: ParityCheckMatrix) -> _Structure:
    n = H.n_bits
    local = tuple(local_codewords(H, a) for a in range(H.n_checks))
    sizes = np.array([len(L) for L in local])
    offsets = np.concatenate([[n], n + np.cumsum(sizes)])
    ri, ci, vals, rhs = [], [], [], []
    row = 0
    for a, bits in enumerate(H.rows):
        L, off = local[a], offsets[a]
        ri += [row] * len(L)
        ci += list(range(off, off + len(L)))
        vals += [1.0] * len(L)
        rhs.append(1.0)
        row += 1
        for t, i in enumerate(bits):
            ks = np.flatnonzero(L[:, t])
            ri += [row] * (len(ks) + 1)
            ci += [i] + list(off + ks)
            vals += [-1.0] + [1.0] * len(ks)
            rhs.append(0.0)
            row += 1
    A = sparse.csr_matrix((vals, (ri, ci)), shape=(row, int(offsets[-1])))
    return _Structure(int(offsets[-1]), offsets, local, A, np.array(rhs))


@dataclass(frozen=True)
class LpProblem:
    H: ParityCheckMatrix
    h: np.ndarray  # bit costs actually optimised (after any erasure)
    lower: np.ndarray
    upper: np.ndarray
    pinned: tuple = ()
    erased: tuple = ()

    @property
    def n_vars(self) -> int:
        return _structure(self.H).n_vars

    @property
    def cost(self) -> np.ndarray:
        c = np.zeros(self.n_vars)
        c[: self.H.n_bits] = self.h
        return c

    def fix(self, var: int, value: float) -> LpProblem:
        lo, up = self.lower.copy(), self.upper.copy()
        lo[var] = up[var] = value
        pinned = self.pinned + ((int(var), float(value)),)
        return replace(self, lower=lo, upper=up, pinned=pinned)

    def pin(self, bit: int, value: int) -> LpProblem:
        if value not in (0, 1):
            raise ValueError("pinned bit value must be 0 or 1")
        if not 0 <= bit < self.H.n_bits:
            raise IndexError(f"bit {bit} out of range")
        return self.fix(bit, float(value))

    def check_var(self, alpha: int, k: int) -> int:
        return int(_structure(self.H).offsets[alpha]) + k


def build_lp(H: ParityCheckMatrix, h) -> LpProblem:
    h = np.asarray(h, dtype=float)
    if h.shape != (H.n_bits,):
        raise ValueError("log-likelihood vector does not match the code")
    n_vars = _structure(H).n_vars
    return LpProblem(H, h.copy(), np.zeros(n_vars), np.ones(n_vars))


@dataclass
class LpSolution:
    problem: LpProblem
    status: Status
    x: np.ndarray | None
    objective: float = float("nan")
    message: str = ""

    @property
    def bit_values(self) -> np.ndarray:
        return self.x[: self.problem.H.n_bits]

    @property
    def check_values(self) -> list[np.ndarray]:
        off = _structure(self.problem.H).offsets
        return [self.x[off[a] : off[a + 1]] for a in range(self.problem.H.n_checks)]

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL

    @property
    def classification(self) -> Classification:
        return classify(self)

    @property
    def is_integral(self) -> bool:
        return classify(self) is Classification.INTEGRAL_CODEWORD

    def beliefs(self) -> BeliefState:
        w = self.bit_values
        return BeliefState(np.column_stack([1.0 - w, w]), [c.copy() for c in self.check_values])


def solve_lp(problem: LpProblem, perturb: bool = False) -> LpSolution:
    """Dual simplex (HiGHS); the returned optimum is a vertex.

    ``perturb`` adds 1e-9 * (i + 1) to each bit cost to split ties between
    optimal vertices; the reported objective uses the unperturbed costs.
    """
    st = _structure(problem.H)
    c = problem.cost
    if perturb:
        c[: problem.H.n_bits] += PERTURBATION * np.arange(1, problem.H.n_bits + 1)
    res = linprog(
        c,
        A_eq=st.A_eq,
        b_eq=st.b_eq,
        bounds=np.column_stack([problem.lower, problem.upper]),
        method="highs-ds",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status == 2:
        return LpSolution(problem, Status.INFEASIBLE, None, message=res.message)
    if res.status != 0 or res.x is None:
        return LpSolution(problem, Status.NUMERICAL_FAILURE, None, message=res.message)
    x = np.clip(res.x, 0.0, 1.0) + 0.0  # no negative zeros
    resid = np.abs(st.A_eq @ x - st.b_eq).max()
    if resid > FEASIBILITY_TOL:
        return LpSolution(problem, Status.NUMERICAL_FAILURE, None, message=f"residual {resid:.2e}")
    return LpSolution(problem, Status.OPTIMAL, x, float(problem.h @ x[: problem.H.n_bits]))


def classify(sol: LpSolution, integrality_tol: float = INTEGRALITY_TOL) -> Classification:
    if not sol.optimal:
        raise ValueError(f"cannot classify a {sol.status.value} solution")
    b = sol.bit_values
    if np.all(np.minimum(b, 1.0 - b) <= integrality_tol):
        if not syndrome(sol.problem.H, (b > 0.5).astype(np.uint8)).any():
            return Classification.INTEGRAL_CODEWORD
    return Classification.FRACTIONAL


class Facet(NamedTuple):
    """Variable bound ``var == value`` that is slack at the current vertex."""

    var: int
    value: float
    kind: str  # "bit" or "check"
    bit: int | None = None
    check: int | None = None
    local_index: int | None = None


@dataclass
class FacetStatus:
    fractional_bits: list[int]
    inactive: list[Facet] = field(default_factory=list)
    interior_check_vars: int = 0

    @property
    def bit_facets(self) -> list[Facet]:
        return [f for f in self.inactive if f.kind == "bit"]


def facet_status(sol: LpSolution, integrality_tol: float = INTEGRALITY_TOL) -> FacetStatus:
    """Inactive bound inequalities of an optimal solution.

    A lower bound is inactive when the variable exceeds ``integrality_tol``,
    an upper bound when it is below ``1 - integrality_tol``. Bit facets come
    first, ordered by bit then value 0 before 1.
    """
    if not sol.optimal:
        raise ValueError("facet status needs an optimal solution")
    tol = integrality_tol
    b = sol.bit_values
    frac = [int(i) for i in np.flatnonzero((b > tol) & (b < 1.0 - tol))]
    inactive = []
    for i, v in enumerate(b):
        if v > tol:
            inactive.append(Facet(i, 0.0, "bit", bit=i))
        if v < 1.0 - tol:
            inactive.append(Facet(i, 1.0, "bit", bit=i))
    interior = 0
    off = _structure(sol.problem.H).offsets
    for a, cv in enumerate(sol.check_values):
        for k, v in enumerate(cv):
            if tol < v < 1.0 - tol:
                interior += 1
            if v > tol:
                inactive.append(Facet(int(off[a] + k), 0.0, "check", check=a, local_index=k))
            if v < 1.0 - tol:
                inactive.append(Facet(int(off[a] + k), 1.0, "check", check=a, local_index=k))
    return FacetStatus(frac, inactive, interior)


def lp_with_pinned_bit(H: ParityCheckMatrix, h, i: int, v: int) -> LpSolution:
    return solve_lp(build_lp(H, h).pin(i, v))


def erase(problem: LpProblem, bits, gamma: float = 1.0) -> LpProblem:
    """Scale the costs of ``bits`` by ``1 - gamma`` (gamma = 1: full erasure)."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("erasure strength must lie in [0, 1]")
    bits = sorted({int(i) for i in bits})
    h = problem.h.copy()
    h[bits] *= 1.0 - gamma
    erased = problem.erased + tuple((i, float(h[i])) for i in bits)
    return replace(problem, h=h, erased=erased)


def lp_with_erasure(H: ParityCheckMatrix, h, bits, gamma: float = 1.0) -> LpSolution:
    return solve_lp(erase(build_lp(H, h), bits, gamma))


def write_lp(problem: LpProblem, fh: TextIO) -> None:
    """Dump in CPLEX LP text format (b<i> bit beliefs, c<a>_<k> check beliefs)."""
    H = problem.H
    st = _structure(H)

    def name(var: int) -> str:
        if var < H.n_bits:
            return f"b{var}"
        a = int(np.searchsorted(st.offsets, var, side="right")) - 1
        return f"c{a}_{var - st.offsets[a]}"

    def linear(coefs: dict[int, float]) -> str:
        parts = []
        for var, c in coefs.items():
            sign = "-" if c < 0 else "+"
            parts.append(f"{sign} {abs(c):.17g} {name(var)}")
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else s

    fh.write("\\ large-polytope LP decoding problem\nMinimize\n")
    fh.write(" obj: " + (linear({i: c for i, c in enumerate(problem.h) if c != 0.0}) or "0 b0") + "\n")
    fh.write("Subject To\n")
    A = st.A_eq.tocsr()
    for r in range(A.shape[0]):
        lo, hi = A.indptr[r], A.indptr[r + 1]
        coefs = dict(zip(A.indices[lo:hi].tolist(), A.data[lo:hi].tolist()))
        fh.write(f" r{r}: {linear(coefs)} = {st.b_eq[r]:g}\n")
    fh.write("Bounds\n")
    for var in range(st.n_vars):
        fh.write(f" {problem.lower[var]:g} <= {name(var)} <= {problem.upper[var]:g}\n")
    fh.write("End\n")
