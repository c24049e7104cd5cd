"""LP-based decoders that act after a failed bare LP, and pseudo-codeword search.

All decoders take log-likelihoods ``h`` and return a :class:`DecodeOutcome`.
Reported objectives are energies under the original ``h``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .channel import ChannelOutput, effective_distance, instanton_noise, llr_from_output, sample_awgn
from .loops import DEFAULT_SCHEDULE, CriticalLoop, find_critical_loop, find_critical_loops
from .lp import Facet, LpProblem, LpSolution, build_lp, erase, facet_status, solve_lp
from .outcome import DecodeOutcome, Method, make_outcome
from .tanner import ParityCheckMatrix

ENERGY_TOL = 1e-9


@dataclass
class DecoderConfig:
    gamma: float = 1.0  # erasure strength
    max_loops: int = 3
    schedule: tuple = DEFAULT_SCHEDULE
    max_attempts: int | None = None  # LGG pinned bits; None = bits of the first loop
    facets: str = "all"  # facet guessing: "all" or "bits"
    fraction: float = 1.0  # facet guessing: share of facets tried
    seed: int = 0
    integrality_tol: float = 1e-6


@dataclass
class PcsConfig:
    tol: float = 1e-6
    max_iter: int = 50
    eps: float = 1e-6
    closure_tol: float = 1e-4
    s2_range: tuple = (0.5, 1.0)
    annotate_loops: bool = True
    schedule: tuple = DEFAULT_SCHEDULE


def _outcome(H, method, sol: LpSolution, h, cfg: DecoderConfig | None = None, **kw) -> DecodeOutcome:
    tol = cfg.integrality_tol if cfg else 1e-6
    b = sol.bit_values
    return make_outcome(H, method, b, float(np.asarray(h) @ b), tol, **kw)


def _failure(H, method, h) -> DecodeOutcome:
    out = make_outcome(H, method, np.full(H.n_bits, 0.5), float("nan"))
    out.converged = False
    return out


def lp_decode(H: ParityCheckMatrix, h) -> DecodeOutcome:
    sol = solve_lp(build_lp(H, h))
    if not sol.optimal:
        out = _failure(H, Method.LP, h)
    else:
        out = _outcome(H, Method.LP, sol, h)
    out.work["lp_solves"] = 1
    return out


def _bare(H, h, method, cfg):
    base = build_lp(H, h)
    sol = solve_lp(base)
    if not sol.optimal:
        raise RuntimeError(f"bare LP returned {sol.status.value}: {sol.message}")
    out = _outcome(H, method, sol, h, cfg)
    out.work["lp_solves"] = 1
    out.trace.append(("bare", sol.classification.value, out.objective))
    return base, sol, out


# --------------------------------------------------------------- LP-erasure


def lp_erasure_decode(H: ParityCheckMatrix, h, config: DecoderConfig | None = None) -> DecodeOutcome:
    """Bare LP; on failure erase the log-likelihoods along the strongest
    critical loops in turn until an integral codeword appears."""
    cfg = config or DecoderConfig()
    base, sol, out = _bare(H, h, Method.LP_ERASURE, cfg)
    if out.is_codeword:
        return out
    loops = find_critical_loops(H, sol.beliefs(), cfg.schedule)
    out.work["loops_searched"] = len(loops)
    if not loops:
        out.trace.append(("no_critical_loop",))
        return out
    for L in loops[: cfg.max_loops]:
        s = solve_lp(erase(base, L.bits, cfg.gamma))
        out.work["lp_solves"] += 1
        if not s.optimal:
            out.trace.append(("erase", L.bits, s.status.value))
            continue
        cand = _outcome(H, Method.LP_ERASURE, s, h, cfg)
        out.trace.append(("erase", L.bits, s.classification.value, cand.objective))
        if cand.is_codeword:
            cand.work, cand.trace = out.work, out.trace
            return cand
    return out


# ------------------------------------------------------------ facet guessing


def bit_pins(sol: LpSolution, tol: float = 1e-6) -> list[tuple[int, int]]:
    """(bit, value) pins tried by bit guessing: both values for fractional
    bits, the opposite value for integral ones."""
    return [(f.bit, int(f.value)) for f in facet_status(sol, tol).bit_facets]


def _guess(H, h, base: LpProblem, out: DecodeOutcome, facets: list[Facet], method, cfg) -> DecodeOutcome:
    best = None
    for f in facets:
        s = solve_lp(base.fix(f.var, f.value))
        out.work["lp_solves"] += 1
        if not s.optimal:
            out.trace.append((f.kind, f.var, f.value, s.status.value))
            continue
        cand = _outcome(H, method, s, h, cfg)
        out.trace.append((f.kind, f.var, f.value, s.classification.value, cand.objective))
        if cand.is_codeword and (best is None or cand.objective < best.objective - ENERGY_TOL):
            best = cand
    if best is None:
        return out
    best.work, best.trace = out.work, out.trace
    return best


def bit_guessing_decode(H: ParityCheckMatrix, h, config: DecoderConfig | None = None) -> DecodeOutcome:
    """Re-solve with one bit pinned, for every inactive bit bound; return the
    lowest-energy integral codeword (ties: lowest bit, value 0 first)."""
    cfg = config or DecoderConfig()
    base, sol, out = _bare(H, h, Method.BIT_GUESSING, cfg)
    if out.is_codeword:
        return out
    facets = facet_status(sol, cfg.integrality_tol).bit_facets
    return _guess(H, h, base, out, facets, Method.BIT_GUESSING, cfg)


def facet_guessing_decode(H: ParityCheckMatrix, h, config: DecoderConfig | None = None) -> DecodeOutcome:
    """Activate each inactive bound (bit and check variables) in turn, or a
    random ``fraction`` of them, and keep the lowest-energy integral result."""
    cfg = config or DecoderConfig()
    base, sol, out = _bare(H, h, Method.FACET_GUESSING, cfg)
    if out.is_codeword:
        return out
    st = facet_status(sol, cfg.integrality_tol)
    facets = st.bit_facets if cfg.facets == "bits" else st.inactive
    if cfg.fraction < 1.0:
        rng = np.random.default_rng(cfg.seed)
        k = math.ceil(cfg.fraction * len(facets))
        keep = np.sort(rng.choice(len(facets), size=k, replace=False))
        facets = [facets[i] for i in keep]
    out.work["facets"] = len(facets)
    return _guess(H, h, base, out, facets, Method.FACET_GUESSING, cfg)


def _pin_pair(H, h, base, bit, cfg, out) -> DecodeOutcome | None:
    """Both pinned LPs for ``bit``; the lower-energy optimal one (0 on ties)."""
    best = None
    for v in (0, 1):
        s = solve_lp(base.pin(bit, v))
        out.work["lp_solves"] += 1
        if not s.optimal:
            out.trace.append(("pin", bit, v, s.status.value))
            continue
        cand = _outcome(H, out.method, s, h, cfg)
        out.trace.append(("pin", bit, v, s.classification.value, cand.objective))
        if best is None or cand.objective < best.objective - ENERGY_TOL:
            best = cand
    return best


def loop_guided_decode(H: ParityCheckMatrix, h, config: DecoderConfig | None = None) -> DecodeOutcome:
    """Bare LP; on failure pin random bits of the critical loop (both values),
    stopping as soon as the lower-energy pinned solution is a codeword."""
    cfg = config or DecoderConfig()
    base, sol, out = _bare(H, h, Method.LGG, cfg)
    if out.is_codeword:
        return out
    loops = find_critical_loops(H, sol.beliefs(), cfg.schedule)
    out.work["loops_searched"] = len(loops)
    if not loops:
        out.trace.append(("no_critical_loop",))
        return out
    rng = np.random.default_rng(cfg.seed)
    budget = cfg.max_attempts if cfg.max_attempts is not None else len(loops[0].bits)
    tried: set[int] = set()
    for L in loops[: cfg.max_loops]:
        for bit in rng.permutation(np.array(L.bits)):
            bit = int(bit)
            if bit in tried:
                continue
            if len(tried) >= budget:
                return out
            tried.add(bit)
            cand = _pin_pair(H, h, base, bit, cfg, out)
            if cand is not None and cand.is_codeword:
                cand.work, cand.trace = out.work, out.trace
                return cand
    return out


# ---------------------------------------------------------- pseudo-codewords


@dataclass
class PseudoCodeword:
    omega: np.ndarray
    effective_distance: float
    instanton: ChannelOutput  # on the decision plane; decode at (1 + eps) times it
    source: str = "PCS"
    critical_loop: CriticalLoop | None = None
    seed: int | None = None

    @classmethod
    def from_omega(cls, omega, s2: float = 1.0, **kw) -> PseudoCodeword:
        w = np.asarray(omega, dtype=float)
        return cls(w, effective_distance(w), instanton_noise(w, s2), **kw)

    @property
    def is_integral(self) -> bool:
        return bool(np.all(np.minimum(self.omega, 1.0 - self.omega) <= 1e-6))

    def llr(self, eps: float = 1e-6) -> np.ndarray:
        """Log-likelihoods at the instanton pushed ``eps`` past the plane."""
        return llr_from_output(ChannelOutput(self.instanton.x * (1.0 + eps), self.instanton.s2))

    def to_dict(self) -> dict:
        return {
            "omega": [float(v) + 0.0 for v in self.omega],
            "d_eff": float(self.effective_distance),
            "instanton": [float(v) + 0.0 for v in self.instanton.x],
            "critical_loop": None if self.critical_loop is None else self.critical_loop.to_dict(),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict, s2: float = 1.0) -> PseudoCodeword:
        w = np.asarray(d["omega"], dtype=float)
        loop = None
        if d.get("critical_loop"):
            cl = d["critical_loop"]
            loop = CriticalLoop(tuple(cl["bits"]), tuple(cl["checks"]), float(cl["r"]), (), float("nan"))
        return cls(w, float(d["d_eff"]), ChannelOutput(np.asarray(d["instanton"], dtype=float), s2),
                   "PCS", loop, d.get("seed"))


@dataclass
class PcsResult:
    pseudo_codeword: PseudoCodeword | None
    converged_to_codeword: bool
    closed: bool
    iterations: int
    history: list[float] = field(default_factory=list)
    lp_solves: int = 0


def pcs_search(H: ParityCheckMatrix, s2: float, x_init: ChannelOutput, config: PcsConfig | None = None) -> PcsResult:
    """Pseudo-codeword search from one noise configuration.

    LP-decode, move the noise to the instanton of the output (just past the
    decision plane) and repeat until the output reproduces itself.
    """
    cfg = config or PcsConfig()
    sol = solve_lp(build_lp(H, llr_from_output(ChannelOutput(x_init.x, s2))))
    solves = 1
    w = sol.bit_values.copy()
    if sol.is_integral and not (w > 0.5).any():
        return PcsResult(None, True, True, 0, [], solves)
    history = [effective_distance(w)]
    closed = False
    it = 0
    for it in range(1, cfg.max_iter + 1):
        x = instanton_noise(w, s2, cfg.eps)
        sol = solve_lp(build_lp(H, llr_from_output(x)))
        solves += 1
        w_new = sol.bit_values.copy()
        history.append(effective_distance(w_new))
        step = np.abs(w_new - w).max()
        w = w_new
        if step < cfg.closure_tol:
            closed = True
            break
    pc = PseudoCodeword.from_omega(w, s2)
    return PcsResult(pc, False, closed, it, history, solves)


def annotate_loop(H: ParityCheckMatrix, pc: PseudoCodeword, eps: float = 1e-6, schedule=DEFAULT_SCHEDULE):
    sol = solve_lp(build_lp(H, pc.llr(eps)))
    return find_critical_loop(H, sol.beliefs(), schedule)


def _restart(H, seed: int, cfg: PcsConfig) -> PcsResult:
    rng = np.random.default_rng(seed)
    s2 = rng.uniform(*cfg.s2_range)
    x0 = sample_awgn(np.zeros(H.n_bits), s2, rng)
    res = pcs_search(H, s2, x0, cfg)
    if res.pseudo_codeword is not None:
        res.pseudo_codeword.seed = int(seed)
    return res


def merge_catalog(found: Iterable[PseudoCodeword], tol: float = 1e-4) -> list[PseudoCodeword]:
    """Drop entries within ``tol`` (max-norm) of an earlier one; sort by d_eff."""
    out: list[PseudoCodeword] = []
    for pc in sorted(found, key=lambda p: (p.effective_distance, p.seed if p.seed is not None else 0)):
        dup = False
        for q in reversed(out):
            if pc.effective_distance - q.effective_distance > 1e-3:
                break
            if np.abs(pc.omega - q.omega).max() < tol:
                dup = True
                break
        if not dup:
            out.append(pc)
    return out


def pcs_catalog(
    H: ParityCheckMatrix,
    restarts: int,
    rng: np.random.Generator,
    config: PcsConfig | None = None,
    stats: dict | None = None,
) -> list[PseudoCodeword]:
    """Run ``restarts`` independent searches and merge the closed results.

    Restarts whose LP output fails to reproduce itself within ``max_iter``
    steps are dropped and counted in ``stats["unclosed"]``.
    """
    cfg = config or PcsConfig()
    seeds = rng.integers(0, 2**31 - 1, size=restarts)
    found = []
    counts = {"restarts": restarts, "to_codeword": 0, "unclosed": 0, "lp_solves": 0}
    for seed in seeds:
        res = _restart(H, int(seed), cfg)
        counts["lp_solves"] += res.lp_solves
        if res.converged_to_codeword:
            counts["to_codeword"] += 1
        elif not res.closed:
            counts["unclosed"] += 1
        else:
            found.append(res.pseudo_codeword)
    catalog = merge_catalog(found)
    if cfg.annotate_loops:
        for pc in catalog:
            if not pc.is_integral:
                pc.critical_loop = annotate_loop(H, pc, cfg.eps, cfg.schedule)
    counts["distinct"] = len(catalog)
    if stats is not None:
        stats.update(counts)
    return catalog


def write_catalog(catalog: list[PseudoCodeword], fh, header: dict | None = None) -> None:
    """JSON lines; an optional first line ``{"summary": {...}}``."""
    if header is not None:
        fh.write(json.dumps({"summary": header}, sort_keys=True) + "\n")
    for pc in catalog:
        fh.write(json.dumps(pc.to_dict(), sort_keys=True) + "\n")


def read_catalog(fh, s2: float = 1.0) -> tuple[dict | None, list[PseudoCodeword]]:
    header, out = None, []
    for k, line in enumerate(fh, 1):
        line = line.strip()
        if not line:
            continue
        try:
            d = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"catalog line {k}: {exc}") from None
        if "summary" in d:
            header = d["summary"]
            continue
        missing = {"omega", "d_eff", "instanton"} - d.keys()
        if missing:
            raise ValueError(f"catalog line {k}: missing fields {sorted(missing)}")
        out.append(PseudoCodeword.from_dict(d, s2))
    return header, out


# ----------------------------------------------------------- successful bits


@dataclass
class PinSweep:
    """Every bit-guessing pin on one input, with the per-bit best result."""

    bare: LpSolution
    pins: list[tuple[int, int, LpSolution]]

    def per_bit_best(self, h) -> dict[int, LpSolution]:
        best: dict[int, LpSolution] = {}
        for bit, _, s in self.pins:
            if not s.optimal:
                continue
            if bit not in best or s.objective < best[bit].objective - ENERGY_TOL:
                best[bit] = s
        return best


def pin_sweep(H: ParityCheckMatrix, h, tol: float = 1e-6) -> PinSweep:
    base = build_lp(H, h)
    bare = solve_lp(base)
    pins = [(b, v, solve_lp(base.pin(b, v))) for b, v in bit_pins(bare, tol)] if not bare.is_integral else []
    return PinSweep(bare, pins)


@dataclass
class SuccessfulBits:
    bits: frozenset
    vacuous: bool = False


def successful_bits(H: ParityCheckMatrix, pc: PseudoCodeword, eps: float = 1e-6, sweep: PinSweep | None = None) -> SuccessfulBits:
    """Bits whose lowest-energy pinned LP is the all-zero codeword."""
    h = pc.llr(eps)
    sweep = sweep or pin_sweep(H, h)
    if sweep.bare.is_integral and not (sweep.bare.bit_values > 0.5).any():
        return SuccessfulBits(frozenset(), vacuous=True)
    ok = set()
    for bit, s in sweep.per_bit_best(h).items():
        if s.is_integral and not (s.bit_values > 0.5).any():
            ok.add(bit)
    return SuccessfulBits(frozenset(ok))


def bit_guessing_from_sweep(H: ParityCheckMatrix, h, sweep: PinSweep) -> DecodeOutcome:
    """Bit guessing outcome reconstructed from a precomputed sweep."""
    out = _outcome(H, Method.BIT_GUESSING, sweep.bare, h)
    out.work["lp_solves"] = 1 + len(sweep.pins)
    if out.is_codeword:
        return out
    best = None
    for bit, v, s in sweep.pins:
        if not s.optimal:
            continue
        cand = _outcome(H, Method.BIT_GUESSING, s, h)
        if cand.is_codeword and (best is None or cand.objective < best.objective - ENERGY_TOL):
            best = cand
    if best is None:
        return out
    best.work = out.work
    return best
