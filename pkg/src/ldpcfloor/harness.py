"""Monte Carlo FER sweeps, PCS campaigns and correction studies.

The all-zero codeword is transmitted throughout. Frame ``f`` at grid point
``k`` draws its noise from ``default_rng([seed, k, f])``, so results do not
depend on how frames are distributed over workers.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import bp, decoders
from .channel import llr_from_output, sample_awgn
from .decoders import DecoderConfig, PcsConfig, PseudoCodeword
from .exact import codewords
from .tanner import ParityCheckMatrix
from .toys import load_code

WORKERS_ENV = "LDPCFLOOR_WORKERS"
CSV_COLUMNS = ("s2", "frames", "errors", "fer", "lo", "hi", "lp_solves_mean")
TANNER_HAMMING_DISTANCE = 20
TANNER_LP_DISTANCE = 16.407  # lowest pseudo-weight reported for the Tanner code


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


@dataclass
class ExperimentConfig:
    code: str = "tanner155"
    decoder: str = "lp"
    snr_grid: list = field(default_factory=lambda: [1.6])
    max_frames: int = 10_000
    target_errors: int = 50
    seed: int = 0
    out: str | None = None
    workers: int = field(default_factory=default_workers)
    options: DecoderConfig = field(default_factory=DecoderConfig)
    restarts: int = 500

    def __post_init__(self):
        if not self.snr_grid or any(not s > 0 for s in self.snr_grid):
            raise ValueError("snr_grid must be nonempty and positive")
        if self.target_errors < 1:
            raise ValueError("target_errors must be at least 1")
        if self.max_frames < 1:
            raise ValueError("max_frames must be at least 1")
        if self.decoder not in DECODERS:
            raise ValueError(f"unknown decoder {self.decoder!r}; choose from {', '.join(DECODERS)}")


def parse_grid(text: str) -> list[float]:
    """``"a:b:step"`` (inclusive) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        a, b, step = (float(t) for t in text.split(":"))
        if step <= 0:
            raise ValueError("grid step must be positive")
        n = int(math.floor((b - a) / step + 1e-9)) + 1
        return [round(a + k * step, 12) for k in range(n)]
    return [float(t) for t in text.split(",") if t.strip()]


def read_config_file(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for k, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{k}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def config_from_mapping(values: dict) -> ExperimentConfig:
    opt_names = {f.name: f for f in fields(DecoderConfig)}
    top = {f.name: f for f in fields(ExperimentConfig)}
    kw, opts = {}, {}
    for key, raw in values.items():
        if raw is None:
            continue
        if key in ("snr", "snr_grid"):
            kw["snr_grid"] = parse_grid(raw) if isinstance(raw, str) else list(raw)
        elif key in top and key != "options":
            kw[key] = _coerce(raw, top[key].type)
        elif key in opt_names:
            opts[key] = _coerce(raw, opt_names[key].type)
        else:
            raise ValueError(f"unknown config key {key!r}")
    if "schedule" in opts and isinstance(opts["schedule"], str):
        opts["schedule"] = tuple(float(t) for t in opts["schedule"].split(","))
    kw["options"] = DecoderConfig(**opts)
    return ExperimentConfig(**kw)


def _coerce(raw, typ):
    if not isinstance(raw, str):
        return raw
    t = str(typ)
    if raw.lower() in ("none", "null") and "None" in t:
        return None
    if t.startswith("int"):
        return int(raw)
    if t.startswith("float"):
        return float(raw)
    return raw


# ----------------------------------------------------------------------- FER


def _decode_bp(H, h, cfg):
    return bp.bp_decode(H, h)


DECODERS = {
    "lp": lambda H, h, cfg: decoders.lp_decode(H, h),
    "bp": _decode_bp,
    "erasure": decoders.lp_erasure_decode,
    "bg": decoders.bit_guessing_decode,
    "fg": decoders.facet_guessing_decode,
    "lgg": decoders.loop_guided_decode,
}


def frame_rng(seed: int, point: int, frame: int) -> np.random.Generator:
    return np.random.default_rng([seed, point, frame])


def decode_frame(H: ParityCheckMatrix, s2: float, seed: int, point: int, frame: int, decoder: str, opts: DecoderConfig):
    rng = frame_rng(seed, point, frame)
    x = sample_awgn(np.zeros(H.n_bits), s2, rng)
    cfg = DecoderConfig(**{**asdict(opts), "seed": int(rng.integers(2**31 - 1))})
    out = DECODERS[decoder](H, llr_from_output(x), cfg)
    return (not out.is_zero), int(out.work.get("lp_solves", 0))


def dump_frame_lp(config: ExperimentConfig, fh, point: int = 0, frame: int = 0, H=None) -> None:
    """Write the bare LP of one frame in CPLEX LP format."""
    from .lp import build_lp, write_lp

    H = H if H is not None else load_code(config.code)
    rng = frame_rng(config.seed, point, frame)
    x = sample_awgn(np.zeros(H.n_bits), config.snr_grid[point], rng)
    write_lp(build_lp(H, llr_from_output(x)), fh)


def _decode_task(args):
    return decode_frame(*args)


@dataclass
class FerPoint:
    s2: float
    frames: int
    errors: int
    fer: float
    lo: float
    hi: float
    lp_solves_mean: float

    def row(self) -> list[str]:
        return [repr(float(self.s2)), str(self.frames), str(self.errors), repr(self.fer),
                repr(self.lo), repr(self.hi), repr(self.lp_solves_mean)]


def wilson_interval(errors: int, frames: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if frames == 0:
        return 0.0, 1.0
    p = errors / frames
    denom = 1.0 + z * z / frames
    centre = (p + z * z / (2 * frames)) / denom
    half = z * math.sqrt(p * (1 - p) / frames + z * z / (4 * frames * frames)) / denom
    return max(0.0, min(p, centre - half)), min(1.0, max(p, centre + half))


def run_fer(config: ExperimentConfig, H: ParityCheckMatrix | None = None) -> list[FerPoint]:
    H = H if H is not None else load_code(config.code)
    points = []
    pool = ProcessPoolExecutor(config.workers) if config.workers > 1 else None
    try:
        for k, s2 in enumerate(config.snr_grid):
            errors = frames = solves = 0
            batch = max(1, 4 * config.workers)
            f = 0
            while f < config.max_frames and errors < config.target_errors:
                ids = range(f, min(f + batch, config.max_frames))
                tasks = [(H, s2, config.seed, k, i, config.decoder, config.options) for i in ids]
                results = pool.map(_decode_task, tasks) if pool else map(_decode_task, tasks)
                for err, n_lp in results:
                    frames += 1
                    errors += err
                    solves += n_lp
                    if errors >= config.target_errors:
                        break
                f = frames
            lo, hi = wilson_interval(errors, frames)
            points.append(FerPoint(float(s2), frames, errors, errors / frames, lo, hi, solves / frames))
    finally:
        if pool:
            pool.shutdown()
    return points


def asymptotes(s2_values) -> list[dict]:
    """exp(-d s2 / 2) for the Hamming distance and the lowest LP pseudo-weight."""
    return [
        {
            "s2": float(s),
            "map": math.exp(-TANNER_HAMMING_DISTANCE * s / 2),
            "lp": math.exp(-TANNER_LP_DISTANCE * s / 2),
        }
        for s in s2_values
    ]


def fer_csv(points: list[FerPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for p in points:
        w.writerow(p.row())
    return buf.getvalue()


def fer_metadata(config: ExperimentConfig, points: list[FerPoint]) -> dict:
    return {
        "code": config.code,
        "decoder": config.decoder,
        "seed": config.seed,
        "max_frames": config.max_frames,
        "target_errors": config.target_errors,
        "columns": list(CSV_COLUMNS),
        "asymptotes": asymptotes(p.s2 for p in points),
        "note": "points with FER below 1e-7 are not simulated; the instanton asymptotes extrapolate the floor",
    }


def write_fer(config: ExperimentConfig, points: list[FerPoint], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(fer_csv(points))
    with open(str(path) + ".meta.json", "w") as fh:
        json.dump(fer_metadata(config, points), fh, indent=2, sort_keys=True)
        fh.write("\n")


# ----------------------------------------------------------- PCS campaigns


def hamming_distance(H: ParityCheckMatrix, code: str) -> int | None:
    if code == "tanner155":
        return TANNER_HAMMING_DISTANCE
    try:
        cw = codewords(H)
    except ValueError:
        return None
    w = cw.sum(axis=1)
    return int(w[w > 0].min()) if (w > 0).any() else None


def run_pcs_campaign(config: ExperimentConfig, pcs: PcsConfig | None = None, H: ParityCheckMatrix | None = None):
    """Build a catalog and, if ``config.out`` is set, write it as JSON lines.

    Returns (catalog, summary).
    """
    H = H if H is not None else load_code(config.code)
    stats: dict = {}
    catalog = decoders.pcs_catalog(H, config.restarts, np.random.default_rng(config.seed), pcs, stats)
    d_ml = hamming_distance(H, config.code)
    ds = [pc.effective_distance for pc in catalog]
    summary = {
        "code": config.code,
        "seed": config.seed,
        "restarts": config.restarts,
        "min_d_eff": min(ds) if ds else None,
        "hamming_distance": d_ml,
        "below_hamming": None if d_ml is None else sum(d < d_ml - 1e-9 for d in ds),
        "fractional": sum(not pc.is_integral for pc in catalog),
        "integral": sum(pc.is_integral for pc in catalog),
        **{k: v for k, v in stats.items() if k != "restarts"},
    }
    if config.out:
        with open(config.out, "w") as fh:
            decoders.write_catalog(catalog, fh, summary)
    return catalog, summary


# ---------------------------------------------------------- correction study

STUDY_METHODS = {"bg", "lgg", "erasure", "fg"}


def study_entry(H: ParityCheckMatrix, pc: PseudoCodeword, methods, opts: DecoderConfig, eps: float = 1e-6) -> dict:
    h = pc.llr(eps)
    row: dict = {"d_eff": pc.effective_distance, "methods": {}}
    sweep = decoders.pin_sweep(H, h, opts.integrality_tol)
    row["bare_fractional"] = not sweep.bare.is_integral
    for m in methods:
        if m == "bg":
            out = decoders.bit_guessing_from_sweep(H, h, sweep)
        else:
            out = DECODERS[m](H, h, opts)
        row["methods"][m] = {"corrected": bool(out.is_zero), "lp_solves": int(out.work.get("lp_solves", 0))}
    sb = decoders.successful_bits(H, pc, eps, sweep)
    loop = pc.critical_loop
    if loop is None and not sweep.bare.is_integral:
        from .loops import find_critical_loop

        loop = find_critical_loop(H, sweep.bare.beliefs(), opts.schedule)
    row["successful_bits"] = sorted(sb.bits)
    row["vacuous"] = sb.vacuous
    row["loop_bits"] = None if loop is None else sorted(loop.bits)
    row["loop_r"] = None if loop is None else loop.weight
    row["loop_subset"] = None if loop is None else set(loop.bits) <= sb.bits
    return row


def _study_task(args):
    return study_entry(*args)


def run_correction_study(catalog_path, methods, config: ExperimentConfig, max_d: float | None = None, H=None) -> dict:
    methods = list(methods)
    bad = set(methods) - STUDY_METHODS
    if bad:
        raise ValueError(f"unknown study methods {sorted(bad)}")
    with open(catalog_path) as fh:
        header, catalog = decoders.read_catalog(fh)
    code = (header or {}).get("code", config.code)
    H = H if H is not None else load_code(code)
    if max_d is None:
        max_d = (header or {}).get("hamming_distance") or float("inf")
    picked = []
    for k, pc in enumerate(catalog):
        if pc.omega.shape != (H.n_bits,):
            raise ValueError(f"catalog entry {k} has length {pc.omega.size}, code has {H.n_bits} bits")
        if pc.effective_distance < max_d and not pc.is_integral:
            picked.append(k)
    tasks = [(H, catalog[k], methods, config.options) for k in picked]
    if config.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            rows = list(pool.map(_study_task, tasks))
    else:
        rows = [_study_task(t) for t in tasks]
    entries = []
    for k, row in zip(picked, rows):
        row["index"] = k
        entries.append(row)
    n = len(entries)
    summary = {"code": code, "entries": n, "max_d": max_d, "methods": {}}
    for m in methods:
        c = sum(e["methods"][m]["corrected"] for e in entries)
        summary["methods"][m] = {
            "corrected": c,
            "share": c / n if n else None,
            "lp_solves_mean": float(np.mean([e["methods"][m]["lp_solves"] for e in entries])) if n else None,
        }
    with_loop = [e for e in entries if e["loop_subset"] is not None]
    summary["loop_found"] = len(with_loop)
    summary["loop_subset_share"] = (
        sum(e["loop_subset"] for e in with_loop) / len(with_loop) if with_loop else None
    )
    sizes = [len(e["successful_bits"]) for e in entries]
    summary["successful_bits"] = {
        "min": min(sizes) if sizes else None,
        "median": float(np.median(sizes)) if sizes else None,
        "max": max(sizes) if sizes else None,
    }
    return {"summary": summary, "entries": entries}


def study_table(report: dict) -> str:
    methods = list(report["summary"]["methods"])
    head = f"{'#':>4} {'d_eff':>9} " + " ".join(f"{m:>8}" for m in methods) + f" {'|succ|':>6} {'|loop|':>6} {'loop<=succ':>10}"
    lines = [head, "-" * len(head)]
    for e in report["entries"]:
        marks = " ".join(f"{'ok' if e['methods'][m]['corrected'] else 'FAIL':>8}" for m in methods)
        loop = "-" if e["loop_bits"] is None else str(len(e["loop_bits"]))
        sub = "-" if e["loop_subset"] is None else ("yes" if e["loop_subset"] else "no")
        lines.append(f"{e['index']:>4} {e['d_eff']:>9.4f} {marks} {len(e['successful_bits']):>6} {loop:>6} {sub:>10}")
    s = report["summary"]
    lines.append("")
    for m, v in s["methods"].items():
        share = "n/a" if v["share"] is None else f"{100 * v['share']:.1f}%"
        lines.append(f"{m}: corrected {v['corrected']}/{s['entries']} ({share})")
    if s["loop_subset_share"] is not None:
        lines.append(f"critical loop within successful bits: {100 * s['loop_subset_share']:.1f}% of {s['loop_found']}")
    return "\n".join(lines) + "\n"
