"""Command line entry point: ``ldpcfloor {fer,pcs,study,verify-loops}``.

Exit status: 0 success, 1 experiment failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import harness
from .decoders import PcsConfig, write_catalog
from .loops import verify_loop_series
from .toys import hamming_7_4, random_tree_code, single_cycle, two_cycles

LOOP_TOLERANCE = 1e-6


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ldpcfloor", description="LP/BP decoding and error-floor experiments")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, seed_required=True):
        sp.add_argument("--config", help="key = value config file; flags override it")
        sp.add_argument("--code", help="tanner155, hamming74, single_cycle, two_cycles or an alist path")
        sp.add_argument("--seed", type=int, required=seed_required, default=None if seed_required else 0)
        sp.add_argument("--out", help="output path")
        sp.add_argument("--workers", type=int, help=f"worker processes (default ${harness.WORKERS_ENV} or 1)")

    fer = sub.add_parser("fer", help="Monte Carlo frame error rate sweep")
    common(fer)
    fer.add_argument("--decoder", choices=sorted(harness.DECODERS))
    fer.add_argument("--snr", help="s^2 grid, 'start:stop:step' or comma list")
    fer.add_argument("--target-errors", type=int)
    fer.add_argument("--max-frames", type=int)
    fer.add_argument("--dump-lp", metavar="PATH", help="also write the LP of the first frame (CPLEX LP format)")

    pcs = sub.add_parser("pcs", help="pseudo-codeword search campaign")
    common(pcs)
    pcs.add_argument("--restarts", type=int)

    study = sub.add_parser("study", help="decode every dangerous catalog entry with the guessing decoders")
    common(study, seed_required=False)
    study.add_argument("--catalog", required=True)
    study.add_argument("--methods", default="bg,lgg,erasure", help="comma list of bg, lgg, erasure, fg")
    study.add_argument("--max-d", type=float, help="only entries with d_eff below this (default: Hamming distance)")

    vl = sub.add_parser("verify-loops", help="check the loop series against enumeration on bundled toys")
    vl.add_argument("--seed", type=int, default=0)
    vl.add_argument("--out")
    return p


def _config(args, keys) -> harness.ExperimentConfig:
    values = harness.read_config_file(args.config) if getattr(args, "config", None) else {}
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            values["snr_grid" if k == "snr" else k] = v
    return harness.config_from_mapping(values)


def _write(path, text: str) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_fer(args) -> int:
    cfg = _config(args, ["code", "seed", "out", "workers", "decoder", "snr", "target_errors", "max_frames"])
    if args.dump_lp:
        with open(args.dump_lp, "w") as fh:
            harness.dump_frame_lp(cfg, fh)
    points = harness.run_fer(cfg)
    if cfg.out:
        harness.write_fer(cfg, points, cfg.out)
    else:
        sys.stdout.write(harness.fer_csv(points))
    return 0


def cmd_pcs(args) -> int:
    cfg = _config(args, ["code", "seed", "out", "workers", "restarts"])
    catalog, summary = harness.run_pcs_campaign(cfg, PcsConfig())
    if not cfg.out:
        write_catalog(catalog, sys.stdout, summary)
    print(json.dumps(summary, sort_keys=True), file=sys.stderr)
    return 0


def cmd_study(args) -> int:
    cfg = _config(args, ["code", "seed", "out", "workers"])
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    report = harness.run_correction_study(args.catalog, methods, cfg, max_d=args.max_d)
    if cfg.out:
        _write(cfg.out, json.dumps(report, indent=2, sort_keys=True) + "\n")
        _write(cfg.out + ".txt", harness.study_table(report))
    sys.stdout.write(harness.study_table(report))
    return 0


def loop_suite(seed: int = 0):
    """(name, code, h) instances for the loop-series exactness check."""
    rng = np.random.default_rng(seed)
    cases = []
    for k in range(3):
        H = random_tree_code(int(rng.integers(4, 11)), rng)
        cases.append((f"tree{k}", H, rng.uniform(-2, 2, H.n_bits)))
    cases.append(("single_cycle", single_cycle(), np.array([0.3, -0.2, 0.5, 1.1])))
    H = two_cycles()
    cases.append(("two_cycles", H, rng.uniform(-2, 2, H.n_bits)))
    H = hamming_7_4()
    for k in range(3):
        cases.append((f"hamming74_{k}", H, rng.normal(0.0, 1.5, H.n_bits)))
    return cases


def cmd_verify_loops(args) -> int:
    lines, ok = [], True
    for name, H, h in loop_suite(args.seed):
        rep = verify_loop_series(H, h)
        good = rep.bp_converged and rep.relative_error < LOOP_TOLERANCE
        ok &= good
        d = json.loads(rep.to_json())
        d.update(name=name, passed=good)
        lines.append(json.dumps(d, sort_keys=True))
    _write(args.out, "\n".join(lines) + "\n")
    return 0 if ok else 1


COMMANDS = {"fer": cmd_fer, "pcs": cmd_pcs, "study": cmd_study, "verify-loops": cmd_verify_loops}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        return 2
    try:
        return COMMANDS[args.command](args)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"ldpcfloor {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
