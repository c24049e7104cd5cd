"""Tanner-code pseudo-codeword campaign followed by the correction study.

    python scripts/run_pcs_campaign.py --restarts 500 --seed 3 --out runs/tanner

Writes <out>/catalog.jsonl, <out>/study.json and <out>/study.txt.
"""

import argparse
import json
import os
import time

from ldpcfloor.harness import ExperimentConfig, run_correction_study, run_pcs_campaign, study_table


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--restarts", type=int, default=500)
    p.add_argument("--seed", type=int, default=3)
    p.add_argument("--methods", default="bg,lgg,erasure")
    p.add_argument("--max-d", type=float, default=20.0)
    p.add_argument("--out", default="runs/tanner")
    args = p.parse_args()
    os.makedirs(args.out, exist_ok=True)
    catalog_path = os.path.join(args.out, "catalog.jsonl")

    t0 = time.time()
    cfg = ExperimentConfig(restarts=args.restarts, seed=args.seed, out=catalog_path)
    _, summary = run_pcs_campaign(cfg)
    print(json.dumps(summary, indent=2, sort_keys=True))
    print(f"campaign: {time.time() - t0:.0f} s")

    t0 = time.time()
    methods = args.methods.split(",")
    report = run_correction_study(catalog_path, methods, ExperimentConfig(), max_d=args.max_d)
    with open(os.path.join(args.out, "study.json"), "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
    table = study_table(report)
    with open(os.path.join(args.out, "study.txt"), "w") as fh:
        fh.write(table)
    print(table)
    print(f"study: {time.time() - t0:.0f} s")


if __name__ == "__main__":
    main()
