"""FER of bare LP and LGG on the Tanner code over an s^2 grid.

    python scripts/run_fer_curve.py --snr 1.2:2.0:0.2 --target-errors 50 --out runs/fer

Produces one CSV (plus .meta.json with the two exponential asymptotes) per
decoder. Points below FER 1e-7 are left to the asymptotes.
"""

import argparse
import os

from ldpcfloor.harness import ExperimentConfig, parse_grid, run_fer, write_fer


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--snr", default="1.2:2.0:0.2")
    p.add_argument("--target-errors", type=int, default=50)
    p.add_argument("--max-frames", type=int, default=20000)
    p.add_argument("--decoders", default="lp,lgg")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", default="runs/fer")
    args = p.parse_args()
    os.makedirs(args.out, exist_ok=True)
    for dec in args.decoders.split(","):
        cfg = ExperimentConfig(decoder=dec, snr_grid=parse_grid(args.snr), target_errors=args.target_errors,
                               max_frames=args.max_frames, seed=args.seed)
        points = run_fer(cfg)
        path = os.path.join(args.out, f"fer_{dec}.csv")
        write_fer(cfg, points, path)
        for pt in points:
            print(f"{dec:>4} s2={pt.s2:.2f} frames={pt.frames:>6} errors={pt.errors:>3} "
                  f"fer={pt.fer:.2e} [{pt.lo:.1e}, {pt.hi:.1e}]")


if __name__ == "__main__":
    main()
