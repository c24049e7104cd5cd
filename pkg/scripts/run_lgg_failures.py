"""Collect bare-LP failure frames at one s^2 and replay them through LGG,
LP-erasure and (optionally) bit guessing.

    python scripts/run_lgg_failures.py --s2 1.6 --failures 50
    python scripts/run_lgg_failures.py --s2 2.4 --failures 30 --max-frames 2000000

Each frame reuses the harness substream (seed, 0, frame), so a failure found
here is reproducible with ``ldpcfloor fer``.
"""

import argparse
import json

import numpy as np

from ldpcfloor.channel import llr_from_output, sample_awgn
from ldpcfloor.decoders import DecoderConfig, bit_guessing_decode, loop_guided_decode, lp_decode, lp_erasure_decode
from ldpcfloor.harness import frame_rng, wilson_interval
from ldpcfloor.tanner import build_tanner_155


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--s2", type=float, default=1.6)
    p.add_argument("--failures", type=int, default=50)
    p.add_argument("--max-frames", type=int, default=200000)
    p.add_argument("--seed", type=int, default=77)
    p.add_argument("--bg", action="store_true", help="also run full bit guessing (about 200 LPs per failure)")
    p.add_argument("--out", help="JSON lines, one record per failure")
    args = p.parse_args()

    H = build_tanner_155()
    rows, frames = [], 0
    while len(rows) < args.failures and frames < args.max_frames:
        rng = frame_rng(args.seed, 0, frames)
        h = llr_from_output(sample_awgn(np.zeros(H.n_bits), args.s2, rng))
        frames += 1
        bare = lp_decode(H, h)
        if bare.is_zero:
            continue
        b = bare.bit_values
        row = {
            "frame": frames - 1,
            "fractional_bits": int(((b > 1e-6) & (b < 1 - 1e-6)).sum()),
            "lgg": loop_guided_decode(H, h, DecoderConfig(seed=frames)).is_zero,
            "erasure": lp_erasure_decode(H, h).is_zero,
        }
        if args.bg:
            row["bg"] = bit_guessing_decode(H, h).is_zero
        rows.append(row)
        print(json.dumps(row), flush=True)
    n = len(rows)
    print(f"s2={args.s2}: {n} LP failures in {frames} frames")
    for key in ("lgg", "erasure", "bg"):
        if n and key in rows[0]:
            k = sum(r[key] for r in rows)
            lo, hi = wilson_interval(k, n)
            print(f"  {key}: {k}/{n} corrected ({100 * k / n:.0f}%, 95% CI [{100 * lo:.0f}%, {100 * hi:.0f}%])")
    if args.out:
        with open(args.out, "w") as fh:
            for r in rows:
                fh.write(json.dumps(r) + "\n")


if __name__ == "__main__":
    main()
