"""Logical error rate versus physical error rate for d = 3 and d = 5.

Sweeps the joint rate p_g = p_i = p_c = p at full parallelism and writes
one CSV row per (d, p) point.  The d=3 curve should sit above p with
log-log slope near 1; the d=5 curve drops with slope near 2.
"""
import argparse
import sys
from pathlib import Path

from ionqec import cli

CONFIG = """\
code.d = 3,5
code.k = full
noise.p_g = 0
sweep.param = p
sweep.from = 1e-4
sweep.to = 1e-3
sweep.points = {points}
shots = {shots}
seed = {seed}
"""


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", required=True)
    ap.add_argument("--shots", type=int, default=1_000_000)
    ap.add_argument("--points", type=int, default=7)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args(argv)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg_path = out / "memory_sweep.cfg"
    cfg_path.write_text(CONFIG.format(points=args.points, shots=args.shots,
                                      seed=args.seed))
    cli_args = ["simulate", "--config", str(cfg_path), "--out", str(out)]
    if args.workers is not None:
        cli_args += ["--workers", str(args.workers)]
    return cli.main(cli_args)


if __name__ == "__main__":
    sys.exit(main())
