"""Logical coherence time versus physical coherence time and parallelism.

At fixed gate and crosstalk error rates, sweeps the physical coherence
time T for several parallelism levels k (including serial k = 1 and full
parallelism).  Rows where T_L exceeds T are past the break-even point;
scanning the k column at fixed T shows the idle-versus-crosstalk
trade-off that makes an intermediate k optimal.
"""
import argparse
import sys
from pathlib import Path

from ionqec import cli

CONFIG = """\
code.d = {d}
code.k = {k_list}
noise.p_g = {p_g}
noise.p_c = {p_c}
sweep.param = T
sweep.from = {t_lo}
sweep.to = {t_hi}
sweep.points = {points}
shots = {shots}
seed = {seed}
"""


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", required=True)
    ap.add_argument("--d", type=int, default=5)
    ap.add_argument("--p-g", type=float, default=1e-3)
    ap.add_argument("--p-c", type=float, default=1e-5)
    ap.add_argument("--k", default="1,2,5,10,full")
    ap.add_argument("--t-lo", type=float, default=1e3)
    ap.add_argument("--t-hi", type=float, default=1e5)
    ap.add_argument("--points", type=int, default=5)
    ap.add_argument("--shots", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args(argv)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg_path = out / "parallelism_tradeoff.cfg"
    cfg_path.write_text(CONFIG.format(
        d=args.d, k_list=args.k, p_g=args.p_g, p_c=args.p_c,
        t_lo=args.t_lo, t_hi=args.t_hi, points=args.points,
        shots=args.shots, seed=args.seed))
    cli_args = ["simulate", "--config", str(cfg_path), "--out", str(out)]
    if args.workers is not None:
        cli_args += ["--workers", str(args.workers)]
    return cli.main(cli_args)


if __name__ == "__main__":
    sys.exit(main())
