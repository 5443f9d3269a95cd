"""Design a parallel-gate layer and evaluate its noise-sampled crosstalk.

Slow regime (default): a = 5 um, tau = 500 us on the d = 5 lattice, one
simultaneously designed layer; expects distance-flat crosstalk.  Fast
regime: a = 8 um, tau = 100 us on the d = 11 lattice, a single reference
pair transplanted across the layer; expects polynomial decay and writes
the fitted power-law model for feeding back into memory sweeps.
"""
import argparse
import sys
from pathlib import Path

from ionqec import cli

CONFIG = """\
pulse.regime = {regime}
pulse.noise.samples = {samples}
seed = {seed}
"""


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", required=True)
    ap.add_argument("--regime", choices=("slow", "fast"), default="slow")
    ap.add_argument("--samples", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg_path = out / f"pulse_{args.regime}.cfg"
    cfg_path.write_text(CONFIG.format(regime=args.regime,
                                      samples=args.samples, seed=args.seed))
    return cli.main(["pulse", "--config", str(cfg_path), "--out", str(out)])


if __name__ == "__main__":
    sys.exit(main())
