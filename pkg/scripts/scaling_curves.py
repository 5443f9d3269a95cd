"""Bound-versus-distance tables for the two headline operating points.

The "uniform" point runs k = d-1 parallelism with a uniform crosstalk
probability (p_g = 3e-3, T = 5e4, p_c = 1e-5) and first clears a 1e-10
logical error rate at d = 41.  The "sublattice" point uses the locality
of fast gates (t = 133 layers, effective crosstalk 1e-6 per gate,
p_g = 1e-3, T = 1e5) and clears the same target at d = 17.
"""
import argparse
import sys
from pathlib import Path

from ionqec import cli

UNIFORM = """\
scaling.p_g = 3e-3
scaling.T = 5e4
scaling.p_c = 1e-5
scaling.d_values = {d_values}
scaling.target = 1e-10
scaling.scan_k = true
"""

SUBLATTICE = """\
scaling.p_g = 1e-3
scaling.T = 1e5
scaling.t = 133
scaling.p_tilde_c = 1e-6
scaling.d_values = {d_values}
scaling.target = 1e-10
"""


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", required=True)
    ap.add_argument("--d-max", type=int, default=45)
    args = ap.parse_args(argv)

    d_values = ",".join(str(d) for d in range(3, args.d_max + 1, 2))
    rc = 0
    for name, template in (("uniform", UNIFORM), ("sublattice", SUBLATTICE)):
        out = Path(args.out) / name
        out.mkdir(parents=True, exist_ok=True)
        cfg_path = out / f"{name}.cfg"
        cfg_path.write_text(template.format(d_values=d_values))
        rc |= cli.main(["scaling", "--config", str(cfg_path),
                        "--out", str(out)])
    return rc


if __name__ == "__main__":
    sys.exit(main())
