"""Config-driven experiment runner.

Four subcommands: `simulate` sweeps decoded memory experiments and writes
per-point logical error rates, `pulse` designs parallel-gate pulse
sequences and evaluates their noise-sampled crosstalk, `scaling` emits
analytic bound tables, and `fit` extracts slopes and power laws from
result tables.  Every run is driven by a flat key=value config file;
result CSVs are deterministic for a fixed seed (worker count changes the
wall time, never the bytes).
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import platform
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import scipy

from . import __version__, code, decode, ionphys, pulse, scaling, sim
from . import config as cfgmod
from . import noise as noisemod

RESULT_COLUMNS = ("d", "k", "p_g", "p_i", "p_c", "shots", "P_total", "p_L",
                  "CI_low", "CI_high", "t_cycle", "T_L")
CHECKPOINT_NAME = "results.checkpoint"
RESULTS_NAME = "results.csv"


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        raise TypeError("no boolean columns in result tables")
    if isinstance(value, str):
        if "," in value or "\n" in value:
            raise ValueError(f"cell value {value!r} needs quoting")
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _hash_line(cfg_hash: str) -> str:
    return f"# config {cfg_hash}"


def _write_csv(path, header, rows, cfg_hash):
    lines = [_hash_line(cfg_hash), ",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _read_csv(path):
    """Rows of a result table as {column: string} dicts, comments skipped."""
    header = None
    rows = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if header is None:
            header = parts
            continue
        if len(parts) != len(header):
            raise ValueError(f"{path}: row has {len(parts)} fields, "
                             f"header has {len(header)}")
        rows.append(dict(zip(header, parts)))
    if header is None:
        raise ValueError(f"{path}: no header row")
    return header, rows


def _versions():
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "ionqec": __version__,
    }


def _write_manifest(outdir: Path, command: str, cfg_hash: str, seed: int,
                    shots: int | None, extra: dict | None = None):
    data = {
        "command": command,
        "config_hash": cfg_hash,
        "seed": seed,
        "versions": _versions(),
    }
    if shots is not None:
        data["shots"] = shots
    if extra:
        data.update(extra)
    data["created_at"] = datetime.now(timezone.utc).isoformat()
    (outdir / "manifest.json").write_text(
        json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _check_manifest(outdir: Path, cfg_hash: str):
    path = outdir / "manifest.json"
    if not path.exists():
        return
    stored = json.loads(path.read_text(encoding="utf-8")).get("config_hash")
    if stored != cfg_hash:
        raise ValueError(
            f"output directory {outdir} holds results for a different config "
            f"(stored hash {stored}, current {cfg_hash})")


# -- simulate -------------------------------------------------------------


def _parse_k_values(cfg):
    """Parallelism axis: list of group sizes, the word full, or sublattice
    levels via code.l.  Returns a list of ('k'|'l', value) specs."""
    k_raw = cfgmod.get_str(cfg, "code.k", None)
    l_values = cfgmod.get_ints(cfg, "code.l", None)
    if k_raw is not None and l_values is not None:
        raise ValueError("give either code.k or code.l, not both")
    if l_values is not None:
        return [("l", l) for l in l_values]
    if k_raw is None:
        return [("k", None)]
    specs = []
    for token in (t.strip() for t in k_raw.split(",")):
        if not token:
            continue
        if token == "full":
            specs.append(("k", None))
        else:
            specs.append(("k", int(token)))
    if not specs:
        raise ValueError("code.k is empty")
    return specs


def _apply_sweep(params, name, value):
    if name == "p":
        return dataclasses.replace(
            params, p_g=value, T=noisemod.coherence_from_idle(value),
            crosstalk=noisemod.UniformCrosstalk(value))
    if name == "p_g":
        return dataclasses.replace(params, p_g=value)
    if name == "p_c":
        return dataclasses.replace(params,
                                   crosstalk=noisemod.UniformCrosstalk(value))
    if name == "p_i":
        return dataclasses.replace(params,
                                   T=noisemod.coherence_from_idle(value))
    if name == "T":
        return dataclasses.replace(params, T=value)
    raise ValueError(f"unknown sweep parameter {name!r}")


def _sweep_axis(cfg, prefix):
    name = cfgmod.get_str(cfg, prefix + ".param", None)
    if name is None:
        return None, [None]
    if name == "none":
        return None, [None]
    return name, cfgmod.grid_values(cfg, prefix)


def _simulate_point(layout, schedule, embedding, params, rounds, shots, seed,
                    workers):
    circ = sim.build_memory_circuit(layout, schedule, params, rounds,
                                    embedding=embedding)
    res = decode.estimate_logical_error_rate(circ, shots, seed=seed,
                                             workers=workers)
    meta = circ.meta
    if isinstance(params.crosstalk, noisemod.UniformCrosstalk):
        p_c = params.crosstalk.p
    elif meta["crosstalk_locations_per_round"]:
        p_c = (meta["crosstalk_prob_sum_per_round"]
               / meta["crosstalk_locations_per_round"])
    else:
        p_c = 0.0
    ci_lo, ci_hi = res.per_round_interval()
    return (layout.d, schedule.k, params.p_g,
            noisemod.idle_error_prob(1.0, params.T), p_c, shots,
            res.p_total, res.p_l, ci_lo, ci_hi, res.t_cycle,
            res.coherence_time)


def cmd_simulate(cfg, outdir: Path, seed: int, shots: int | None,
                 workers: int) -> int:
    cfg_hash = cfgmod.config_hash(cfg)
    if shots is None:
        shots = cfgmod.get_int(cfg, "shots")
    d_values = cfgmod.get_ints(cfg, "code.d")
    rounds_cfg = cfgmod.get_int(cfg, "code.rounds", None)
    policy = cfgmod.get_str(cfg, "code.policy", "raster")
    sched_seed = cfgmod.get_int(cfg, "code.schedule_seed", 0)
    k_specs = _parse_k_values(cfg)
    base = noisemod.parse_noise_config(cfg)
    name2, values2 = _sweep_axis(cfg, "sweep2")
    name1, values1 = _sweep_axis(cfg, "sweep")

    grid = []
    for d in d_values:
        for kspec in k_specs:
            for v2 in values2:
                for v1 in values1:
                    grid.append((d, kspec, v2, v1))

    results_path = outdir / RESULTS_NAME
    ckpt_path = outdir / CHECKPOINT_NAME
    if results_path.exists() and not ckpt_path.exists():
        print(f"{results_path} already complete; nothing to do")
        return 0

    done: dict[int, str] = {}
    if ckpt_path.exists():
        for raw in ckpt_path.read_text(encoding="utf-8").splitlines():
            if not raw.strip():
                continue
            idx_text, _, row = raw.partition("\t")
            done[int(idx_text)] = row
        print(f"resuming: {len(done)} of {len(grid)} points checkpointed")

    layouts: dict[int, code.CodeLayout] = {}
    schedules: dict[tuple, code.Schedule] = {}
    spatial = not isinstance(base.crosstalk, noisemod.UniformCrosstalk)
    with open(ckpt_path, "a", encoding="utf-8") as ckpt:
        for idx, (d, kspec, v2, v1) in enumerate(grid):
            if idx in done:
                continue
            if d not in layouts:
                layouts[d] = code.build_layout(d)
            layout = layouts[d]
            skey = (d, kspec)
            if skey not in schedules:
                mode, val = kspec
                if mode == "l":
                    schedules[skey] = code.sublattice_schedule(layout, val)
                else:
                    schedules[skey] = code.schedule_gates(
                        layout, val, policy=policy, seed=sched_seed)
            params = base
            if name2 is not None:
                params = _apply_sweep(params, name2, v2)
            if name1 is not None:
                params = _apply_sweep(params, name1, v1)
            embedding = ionphys.embed_layout(layout, 1.0) if spatial else None
            rounds = rounds_cfg if rounds_cfg is not None else d
            row = _simulate_point(layout, schedules[skey], embedding, params,
                                  rounds, shots, seed, workers)
            text = ",".join(_fmt(v) for v in row)
            ckpt.write(f"{idx}\t{text}\n")
            ckpt.flush()
            done[idx] = text

    lines = [_hash_line(cfg_hash), ",".join(RESULT_COLUMNS)]
    lines.extend(done[idx] for idx in range(len(grid)))
    results_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    ckpt_path.unlink()
    _write_manifest(outdir, "simulate", cfg_hash, seed, shots)
    print(f"wrote {results_path} ({len(grid)} points)")
    return 0


# -- pulse ----------------------------------------------------------------


def _central_pair(crystal, ion_of, gates):
    center = crystal.positions.mean(axis=0)
    best = min(gates, key=lambda g: float(np.linalg.norm(
        0.5 * (crystal.positions[ion_of[g[0]]]
               + crystal.positions[ion_of[g[1]]]) - center)))
    return ion_of[best[0]], ion_of[best[1]]


def cmd_pulse(cfg, outdir: Path, seed: int, shots: int | None,
              workers: int) -> int:
    cfg_hash = cfgmod.config_hash(cfg)
    regime = cfgmod.get_str(cfg, "pulse.regime")
    if regime not in ("slow", "fast"):
        raise ValueError(f"pulse.regime must be slow or fast, got {regime!r}")
    slow = regime == "slow"
    d = cfgmod.get_int(cfg, "pulse.d", 5 if slow else 11)
    a = cfgmod.get_float(cfg, "pulse.a", 5e-6 if slow else 8e-6)
    tau = cfgmod.get_float(cfg, "pulse.tau", 500e-6 if slow else 100e-6)
    n_seg = cfgmod.get_int(cfg, "pulse.n_seg", 500)
    layer = cfgmod.get_int(cfg, "pulse.layer", 0)
    mu = cfgmod.get_float(cfg, "pulse.mu", None)
    robust = cfgmod.get_bool(cfg, "pulse.robust", True)
    n_samples = cfgmod.get_int(cfg, "pulse.noise.samples", 100)
    spec = pulse.NoiseSpec(
        amp_fraction=cfgmod.get_float(cfg, "pulse.noise.amp_fraction", 0.01),
        detuning_halfwidth=cfgmod.get_float(cfg, "pulse.noise.detuning",
                                            2.0 * math.pi * 500.0),
        n_samples=n_samples,
        seed=seed,
    )

    layout = code.build_layout(d)
    crystal = ionphys.crystal_from_layout(layout, a)
    modes = ionphys.transverse_modes(crystal)
    ion_of = {q: idx for idx, q in enumerate(layout.qubits)}
    if not 0 <= layer < len(layout.cnot_layers):
        raise ValueError(f"pulse.layer must index a CNOT layer, got {layer}")
    gates = layout.cnot_layers[layer]
    pairs = [(ion_of[c], ion_of[t]) for c, t in gates]

    diag = {"regime": regime, "d": d, "n_ions": crystal.n_ions,
            "n_pairs": len(pairs)}
    if slow:
        seq, rep = pulse.design_parallel_layer(modes, ion_of, gates, tau,
                                               n_seg, mu=mu, robust=robust)
        diag.update(rep)
        targets = pairs
    else:
        ci, cj = _central_pair(crystal, ion_of, gates)
        mu_val = mu if mu is not None else pulse.default_detuning(modes)
        ref = pulse.design_single_pair(modes, ci, cj, mu_val, tau, n_seg)
        seq, scales = pulse.transplant_layer(ref, pairs, modes)
        svals = [scales[p] for p in sorted(scales)]
        diag.update(mu=mu_val, reference_pair=[ci, cj],
                    scale_min=min(svals), scale_max=max(svals))
        targets = pairs

    pulse_path = outdir / f"layer{layer}.pulse"
    seq.save(pulse_path)

    report = pulse.sample_noisy_crosstalk(seq, modes, spec, crystal=crystal,
                                          lattice_constant=a, targets=targets)
    csv_path = outdir / "crosstalk.csv"
    report.to_csv(csv_path)
    stamped = csv_path.read_text(encoding="utf-8")
    csv_path.write_text(_hash_line(cfg_hash) + "\n" + stamped,
                        encoding="utf-8")

    und = report.undesired()
    r_und = report.r_over_a[und]
    rmin = cfgmod.get_float(cfg, "pulse.fit.rmin", 4.0)
    fit_rows = []
    for name, values in (("pc_noise", report.pc_noise[und]),
                         ("pc_total",
                          report.pc_intrinsic[und] + report.pc_noise[und])):
        try:
            c, gamma, rms = pulse.fit_power_law(list(zip(r_und, values)), rmin)
        except ValueError:
            continue
        fit_rows.append((name, c, gamma, rms, rmin, len(r_und)))
    _write_csv(outdir / "powerlaw.csv",
               ("quantity", "c", "gamma", "rms_log", "r_min", "n_pairs"),
               fit_rows, cfg_hash)

    n_bins = cfgmod.get_int(cfg, "pulse.bins", 2)
    bins = report.binned_summary(n_bins=n_bins)
    _write_csv(outdir / "bins.csv", ("r_lo", "r_hi", "count", "mean_pc_noise"),
               [(b["r_lo"], b["r_hi"], b["count"], b["mean"]) for b in bins],
               cfg_hash)

    model_lines = [_hash_line(cfg_hash)]
    if slow:
        mean_pc = float(np.mean(report.pc_sampled[und]))
        model_lines.append(f"noise.p_c = {mean_pc!r}")
        diag["mean_undesired_pc"] = mean_pc
    else:
        total = {name: (c, g) for name, c, g, *_ in fit_rows}
        if "pc_total" in total:
            c, g = total["pc_total"]
            model_lines.append(f"noise.crosstalk.c = {float(c)!r}")
            model_lines.append(f"noise.crosstalk.gamma = {float(g)!r}")
            model_lines.append(f"noise.crosstalk.rmin = {float(rmin)!r}")
    (outdir / "model.cfg").write_text("\n".join(model_lines) + "\n",
                                      encoding="utf-8")

    if len(pairs) > 0:
        diag["mean_gate_infidelity"] = float(np.mean(report.gate_infidelity))
    _write_manifest(outdir, "pulse", cfg_hash, seed, None, extra=diag)
    print(f"wrote {csv_path} ({report.n_pairs} pairs, "
          f"{n_samples} noise samples)")
    return 0


# -- scaling --------------------------------------------------------------


def cmd_scaling(cfg, outdir: Path, seed: int, shots: int | None,
                workers: int) -> int:
    cfg_hash = cfgmod.config_hash(cfg)
    p_g = cfgmod.get_float(cfg, "scaling.p_g")
    T = cfgmod.get_float(cfg, "scaling.T")
    p_c = cfgmod.get_float(cfg, "scaling.p_c", None)
    t_fixed = cfgmod.get_float(cfg, "scaling.t", None)
    ptc_fixed = cfgmod.get_float(cfg, "scaling.p_tilde_c", None)
    k_policy = cfgmod.get_str(cfg, "scaling.k_policy", "d-1")
    d_values = cfgmod.get_ints(cfg, "scaling.d_values")
    if not d_values:
        raise ValueError("scaling.d_values is empty")
    fit = scaling.ScalingFit(
        a_crosstalk=cfgmod.get_float(cfg, "scaling.fit.a", 0.01),
        p_th=cfgmod.get_float(cfg, "scaling.fit.p_th", 0.01),
        b_gate=cfgmod.get_float(cfg, "scaling.fit.b", 0.015),
        p_th_prime=cfgmod.get_float(cfg, "scaling.fit.p_th_prime", 0.013),
    )

    rows = scaling.bound_table(p_g, T, d_values, p_c=p_c, t=t_fixed,
                               p_tilde_c=ptc_fixed, fit=fit,
                               k_policy=k_policy)
    _write_csv(outdir / "bounds.csv", ("d", "k", "t", "p_tilde_c", "bound"),
               rows, cfg_hash)

    extra = {}
    if cfgmod.get_bool(cfg, "scaling.scan_k", False):
        if p_c is None:
            raise ValueError("scaling.scan_k needs the uniform-p_c mode")
        scan_rows = []
        for d in d_values:
            for k in range(1, d * (d - 1) + 1):
                t = scaling.cycle_duration(d, k)
                ptc = 2.0 * (k - 1) * p_c
                scan_rows.append(
                    (d, k, t, ptc,
                     scaling.unified_logical_bound(p_g, T, ptc, d, t, fit)))
        _write_csv(outdir / "kscan.csv", ("d", "k", "t", "p_tilde_c", "bound"),
                   scan_rows, cfg_hash)
        extra["optimal_k"] = {
            str(d): scaling.optimal_parallelism(p_g, T, p_c, d, fit)
            for d in d_values}

    target = cfgmod.get_float(cfg, "scaling.target", None)
    if target is not None:
        min_d = scaling.min_distance_for_target(
            p_g, T, target, p_c=p_c, t=t_fixed, p_tilde_c=ptc_fixed, fit=fit,
            k_policy=k_policy)
        extra["target"] = target
        extra["min_distance"] = min_d
        print(f"min distance for bound <= {target!r}: d = {min_d}")

    _write_manifest(outdir, "scaling", cfg_hash, seed, None, extra=extra)
    print(f"wrote {outdir / 'bounds.csv'} ({len(rows)} distances)")
    return 0


# -- fit ------------------------------------------------------------------


def _column(rows, name):
    if "+" in name:
        parts = [part.strip() for part in name.split("+")]
        return [sum(float(row[p]) for p in parts) for row in rows]
    return [float(row[name]) for row in rows]


def _apply_filters(cfg, header, rows):
    for key, want in cfg.items():
        if not key.startswith("fit.where."):
            continue
        col = key[len("fit.where."):]
        if col not in header:
            raise ValueError(f"filter column {col!r} not in table")
        try:
            target = float(want)
            rows = [r for r in rows if float(r[col]) == target]
        except ValueError:
            rows = [r for r in rows if r[col] == want]
    return rows


def cmd_fit(cfg, outdir: Path, seed: int, shots: int | None,
            workers: int) -> int:
    cfg_hash = cfgmod.config_hash(cfg)
    table = cfgmod.get_str(cfg, "fit.input")
    kind = cfgmod.get_str(cfg, "fit.kind")
    header, rows = _read_csv(table)
    rows = _apply_filters(cfg, header, rows)
    if not rows:
        raise ValueError("no rows left after filtering")

    if kind == "slope":
        xcol = cfgmod.get_str(cfg, "fit.x", "p_g")
        ycol = cfgmod.get_str(cfg, "fit.y", "p_L")
        window = cfgmod.get_floats(cfg, "fit.window", None)
        pts = []
        for row, x, y in zip(rows, _column(rows, xcol), _column(rows, ycol)):
            if "CI_low" in row and "CI_high" in row:
                sigma = (float(row["CI_high"]) - float(row["CI_low"])) / 2.0
                pts.append((x, y, sigma))
            else:
                pts.append((x, y))
        win = tuple(window) if window else None
        slope, err = scaling.measure_slope(pts, win)
        _write_csv(outdir / "fit.csv", ("kind", "slope", "slope_err", "n_points"),
                   [("slope", slope, err, len(pts))], cfg_hash)
        print(f"slope = {slope:.4f} +- {err:.4f}")
    elif kind == "power_law":
        xcol = cfgmod.get_str(cfg, "fit.x", "r_over_a")
        ycol = cfgmod.get_str(cfg, "fit.y", "pc_noise")
        rmin = cfgmod.get_float(cfg, "fit.rmin", 4.0)
        pts = list(zip(_column(rows, xcol), _column(rows, ycol)))
        c, gamma, rms = pulse.fit_power_law(pts, rmin)
        _write_csv(outdir / "fit.csv",
                   ("kind", "c", "gamma", "rms_log", "n_points"),
                   [("power_law", c, gamma, rms, len(pts))], cfg_hash)
        print(f"power law: c = {c:.4e}, gamma = {gamma:.3f}")
    elif kind == "pseudo_threshold":
        xcol = cfgmod.get_str(cfg, "fit.x", "p_g")
        ycol = cfgmod.get_str(cfg, "fit.y", "p_L")
        xs = _column(rows, xcol)
        ys = _column(rows, ycol)
        if any(x <= 0 or y <= 0 for x, y in zip(xs, ys)):
            raise ValueError("pseudo-threshold fit needs positive rates")
        # fixed-slope-2 fit: log c is the mean offset of log y - 2 log x
        logc = float(np.mean([math.log(y) - 2.0 * math.log(x)
                              for x, y in zip(xs, ys)]))
        c = math.exp(logc)
        p_star = 1.0 / c
        _write_csv(outdir / "fit.csv",
                   ("kind", "c", "p_star", "n_points"),
                   [("pseudo_threshold", c, p_star, len(rows))], cfg_hash)
        print(f"pseudo-threshold: c = {c:.4e}, p* = {p_star:.4e}")
    else:
        raise ValueError(f"unknown fit.kind {kind!r}")
    _write_manifest(outdir, "fit", cfg_hash, seed, None)
    return 0


# -- entry point ----------------------------------------------------------

_COMMANDS = {
    "simulate": cmd_simulate,
    "pulse": cmd_pulse,
    "scaling": cmd_scaling,
    "fit": cmd_fit,
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="ionqec",
        description="surface-code memory sweeps and parallel-gate pulse "
                    "design for 2D ion lattices")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="key=value config file")
        p.add_argument("--seed", type=int, default=None,
                       help="override config seed (default 0)")
        p.add_argument("--shots", type=int, default=None,
                       help="override config shot count")
        p.add_argument("--workers", type=int, default=None,
                       help="decode worker threads (env IONQEC_WORKERS)")
        p.add_argument("--out", default=None,
                       help="output directory (overrides config key out)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = cfgmod.load_config(args.config)
        out_raw = args.out if args.out is not None else cfgmod.get_str(
            cfg, "out", None)
        if out_raw is None:
            raise ValueError("no output directory: pass --out or config key out")
        outdir = Path(out_raw)
        outdir.mkdir(parents=True, exist_ok=True)
        _check_manifest(outdir, cfgmod.config_hash(cfg))
        seed = args.seed if args.seed is not None else cfgmod.get_int(
            cfg, "seed", 0)
        if args.workers is not None:
            workers = args.workers
        else:
            workers = int(os.environ.get(
                "IONQEC_WORKERS", cfgmod.get_int(cfg, "workers", 1)))
        return _COMMANDS[args.command](cfg, outdir, seed, args.shots, workers)
    except Exception as exc:  # structured error report, nonzero exit
        report = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(report), file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
