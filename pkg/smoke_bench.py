"""Scratch: time the decode pipeline and preview criterion 2/4/6 numbers."""
import math
import time

from ionqec import code, decode, noise, sim


def build(d, k, params, rounds=None, policy="raster"):
    layout = code.build_layout(d)
    if k == "full":
        sched = code.schedule_gates(layout, policy=policy, seed=0)
    else:
        sched = code.schedule_gates(layout, k=k, policy=policy, seed=0)
    circ = sim.build_memory_circuit(layout, sched, params, rounds=rounds or d)
    return circ


def run(tag, circ, shots, seed=0, workers=4):
    t0 = time.time()
    dem = decode.build_dem(circ)
    t1 = time.time()
    graph = decode.build_matching_graph(dem)
    t2 = time.time()
    res = decode.estimate_logical_error_rate(circ, shots, seed=seed,
                                             workers=workers, dem=dem,
                                             graph=graph)
    t3 = time.time()
    lo, hi = res.per_round_interval()
    print(f"{tag}: dem {t1-t0:.1f}s graph {t2-t1:.1f}s decode {t3-t2:.1f}s "
          f"shots {shots} failures {res.failures} p_l {res.p_l:.3e} "
          f"ci [{lo:.2e},{hi:.2e}] t_cycle {res.t_cycle} "
          f"T_L {res.coherence_time:.4g} fallback {res.fallback_shots}")
    return res


def uniform(p):
    return noise.NoiseParams(p_g=p, T=noise.coherence_from_idle(p),
                             crosstalk=noise.UniformCrosstalk(p))


def xtalk_only(p_c):
    return noise.NoiseParams(p_g=0.0, T=math.inf,
                             crosstalk=noise.UniformCrosstalk(p_c),
                             crosstalk_pauli="depolarizing")


if __name__ == "__main__":
    # criterion 2 cost extremes
    run("d5 p=1e-3", build(5, "full", uniform(1e-3)), 200_000)
    run("d5 p=1e-4", build(5, "full", uniform(1e-4)), 200_000)
    run("d3 p=1e-4", build(3, "full", uniform(1e-4)), 200_000)

    # criterion 4/5 extremes (crosstalk-only, randomized grouping)
    run("d5 xt k=full x=2e-2", build(5, "full", xtalk_only(2e-2 / 38),
                                     policy="randomized"), 100_000)
    run("d5 xt k=2 x=2e-2", build(5, 2, xtalk_only(2e-2 / 2),
                                  policy="randomized"), 100_000)
    run("d5 xt k=full x=1e-3", build(5, "full", xtalk_only(1e-3 / 38),
                                     policy="randomized"), 100_000)
    run("d3 xt k=full x=1e-2", build(3, "full", xtalk_only(1e-2 / 10),
                                     policy="randomized"), 100_000)

    # criterion 6 preview at T = 10^3.5
    T = 10 ** 3.5
    for k in (1, 2, 5, 10, "full"):
        params = noise.NoiseParams(p_g=1e-3, T=T,
                                   crosstalk=noise.UniformCrosstalk(1e-5))
        run(f"d5 breakeven k={k}", build(5, k, params), 100_000)
    # criterion 6 existence preview at T = 10^4.5
    params = noise.NoiseParams(p_g=1e-3, T=10 ** 4.5,
                               crosstalk=noise.UniformCrosstalk(1e-5))
    run("d5 exist k=full", build(5, "full", params), 200_000)
