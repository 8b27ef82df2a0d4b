"""Compare the numba and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat 3]

Times one ring(8) trial, a 200-trial house batch and the exhaustive oracle at
n=20 on each backend, after a warm-up call that absorbs JIT compilation.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from oscising import _kernels
from oscising.dynamics import SimConfig, natural_frequencies, random_initial_phases
from oscising.graph import named_graph, random_graph, to_coupling


def _advance_case(impl, g, trials, t_end=200.0):
    cfg = SimConfig(t_end=t_end)
    J = to_coupling(g, 1.0)
    rng = np.random.default_rng(0)
    th = np.stack([random_initial_phases(g.n, rng) for _ in range(trials)])
    dw = np.stack([natural_frequencies(g.n, cfg.sigma_omega, rng) for _ in range(trials)])
    steps = cfg.n_steps
    out = np.empty((trials, steps // cfg.stride, g.n))
    noise = np.empty((trials, 0, g.n))

    def go():
        impl.advance(th.copy(), J, dw, 0.0, cfg.dt, steps, cfg.stride,
                     cfg.coupling.packed(), cfg.shil_gain.packed(), cfg.noise.packed(),
                     float(cfg.shil_harmonic), cfg.shil_waveform.code, cfg.shil_waveform.duty,
                     cfg.shil_phase_offset, cfg.shil_detuning, 0, noise, True, out)
    return go


def _oracle_case(impl, n):
    g = random_graph(n, 0.5, np.random.default_rng(1))
    indptr, indices, weights = g.csr()
    return lambda: impl.maxcut_enumerate(n, indptr, indices, weights, 1e-9)


def _time(fn, repeat):
    fn()  # warm-up / compile
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--oracle-n", type=int, default=20)
    args = ap.parse_args(argv)

    backends = ["numba", "numpy"] if _kernels.numba_available() else ["numpy"]
    impls = {b: _kernels.load_backend(b) for b in backends}
    cases = [
        ("ring8 trial (t_end=200)", lambda m: _advance_case(m, named_graph("ring8"), 1)),
        ("house batch x200", lambda m: _advance_case(m, named_graph("house"), 200)),
        (f"oracle n={args.oracle_n}", lambda m: _oracle_case(m, args.oracle_n)),
    ]
    print(f"{'case':28s}" + "".join(f"{b:>12s}" for b in backends) + "     speedup")
    for name, make in cases:
        times = {b: _time(make(impls[b]), args.repeat) for b in backends}
        row = f"{name:28s}" + "".join(f"{times[b] * 1e3:10.1f}ms" for b in backends)
        if len(backends) == 2:
            row += f"  {times['numpy'] / times['numba']:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
