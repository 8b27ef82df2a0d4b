"""Seeded multi-trial runs of the measurement protocol and factor studies.

One trial follows the machine's run sequence: free-running oscillators get
random phases, the coupling matrix is loaded, coupling and injection are
switched on at t=0 (with their schedules), and the final phases are read out
relative to oscillator 0. Trial ``k`` of a run with master seed ``s`` uses
seed ``s ^ k``, so results never depend on thread count or batching.
"""

from __future__ import annotations

import csv
import io
import math
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dynamics import (SimConfig, Schedule, Trajectory, natural_frequencies,
                       random_initial_phases, settle_times, simulate,
                       _lyapunov_series)
from .graph import ProblemGraph, permute, quantize_weights, to_coupling
from .objective import CutSolution, cached_optimum, evaluate
from .readout import binarize, order_parameter_series


def trial_seed(master_seed: int, index: int) -> int:
    return (int(master_seed) ^ int(index)) & (2**64 - 1)


def annealed_config(base: SimConfig | None = None) -> SimConfig:
    """Noise-annealing protocol: decaying noise with injection off, then a
    slow injection ramp. Escapes twisted states that trap the plain run."""
    base = base or SimConfig()
    return base.replace(
        integrator="euler_maruyama",
        noise=Schedule.linear_ramp(0.1, 0.0, 150.0),
        shil_gain=Schedule.linear_ramp(0.0, base.shil_gain.peak or 0.5, 150.0, t_start=150.0),
        t_end=350.0,
    )


@dataclass
class TrialRecord:
    seed: int
    final_phases: np.ndarray
    solution: CutSolution
    settle_time: float
    trajectory: Trajectory | None = None
    # unresolved oscillators with at least one incident edge; isolated ones
    # cannot change the cut and never reject a trial
    blocking: tuple = ()

    @property
    def spins(self):
        return self.solution.spins

    @property
    def cut_value(self) -> float:
        return self.solution.cut_value

    @property
    def unresolved(self) -> bool:
        return bool(self.blocking)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "final_phases": [float(x) for x in self.final_phases],
            **self.solution.spins.to_dict(),
            "cut_value": self.cut_value,
            "settle_time": None if math.isnan(self.settle_time) else self.settle_time,
        }


@dataclass
class ProtocolRun:
    graph: ProblemGraph
    config: SimConfig
    master_seed: int
    records: list[TrialRecord] = field(default_factory=list)

    @property
    def trials(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class SuccessStats:
    trials: int
    optimum: float
    success_rate: float
    cut_histogram: dict
    bitstring_histogram: dict
    mean_settle_time: float | None
    unresolved_rate: float
    mean_approx_ratio: float

    @classmethod
    def from_records(cls, records: Sequence[TrialRecord], optimum: float,
                     policy: str = "reject") -> "SuccessStats":
        if not records:
            raise ValueError("no trial records")
        tol = 1e-9 * (1.0 + abs(optimum))
        hits = 0
        for r in records:
            ok = abs(r.cut_value - optimum) <= tol
            if policy == "reject" and r.unresolved:
                ok = False
            hits += ok
        cuts = Counter(r.cut_value for r in records)
        bits = Counter(r.spins.bitstring for r in records)
        settle = [r.settle_time for r in records if not math.isnan(r.settle_time)]
        ratio = [r.cut_value / optimum if optimum else 1.0 for r in records]
        return cls(
            trials=len(records),
            optimum=float(optimum),
            success_rate=hits / len(records),
            cut_histogram={k: cuts[k] for k in sorted(cuts)},
            bitstring_histogram={k: bits[k] for k in sorted(bits)},
            mean_settle_time=float(np.mean(settle)) if settle else None,
            unresolved_rate=sum(r.unresolved for r in records) / len(records),
            mean_approx_ratio=float(np.mean(ratio)),
        )

    def modal_cut(self) -> float:
        return max(self.cut_histogram, key=lambda k: (self.cut_histogram[k], k))

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "optimum": self.optimum,
            "success_rate": self.success_rate,
            "cut_histogram": {_num_key(k): v for k, v in self.cut_histogram.items()},
            "bitstring_histogram": dict(self.bitstring_histogram),
            "mean_settle_time": self.mean_settle_time,
            "unresolved_rate": self.unresolved_rate,
            "mean_approx_ratio": self.mean_approx_ratio,
        }


def _num_key(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def _coupling_for(g: ProblemGraph, cfg: SimConfig) -> np.ndarray:
    # unit gain: the coupling schedule supplies c(t)
    J = to_coupling(g, 1.0)
    if cfg.weight_bits is not None:
        J = quantize_weights(J, cfg.weight_bits)
    return J


def _check_readout(cfg: SimConfig) -> None:
    if cfg.shil_active and cfg.shil_harmonic != 2:
        raise ValueError("max-cut readout needs binary phases; use shil_harmonic=2")


def _simulate_block(g, J, cfg, seeds, keep_trace):
    n = g.n
    rngs = [np.random.default_rng(s) for s in seeds]
    theta0 = np.stack([random_initial_phases(n, r) for r in rngs])
    domega = np.stack([natural_frequencies(n, cfg.sigma_omega, r) for r in rngs])
    times, samples = simulate(J, domega, cfg, theta0, rngs)
    settle = settle_times(times, samples, 2)
    touched = g.degrees() > 0
    out = []
    for k, s in enumerate(seeds):
        final = samples[k, -1].copy()
        spins = binarize(final, 0, cfg.readout_tol)
        trace = None
        if keep_trace:
            ph = samples[k]
            r, psi = order_parameter_series(ph)
            lyap = (_lyapunov_series(ph, times, J, cfg)
                    if cfg.shil_waveform.kind == "sinusoidal" else None)
            trace = Trajectory(times, ph, r, psi, lyap)
        blocking = tuple(i for i in spins.unresolved if touched[i])
        out.append(TrialRecord(s, final, evaluate(spins, g), float(settle[k]), trace, blocking))
    return out


def _default_threads() -> int:
    return max(1, os.cpu_count() or 1)


def run_batch(g: ProblemGraph, cfg: SimConfig, trials: int, master_seed: int | None = None,
              *, threads: int | None = None, keep_traces: bool = False) -> ProtocolRun:
    """All per-trial records of ``trials`` independent protocol runs."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    _check_readout(cfg)
    master = cfg.seed if master_seed is None else master_seed
    J = _coupling_for(g, cfg)
    seeds = [trial_seed(master, k) for k in range(trials)]
    threads = max(1, min(threads or _default_threads(), trials))
    blocks = [list(b) for b in np.array_split(np.array(seeds, dtype=np.uint64), threads)]
    blocks = [[int(s) for s in b] for b in blocks if len(b)]
    if threads == 1:
        parts = [_simulate_block(g, J, cfg, b, keep_traces) for b in blocks]
    else:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(lambda b: _simulate_block(g, J, cfg, b, keep_traces), blocks))
    return ProtocolRun(g, cfg, master, [r for p in parts for r in p])


def run_protocol(g: ProblemGraph, cfg: SimConfig, seed: int, *, keep_trace: bool = False) -> TrialRecord:
    """One trial of the protocol with the given trial seed."""
    _check_readout(cfg)
    return _simulate_block(g, _coupling_for(g, cfg), cfg, [int(seed)], keep_trace)[0]


def summarize(run: ProtocolRun) -> SuccessStats:
    optimum = cached_optimum(run.graph).cut_value
    return SuccessStats.from_records(run.records, optimum, run.config.unresolved_policy)


def run_trials(g: ProblemGraph, cfg: SimConfig, trials: int, master_seed: int | None = None,
               *, threads: int | None = None) -> SuccessStats:
    return summarize(run_batch(g, cfg, trials, master_seed, threads=threads))


def sweep_coupling(g: ProblemGraph, cfg: SimConfig, c_values: Sequence[float], trials: int,
                   master_seed: int | None = None, *, threads: int | None = None):
    """``[(c, SuccessStats), ...]``; every row reuses the same trial seeds."""
    if not c_values:
        raise ValueError("c_values must be non-empty")
    rows = []
    for c in c_values:
        if not c > 0:
            raise ValueError(f"coupling values must be positive, got {c}")
        run_cfg = cfg.replace(coupling=cfg.coupling.scaled_to(float(c)))
        rows.append((float(c), run_trials(g, run_cfg, trials, master_seed, threads=threads)))
    return rows


SWEEP_COLUMNS = ("c", "trials", "optimum", "success_rate", "unresolved_rate",
                 "mean_settle_time", "mean_approx_ratio")


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for c, st in rows:
        settle = "" if st.mean_settle_time is None else f"{st.mean_settle_time:.12g}"
        w.writerow([f"{c:.12g}", st.trials, f"{st.optimum:.12g}", f"{st.success_rate:.12g}",
                    f"{st.unresolved_rate:.12g}", settle, f"{st.mean_approx_ratio:.12g}"])
    return buf.getvalue()


def shil_ablation(g: ProblemGraph, cfg: SimConfig, trials: int, master_seed: int | None = None,
                  *, threads: int | None = None) -> tuple[SuccessStats, SuccessStats]:
    """Paired (with injection, without injection) stats over identical seeds."""
    with_shil = run_trials(g, cfg, trials, master_seed, threads=threads)
    off = cfg.replace(shil_gain=Schedule.constant(0.0), shil_harmonic=2)
    without = run_trials(g, off, trials, master_seed, threads=threads)
    return with_shil, without


@dataclass(frozen=True)
class IsomorphResult:
    permutation: tuple[int, ...]
    graph: ProblemGraph
    optimum: float
    stats: SuccessStats

    def to_dict(self) -> dict:
        return {"permutation": list(self.permutation), "optimum": self.optimum,
                "stats": self.stats.to_dict()}


def random_permutations(n: int, count: int, seed: int) -> list[tuple[int, ...]]:
    rng = np.random.default_rng(seed)
    return [tuple(int(x) for x in rng.permutation(n)) for _ in range(count)]


def isomorph_battery(base: ProblemGraph, permutations, cfg: SimConfig, trials: int,
                     master_seed: int | None = None, *, threads: int | None = None
                     ) -> list[IsomorphResult]:
    """Run ``run_trials`` on relabelled copies of ``base``.

    ``permutations`` is a count (seeded random relabellings) or an explicit
    sequence of permutations.
    """
    master = cfg.seed if master_seed is None else master_seed
    if isinstance(permutations, int):
        if permutations < 1:
            raise ValueError("need at least one permutation")
        perms = random_permutations(base.n, permutations, master)
    else:
        perms = [tuple(int(x) for x in p) for p in permutations]
    out = []
    for p in perms:
        g = permute(base, p)
        stats = run_trials(g, cfg, trials, master, threads=threads)
        out.append(IsomorphResult(p, g, cached_optimum(g).cut_value, stats))
    return out


def optima_consistent(results: Sequence[IsomorphResult]) -> bool:
    return len({r.optimum for r in results}) <= 1
