"""Command-line front end.

    oscising solve --graph house --seed 7 --trials 100 --format json

Commands: solve, oracle, sweep, ablate, isomorphs, trace. Exit status is 0 on
success, 1 on usage errors and 2 on runtime errors. JSON output embeds the
effective configuration; the only non-reproducible field is ``generated_at``.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import os
import sys

import numpy as np

from . import __version__, _kernels
from .config import KEYS, CliConfig, ConfigError, format_config, load_config
from .dynamics import integrate, natural_frequencies, random_initial_phases
from .graph import to_coupling
from .harness import (isomorph_battery, optima_consistent, run_batch, shil_ablation,
                      summarize, sweep_coupling, sweep_csv, trial_seed)
from .objective import OracleSizeError, brute_force_maxcut, cached_optimum, evaluate
from .readout import binarize, ternarize

COMMANDS = ("solve", "oracle", "sweep", "ablate", "isomorphs", "trace")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _shared_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    a = p.add_argument
    a("--config", metavar="PATH", help="flat key = value config file")
    a("--preset", choices=["default", "anneal"])
    a("--graph", metavar="NAME|PATH", help="named graph (house, ring8, ...) or edge-list file")
    a("--graph-file", metavar="PATH")
    a("--seed", type=int, help="master seed (u64)")
    a("--trials", type=int)
    a("--c", type=float, help="coupling strength per edge")
    a("--coupling-ramp", type=float, metavar="T", help="ramp coupling from 0 over T")
    a("--shil", choices=["on", "off"])
    a("--shil-gain", type=float)
    a("--shil-ramp", type=float, metavar="T")
    a("--shil-start", type=float, metavar="T")
    a("--shil-waveform", metavar="sin|rect|pulse[:duty]")
    a("--shil-harmonic", type=int, choices=[2, 3])
    a("--shil-phase", type=float)
    a("--shil-detuning", type=float)
    a("--noise", type=float, metavar="ETA")
    a("--noise-ramp", type=float, metavar="T", help="decay noise linearly to 0 over T")
    a("--sigma-omega", type=float)
    a("--dt", type=float)
    a("--t-end", type=float)
    a("--integrator", choices=["auto", "rk4", "euler_maruyama"])
    a("--stride", type=int)
    a("--early-stop", choices=["on", "off"])
    a("--weight-bits", type=int)
    a("--tol", type=float, help="unresolved-phase tolerance, radians")
    a("--unresolved", choices=["reject", "keep"])
    a("--threads", type=int)
    a("--format", choices=["json", "csv", "text"])
    a("--out", metavar="PATH")
    a("--dump-trace", metavar="DIR")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="oscising", description="Oscillator Ising machine simulator for max-cut.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    shared = _shared_flags()
    sub.add_parser("solve", parents=[shared], help="repeated protocol runs vs the oracle")
    sub.add_parser("oracle", parents=[shared], help="exhaustive max cut")
    sw = sub.add_parser("sweep", parents=[shared], help="success rate over coupling values")
    sw.add_argument("--c-values", metavar="C1,C2,...")
    sub.add_parser("ablate", parents=[shared], help="paired runs with and without injection")
    iso = sub.add_parser("isomorphs", parents=[shared], help="relabelled copies of the graph")
    iso.add_argument("--permutations", type=int)
    sub.add_parser("trace", parents=[shared], help="one trajectory as CSV")
    return parser


def _flag_values(ns: argparse.Namespace) -> dict:
    out = {}
    for key in KEYS:
        raw = getattr(ns, key, None)
        if raw is None:
            continue
        if key in ("shil", "early_stop"):
            raw = raw == "on"
        elif key == "c_values":
            raw = [float(x) for x in raw.split(",") if x]
        elif key == "shil_waveform":
            from .config import convert
            raw = convert(key, raw)
        out[key] = raw
    return out


def _clean(obj):
    if isinstance(obj, float):
        return None if math.isnan(obj) else obj
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def _graph_info(g) -> dict:
    return {"n": g.n, "m": g.m}


def _envelope(cli: CliConfig, result: dict) -> dict:
    return {
        "generated_at": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "command": cli.command,
        "version": __version__,
        "backend": _kernels.BACKEND,
        "config": cli.effective(),
        "result": result,
    }


def _stats_text(label: str, st) -> list[str]:
    hist = ", ".join(f"{k:g}:{v}" for k, v in st.cut_histogram.items())
    settle = "n/a" if st.mean_settle_time is None else f"{st.mean_settle_time:.3f}"
    return [
        f"{label}success_rate = {st.success_rate:.4f}  ({st.trials} trials, optimum {st.optimum:g})",
        f"{label}cut_histogram = {{{hist}}}",
        f"{label}unresolved_rate = {st.unresolved_rate:.4f}  mean_settle_time = {settle}"
        f"  mean_approx_ratio = {st.mean_approx_ratio:.4f}",
    ]


def _dump_traces(run, directory) -> None:
    os.makedirs(directory, exist_ok=True)
    for k, rec in enumerate(run.records):
        rec.trajectory.write_csv(os.path.join(directory, f"trial_{k:04d}.csv"))


def _cmd_solve(cli, g, sim, v):
    run = run_batch(g, sim, v["trials"], v["seed"], threads=v["threads"],
                    keep_traces=v["dump_trace"] is not None)
    if v["dump_trace"]:
        _dump_traces(run, v["dump_trace"])
    st = summarize(run)
    opt = cached_optimum(g)
    result = {"graph": _graph_info(g), "oracle": opt.to_dict(), "stats": st.to_dict()}
    text = [f"graph n={g.n} m={g.m}  oracle cut = {opt.cut_value:g} ({opt.bitstring})",
            *_stats_text("", st)]
    return result, text, sweep_csv([(sim.coupling.v1, st)])


def _cmd_oracle(cli, g, sim, v):
    sol = brute_force_maxcut(g)
    a, b = sol.spins.partition()
    text = [f"max cut = {sol.cut_value:g}", f"bitstring = {sol.bitstring}",
            f"partition = {a} | {b}", f"ising_energy = {sol.ising_energy:g}"]
    d = sol.to_dict()
    csv_text = "bitstring,cut_value,ising_energy\n" + f"{sol.bitstring},{sol.cut_value:.12g},{sol.ising_energy:.12g}\n"
    return {"graph": _graph_info(g), "solution": d}, text, csv_text


def _cmd_sweep(cli, g, sim, v):
    rows = sweep_coupling(g, sim, v["c_values"], v["trials"], v["seed"], threads=v["threads"])
    result = {"graph": _graph_info(g), "rows": [{"c": c, "stats": st.to_dict()} for c, st in rows]}
    text = []
    for c, st in rows:
        text += _stats_text(f"c={c:g}  ", st)
    return result, text, sweep_csv(rows)


def _cmd_ablate(cli, g, sim, v):
    if not v["shil"]:
        raise UsageError("ablate compares against injection; it needs shil on")
    on, off = shil_ablation(g, sim, v["trials"], v["seed"], threads=v["threads"])
    result = {"graph": _graph_info(g), "with_shil": on.to_dict(), "without_shil": off.to_dict()}
    text = _stats_text("with    ", on) + _stats_text("without ", off)
    return result, text, sweep_csv([(sim.coupling.v1, on), (sim.coupling.v1, off)])


def _cmd_isomorphs(cli, g, sim, v):
    res = isomorph_battery(g, v["permutations"], sim, v["trials"], v["seed"], threads=v["threads"])
    result = {"graph": _graph_info(g), "isomorphs": [r.to_dict() for r in res],
              "optima_consistent": optima_consistent(res)}
    text = []
    for r in res:
        text += _stats_text(f"perm={list(r.permutation)}  ", r.stats)
    text.append(f"optima_consistent = {optima_consistent(res)}")
    return result, text, sweep_csv([(sim.coupling.v1, r.stats) for r in res])


def _cmd_trace(cli, g, sim, v):
    seed = trial_seed(v["seed"], 0)
    rng = np.random.default_rng(seed)
    theta0 = random_initial_phases(g.n, rng)
    freqs = natural_frequencies(g.n, sim.sigma_omega, rng)
    J = to_coupling(g, 1.0)
    traj = integrate(J, freqs, sim, theta0, rng)
    if v["dump_trace"]:
        os.makedirs(v["dump_trace"], exist_ok=True)
        traj.write_csv(os.path.join(v["dump_trace"], "trial_0000.csv"))
    if sim.shil_active and sim.shil_harmonic == 3:
        spins = ternarize(traj.final, 0, min(sim.readout_tol, 0.5))
        readout = spins.to_dict()
    else:
        spins = binarize(traj.final, 0, sim.readout_tol)
        readout = {**spins.to_dict(), **evaluate(spins, g).to_dict()}
    result = {"graph": _graph_info(g), "seed": seed, "samples": len(traj),
              "final_phases": [float(x) for x in traj.final], "readout": readout,
              "final_r": float(traj.r[-1])}
    text = [f"samples = {len(traj)}  final r = {traj.r[-1]:.6f}",
            f"readout = {spins.bitstring}  unresolved = {list(spins.unresolved)}"]
    return result, text, traj.to_csv()


_HANDLERS = {"solve": _cmd_solve, "oracle": _cmd_oracle, "sweep": _cmd_sweep,
             "ablate": _cmd_ablate, "isomorphs": _cmd_isomorphs, "trace": _cmd_trace}


def _render(cli: CliConfig, result, text, csv_text) -> str:
    fmt = cli.values["format"]
    if fmt == "json":
        return json.dumps(_clean(_envelope(cli, result)), indent=2) + "\n"
    block = "\n".join("# " + ln for ln in format_config(cli.effective()).splitlines())
    stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    header = f"# generated_at = {stamp}\n# command = {cli.command}\n{block}\n"
    if fmt == "csv":
        return header + csv_text
    return header + "\n".join(text) + "\n"


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        ns = build_parser().parse_args(argv)
        file_values = load_config(ns.config) if ns.config else {}
        cli = CliConfig.merge(ns.command, file_values, _flag_values(ns))
        g = cli.load_graph()
        sim = cli.sim_config()
        if ns.command != "trace" and sim.shil_active and sim.shil_harmonic != 2:
            raise UsageError("shil_harmonic 3 ternarizes; only the trace command reads it out")
        result, text, csv_text = _HANDLERS[ns.command](cli, g, sim, cli.effective())
        output = _render(cli, result, text, csv_text)
    except (UsageError, ConfigError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except OracleSizeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out_path = cli.values["out"]
    if out_path:
        try:
            with open(out_path, "w", encoding="utf-8", newline="") as fh:
                fh.write(output)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    else:
        stdout.write(output)
    return 0


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
