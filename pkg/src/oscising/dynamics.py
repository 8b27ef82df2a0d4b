"""Coupled phase-oscillator dynamics with harmonic injection locking.

Each oscillator phase obeys, in the frame rotating at the nominal frequency,

    dtheta_i/dt = dw_i + c(t) * sum_j J_ij sin(theta_j - theta_i)
                  - Ks(t) * f(h * theta_i + phi - detune * t)

with ``J`` the (unit-gain) coupling matrix, ``c(t)`` the coupling-gain
schedule, ``Ks(t)`` the injection-gain schedule, ``h`` the injection harmonic
and ``f`` the injection waveform. Noise, when switched on, is additive white
noise of intensity ``eta(t)`` integrated by Euler-Maruyama.

The hot loop lives in :mod:`oscising._kernels` (numba, with a numpy fallback).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import _kernels
from .graph import check_coupling
from .readout import (TWO_PI, lock_distance, order_parameter_series,
                      wrap_phase)

INTEGRATORS = ("rk4", "euler_maruyama")
_WAVE_CODES = {"sinusoidal": 0, "rectangular": 1, "pulse": 2}
_WAVE_ALIASES = {"sin": "sinusoidal", "sine": "sinusoidal", "sinusoidal": "sinusoidal",
                 "rect": "rectangular", "square": "rectangular", "rectangular": "rectangular",
                 "pulse": "pulse"}

# steps per kernel call; bounds memory for the pre-drawn noise block
_CHUNK_STEPS = 8192


@dataclass(frozen=True)
class Schedule:
    """Piecewise-linear parameter schedule.

    Holds ``v0`` up to ``t_start``, ramps linearly to ``v1`` over ``t_ramp``
    and holds ``v1`` afterwards. A constant is ``v0 == v1``.
    """

    v0: float
    v1: float
    t_ramp: float = 0.0
    t_start: float = 0.0

    def __post_init__(self):
        for name in ("v0", "v1", "t_ramp", "t_start"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"schedule {name} must be finite")
        if self.t_ramp < 0 or self.t_start < 0:
            raise ValueError("schedule times must be non-negative")

    @classmethod
    def constant(cls, v: float) -> "Schedule":
        return cls(float(v), float(v))

    @classmethod
    def linear_ramp(cls, v0: float, v1: float, t_ramp: float, t_start: float = 0.0) -> "Schedule":
        return cls(float(v0), float(v1), float(t_ramp), float(t_start))

    @property
    def is_constant(self) -> bool:
        return self.v0 == self.v1

    @property
    def peak(self) -> float:
        return max(abs(self.v0), abs(self.v1))

    def value(self, t):
        t = np.asarray(t, dtype=float)
        if self.t_ramp <= 0.0:
            out = np.where(t <= self.t_start, self.v0, self.v1)
        else:
            frac = np.clip((t - self.t_start) / self.t_ramp, 0.0, 1.0)
            out = self.v0 + (self.v1 - self.v0) * frac
        return float(out) if out.ndim == 0 else out

    def scaled_to(self, final: float) -> "Schedule":
        """Same shape, rescaled so the held final value is ``final``."""
        if self.v1 == 0.0:
            return Schedule.constant(final)
        k = final / self.v1
        return replace(self, v0=self.v0 * k, v1=float(final))

    def packed(self) -> np.ndarray:
        return np.array([self.v0, self.v1, self.t_start, self.t_ramp])

    def describe(self) -> str:
        if self.is_constant:
            return f"{self.v0:g}"
        return f"ramp({self.v0:g}->{self.v1:g}, start={self.t_start:g}, len={self.t_ramp:g})"


@dataclass(frozen=True)
class Waveform:
    kind: str = "rectangular"
    duty: float = 0.1

    def __post_init__(self):
        kind = _WAVE_ALIASES.get(self.kind)
        if kind is None:
            raise ValueError(f"unknown waveform {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if kind == "pulse" and not 0.0 < self.duty < 1.0:
            raise ValueError("pulse duty must lie in (0, 1)")

    @classmethod
    def parse(cls, text: str) -> "Waveform":
        """``sin``, ``rect`` or ``pulse[:duty]``."""
        name, _, duty = text.strip().lower().partition(":")
        if duty:
            if _WAVE_ALIASES.get(name) != "pulse":
                raise ValueError(f"only pulse waveforms take a duty cycle: {text!r}")
            return cls("pulse", float(duty))
        return cls(name)

    @property
    def code(self) -> int:
        return _WAVE_CODES[self.kind]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "sinusoidal":
            return np.sin(x)
        if self.kind == "rectangular":
            return np.sign(np.sin(x))
        y = np.remainder(x, TWO_PI)
        return np.where(y < TWO_PI * self.duty, 1.0, -self.duty / (1.0 - self.duty))

    def __str__(self):
        if self.kind == "pulse":
            return f"pulse:{self.duty:g}"
        return {"sinusoidal": "sin", "rectangular": "rect"}[self.kind]


@dataclass(frozen=True)
class SimConfig:
    """Every knob of one simulated run (dynamics and readout)."""

    coupling: Schedule = field(default_factory=lambda: Schedule.constant(0.2))
    shil_gain: Schedule = field(default_factory=lambda: Schedule.linear_ramp(0.0, 0.5, 150.0))
    shil_harmonic: int = 2
    shil_waveform: Waveform = field(default_factory=Waveform)
    shil_phase_offset: float = 0.0
    shil_detuning: float = 0.0
    noise: Schedule = field(default_factory=lambda: Schedule.constant(0.0))
    sigma_omega: float = 0.01
    dt: float = 1e-2
    t_end: float = 200.0
    integrator: str = "rk4"
    seed: int = 0
    stride: int = 10
    early_stop: bool = False
    weight_bits: int | None = None
    readout_tol: float = 0.3
    unresolved_policy: str = "reject"

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_end >= self.dt:
            raise ValueError("t_end must be at least dt")
        if self.shil_harmonic not in (2, 3):
            raise ValueError("shil_harmonic must be 2 or 3")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"integrator must be one of {INTEGRATORS}")
        if min(self.noise.v0, self.noise.v1) < 0:
            raise ValueError("noise amplitude must be non-negative")
        if self.noise.peak > 0 and self.integrator != "euler_maruyama":
            raise ValueError("noise requires the euler_maruyama integrator")
        if self.sigma_omega < 0:
            raise ValueError("sigma_omega must be non-negative")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.weight_bits is not None and not 1 <= self.weight_bits <= 16:
            raise ValueError("weight_bits must be in [1, 16]")
        if not 0 < self.readout_tol < math.pi / 3:
            raise ValueError("readout_tol must lie in (0, pi/3)")
        if self.unresolved_policy not in ("reject", "keep"):
            raise ValueError("unresolved_policy must be 'reject' or 'keep'")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_end / self.dt)))

    @property
    def shil_active(self) -> bool:
        return self.shil_gain.peak > 0

    def replace(self, **changes) -> "SimConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["shil_waveform"] = str(self.shil_waveform)
        return d


@dataclass(frozen=True)
class OscillatorState:
    theta: np.ndarray
    t: float = 0.0


@dataclass
class Trajectory:
    times: np.ndarray
    phases: np.ndarray
    r: np.ndarray
    psi: np.ndarray
    lyapunov: np.ndarray | None = None

    def __len__(self):
        return len(self.times)

    @property
    def final(self) -> np.ndarray:
        return self.phases[-1]

    def to_csv(self) -> str:
        n = self.phases.shape[1]
        cols = ["t"] + [f"theta_{i}" for i in range(n)] + ["r", "psi"]
        if self.lyapunov is not None:
            cols.append("V")
        lines = [",".join(cols)]
        for k in range(len(self.times)):
            row = [self.times[k], *self.phases[k], self.r[k], self.psi[k]]
            if self.lyapunov is not None:
                row.append(self.lyapunov[k])
            lines.append(",".join(f"{v:.12g}" for v in row))
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="ascii", newline="") as fh:
            fh.write(self.to_csv())


def random_initial_phases(n: int, rng: np.random.Generator) -> np.ndarray:
    if n < 1:
        raise ValueError("need at least one oscillator")
    return wrap_phase(rng.uniform(0.0, TWO_PI, n))


def natural_frequencies(n: int, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Zero-mean normal detunings in the rotating frame."""
    return rng.normal(0.0, sigma, n) if sigma > 0 else np.zeros(n)


def classic_coupling(n: int, K: float) -> np.ndarray:
    """All-to-all ``K/N`` matrix that turns the RHS into the textbook model."""
    J = np.full((n, n), K / n)
    np.fill_diagonal(J, 0.0)
    return J


def phase_rhs(theta, J, domega, *, coupling: float = 1.0, shil_gain: float = 0.0,
              harmonic: int = 2, waveform: Waveform | str = "sinusoidal",
              phase_offset: float = 0.0) -> np.ndarray:
    """Instantaneous dtheta/dt for one phase vector."""
    th = np.asarray(theta, dtype=float)
    J = np.asarray(J, dtype=float)
    dw = np.broadcast_to(np.asarray(domega, dtype=float), th.shape)
    if J.shape != (th.size, th.size):
        raise ValueError(f"coupling shape {J.shape} does not match {th.size} phases")
    wf = waveform if isinstance(waveform, Waveform) else Waveform.parse(waveform)
    out = _kernels.rhs_batch(th[None, :].copy(), J, dw[None, :].copy(), float(coupling),
                             float(shil_gain), float(harmonic), wf.code, float(wf.duty),
                             float(phase_offset))
    return np.asarray(out)[0]


def lyapunov_value(theta, J, *, coupling: float = 1.0, shil_gain: float = 0.0,
                   harmonic: int = 2, phase_offset: float = 0.0) -> float:
    """Potential whose negative gradient is the zero-detuning sinusoidal RHS.

    V = -(c/2) sum_ij J_ij cos(theta_i - theta_j) - (Ks/h) sum_i cos(h theta_i + phi)
    """
    th = np.asarray(theta, dtype=float)
    z = np.exp(1j * th)
    pair = float(np.real(np.conj(z) @ np.asarray(J, float) @ z))
    shil = float(np.cos(harmonic * th + phase_offset).sum())
    return -0.5 * coupling * pair - shil_gain / harmonic * shil


def _lyapunov_series(phases, times, J, cfg: SimConfig) -> np.ndarray:
    z = np.exp(1j * phases)
    pair = np.real(np.einsum("ki,ij,kj->k", np.conj(z), J, z))
    c = np.broadcast_to(cfg.coupling.value(times), times.shape)
    ks = np.broadcast_to(cfg.shil_gain.value(times), times.shape)
    h = cfg.shil_harmonic
    off = cfg.shil_phase_offset - cfg.shil_detuning * times
    shil = np.cos(h * phases + off[:, None]).sum(axis=1)
    return -0.5 * c * pair - ks / h * shil


def _kernel_args(cfg: SimConfig):
    return dict(
        csch=cfg.coupling.packed(), ksch=cfg.shil_gain.packed(), esch=cfg.noise.packed(),
        h=float(cfg.shil_harmonic), kind=cfg.shil_waveform.code, duty=float(cfg.shil_waveform.duty),
        phi=float(cfg.shil_phase_offset), detune=float(cfg.shil_detuning),
        method=INTEGRATORS.index(cfg.integrator),
    )


def _settled(dist: np.ndarray, window: int = 10, tol: float = 1e-4) -> np.ndarray:
    """Index of first sample closing a quiet window, per row; -1 when never."""
    k, = dist.shape[-1:]
    out = np.full(dist.shape[0], -1)
    if k <= window:
        return out
    view = np.lib.stride_tricks.sliding_window_view(dist, window + 1, axis=-1)
    quiet = np.ptp(view, axis=-1) < tol
    hit = quiet.any(axis=-1)
    out[hit] = np.argmax(quiet[hit], axis=-1) + window
    return out


def simulate(J, domega, cfg: SimConfig, theta0, rngs=None, *, wrap: bool = True):
    """Batch integration; the engine behind :func:`integrate` and the harness.

    ``theta0`` and ``domega`` are (m, n); ``rngs`` holds one generator per
    trial and is only consumed when noise is on. Returns ``(times, samples)``
    with samples of shape (m, k, n); ``times[0] == 0`` and the last sample is
    the final state.
    """
    J = np.ascontiguousarray(J, dtype=float)
    check_coupling(J)
    theta = np.array(theta0, dtype=float, ndmin=2)
    domega = np.ascontiguousarray(np.broadcast_to(np.asarray(domega, float), theta.shape))
    m, n = theta.shape
    if J.shape != (n, n):
        raise ValueError(f"coupling shape {J.shape} does not match {n} oscillators")
    noisy = cfg.noise.peak > 0
    if noisy and (rngs is None or len(rngs) != m):
        raise ValueError("noise requires one generator per trajectory")
    if wrap:
        theta = wrap_phase(theta)
    theta = np.ascontiguousarray(theta)

    total = cfg.n_steps
    stride = cfg.stride
    chunk = max(stride, (_CHUNK_STEPS // stride) * stride)
    kargs = _kernel_args(cfg)
    no_noise = np.zeros((m, 0, n))
    h = cfg.shil_harmonic

    steps = [0]
    blocks = [theta.copy()[:, None, :]]
    done = 0
    while done < total:
        nsteps = min(chunk, total - done)
        out = np.empty((m, nsteps // stride, n))
        noise = (np.stack([g.standard_normal((nsteps, n)) for g in rngs])
                 if noisy else no_noise)
        _kernels.advance(theta, J, domega, done * cfg.dt, cfg.dt, nsteps, stride,
                         noise=noise, wrap=wrap, out=out, **kargs)
        steps.extend(done + stride * (np.arange(out.shape[1]) + 1))
        blocks.append(out)
        done += nsteps
        if nsteps % stride:
            steps.append(done)
            blocks.append(theta.copy()[:, None, :])
        if cfg.early_stop and done < total:
            so_far = np.concatenate(blocks, axis=1)
            dist = lock_distance(so_far - so_far[:, :, :1], h).max(axis=2)
            if np.all(_settled(dist) >= 0):
                break
    times = np.asarray(steps, dtype=float) * cfg.dt
    return times, np.concatenate(blocks, axis=1)


def integrate(J, freqs, cfg: SimConfig, theta0, rng: np.random.Generator | None = None,
              *, wrap: bool = True) -> Trajectory:
    """Integrate one trajectory from t=0 to ``cfg.t_end``.

    Samples every ``cfg.stride`` steps plus the final step. The Lyapunov
    series is recorded only for the sinusoidal waveform, where the potential
    exists (it ignores detuning).
    """
    theta0 = np.asarray(theta0, dtype=float)
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    times, samples = simulate(J, np.asarray(freqs, float)[None, :], cfg, theta0[None, :],
                              [rng], wrap=wrap)
    phases = samples[0]
    r, psi = order_parameter_series(phases)
    lyap = None
    if cfg.shil_waveform.kind == "sinusoidal":
        lyap = _lyapunov_series(phases, times, np.asarray(J, float), cfg)
    return Trajectory(times, phases, r, psi, lyap)


def settle_times(times, samples, harmonic: int = 2) -> np.ndarray:
    """Per-trajectory settle time (NaN when never settled).

    Settled means the worst lock distance relative to oscillator 0 changed by
    less than 1e-4 over 10 consecutive samples.
    """
    dist = lock_distance(samples - samples[:, :, :1], harmonic).max(axis=2)
    idx = _settled(dist)
    return np.where(idx >= 0, np.asarray(times)[np.maximum(idx, 0)], np.nan)


def _one_step(state: OscillatorState, J, freqs, cfg: SimConfig, noise) -> OscillatorState:
    J = np.ascontiguousarray(J, dtype=float)
    th = wrap_phase(np.array(state.theta, dtype=float, ndmin=2))
    th = np.ascontiguousarray(th)
    n = th.shape[1]
    if J.shape != (n, n):
        raise ValueError(f"coupling shape {J.shape} does not match {n} oscillators")
    dw = np.ascontiguousarray(np.broadcast_to(np.asarray(freqs, float), th.shape))
    out = np.empty((1, 1, n))
    _kernels.advance(th, J, dw, float(state.t), cfg.dt, 1, 1, noise=noise, wrap=True,
                     out=out, **_kernel_args(cfg))
    return OscillatorState(th[0], state.t + cfg.dt)


def step_rk4(state: OscillatorState, J, freqs, cfg: SimConfig) -> OscillatorState:
    if cfg.noise.peak > 0:
        raise ValueError("RK4 stepping is noise-free")
    cfg = cfg if cfg.integrator == "rk4" else cfg.replace(integrator="rk4")
    n = np.size(state.theta)
    return _one_step(state, J, freqs, cfg, np.zeros((1, 0, n)))


def step_euler_maruyama(state: OscillatorState, J, freqs, cfg: SimConfig,
                        rng: np.random.Generator) -> OscillatorState:
    cfg = cfg if cfg.integrator == "euler_maruyama" else cfg.replace(integrator="euler_maruyama")
    n = np.size(state.theta)
    noise = rng.standard_normal((1, 1, n)) if cfg.noise.peak > 0 else np.zeros((1, 0, n))
    return _one_step(state, J, freqs, cfg, noise)
