"""Turn oscillator phases into spins and synchronization observables.

Bit convention: an oscillator in phase with the reference reads ``'0'``
(spin +1), one in antiphase reads ``'1'`` (spin -1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi

DEFAULT_TOL = 0.3

# integrator gain that drives full antiphase to the 4.7 V clamp in 3 periods
DETECTOR_CLAMP = 4.7
DETECTOR_GAIN = DETECTOR_CLAMP / 1.5


def wrap_phase(x):
    """Map radians onto [0, 2*pi). Accepts scalars or arrays."""
    a = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ValueError("phase must be finite")
    y = a - TWO_PI * np.floor(a / TWO_PI)
    y = np.where(y >= TWO_PI, y - TWO_PI, y)
    return float(y) if np.ndim(x) == 0 else y


def angular_distance(a, b=0.0):
    """Shortest distance on the circle, in [0, pi]."""
    d = np.abs(np.remainder(np.asarray(a, float) - b, TWO_PI))
    return np.minimum(d, TWO_PI - d)


def lock_distance(rel, harmonic: int = 2):
    """Distance of relative phases to the nearest of ``harmonic`` lock states."""
    step = TWO_PI / harmonic
    r = np.remainder(np.asarray(rel, float), step)
    return np.minimum(r, step - r)


@dataclass(frozen=True)
class OrderParameter:
    r: float
    psi: float


def order_parameter(theta) -> OrderParameter:
    """Population centroid ``r * exp(i psi) = mean(exp(i theta))``."""
    th = np.asarray(theta, dtype=float)
    if th.size == 0:
        raise ValueError("order parameter of an empty phase vector")
    z = np.exp(1j * th).mean()
    r = float(abs(z))
    psi = wrap_phase(math.atan2(z.imag, z.real)) if r >= 1e-12 else 0.0
    return OrderParameter(r, psi)


def order_parameter_series(phases: np.ndarray):
    """Vectorized ``(r, psi)`` over the last axis of a (k, n) array."""
    z = np.exp(1j * np.asarray(phases)).mean(axis=-1)
    r = np.abs(z)
    psi = np.where(r >= 1e-12, np.remainder(np.angle(z), TWO_PI), 0.0)
    return r, psi


@dataclass(frozen=True)
class SpinAssignment:
    spins: tuple[int, ...]
    reference_index: int = 0
    unresolved: tuple[int, ...] = field(default=())
    mode: str = "binary"

    @property
    def n(self) -> int:
        return len(self.spins)

    def as_array(self) -> np.ndarray:
        return np.array(self.spins, dtype=int)

    @property
    def bitstring(self) -> str:
        if self.mode == "binary":
            return "".join("0" if s == 1 else "1" for s in self.spins)
        return "".join({1: "+", 0: "0", -1: "-"}[s] for s in self.spins)

    def partition(self) -> tuple[list[int], list[int]]:
        """1-based vertex sets (in phase with reference, antiphase)."""
        a = [i + 1 for i, s in enumerate(self.spins) if s == 1]
        b = [i + 1 for i, s in enumerate(self.spins) if s != 1]
        return a, b

    def to_dict(self) -> dict:
        return {
            "spins": list(self.spins),
            "bitstring": self.bitstring,
            "unresolved": list(self.unresolved),
            "reference_index": self.reference_index,
            "mode": self.mode,
        }

    @classmethod
    def from_bitstring(cls, bits: str, reference_index: int = 0) -> "SpinAssignment":
        table = {"0": 1, "1": -1}
        return cls(tuple(table[b] for b in bits), reference_index)


def _relative(theta, ref):
    th = np.asarray(theta, dtype=float)
    if not 0 <= ref < th.size:
        raise IndexError(f"reference index {ref} out of range")
    return np.remainder(th - th[ref], TWO_PI)


def binarize(theta, ref: int = 0, tol: float = DEFAULT_TOL) -> SpinAssignment:
    if not 0 < tol < math.pi / 2:
        raise ValueError("tol must lie in (0, pi/2)")
    rel = _relative(theta, ref)
    c = np.cos(rel)
    spins = np.where(angular_distance(rel, 0.0) < angular_distance(rel, math.pi), 1, -1)
    spins[ref] = 1
    unresolved = np.flatnonzero(np.abs(c) < math.cos(math.pi / 2 - tol))
    return SpinAssignment(tuple(int(s) for s in spins), ref, tuple(int(i) for i in unresolved))


def ternarize(theta, ref: int = 0, tol: float = DEFAULT_TOL) -> SpinAssignment:
    """Snap relative phases to {0, 2pi/3, 4pi/3} -> spins {+1, 0, -1}."""
    if not 0 < tol < math.pi / 3:
        raise ValueError("tol must lie in (0, pi/3)")
    rel = _relative(theta, ref)
    locks = np.array([0.0, TWO_PI / 3, 2 * TWO_PI / 3])
    d = angular_distance(rel[:, None], locks[None, :])
    k = np.argmin(d, axis=1)
    spins = np.array([1, 0, -1])[k]
    spins[ref] = 1
    unresolved = np.flatnonzero(d.min(axis=1) > math.pi / 3 - tol)
    return SpinAssignment(tuple(int(s) for s in spins), ref, tuple(int(i) for i in unresolved), "ternary")


def phase_detector_emulation(theta_i: float, theta_ref: float, periods: int = 3,
                             samples_per_period: int = 64) -> float:
    """Ideal multiplier + clamped inverting integrator, output in volts.

    The two unit sinusoids are multiplied and integrated over whole periods
    (unit period); the inverted integral is clamped to [0, 4.7] V.
    """
    if periods < 1:
        raise ValueError("periods must be >= 1")
    n = periods * samples_per_period
    t = np.arange(n) / samples_per_period
    w = TWO_PI * t
    prod = np.sin(w + theta_i) * np.sin(w + theta_ref)
    integral = prod.sum() / samples_per_period
    return float(np.clip(-DETECTOR_GAIN * integral, 0.0, DETECTOR_CLAMP))
