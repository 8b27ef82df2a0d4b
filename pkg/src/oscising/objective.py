"""Ising energy, cut values and the exhaustive max-cut oracle."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .graph import ProblemGraph, to_coupling
from .readout import SpinAssignment

MAX_ORACLE_N = 26


class OracleSizeError(ValueError):
    pass


def _binary_spins(spins) -> np.ndarray:
    if isinstance(spins, SpinAssignment):
        if spins.mode != "binary":
            raise ValueError("energy and cut are defined for binary spins only")
        spins = spins.spins
    s = np.asarray(spins, dtype=int)
    if not np.all((s == 1) | (s == -1)):
        raise ValueError("spins must be +1 or -1")
    return s


@dataclass(frozen=True)
class CutSolution:
    spins: SpinAssignment
    cut_value: float
    ising_energy: float
    optimal: bool = False

    @property
    def bitstring(self) -> str:
        return self.spins.bitstring

    def to_dict(self) -> dict:
        a, b = self.spins.partition()
        return {
            "bitstring": self.bitstring,
            "sets": [a, b],
            "cut_value": self.cut_value,
            "ising_energy": self.ising_energy,
            "optimal": self.optimal,
        }


def ising_energy(spins, J: np.ndarray, hfield: float = 0.0) -> float:
    """H = -sum_{i<j} J_ij s_i s_j - hfield * sum_j s_j."""
    s = _binary_spins(spins)
    J = np.asarray(J, dtype=float)
    if J.shape != (s.size, s.size):
        raise ValueError(f"coupling shape {J.shape} does not match {s.size} spins")
    pair = np.triu(J, k=1)
    return float(-(s @ pair @ s) - hfield * s.sum())


def cut_value(spins, g: ProblemGraph) -> float:
    s = _binary_spins(spins)
    if s.size != g.n:
        raise ValueError(f"{s.size} spins for a {g.n}-vertex graph")
    return float(sum(w for i, j, w in g.edges if s[i] != s[j]))


def total_weight(g: ProblemGraph) -> float:
    return float(sum(w for _, _, w in g.edges))


def evaluate(spins: SpinAssignment, g: ProblemGraph, optimal: bool = False) -> CutSolution:
    J = to_coupling(g, 1.0)
    return CutSolution(spins, cut_value(spins, g), ising_energy(spins, J), optimal)


def _decode(code: int, n: int) -> SpinAssignment:
    return SpinAssignment(tuple(-1 if (code >> (n - 1 - i)) & 1 else 1 for i in range(n)))


def brute_force_maxcut(g: ProblemGraph) -> CutSolution:
    """Exact max cut over all 2**(n-1) bipartitions with vertex 0 pinned.

    Ties go to the lexicographically smallest bitstring.
    """
    if g.n > MAX_ORACLE_N:
        raise OracleSizeError(f"oracle enumeration limited to n <= {MAX_ORACLE_N}, got {g.n}")
    indptr, indices, weights = g.csr()
    tol = 1e-9 * (1.0 + float(np.abs(weights).sum()))
    code = int(_kernels.maxcut_enumerate(g.n, indptr, indices, weights, tol))
    return evaluate(_decode(code, g.n), g, optimal=True)


@lru_cache(maxsize=256)
def cached_optimum(g: ProblemGraph) -> CutSolution:
    return brute_force_maxcut(g)
