"""Max-cut problem instances, edge-list I/O and coupling-matrix construction.

Vertices are 0-based internally. The edge-list text format is G-set style::

    n m
    i j [w]      (m lines, 1-based vertex labels, weight defaults to 1)

Coupling matrices are plain read-only ``numpy`` arrays: symmetric, zero
diagonal, ``J[i, j] = -c * w_ij`` for every edge.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

Edge = tuple[int, int, float]


class EdgeListError(ValueError):
    """Malformed edge-list text; ``line`` is the 1-based offending line."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class ProblemGraph:
    """Weighted simple undirected graph.

    Edges are normalized on construction to ``(min, max, w)`` and sorted, so
    two graphs with the same edge set compare equal regardless of input order.
    """

    n: int
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"vertex count must be a positive integer, got {self.n!r}")
        norm = []
        seen = set()
        for e in self.edges:
            i, j, w = int(e[0]), int(e[1]), float(e[2])
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge ({i}, {j}) out of range for n={self.n}")
            if i == j:
                raise ValueError(f"self-loop on vertex {i}")
            if not math.isfinite(w):
                raise ValueError(f"non-finite weight on edge ({i}, {j})")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            norm.append((key[0], key[1], w))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @property
    def m(self) -> int:
        return len(self.edges)

    def adjacency(self) -> np.ndarray:
        """Dense symmetric weight matrix."""
        a = np.zeros((self.n, self.n))
        for i, j, w in self.edges:
            a[i, j] = a[j, i] = w
        return a

    def degrees(self) -> np.ndarray:
        d = np.zeros(self.n, dtype=int)
        for i, j, _ in self.edges:
            d[i] += 1
            d[j] += 1
        return d

    def csr(self):
        """(indptr, indices, weights) of the symmetric adjacency."""
        nbrs: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for i, j, w in self.edges:
            nbrs[i].append((j, w))
            nbrs[j].append((i, w))
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(x) for x in nbrs])
        indices = np.array([u for x in nbrs for u, _ in x], dtype=np.int64)
        weights = np.array([w for x in nbrs for _, w in x], dtype=np.float64)
        return indptr, indices, weights


def parse_edge_list(text: str) -> ProblemGraph:
    """Parse G-set style edge-list text. Blank lines are skipped."""
    lines = text.split("\n")
    rows = [(k + 1, ln.split()) for k, ln in enumerate(lines) if ln.strip()]
    if not rows:
        raise EdgeListError("missing 'n m' header", 1)
    hline, head = rows[0]
    if len(head) != 2:
        raise EdgeListError("header must be 'n m'", hline)
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise EdgeListError("header fields must be integers", hline) from None
    if n < 1 or m < 0:
        raise EdgeListError("header requires n >= 1 and m >= 0", hline)

    body = rows[1:]
    if len(body) != m:
        where = body[m][0] if len(body) > m else (body[-1][0] if body else hline)
        raise EdgeListError(f"header declares {m} edges, found {len(body)}", where)

    edges = []
    seen = set()
    for lineno, fields in body:
        if len(fields) not in (2, 3):
            raise EdgeListError("edge line must be 'i j [w]'", lineno)
        try:
            i, j = int(fields[0]), int(fields[1])
        except ValueError:
            raise EdgeListError("vertex labels must be integers", lineno) from None
        try:
            w = float(fields[2]) if len(fields) == 3 else 1.0
        except ValueError:
            raise EdgeListError(f"bad weight {fields[2]!r}", lineno) from None
        if not math.isfinite(w):
            raise EdgeListError("weight must be finite", lineno)
        for v in (i, j):
            if not 1 <= v <= n:
                raise EdgeListError(f"vertex {v} out of range [1, {n}]", lineno)
        if i == j:
            raise EdgeListError(f"self-loop on vertex {i}", lineno)
        key = (min(i, j), max(i, j))
        if key in seen:
            raise EdgeListError(f"duplicate edge {key[0]}-{key[1]}", lineno)
        seen.add(key)
        edges.append((i - 1, j - 1, w))
    return ProblemGraph(n, tuple(edges))


def _fmt_weight(w: float) -> str:
    if float(w).is_integer() and abs(w) < 1e15:
        return str(int(w))
    return repr(float(w))


def serialize_edge_list(g: ProblemGraph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines += [f"{i + 1} {j + 1} {_fmt_weight(w)}" for i, j, w in g.edges]
    return "\n".join(lines)


def _cycle(k: int) -> ProblemGraph:
    if k < 3:
        raise ValueError("ring needs at least 3 vertices")
    return ProblemGraph(k, tuple((i, (i + 1) % k, 1.0) for i in range(k)))


_HOUSE = ((1, 2), (2, 3), (3, 4), (4, 5), (5, 1), (2, 5))
_SIZED = re.compile(r"^(ring|complete|path)\s*[\(\-_:]?\s*(\d+)\s*\)?$")


def named_graph(name: str) -> ProblemGraph:
    """Canonical instances: ``house``, ``triangle``, ``ring(k)``, ``complete(k)``,
    ``path(k)``. Sized names also accept ``ring8``, ``ring-8``, ``ring:8``."""
    key = name.strip().lower()
    if key == "house":
        return ProblemGraph(5, tuple((i - 1, j - 1, 1.0) for i, j in _HOUSE))
    if key == "triangle":
        return _cycle(3)
    match = _SIZED.match(key)
    if match is None:
        raise ValueError(f"unknown graph name {name!r}")
    kind, k = match.group(1), int(match.group(2))
    if k < 1:
        raise ValueError("graph size must be positive")
    if kind == "ring":
        return _cycle(k)
    if kind == "complete":
        return ProblemGraph(k, tuple((i, j, 1.0) for i in range(k) for j in range(i + 1, k)))
    return ProblemGraph(k, tuple((i, i + 1, 1.0) for i in range(k - 1)))


def random_graph(n: int, p: float, rng: np.random.Generator, weights: Sequence[float] | None = None) -> ProblemGraph:
    """Erdos-Renyi G(n, p); unit weights unless ``weights`` is a pool to sample from."""
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                w = 1.0 if weights is None else float(rng.choice(weights))
                edges.append((i, j, w))
    return ProblemGraph(n, tuple(edges))


def _check_perm(perm: Iterable[int], n: int) -> list[int]:
    perm = [int(x) for x in perm]
    if sorted(perm) != list(range(n)):
        raise ValueError(f"not a permutation of 0..{n - 1}: {perm}")
    return perm


def permute(g: ProblemGraph, perm: Sequence[int]) -> ProblemGraph:
    """Relabel vertex ``i`` as ``perm[i]``."""
    p = _check_perm(perm, g.n)
    return ProblemGraph(g.n, tuple((p[i], p[j], w) for i, j, w in g.edges))


def inverse_permutation(perm: Sequence[int]) -> list[int]:
    p = _check_perm(perm, len(perm))
    inv = [0] * len(p)
    for i, v in enumerate(p):
        inv[v] = i
    return inv


def to_coupling(g: ProblemGraph, c: float) -> np.ndarray:
    """Antiferromagnetic coupling ``J = -c * mu`` for every edge."""
    if not c > 0:
        raise ValueError(f"coupling strength must be positive, got {c}")
    a = g.adjacency()
    J = np.where(a != 0.0, -c * a, 0.0)
    J.setflags(write=False)
    return J


def check_coupling(J: np.ndarray) -> None:
    J = np.asarray(J)
    if J.ndim != 2 or J.shape[0] != J.shape[1]:
        raise ValueError(f"coupling matrix must be square, got shape {J.shape}")
    if not np.array_equal(J, J.T):
        raise ValueError("coupling matrix must be symmetric")
    if np.any(np.diag(J) != 0):
        raise ValueError("coupling matrix must have zero diagonal")


def quantize_weights(J: np.ndarray, bits: int) -> np.ndarray:
    """Round entries to a sign-magnitude grid with step ``2*max|J| / 2**bits``.

    The grid contains 0 and both +-max|J|, so it is symmetric and the largest
    entries survive unchanged; quantizing twice is the same as once.
    """
    if not 1 <= bits <= 16:
        raise ValueError(f"bits must be in [1, 16], got {bits}")
    J = np.asarray(J, dtype=float)
    top = np.abs(J).max() if J.size else 0.0
    if top == 0.0:
        return J
    step = 2.0 * top / 2**bits
    q = np.clip(np.round(J / step) * step, -top, top) + 0.0
    q.setflags(write=False)
    return q
