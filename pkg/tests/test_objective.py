import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oscising.graph import ProblemGraph, named_graph, permute, random_graph, to_coupling
from oscising.objective import (MAX_ORACLE_N, OracleSizeError, brute_force_maxcut, cached_optimum,
                                cut_value, ising_energy, total_weight)
from oscising.readout import SpinAssignment

J2 = np.array([[0.0, -1.0], [-1.0, 0.0]])


def test_energy_examples():
    assert ising_energy([1, -1], J2) == -1
    assert ising_energy([1, 1], J2) == 1
    assert ising_energy([1, 1], J2, hfield=0.5) == 0


def test_energy_rejects_ternary():
    with pytest.raises(ValueError):
        ising_energy([1, 0], J2)
    with pytest.raises(ValueError):
        ising_energy(SpinAssignment((1, 0), mode="ternary"), J2)


def test_house_partition_energy():
    g = named_graph("house")
    s = SpinAssignment.from_bitstring("01010")  # {1,3,5} | {2,4}
    assert cut_value(s, g) == 5
    assert ising_energy(s, to_coupling(g, 1.0)) == -4


def test_cut_examples():
    assert cut_value([1, -1] * 4, named_graph("ring8")) == 8
    assert cut_value([1] * 5, named_graph("house")) == 0
    with pytest.raises(ValueError):
        cut_value([1, 1], named_graph("house"))


def test_total_weight():
    assert total_weight(named_graph("house")) == 6
    assert total_weight(ProblemGraph(4, ())) == 0
    assert total_weight(named_graph("ring8")) == 8


# frozen oracle outputs (lexicographic tie-break, vertex 0 pinned to '0')
@pytest.mark.parametrize("name, cut, bits", [
    ("ring8", 8, "01010101"),
    ("triangle", 2, "001"),
    ("house", 5, "00101"),
    ("complete(4)", 4, "0011"),
    ("path(5)", 4, "01010"),
])
def test_oracle_frozen(name, cut, bits):
    sol = brute_force_maxcut(named_graph(name))
    assert sol.cut_value == cut
    assert sol.bitstring == bits
    assert sol.optimal


def test_house_oracle_partitions():
    g = named_graph("house")
    sol = brute_force_maxcut(g)
    assert sol.to_dict() == {"bitstring": "00101", "sets": [[1, 2, 4], [3, 5]],
                             "cut_value": 5.0, "ising_energy": -4.0, "optimal": True}
    # the partition {1,3,5}|{2,4} is another optimum
    assert cut_value(SpinAssignment.from_bitstring("01010"), g) == sol.cut_value


def test_oracle_edge_cases():
    assert brute_force_maxcut(ProblemGraph(1, ())).bitstring == "0"
    assert brute_force_maxcut(ProblemGraph(4, ())).cut_value == 0
    assert brute_force_maxcut(ProblemGraph(4, ())).bitstring == "0000"
    with pytest.raises(OracleSizeError):
        brute_force_maxcut(named_graph(f"ring({MAX_ORACLE_N + 1})"))


def test_oracle_negative_weights():
    g = ProblemGraph(3, ((0, 1, -1.0), (1, 2, 2.0), (0, 2, 1.0)))
    sol = brute_force_maxcut(g)
    best = max(cut_value((1,) + s, g) for s in itertools.product((1, -1), repeat=2))
    assert sol.cut_value == best == 3


def test_cached_optimum_is_cached():
    g = named_graph("house")
    assert cached_optimum(g) is cached_optimum(g)


def test_oracle_beats_random_samples():
    rng = np.random.default_rng(8)
    for _ in range(5):
        n = int(rng.integers(6, 13))
        g = random_graph(n, 0.5, rng)
        best = brute_force_maxcut(g).cut_value
        spins = rng.choice([-1, 1], size=(10_000, n))
        cuts = np.zeros(len(spins))
        for i, j, w in g.edges:
            cuts += w * (spins[:, i] != spins[:, j])
        assert cuts.max() <= best


def test_oracle_permutation_invariance():
    rng = np.random.default_rng(2)
    for _ in range(5):
        g = random_graph(9, 0.4, rng)
        p = rng.permutation(9)
        assert brute_force_maxcut(permute(g, p)).cut_value == brute_force_maxcut(g).cut_value


def test_argmin_energy_equals_argmax_cut():
    g = random_graph(7, 0.5, np.random.default_rng(4))
    J = to_coupling(g, 1.0)
    assign = [np.array((1,) + s) for s in itertools.product((1, -1), repeat=6)]
    H = np.array([ising_energy(s, J) for s in assign])
    C = np.array([cut_value(s, g) for s in assign])
    assert set(np.flatnonzero(H == H.min())) == set(np.flatnonzero(C == C.max()))


@given(st.integers(2, 10), st.integers(0, 2**32 - 1), st.floats(0.1, 0.9))
def test_energy_cut_identity(n, seed, p):
    rng = np.random.default_rng(seed)
    g = random_graph(n, p, rng)
    s = rng.choice([-1, 1], size=n)
    assert abs(ising_energy(s, to_coupling(g, 1.0)) - (total_weight(g) - 2 * cut_value(s, g))) < 1e-9


@given(st.integers(2, 10), st.integers(0, 2**32 - 1))
def test_global_flip_invariance(n, seed):
    rng = np.random.default_rng(seed)
    g = random_graph(n, 0.5, rng, weights=[0.5, 1.0, 2.0])
    J = to_coupling(g, 1.0)
    s = rng.choice([-1, 1], size=n)
    assert cut_value(s, g) == cut_value(-s, g)
    assert ising_energy(s, J) == ising_energy(-s, J)
