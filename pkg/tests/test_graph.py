import numpy as np
import pytest
from hypothesis import given, strategies as st

from oscising.graph import (EdgeListError, ProblemGraph, check_coupling, inverse_permutation,
                            named_graph, parse_edge_list, permute, quantize_weights,
                            random_graph, serialize_edge_list, to_coupling)

HOUSE_TEXT = "5 6\n1 2 1\n2 3 1\n3 4 1\n4 5 1\n5 1 1\n2 5 1"

# adjacency of the house graph, 0-based
HOUSE_ADJ = np.array([
    [0, 1, 0, 0, 1],
    [1, 0, 1, 0, 1],
    [0, 1, 0, 1, 0],
    [0, 0, 1, 0, 1],
    [1, 1, 0, 1, 0],
], dtype=float)


def test_parse_single_edge():
    g = parse_edge_list("2 1\n1 2 1")
    assert g == ProblemGraph(2, ((0, 1, 1.0),))


def test_parse_house_matches_matrix():
    g = parse_edge_list(HOUSE_TEXT)
    assert g.n == 5 and g.m == 6
    np.testing.assert_array_equal(g.adjacency(), HOUSE_ADJ)
    assert g == named_graph("house")


def test_weight_defaults_to_one():
    assert parse_edge_list("3 2\n1 2\n2 3 2.5").edges == ((0, 1, 1.0), (1, 2, 2.5))


def test_negative_weights_accepted():
    assert parse_edge_list("2 1\n1 2 -3").edges == ((0, 1, -3.0),)


@pytest.mark.parametrize("text, line, fragment", [
    ("2 1\n1 3 1", 2, "out of range"),
    ("3 2\n1 2\n2 1", 3, "duplicate"),
    ("2 1\n1 1", 2, "self-loop"),
    ("3 2\n1 2", 2, "declares 2"),
    ("3 1\n1 2\n2 3", 3, "declares 1"),
    ("x y\n", 1, "integers"),
    ("3\n", 1, "header"),
    ("", 1, "header"),
    ("2 1\n1 2 abc", 2, "weight"),
    ("2 1\n1 2 nan", 2, "finite"),
    ("3 1\n1 2 1 4", 2, "edge line"),
])
def test_parse_errors_carry_line(text, line, fragment):
    with pytest.raises(EdgeListError) as exc:
        parse_edge_list(text)
    assert exc.value.line == line
    assert fragment in str(exc.value)
    assert f"line {line}" in str(exc.value)


def test_blank_lines_keep_physical_numbering():
    with pytest.raises(EdgeListError) as exc:
        parse_edge_list("2 1\n\n1 5")
    assert exc.value.line == 3


def test_serialize_examples():
    assert serialize_edge_list(ProblemGraph(2, ((0, 1, 1.0),))) == "2 1\n1 2 1"
    assert serialize_edge_list(ProblemGraph(3, ())) == "3 0"
    text = serialize_edge_list(named_graph("house"))
    assert len(text.split("\n")) == 7
    assert parse_edge_list(text) == named_graph("house")


def test_serialize_keeps_fractional_weights():
    g = ProblemGraph(3, ((0, 1, 0.1), (1, 2, -2.0)))
    assert parse_edge_list(serialize_edge_list(g)) == g


def test_graph_validation():
    with pytest.raises(ValueError):
        ProblemGraph(2, ((0, 2, 1.0),))
    with pytest.raises(ValueError):
        ProblemGraph(2, ((1, 1, 1.0),))
    with pytest.raises(ValueError):
        ProblemGraph(2, ((0, 1, 1.0), (1, 0, 2.0)))
    with pytest.raises(ValueError):
        ProblemGraph(2, ((0, 1, float("inf")),))


def test_named_graphs():
    r8 = named_graph("ring(8)")
    assert r8.n == 8 and r8.m == 8 and set(r8.degrees()) == {2}
    assert named_graph("ring8") == r8 == named_graph("ring-8")
    assert named_graph("triangle") == named_graph("ring(3)")
    assert named_graph("complete(4)").m == 6
    assert named_graph("path(4)").m == 3
    with pytest.raises(ValueError):
        named_graph("petersen")


def test_permute_identity_and_inverse(rng):
    g = named_graph("house")
    assert permute(g, range(5)) == g
    p = list(rng.permutation(5))
    assert permute(permute(g, p), inverse_permutation(p)) == g
    with pytest.raises(ValueError):
        permute(g, [0, 0, 1, 2, 3])


def test_to_coupling_house():
    J = to_coupling(named_graph("house"), 1.0)
    np.testing.assert_array_equal(J, -HOUSE_ADJ)
    check_coupling(J)
    assert not np.signbit(J[J == 0]).any()


def test_to_coupling_scaling_and_linearity(rng):
    g = random_graph(7, 0.5, rng)
    J = to_coupling(g, 0.2)
    assert set(np.unique(J)) <= {0.0, -0.2}
    np.testing.assert_array_equal(to_coupling(g, 0.4), 2 * J)
    with pytest.raises(ValueError):
        to_coupling(g, 0.0)


def test_quantize_examples():
    J = to_coupling(named_graph("house"), 0.2)
    q10 = quantize_weights(J, 10)
    assert np.abs(q10 - J).max() <= 0.4 / 1024
    q1 = quantize_weights(to_coupling(random_graph(6, 0.5, np.random.default_rng(3),
                                                   weights=[0.3, 1.0]), 1.0), 1)
    assert set(np.unique(q1)) <= {-1.0, 0.0}
    zero = np.zeros((3, 3))
    assert quantize_weights(zero, 4) is zero
    with pytest.raises(ValueError):
        quantize_weights(J, 0)


def test_quantize_step_is_one_lsb():
    J = np.array([[0.0, -1.0, 0.26], [-1.0, 0.0, 0.5], [0.26, 0.5, 0.0]])
    q = quantize_weights(J, 2)  # step 0.5
    np.testing.assert_array_equal(q, [[0, -1, 0.5], [-1, 0, 0.5], [0.5, 0.5, 0]])


# -- properties ---------------------------------------------------------------

@st.composite
def graphs(draw, max_n=9, weights=False):
    n = draw(st.integers(1, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True) if pairs else st.just([]))
    wstrat = (st.floats(-5, 5, allow_nan=False).filter(lambda w: w != 0) if weights
              else st.just(1.0))
    return ProblemGraph(n, tuple((i, j, draw(wstrat)) for i, j in chosen))


@given(graphs(weights=True))
def test_roundtrip(g):
    assert parse_edge_list(serialize_edge_list(g)) == g


@given(graphs(), st.randoms())
def test_permute_preserves_degrees(g, rnd):
    p = list(range(g.n))
    rnd.shuffle(p)
    h = permute(g, p)
    assert sorted(h.degrees()) == sorted(g.degrees())
    assert permute(h, inverse_permutation(p)) == g


@given(graphs(weights=True), st.floats(0.01, 10))
def test_coupling_pattern(g, c):
    J = to_coupling(g, c)
    check_coupling(J)
    np.testing.assert_array_equal(J != 0, g.adjacency() != 0)


@given(graphs(weights=True), st.integers(1, 16))
def test_quantize_properties(g, bits):
    J = to_coupling(g, 1.0)
    q = quantize_weights(J, bits)
    check_coupling(q)
    np.testing.assert_array_equal(quantize_weights(q, bits), q)
    if J.any():
        step = 2 * np.abs(J).max() / 2**bits
        assert np.abs(q - J).max() <= step / 2 + 1e-12
