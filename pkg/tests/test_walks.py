from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import connected_graphs
from hitwalk import graphs as G
from hitwalk.errors import IndexOutOfRange, InputError, SingularMatrix, WalkLimitExceeded
from hitwalk.verification import family_suite
from hitwalk.walks import (
    absorbing_hitting_times,
    delete_index,
    first_step_residual,
    hit_full,
    hit_monte_carlo,
    hitting_matrix,
    hitting_vector,
    transition_matrix,
    transition_merw,
    transition_simple,
)
from hitwalk.partitions import hit_quotient
from oracles import exact_hitting_times, merw_by_definition, merw_hitting_mp

FAMILIES = family_suite()
REG_OR_BIREG = [(n, g) for n, g in FAMILIES if g.is_regular() or g.is_biregular()]


def test_transition_examples():
    assert transition_simple(G.complete(2)).matrix.tolist() == [[0, 1], [1, 0]]
    T = transition_simple(G.cycle(3)).matrix
    assert np.allclose(T, (np.ones((3, 3)) - np.eye(3)) / 2)


@pytest.mark.parametrize("walk", ["simple", "merw"])
def test_star_transition(walk):
    T = transition_matrix(G.star(3), walk).matrix
    assert np.allclose(T[:, 0], [0, 1 / 3, 1 / 3, 1 / 3], atol=1e-12)
    for j in (1, 2, 3):
        assert np.allclose(T[:, j], [1, 0, 0, 0], atol=1e-12)


def test_merw_matches_definition():
    for g in (G.path(5), G.wheel(5), G.cone(G.petersen())):
        assert np.allclose(transition_merw(g).matrix, merw_by_definition(g.adj), atol=1e-10)


def test_unknown_walk():
    with pytest.raises(InputError):
        transition_matrix(G.cycle(3), "lazy")


def test_hitting_vector_examples():
    assert hitting_vector([[0.5]]).tolist() == [2]
    assert hitting_vector([[0.0]]).tolist() == [1]
    T = transition_simple(G.complete(2)).matrix
    assert hitting_vector(delete_index(T, 0)).tolist() == [1]


def test_hitting_vector_singular():
    with pytest.raises(SingularMatrix):
        hitting_vector([[1.0]])


def test_hit_full_examples():
    assert hit_full(G.complete(2), 0).times.tolist() == [0, 1]
    assert hit_full(G.cycle(5), 0).times[1] == pytest.approx(4, abs=1e-12)
    assert hit_full(G.hypercube(3), 0).times[7] == pytest.approx(10, abs=1e-12)


def test_q3_oracle_exact():
    exact = exact_hitting_times(G.hypercube(3).adj.astype(int).tolist(), 0)
    assert exact[7] == Fraction(10) and exact[1] == Fraction(7) and exact[3] == Fraction(9)


@pytest.mark.parametrize("g", [G.path(5), G.star(4), G.wheel(5), G.complete_bipartite(2, 3),
                               G.build_graph([(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)], 5)])
def test_hit_full_matches_rational_oracle(g):
    adj = g.adj.astype(int).tolist()
    for v in range(g.n):
        exact = [float(x) for x in exact_hitting_times(adj, v)]
        assert np.allclose(hit_full(g, v).times, exact, rtol=0, atol=1e-10)


def test_hit_full_single_vertex():
    assert hit_full(G.complete(1), 0).times.tolist() == [0]


def lollipop(clique, tail):
    n = clique + tail
    A = np.zeros((n, n))
    A[:clique, :clique] = 1 - np.eye(clique)
    for u in range(clique - 1, n - 1):
        A[u, u + 1] = A[u + 1, u] = 1
    return G.Graph(A)


def test_merw_long_hitting_times_high_precision():
    # MERW rarely enters a low-weight tail, so hitting its end takes ~2e6 steps
    g = lollipop(6, 4)
    ref = merw_hitting_mp(g.adj, g.n - 1)
    assert ref.max() > 1e6
    for times in (hit_full(g, g.n - 1, "merw").times, hit_quotient(g, g.n - 1, "merw").times):
        assert np.abs(times - ref).max() <= 1e-12 * ref.max()
    g = G.random_connected(30, 0.117, 20240608)
    ref = merw_hitting_mp(g.adj, 15)
    assert ref.max() > 1e4
    assert np.abs(hit_full(g, 15, "merw").times - ref).max() <= 1e-8
    assert np.abs(hit_quotient(g, 15, "merw").times - ref).max() <= 1e-8


def test_absorbing_times_match_hitting_vector():
    T = transition_matrix(G.petersen()).matrix
    times = absorbing_hitting_times(T, 3)
    assert times[3] == 0
    assert np.abs(np.delete(times, 3) - hitting_vector(delete_index(T, 3))).max() <= 1e-12


def test_hit_full_bad_target():
    with pytest.raises(IndexOutOfRange):
        hit_full(G.cycle(4), 4)


def test_hitting_matrix_layout():
    g = G.path(3)
    H = hitting_matrix(g)
    assert H[0, 2] == pytest.approx(4)  # from vertex 2 to vertex 0
    assert H[1, 0] == pytest.approx(1)


@given(connected_graphs(max_n=12), st.sampled_from(["simple", "merw"]), st.data())
def test_first_step_consistency(g, walk, data):
    v = data.draw(st.integers(0, g.n - 1))
    rep = hit_full(g, v, walk)
    assert rep.times[v] == 0.0
    T = transition_matrix(g, walk).matrix
    assert first_step_residual(T, v, rep.times) <= 1e-8
    assert rep.residual <= 1e-8


@given(connected_graphs(max_n=12), st.sampled_from(["simple", "merw"]))
def test_column_stochastic(g, walk):
    assert transition_matrix(g, walk).column_sum_error() <= 1e-12


@given(connected_graphs(max_n=9), st.data())
def test_simple_matches_rational_oracle(g, data):
    v = data.draw(st.integers(0, g.n - 1))
    exact = np.array([float(x) for x in exact_hitting_times(g.adj.astype(int).tolist(), v)])
    assert np.abs(hit_full(g, v).times - exact).max() <= 1e-8 * max(1, exact.max())


@pytest.mark.parametrize("name, g", REG_OR_BIREG, ids=[n for n, _ in REG_OR_BIREG])
def test_merw_equals_simple_on_regular_and_biregular(name, g):
    Ts, Tm = transition_simple(g).matrix, transition_merw(g).matrix
    assert np.abs(Tm - Ts).sum(axis=1).max() <= 1e-10
    assert np.abs(hitting_matrix(g, "simple") - hitting_matrix(g, "merw")).max() <= 1e-8


def test_mc_deterministic_chain():
    rep = hit_monte_carlo(G.complete(2), 0, 1, samples=1000, seed=5)
    assert rep.value == 1.0 and rep.stderr == 0.0


def test_mc_reproducible_and_seed_sensitive():
    g = G.petersen()
    a = hit_monte_carlo(g, 0, 1, samples=3000, seed=11)
    b = hit_monte_carlo(g, 0, 1, samples=3000, seed=11)
    c = hit_monte_carlo(g, 0, 1, samples=3000, seed=12)
    assert a.value == b.value and a.stderr == b.stderr
    assert a.value != c.value
    assert a.rng and a.seed == 11 and a.samples == 3000


def test_mc_single_sample_has_no_stderr():
    rep = hit_monte_carlo(G.cycle(5), 0, 2, samples=1, seed=0)
    assert np.isnan(rep.stderr)


def test_mc_source_is_target():
    rep = hit_monte_carlo(G.cycle(5), 3, 3, samples=10, seed=0)
    assert rep.value == 0.0


def test_mc_errors():
    with pytest.raises(InputError):
        hit_monte_carlo(G.cycle(5), 0, 1, samples=0)
    with pytest.raises(WalkLimitExceeded):
        hit_monte_carlo(G.path(30), 0, 29, samples=20, seed=0, max_steps=5)


@pytest.mark.parametrize("g, v, u, exact", [(G.cycle(5), 0, 1, 4.0), (G.petersen(), 0, 1, 9.0),
                                            (G.hypercube(3), 0, 7, 10.0)])
def test_mc_within_four_stderr(g, v, u, exact):
    rep = hit_monte_carlo(g, v, u, samples=100_000, seed=2024)
    assert abs(rep.value - exact) <= 4 * rep.stderr


def test_mc_merw_on_irregular_graph():
    g = G.wheel(5)
    exact = hit_full(g, 5, "merw").times[0]
    rep = hit_monte_carlo(g, 5, 0, "merw", samples=100_000, seed=9)
    assert abs(rep.value - exact) <= 4 * rep.stderr


def test_mc_coverage_over_families():
    """At least 95% of (graph, pair) trials land within 4 standard errors."""
    hits = total = 0
    for name, g in FAMILIES:
        if g.n < 2:
            continue
        exact = hit_full(g, 0).times
        u = int(np.argmax(exact))
        rep = hit_monte_carlo(g, 0, u, samples=100_000, seed=total)
        hits += abs(rep.value - exact[u]) <= 4 * rep.stderr
        total += 1
    assert hits >= 0.95 * total
