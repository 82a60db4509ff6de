import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import FIXTURES, connected_graphs
from hitwalk import graphs as G
from hitwalk.errors import InputError
from hitwalk.numerics import perron
from hitwalk.partitions import (
    Partition,
    Witness,
    check_equitable,
    check_partition,
    check_weight_equitable,
    coarsest_stabilized,
    hit_quotient,
    hit_via_quotient,
    quotient_hitting_times,
    refine,
    weight_quotient_from_equitable,
)
from hitwalk.walks import hit_full

FIG1 = [[0, 1, 0, 0], [3, 0, 2, 0], [0, 2, 0, 3], [0, 0, 1, 0]]
Q3_BLOCKS = ((0,), (1, 2, 4), (3, 5, 6), (7,))


def test_partition_validation():
    with pytest.raises(InputError):
        Partition(((0, 1), (1, 2)))
    with pytest.raises(InputError):
        Partition(((0,), (2,)))
    with pytest.raises(InputError):
        Partition(((0, 1), (2,)), center=0)
    p = Partition(((2, 0), (), (1,)))
    assert p.blocks == ((0, 2), (1,))
    assert Partition.from_labels([1, 0, 1]).blocks == ((1,), (0, 2))
    assert Partition.from_dict(p.to_dict()) == p


def test_q3_fig1_quotient():
    Q = check_equitable(G.hypercube(3), Partition(Q3_BLOCKS, center=0))
    assert Q.matrix.tolist() == FIG1
    assert Q.block_sizes == (1, 3, 3, 1)


def test_singleton_partition_gives_adjacency():
    g = G.petersen()
    Q = check_equitable(g, Partition(tuple((v,) for v in range(g.n))))
    assert np.array_equal(Q.matrix, g.adj)


def test_c4_opposite_pairs_are_equitable():
    Q = check_equitable(G.cycle(4), Partition(((0, 1), (2, 3))))
    assert Q.matrix.tolist() == [[1, 1], [1, 1]]


def test_non_equitable_witness():
    w = check_equitable(G.cycle(4), Partition(((0,), (1, 2, 3)), center=0))
    assert isinstance(w, Witness)
    assert w.data["block"] == 1 and {w.data["u"], w.data["v"]} <= {1, 2, 3}
    assert w.data["count_u"] != w.data["count_v"]


def test_cone_c4_weight_quotient():
    g = G.cone(G.cycle(4))
    lam = 1 + math.sqrt(5)
    Q = check_weight_equitable(g, Partition(((4,), (0, 1, 2, 3)), center=4))
    assert np.allclose(Q.matrix, [[0, lam - 2], [lam, 2]], atol=1e-12)
    assert np.allclose(Q.matrix.sum(axis=0), lam, atol=1e-12)


def test_regular_weight_quotient_equals_equitable():
    g = G.petersen()
    p = coarsest_stabilized(g, 0)
    assert np.allclose(check_weight_equitable(g, p).matrix, check_equitable(g, p).matrix, atol=1e-12)


@pytest.mark.parametrize("g", [G.star(4), G.wheel(6), G.path(5), G.complete_bipartite(2, 4),
                               G.subdivision(G.complete(4))])
def test_scaled_quotient_relation(g):
    p_data = perron(g)
    for o in range(g.n):
        part = coarsest_stabilized(g, o)
        Q = check_equitable(g, part, p_data)
        # nu is constant on every block of an equitable partition
        for b, val in zip(part.blocks, Q.nu_block):
            assert np.allclose(p_data.nu[list(b)], val, atol=1e-12)
        W = check_weight_equitable(g, part, p_data)
        nu = Q.nu_block
        expected = Q.matrix * nu[:, None] / nu[None, :]
        assert np.abs(W.matrix - expected).max() <= 1e-9
        assert np.allclose(weight_quotient_from_equitable(Q).matrix, expected)


def test_coarsest_examples():
    assert coarsest_stabilized(G.hypercube(3), 0).blocks == Q3_BLOCKS
    for o in range(5):
        part = coarsest_stabilized(G.complete(5), o)
        assert part.blocks == ((o,), tuple(v for v in range(5) if v != o))
    assert coarsest_stabilized(G.path(3), 1).blocks == ((1,), (0, 2))
    assert coarsest_stabilized(G.path(3), 0).blocks == ((0,), (1,), (2,))


def test_hit_via_quotient_examples():
    assert hit_via_quotient(np.array(FIG1, float), 3) == pytest.approx(10, abs=1e-12)
    B = np.array([[0, 1, 0], [3, 0, 1], [0, 2, 2]], float)
    assert hit_via_quotient(B, 1) == pytest.approx(9, abs=1e-12)
    assert hit_via_quotient(B, 2) == pytest.approx(12, abs=1e-12)
    lam = 1 + math.sqrt(5)
    Bs = np.array([[0, lam - 2], [lam, 2]])
    assert hit_via_quotient(Bs, 1) == pytest.approx(lam**2 / 4, abs=1e-12)
    with pytest.raises(InputError):
        hit_via_quotient(B, 0)


def test_hit_quotient_report():
    rep = hit_quotient(G.hypercube(3), 0)
    assert rep.method == "quotient" and rep.residual <= 1e-12
    assert rep.times.tolist() == pytest.approx([0, 7, 7, 9, 7, 9, 9, 10])
    assert rep.extra["partition"]["blocks"] == [list(b) for b in Q3_BLOCKS]
    with pytest.raises(InputError):
        hit_quotient(G.hypercube(3), 0, "lazy")


def test_unknown_kind():
    with pytest.raises(InputError):
        check_partition(G.cycle(4), Partition(((0, 1, 2, 3),)), "fuzzy")
    with pytest.raises(InputError):
        refine(G.cycle(4), Partition(((0, 1, 2, 3),)), "fuzzy")
    with pytest.raises(InputError):
        check_equitable(G.cycle(4), Partition(((0, 1, 2),)))


def test_weight_partition_coarser_than_equitable_fixture():
    d = json.loads((FIXTURES / "weight_not_equitable.json").read_text())
    g = G.from_dict(d)
    claimed = Partition.from_dict(d["partition"])
    o = claimed.center
    assert isinstance(check_equitable(g, claimed), Witness)
    W = check_weight_equitable(g, claimed)
    assert not isinstance(W, Witness)
    assert np.allclose(W.matrix.sum(axis=0), perron(g).lambda1)
    assert coarsest_stabilized(g, o, "weight") == claimed
    assert len(coarsest_stabilized(g, o, "equitable")) > len(claimed)
    assert np.allclose(hit_quotient(g, o, "merw").times, hit_full(g, o, "merw").times, atol=1e-8)


@given(connected_graphs(max_n=14), st.sampled_from(["equitable", "weight"]), st.data())
def test_refinement_idempotent(g, kind, data):
    o = data.draw(st.integers(0, g.n - 1))
    p_data = perron(g)
    part = coarsest_stabilized(g, o, kind, p_data)
    assert refine(g, part, kind, p_data) == part
    assert part.blocks[0] == (o,)
    assert not isinstance(check_partition(g, part, kind, p_data), Witness)


@given(connected_graphs(max_n=14), st.data())
def test_equitable_is_weight_equitable_and_finer(g, data):
    o = data.draw(st.integers(0, g.n - 1))
    p_data = perron(g)
    e = coarsest_stabilized(g, o, "equitable")
    assert not isinstance(check_weight_equitable(g, e, p_data), Witness)
    w_index = coarsest_stabilized(g, o, "weight", p_data).block_index()
    for b in e.blocks:
        assert len({w_index[v] for v in b}) == 1


@given(connected_graphs(max_n=14), st.data())
def test_blocks_respect_neighbourhood_of_center(g, data):
    o = data.draw(st.integers(0, g.n - 1))
    nbrs = set(g.neighbors(o).tolist())
    for b in coarsest_stabilized(g, o).blocks[1:]:
        assert set(b) <= nbrs or not (set(b) & nbrs)


@given(connected_graphs(max_n=16), st.sampled_from(["simple", "merw"]), st.data())
def test_quotient_hitting_matches_full(g, walk, data):
    o = data.draw(st.integers(0, g.n - 1))
    q = hit_quotient(g, o, walk).times
    f = hit_full(g, o, walk).times
    assert np.abs(q - f).max() <= 1e-8


def test_quotient_hitting_times_shape():
    assert quotient_hitting_times(np.array([[0.0]])).tolist() == [0]
