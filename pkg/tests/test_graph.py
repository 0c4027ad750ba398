import os

import numpy as np
import pytest

import royden as R
from royden.errors import (
    DuplicateEdgeConflict,
    GraphSyntaxError,
    NegativeWeight,
    NonPositiveMeasure,
    SelfLoop,
    SizeOverflow,
    UnknownVertex,
)

from conftest import random_section


def test_build_basic_counts():
    s = R.build_section(4, [(0, 1, 1.0), (1, 2, 0.5), (2, 3, 2.0)], dirichlet=[3])
    assert s.n == 4
    assert s.adj.nnz == 6  # symmetric storage
    assert list(s.interior) == [0, 1, 2]
    assert list(s.mask) == [3]
    np.testing.assert_allclose(s.weighted_degree, [1.0, 1.5, 2.5, 2.0])


def test_build_rejects_bad_input():
    with pytest.raises(SelfLoop):
        R.build_section(2, [(0, 0, 1.0)])
    with pytest.raises(NegativeWeight):
        R.build_section(2, [(0, 1, -1.0)])
    with pytest.raises(NegativeWeight):
        R.build_section(2, [(0, 1, 0.0)])
    with pytest.raises(DuplicateEdgeConflict):
        R.build_section(2, [(0, 1, 1.0), (1, 0, 2.0)])
    with pytest.raises(NonPositiveMeasure):
        R.build_section(2, [(0, 1, 1.0)], m={0: 0.0})
    with pytest.raises(UnknownVertex):
        R.build_section(2, [(0, 5, 1.0)])


def test_duplicate_edge_same_weight_allowed():
    s = R.build_section(2, [(0, 1, 1.5), (1, 0, 1.5)])
    assert s.adj[0, 1] == 1.5


def test_vertex_cap_env(monkeypatch):
    monkeypatch.setenv("ROYDEN_VERTEX_CAP", "10")
    with pytest.raises(SizeOverflow):
        R.generate_lattice(2, 2)  # 25 vertices
    monkeypatch.delenv("ROYDEN_VERTEX_CAP")
    assert R.generate_lattice(2, 2).n == 25


def test_index_of_prefers_labels():
    s = R.generate_lattice(1, 3)  # labels are coordinates -3..3
    assert s.labels[s.index_of(0)] == 0
    assert s.index_of(-3) == 0
    assert s.index_of(3) == 6
    with pytest.raises(UnknownVertex):
        s.index_of(99)


def test_validation_report():
    s = R.build_section(5, [(0, 1, 1.0), (2, 3, 1.0)], dirichlet=[1], c={2: 1.0})
    rep = s.validate()
    assert rep.ok and not rep.issues
    assert rep.full_component_count == 3
    # {0} grounded via mask, {2,3} via killing, {4} isolated ungrounded
    assert sorted(rep.interior_component_sizes) == [1, 1, 2]
    assert sum(rep.interior_component_grounded) == 2


def test_lattice_structure():
    s = R.generate_lattice(2, 2)
    assert s.n == 25
    assert len(s.mask) == 16  # sup-norm shell
    assert len(s.interior) == 9
    origin = s.index_of((0, 0))
    row = s.adj.getrow(origin)
    assert row.nnz == 4 and np.allclose(row.data, 1.0)


def test_tree_structure():
    s = R.generate_tree(3, 3)
    # 1 + 3 + 6 + 12 vertices, leaves at depth 3 masked
    assert s.n == 22
    assert len(s.mask) == 12
    root = s.index_of("r")
    assert s.adj.getrow(root).nnz == 3
    for v in s.interior:
        if v != root:
            assert s.adj.getrow(v).nnz == 3  # parent + 2 children


def test_exhaust_nested_and_monotone():
    gen = R.lattice_generator(2)
    s3, s5 = R.exhaust(gen, 3), R.exhaust(gen, 5)
    assert s3.n < s5.n
    # interior of the smaller level embeds in the larger interior
    inner3 = {s3.labels[v] for v in s3.interior}
    inner5 = {s5.labels[v] for v in s5.interior}
    assert inner3 <= inner5


def test_generator_killing_variants():
    gen = R.tree_generator(3, c_origin=1.0, c_const=0.5)
    s = gen.section(2)
    root = s.index_of("r")
    assert s.c[root] == 1.5
    assert np.all(s.c[np.arange(s.n) != root] == 0.5)
    z = gen.with_zero_c().section(2)
    assert np.all(z.c == 0.0)
    assert gen.c_partial_sum(2) == pytest.approx(1.0 + 0.5 * s.n)


def test_parse_errors_carry_line_numbers():
    with pytest.raises(GraphSyntaxError) as err:
        R.parse_graph_file("V 2\nE 0 1 1.0\nE 0 x 1.0\n")
    assert err.value.line == 3


def test_graph_file_round_trip_random():
    rng = np.random.default_rng(7)
    for _ in range(20):
        s = random_section(rng, n_max=30, with_killing=True, with_measure=True)
        s2 = R.parse_graph_file(R.serialize_graph_file(s))
        assert R.sections_equal(s, s2)


def test_vertex_fn_round_trip():
    s = R.generate_lattice(1, 2)
    f = s.fn([0.0, 1.5, 0.0, -2.0, 0.25])
    f2 = R.parse_vertex_fn(R.serialize_vertex_fn(f), s)
    np.testing.assert_array_equal(f.values, f2.values)


def test_with_measure_replaces_only_m():
    s = R.generate_lattice(1, 2)
    s2 = R.with_measure(s, np.full(s.n, 2.0))
    assert np.all(s2.m == 2.0)
    assert s2.adj is s.adj or (s2.adj != s.adj).nnz == 0
    np.testing.assert_array_equal(s2.c, s.c)


def test_clamp_and_sup_norm():
    s = R.generate_lattice(1, 2)
    f = s.fn([-3.0, -1.0, 0.5, 1.0, 3.0])
    assert f.sup_norm == 3.0
    g = f.clamp(-1.0, 1.0)
    np.testing.assert_array_equal(g.values, [-1.0, -1.0, 0.5, 1.0, 1.0])
