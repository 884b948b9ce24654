import io
import math
from itertools import product

import numpy as np
import pytest

from mplearn import (
    DagModel,
    FactorModel,
    UGraph,
    draw_factors,
    gen_component,
    maximal_cliques,
    moralize,
    read_dag,
    read_model,
    replicate,
    sample,
    sample_dag,
    write_dag,
    write_model,
)
from mplearn.chordal import is_chordal
from mplearn.synthetic import COMPONENT_KINDS, connected_components

EXPECTED_STATS = {
    # kind: (edges, avg blanket, max blanket, chordal)
    "grid": (24, 3.0, 4, False),
    "hub": (15, 1.875, 8, True),
    "loop": (19, 2.375, 4, False),
    "clique": (20, 2.5, 4, True),
}


class TestComponents:
    @pytest.mark.parametrize("kind", COMPONENT_KINDS)
    def test_structural_stats(self, kind):
        g = gen_component(kind)
        edges, avg_mb, max_mb, chordal = EXPECTED_STATS[kind]
        assert g.d == 16
        assert len(g.edges) == edges
        degrees = [g.degree(v) for v in range(16)]
        assert max(degrees) == max_mb
        assert sum(degrees) / 16 == avg_mb
        assert is_chordal(g) == chordal

    def test_hub_is_a_tree(self):
        g = gen_component("hub")
        # connected with d-1 edges
        assert len(connected_components(g)) == 1
        assert len(g.edges) == 15

    def test_deterministic(self):
        assert gen_component("loop") == gen_component("loop")

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            gen_component("ring")


class TestReplicate:
    def test_all_four_once(self):
        g = replicate(list(COMPONENT_KINDS), 1)
        assert g.d == 64
        assert len(g.edges) == 78

    def test_grid_twice(self):
        g = replicate(["grid"], 2)
        assert g.d == 32
        assert len(g.edges) == 48
        # second block is an offset copy of the first
        first = {e for e in g.edges if e[1] < 16}
        second = {(i - 16, j - 16) for i, j in g.edges if e_in_block((i, j), 16)}
        assert first == second == gen_component("grid").edges

    def test_eight_replicas(self):
        g = replicate(list(COMPONENT_KINDS), 8)
        assert g.d == 512
        assert len(g.edges) == 78 * 8


def e_in_block(edge, offset):
    return edge[0] >= offset and edge[1] >= offset


class TestMaximalCliques:
    def test_triangle(self):
        assert maximal_cliques(UGraph(3, [(0, 1), (0, 2), (1, 2)])) == [(0, 1, 2)]

    def test_path(self):
        assert maximal_cliques(UGraph(3, [(0, 1), (1, 2)])) == [(0, 1), (1, 2)]

    def test_four_cycle(self):
        g = UGraph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
        assert maximal_cliques(g) == [(0, 1), (0, 3), (1, 2), (2, 3)]

    def test_isolated_nodes_are_singletons(self):
        g = UGraph(3, [(0, 1)])
        assert maximal_cliques(g) == [(0, 1), (2,)]

    def test_five_clique(self):
        g = gen_component("clique")
        cliques = maximal_cliques(g)
        assert (0, 1, 2, 3, 4) in cliques
        assert (5, 6, 7, 8, 9) in cliques
        assert all((v,) in cliques for v in range(10, 16))


class TestFactorModel:
    def test_forced_equal_factors_give_uniform_joint(self):
        g = UGraph(2, [(0, 1)])
        model = FactorModel(g, [2, 2], {(0, 1): [[0.3, 0.3], [0.3, 0.3]]})
        assert np.allclose(model.components[0].joint, 0.25)

    def test_component_joints_normalized(self):
        model = draw_factors(gen_component("loop"), [2] * 16, seed=4)
        for comp in model.components:
            assert abs(comp.joint.sum() - 1.0) <= 1e-9
            assert comp.z > 0

    def test_draw_is_deterministic(self):
        g = replicate(["grid", "hub"], 1)
        m1 = draw_factors(g, [2] * 32, seed=99)
        m2 = draw_factors(g, [2] * 32, seed=99)
        for clique in m1.factors:
            assert np.array_equal(m1.factors[clique], m2.factors[clique])

    def test_positive_factors_required(self):
        g = UGraph(2, [(0, 1)])
        with pytest.raises(ValueError):
            FactorModel(g, [2, 2], {(0, 1): [[0.0, 1.0], [1.0, 1.0]]})

    def test_factor_coverage_required(self):
        g = UGraph(3, [(0, 1), (1, 2)])
        with pytest.raises(ValueError):
            FactorModel(g, [2] * 3, {(0, 1): [[1, 1], [1, 1]]})

    def test_state_cap(self):
        g = UGraph(21, [(i, i + 1) for i in range(20)])
        with pytest.raises(ValueError, match="cap"):
            draw_factors(g, [2] * 21, seed=0)

    def test_local_markov_property_of_joint(self):
        # p(x_j | everything else) depends only on the blanket configuration
        cases = [
            UGraph(3, [(0, 1), (1, 2)]),
            UGraph(4, [(0, 1), (1, 2), (2, 3), (0, 3)]),
            UGraph(9, [(i, i + 1) for i in range(8)]),
        ]
        for g in cases:
            model = draw_factors(g, [2] * g.d, seed=g.d)
            comp = model.components[0]
            joint = comp.joint
            for j in range(g.d):
                axis = comp.nodes.index(j)
                denom = joint.sum(axis=axis, keepdims=True)
                conditional = joint / denom
                blanket_axes = [comp.nodes.index(v) for v in g.neighbors(j)]
                # the conditional must be constant over non-blanket axes
                other_axes = tuple(
                    a
                    for a in range(joint.ndim)
                    if a != axis and a not in blanket_axes
                )
                spread = conditional.max(axis=other_axes) - conditional.min(
                    axis=other_axes
                )
                assert float(spread.max()) <= 1e-9


class TestSample:
    def test_zero_rows(self):
        model = draw_factors(UGraph(2, [(0, 1)]), [2, 2], seed=1)
        ds = sample(model, 0, seed=1)
        assert ds.n == 0 and ds.d == 2

    def test_deterministic(self):
        model = draw_factors(gen_component("grid"), [2] * 16, seed=12)
        a = sample(model, 500, seed=34)
        b = sample(model, 500, seed=34)
        assert np.array_equal(a.values, b.values)
        c = sample(model, 500, seed=35)
        assert not np.array_equal(a.values, c.values)

    def test_uniform_joint_cell_frequencies(self):
        g = UGraph(2, [(0, 1)])
        model = FactorModel(g, [2, 2], {(0, 1): [[0.2, 0.2], [0.2, 0.2]]})
        ds = sample(model, 100_000, seed=8)
        for a, b in product(range(2), repeat=2):
            freq = float(
                np.mean((ds.values[:, 0] == a) & (ds.values[:, 1] == b))
            )
            assert abs(freq - 0.25) <= 0.01

    def test_empirical_matches_exact_joint(self):
        model = draw_factors(UGraph(3, [(0, 1), (1, 2)]), [2] * 3, seed=21)
        comp = model.components[0]
        ds = sample(model, 100_000, seed=22)
        for cfg in product(range(2), repeat=3):
            freq = float(np.mean((ds.values == np.asarray(cfg)).all(axis=1)))
            assert abs(freq - float(comp.joint[cfg])) <= 0.01


class TestMoralize:
    def test_v_structure_marries_parents(self):
        # child 2 with parents 0 and 1
        g = moralize([(), (), (0, 1)])
        assert g.edges == {(0, 1), (0, 2), (1, 2)}

    def test_chain_adds_nothing(self):
        g = moralize([(), (0,), (1,)])
        assert g.edges == {(0, 1), (1, 2)}

    def test_cycle_detected(self):
        with pytest.raises(ValueError, match="cycle"):
            moralize([(1,), (0,)])

    def test_blankets_are_parents_children_coparents(self):
        parents = [(), (0,), (0,), (1, 2), (2,)]
        g = moralize(parents)
        for j in range(5):
            expected = set(parents[j])
            for child, ps in enumerate(parents):
                if j in ps:
                    expected.add(child)
                    expected.update(v for v in ps if v != j)
            assert set(g.neighbors(j)) == expected


class TestDagModel:
    def test_cpt_rows_must_normalize(self):
        with pytest.raises(ValueError, match="sum to 1"):
            DagModel([2], [()], [[[0.5, 0.4]]])

    def test_cycle_rejected(self):
        with pytest.raises(ValueError, match="cycle"):
            DagModel([2, 2], [(1,), (0,)], [[[0.5, 0.5]] * 2] * 2)

    def test_degenerate_root_is_constant(self):
        model = DagModel([2], [()], [[[1.0, 0.0]]])
        ds = sample_dag(model, 50, seed=3)
        assert (ds.values == 0).all()

    def test_zero_rows(self):
        model = DagModel([2], [()], [[[0.5, 0.5]]])
        assert sample_dag(model, 0, seed=3).n == 0

    def test_child_conditional_frequencies(self):
        cpt_child = [[0.9, 0.1], [0.2, 0.8]]
        model = DagModel(
            [2, 2],
            [(), (0,)],
            [[[0.4, 0.6]], cpt_child],
        )
        ds = sample_dag(model, 100_000, seed=17)
        for parent_value in range(2):
            mask = ds.values[:, 0] == parent_value
            freq = float(np.mean(ds.values[mask, 1] == 0))
            assert abs(freq - cpt_child[parent_value][0]) <= 0.01

    def test_sampling_deterministic(self):
        model = DagModel(
            [2, 3],
            [(), (0,)],
            [[[0.5, 0.5]], [[0.2, 0.3, 0.5], [0.6, 0.2, 0.2]]],
        )
        a = sample_dag(model, 200, seed=0)
        b = sample_dag(model, 200, seed=0)
        assert np.array_equal(a.values, b.values)


class TestModelFiles:
    def test_factor_model_round_trip(self):
        model = draw_factors(UGraph(4, [(0, 1), (2, 3)]), [2, 3, 2, 2], seed=6)
        buf = io.StringIO()
        write_model(model, buf)
        again = read_model(io.StringIO(buf.getvalue()))
        assert again.graph == model.graph
        assert again.cards == model.cards
        for clique, table in model.factors.items():
            assert np.array_equal(again.factors[clique], table)

    def test_dag_round_trip(self):
        model = DagModel(
            [2, 2, 2],
            [(), (0,), (0, 1)],
            [
                [[0.3, 0.7]],
                [[0.5, 0.5], [0.9, 0.1]],
                [[0.25, 0.75], [0.5, 0.5], [0.6, 0.4], [1.0, 0.0]],
            ],
        )
        buf = io.StringIO()
        write_dag(model, buf)
        again = read_dag(io.StringIO(buf.getvalue()))
        assert again.parents == model.parents
        for j in range(3):
            assert np.array_equal(again.cpts[j], model.cpts[j])

    def test_dag_without_cpts_moralizes(self):
        text = "NODES 3\nCARDS 2 2 2\nPARENTS\n0\n1\n2 0 1\n"
        cards, parents = read_dag(io.StringIO(text), require_cpts=False)
        assert moralize(parents).edges == {(0, 1), (0, 2), (1, 2)}

    def test_dag_missing_cpts_rejected_when_sampling(self):
        text = "NODES 2\nCARDS 2 2\nPARENTS\n0\n1 0\n"
        with pytest.raises(ValueError, match="CPT"):
            read_dag(io.StringIO(text))

    def test_model_parse_error_reports_block(self):
        with pytest.raises(ValueError, match="CARDS"):
            read_model(io.StringIO("NODES 2\nEDGES\n"))
