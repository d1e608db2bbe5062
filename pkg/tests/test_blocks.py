from __future__ import annotations

import itertools
from random import Random

import pytest
from hypothesis import given, settings, strategies as st

from semannot.blocks import (
    Selector,
    SemanticBlock,
    delimit_sb,
    make_substitution_block,
    validate_sbr,
)
from semannot.errors import InvariantViolation, UnknownEntityError

from .oracles import bfs_reachable, random_digraph, sbr_conditions
from .test_kstore import graph_from_edges


def test_chain_full_reachability():
    g = graph_from_edges([("a", "p", "b"), ("b", "p", "c")])
    block = delimit_sb(g, "a", Selector.everything())
    assert block.entities == {"a", "b", "c"}
    assert block.triples == {("a", "p", "b"), ("b", "p", "c")}


def test_chain_depth_one():
    g = graph_from_edges([("a", "p", "b"), ("b", "p", "c")])
    block = delimit_sb(g, "a", Selector.depth_bounded(1))
    assert block.entities == {"a", "b"}
    assert block.triples == {("a", "p", "b")}


def test_depth_zero_is_main_only():
    g = graph_from_edges([("a", "p", "b")])
    block = delimit_sb(g, "a", Selector.depth_bounded(0))
    assert block.entities == {"a"}
    assert block.triples == set()


def test_whitelist_filters_predicates():
    g = graph_from_edges([("a", "p", "b"), ("a", "q", "c"), ("b", "q", "d")])
    block = delimit_sb(g, "a", Selector.whitelist({"p"}))
    assert block.entities == {"a", "b"}
    assert block.triples == {("a", "p", "b")}


def test_unknown_main_concept():
    g = graph_from_edges([("a", "p", "b")])
    with pytest.raises(UnknownEntityError):
        delimit_sb(g, "zzz")


def test_whitelist_requires_predicates():
    with pytest.raises(InvariantViolation):
        Selector.whitelist(())


def _random_selector(rng: Random):
    choice = rng.randrange(3)
    if choice == 0:
        return Selector.everything(), None, None
    if choice == 1:
        preds = set(rng.sample(["p0", "p1", "p2", "p3"], rng.randint(1, 4)))
        return Selector.whitelist(preds), preds, None
    depth = rng.randint(0, 6)
    return Selector.depth_bounded(depth), None, depth


def test_delimit_matches_bfs_oracle_on_random_digraphs():
    rng = Random(20240817)
    for _ in range(300):
        nodes, edges = random_digraph(rng)
        g = graph_from_edges(edges, extra_nodes=nodes)
        main = rng.choice(nodes)
        selector, preds, depth = _random_selector(rng)
        block = delimit_sb(g, main, selector)
        assert block.entities == bfs_reachable(edges, main, preds, depth)


def test_sb_monotone_in_depth():
    rng = Random(99)
    for _ in range(100):
        nodes, edges = random_digraph(rng, max_nodes=10, max_edges=25)
        g = graph_from_edges(edges, extra_nodes=nodes)
        main = rng.choice(nodes)
        previous: set[str] = set()
        for depth in range(6):
            block = delimit_sb(g, main, Selector.depth_bounded(depth))
            assert previous <= block.entities
            previous = set(block.entities)


def test_sb_reachability_invariant_by_independent_traversal():
    rng = Random(7)
    for _ in range(100):
        nodes, edges = random_digraph(rng, max_nodes=12, max_edges=30)
        g = graph_from_edges(edges, extra_nodes=nodes)
        block = delimit_sb(g, rng.choice(nodes))
        # Re-walk the block using only its own triples.
        assert block.entities == bfs_reachable(sorted(block.triples), block.main)
        block.validate()


def test_block_validate_rejects_unreachable_entity():
    with pytest.raises(InvariantViolation, match="attainable"):
        SemanticBlock(main="a", entities=frozenset({"a", "b"}), triples=frozenset()).validate()


# --- substitution blocks ---------------------------------------------------


def _rels(g, triples):
    wanted = set(triples)
    return [r for r in g.relations if r.as_triple() in wanted]


def test_sbr_rejects_endpoint_in_interior():
    g = graph_from_edges([("a1", "p", "a2"), ("a2", "p", "a3")])
    result = validate_sbr(g, "a1", "a3", {"a1", "a2"}, _rels(g, [("a1", "p", "a2")]))
    assert not result
    assert (result.condition, result.witness) == ("C1", "a1")


def test_sbr_rejects_relation_leaving_block():
    g = graph_from_edges(
        [("a1", "p", "a2"), ("a2", "p", "a4"), ("a4", "p", "a3"), ("a2", "p", "x")]
    )
    result = validate_sbr(
        g, "a1", "a3", {"a2", "a4"},
        _rels(g, [("a1", "p", "a2"), ("a2", "p", "a4"), ("a2", "p", "x")]),
    )
    assert (result.ok, result.condition) == (False, "C3")
    assert "x" in (result.witness or "")


def test_sbr_chain_symmetric_accepts_strict_rejects():
    g = graph_from_edges([("a1", "p", "a2"), ("a2", "p", "a3"), ("a3", "p", "a4")])
    interior = {"a2", "a3"}
    rels = _rels(g, [("a1", "p", "a2"), ("a2", "p", "a3"), ("a3", "p", "a4")])
    assert validate_sbr(g, "a1", "a4", interior, rels, mode="symmetric").ok
    strict = validate_sbr(g, "a1", "a4", interior, rels, mode="strict")
    assert (strict.ok, strict.condition, strict.witness) == (False, "C2", "a3")


def test_sbr_empty_interior_direct_bridge():
    g = graph_from_edges([("a", "p", "b")])
    assert validate_sbr(g, "a", "b", set(), _rels(g, [("a", "p", "b")]), mode="strict").ok


def test_sbr_unknown_entity():
    g = graph_from_edges([("a", "p", "b")])
    with pytest.raises(UnknownEntityError):
        validate_sbr(g, "a", "b", {"ghost"}, [])


def test_make_substitution_block_validates():
    g = graph_from_edges([("a1", "p", "a2"), ("a2", "p", "a3"), ("a3", "p", "a4")])
    rels = _rels(g, [("a1", "p", "a2"), ("a2", "p", "a3"), ("a3", "p", "a4")])
    sbr = make_substitution_block(g, "a1", "a4", {"a2", "a3"}, rels, "&SANS;bridge")
    assert sbr.derived_predicate == "&SANS;bridge"
    with pytest.raises(InvariantViolation, match="SBR condition C2"):
        make_substitution_block(g, "a1", "a4", {"a2", "a3"}, rels, "&SANS;bridge", mode="strict")


def test_sbr_exhaustive_small_graph_matches_truth_tables():
    # All (interior, rels) subsets over a fixed 5-node, 6-edge graph,
    # including interiors that swallow an endpoint (exercising C1).
    edges = [
        ("a", "p", "b"),
        ("b", "p", "c"),
        ("c", "p", "d"),
        ("d", "p", "b"),
        ("b", "q", "e"),
        ("e", "q", "a"),
    ]
    g = graph_from_edges(edges)
    left, right = "a", "e"
    nodes = ["a", "b", "c", "d", "e"]
    for interior_size in range(len(nodes) + 1):
        for interior in itertools.combinations(nodes, interior_size):
            for rel_mask in range(2 ** len(edges)):
                chosen = [e for i, e in enumerate(edges) if rel_mask >> i & 1]
                rels = _rels(g, chosen)
                for mode in ("strict", "symmetric"):
                    expected_ok, expected_cond = sbr_conditions(
                        left, right, set(interior), chosen, mode
                    )
                    result = validate_sbr(g, left, right, set(interior), rels, mode=mode)
                    assert result.ok == expected_ok
                    if not expected_ok:
                        assert result.condition == expected_cond


@st.composite
def sbr_cases(draw):
    nodes = [f"v{i}" for i in range(5)]
    edges = draw(
        st.lists(
            st.tuples(st.sampled_from(nodes), st.just("p"), st.sampled_from(nodes)),
            max_size=8,
            unique=True,
        )
    )
    left, right = draw(st.sampled_from(nodes)), draw(st.sampled_from(nodes))
    interior = draw(st.frozensets(st.sampled_from(nodes), max_size=3))
    chosen = draw(st.lists(st.sampled_from(edges), unique=True)) if edges else []
    return nodes, edges, left, right, interior, chosen


@settings(max_examples=300, deadline=None)
@given(sbr_cases())
def test_sbr_strict_implies_symmetric(case):
    nodes, edges, left, right, interior, chosen = case
    g = graph_from_edges(edges, extra_nodes=nodes)
    rels = _rels(g, chosen)
    strict = validate_sbr(g, left, right, interior, rels, mode="strict")
    symmetric = validate_sbr(g, left, right, interior, rels, mode="symmetric")
    if strict.ok:
        assert symmetric.ok
