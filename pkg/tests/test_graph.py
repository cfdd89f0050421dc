import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from instances import A_ONE_ROOT, A_TWO_CLOSED, W_EX1, W_STUBBORN
from opindyn.exceptions import DomainError
from opindyn.graph import (
    DirectedWeightedGraph,
    component_period,
    component_periods,
    graph_from_matrix,
    reachable_from,
    roots_and_quasi_strong,
    source_nodes,
    strong_components,
)
from oracles import reachable


def test_arc_convention():
    A = np.array([[0.0, 2.0], [0.0, 0.0]])
    G = graph_from_matrix(A)
    assert G.arcs == ((1, 0, 2.0),)
    assert G.has_arc(1, 0) and not G.has_arc(0, 1)
    np.testing.assert_array_equal(G.to_matrix(), A)


def test_negative_entry_names_position():
    with pytest.raises(DomainError, match=r"\(2, 1\)"):
        graph_from_matrix([[0, 1], [-0.5, 0]])


def test_graph_rejects_bad_arcs():
    with pytest.raises(DomainError):
        DirectedWeightedGraph(2, ((0, 1, 0.0),))
    with pytest.raises(DomainError):
        DirectedWeightedGraph(2, ((0, 2, 1.0),))
    with pytest.raises(DomainError):
        DirectedWeightedGraph(2, ((0, 1, 1.0), (0, 1, 2.0)))


def test_example_graph_is_strong():
    dec = strong_components(graph_from_matrix(W_EX1))
    assert dec.components == ((0, 1, 2),)
    assert dec.closed == (True,)


def test_stubborn_agents_are_closed_singletons():
    G = graph_from_matrix(W_STUBBORN)
    dec = strong_components(G)
    assert dec.closed_components == [(0,), (2,)]
    roots, qs = roots_and_quasi_strong(G, dec)
    assert not qs and roots == frozenset()


def test_single_root_graph():
    G = graph_from_matrix(A_ONE_ROOT)
    roots, qs = roots_and_quasi_strong(G)
    assert qs and roots == frozenset({3})
    assert source_nodes(G) == frozenset({3})


def test_graph_without_roots():
    G = graph_from_matrix(A_TWO_CLOSED)
    dec = strong_components(G)
    assert sorted(dec.closed_components) == [(3,), (4, 5, 6, 7, 8, 9)]
    assert roots_and_quasi_strong(G, dec) == (frozenset(), False)


def test_canonical_order_is_reverse_topological():
    # chain 1 -> 2 -> 3: sinks first
    A = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=float)
    dec = strong_components(graph_from_matrix(A))
    assert dec.components == ((2,), (1,), (0,))
    assert dec.closed == (False, False, True)
    assert dec.condensation_order == (2, 1, 0)


def test_ties_broken_by_smallest_node():
    A = np.zeros((4, 4))
    dec = strong_components(graph_from_matrix(A))
    assert dec.components == ((0,), (1,), (2,), (3,))


def test_period_of_four_cycle():
    A = np.roll(np.eye(4), 1, axis=1)
    per = component_period(graph_from_matrix(A), range(4))
    assert per.period == 4 and per.has_cycle


def test_period_with_self_loop_is_one():
    A = np.roll(np.eye(4), 1, axis=1)
    A[0, 0] = 1.0
    assert component_period(graph_from_matrix(A), range(4)).period == 1


def test_mixed_cycle_lengths():
    # cycles of length 2 and 4 through node 0 -> period 2
    arcs = {(0, 1), (1, 0), (1, 2), (2, 3), (3, 0)}
    A = np.zeros((4, 4))
    for s, t in arcs:
        A[t, s] = 1
    assert component_period(graph_from_matrix(A), range(4)).period == 2


def test_isolated_node_has_conventional_period():
    per = component_periods(graph_from_matrix(np.zeros((1, 1))))[0]
    assert per.period == 1 and not per.has_cycle and per.aperiodic


def test_period_rejects_non_strong_set():
    A = np.array([[0, 0], [1, 0]], dtype=float)
    with pytest.raises(DomainError):
        component_period(graph_from_matrix(A), (0, 1))


def test_reachable_from_bad_seed():
    with pytest.raises(DomainError):
        reachable_from(graph_from_matrix(np.zeros((2, 2))), [5])


def test_large_path_does_not_recurse():
    n = 5000
    A = np.zeros((n, n))
    A[np.arange(1, n), np.arange(n - 1)] = 1.0
    A[0, n - 1] = 1.0
    dec = strong_components(graph_from_matrix(A))
    assert len(dec.components) == 1
    assert component_period(graph_from_matrix(A), range(n)).period == n


adjacency = st.integers(1, 8).flatmap(
    lambda n: st.lists(st.lists(st.booleans(), min_size=n, max_size=n), min_size=n, max_size=n)
)


@settings(max_examples=200, deadline=None)
@given(adjacency)
def test_components_match_mutual_reachability(rows):
    A = np.array(rows, dtype=float)
    G = graph_from_matrix(A)
    dec = strong_components(G)
    n = A.shape[0]
    reach = [reachable(A > 0, [v]) for v in range(n)]
    # partition
    assert sorted(v for c in dec.components for v in c) == list(range(n))
    for comp in dec.components:
        for u in comp:
            assert {v for v in range(n) if u in reach[v] and v in reach[u]} == set(comp)
    # closed flag: no arc from outside into the component
    for comp, closed in zip(dec.components, dec.closed):
        inbound = any(A[t, s] > 0 for t in comp for s in range(n) if s not in comp)
        assert closed == (not inbound)
    # reverse topological order: arcs only go to earlier components
    pos = dec.membership
    for s, t, _ in G.arcs:
        assert pos[t] <= pos[s]


@settings(max_examples=200, deadline=None)
@given(adjacency)
def test_roots_reach_everything(rows):
    A = np.array(rows, dtype=float)
    n = A.shape[0]
    roots, qs = roots_and_quasi_strong(graph_from_matrix(A))
    brute = {v for v in range(n) if reachable(A > 0, [v]) == set(range(n))}
    assert roots == brute
    assert qs == bool(brute)
