"""Directed weighted influence graphs and the structural algorithms on them.

Arc convention: a nonnegative matrix ``A`` induces the arc ``j -> i`` whenever
``A[i, j] > 0``.  Read this as "agent ``j`` influences agent ``i``", so walks
follow the direction in which opinions propagate.

All node indices are 0-based.
"""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .exceptions import DomainError

__all__ = [
    "DirectedWeightedGraph",
    "StrongComponentDecomposition",
    "ComponentPeriod",
    "graph_from_matrix",
    "strong_components",
    "roots_and_quasi_strong",
    "component_period",
    "component_periods",
    "source_nodes",
    "reachable_from",
]


@dataclass(frozen=True)
class DirectedWeightedGraph:
    """Immutable digraph on nodes ``0..n-1`` with strictly positive arc weights.

    ``arcs`` is a tuple of ``(source, target, weight)`` triples sorted by
    ``(source, target)``.
    """

    n: int
    arcs: tuple[tuple[int, int, float], ...]
    _succ: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    _pred: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"node count must be a positive integer, got {self.n!r}")
        arcs = tuple(sorted((int(s), int(t), float(w)) for s, t, w in self.arcs))
        succ = [[] for _ in range(self.n)]
        pred = [[] for _ in range(self.n)]
        seen = set()
        for s, t, w in arcs:
            if not (0 <= s < self.n and 0 <= t < self.n):
                raise DomainError(f"arc ({s}, {t}) references a node outside 0..{self.n - 1}")
            if not w > 0:
                raise DomainError(f"arc ({s}, {t}) has non-positive weight {w}")
            if (s, t) in seen:
                raise DomainError(f"duplicate arc ({s}, {t})")
            seen.add((s, t))
            succ[s].append(t)
            pred[t].append(s)
        object.__setattr__(self, "arcs", arcs)
        object.__setattr__(self, "_succ", tuple(tuple(x) for x in succ))
        object.__setattr__(self, "_pred", tuple(tuple(x) for x in pred))

    def successors(self, node: int) -> tuple[int, ...]:
        return self._succ[node]

    def predecessors(self, node: int) -> tuple[int, ...]:
        return self._pred[node]

    def has_arc(self, source: int, target: int) -> bool:
        return target in self._succ[source]

    def to_matrix(self) -> np.ndarray:
        """Weighted adjacency matrix under the ``A[target, source] = weight`` convention."""
        A = np.zeros((self.n, self.n))
        for s, t, w in self.arcs:
            A[t, s] = w
        return A


@dataclass(frozen=True)
class StrongComponentDecomposition:
    """Strongly connected components of a graph.

    ``components`` are listed in reverse topological order of the condensation
    (every component appears before any component that has an arc into it).
    ``condensation_order`` lists component indices in topological order.
    """

    components: tuple[tuple[int, ...], ...]
    closed: tuple[bool, ...]
    condensation_order: tuple[int, ...]
    membership: tuple[int, ...]

    @property
    def closed_components(self) -> list[tuple[int, ...]]:
        return [c for c, flag in zip(self.components, self.closed) if flag]


@dataclass(frozen=True)
class ComponentPeriod:
    """Period of one strong component; ``has_cycle=False`` means the period 1 is conventional."""

    component: tuple[int, ...]
    period: int
    has_cycle: bool

    @property
    def aperiodic(self) -> bool:
        return self.period == 1


def graph_from_matrix(A) -> DirectedWeightedGraph:
    """Build the graph adapted to a square nonnegative matrix.

    The arc ``j -> i`` with weight ``A[i, j]`` is present iff ``A[i, j] > 0``.

    Raises
    ------
    DomainError
        If ``A`` is not square or has a negative (or non-finite) entry.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise DomainError(f"expected a non-empty square matrix, got shape {A.shape}")
    bad = np.argwhere(~np.isfinite(A) | (A < 0))
    if bad.size:
        i, j = bad[0]
        raise DomainError(f"entry ({i + 1}, {j + 1}) = {A[i, j]!r} is not a finite nonnegative number")
    rows, cols = np.nonzero(A > 0)
    return DirectedWeightedGraph(A.shape[0], tuple(zip(cols.tolist(), rows.tolist(), A[rows, cols].tolist())))


def _tarjan(G: DirectedWeightedGraph) -> list[list[int]]:
    # Iterative Tarjan; emits components sinks-first (reverse topological order).
    n = G.n
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    out: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, pos = work[-1]
            succ = G._succ[v]
            if pos < len(succ):
                work[-1] = (v, pos + 1)
                w = succ[pos]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                out.append(sorted(comp))
    return out


def strong_components(G: DirectedWeightedGraph) -> StrongComponentDecomposition:
    """Maximal strongly connected components with closed flags.

    A component is closed when no arc enters it from another component.
    The output ordering is canonical: reverse topological order of the
    condensation, ties broken by the smallest node index in a component.
    """
    raw = _tarjan(G)
    membership = [0] * G.n
    for k, comp in enumerate(raw):
        for v in comp:
            membership[v] = k
    m = len(raw)
    out_deg = [set() for _ in range(m)]
    in_deg = [set() for _ in range(m)]
    for s, t, _ in G.arcs:
        cs, ct = membership[s], membership[t]
        if cs != ct:
            out_deg[cs].add(ct)
            in_deg[ct].add(cs)

    # Kahn on the reversed condensation: repeatedly emit the sink with smallest min-node.
    remaining = [len(out_deg[k]) for k in range(m)]
    heap = [(raw[k][0], k) for k in range(m) if remaining[k] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, k = heapq.heappop(heap)
        order.append(k)
        for p in in_deg[k]:
            remaining[p] -= 1
            if remaining[p] == 0:
                heapq.heappush(heap, (raw[p][0], p))

    relabel = {old: new for new, old in enumerate(order)}
    components = tuple(tuple(raw[k]) for k in order)
    closed = tuple(not in_deg[k] for k in order)
    membership = tuple(relabel[c] for c in membership)
    return StrongComponentDecomposition(
        components=components,
        closed=closed,
        condensation_order=tuple(range(m - 1, -1, -1)),
        membership=membership,
    )


def roots_and_quasi_strong(G: DirectedWeightedGraph, decomposition=None) -> tuple[frozenset[int], bool]:
    """Root nodes (nodes with walks to every other node) and whether any exists.

    A graph is quasi-strongly connected iff it has exactly one closed strong
    component; the roots are then precisely the nodes of that component.
    """
    dec = decomposition if decomposition is not None else strong_components(G)
    closed = dec.closed_components
    if len(closed) != 1:
        return frozenset(), False
    return frozenset(closed[0]), True


def component_period(G: DirectedWeightedGraph, component) -> ComponentPeriod:
    """Period (gcd of cycle lengths) of one strong component.

    BFS assigns levels inside the component; the period is the gcd of
    ``|level(u) + 1 - level(v)|`` over the component's internal arcs.  A
    component without any cycle (a single node without self-loop) gets
    period 1 and ``has_cycle=False``.
    """
    members = tuple(sorted(component))
    inside = set(members)
    level = {members[0]: 0}
    queue = deque([members[0]])
    while queue:
        u = queue.popleft()
        for v in G._succ[u]:
            if v in inside and v not in level:
                level[v] = level[u] + 1
                queue.append(v)
    back = {members[0]}
    queue = deque(back)
    while queue:
        v = queue.popleft()
        for u in G._pred[v]:
            if u in inside and u not in back:
                back.add(u)
                queue.append(u)
    if len(level) != len(members) or len(back) != len(members):
        raise DomainError(f"nodes {members} do not form a strongly connected set")
    h = 0
    for u in members:
        for v in G._succ[u]:
            if v in inside:
                h = gcd(h, abs(level[u] + 1 - level[v]))
    if h == 0:
        return ComponentPeriod(members, 1, False)
    return ComponentPeriod(members, h, True)


def component_periods(G: DirectedWeightedGraph, decomposition=None) -> list[ComponentPeriod]:
    dec = decomposition if decomposition is not None else strong_components(G)
    return [component_period(G, c) for c in dec.components]


def source_nodes(G: DirectedWeightedGraph) -> frozenset[int]:
    """Nodes with no incoming arc other than (possibly) a self-loop."""
    return frozenset(v for v in range(G.n) if all(u == v for u in G._pred[v]))


def reachable_from(G: DirectedWeightedGraph, seeds) -> frozenset[int]:
    """``seeds`` together with every node reachable from them along arcs."""
    seen = set(int(s) for s in seeds)
    for s in seen:
        if not 0 <= s < G.n:
            raise DomainError(f"seed {s} is not a node of the graph")
    queue = deque(seen)
    while queue:
        u = queue.popleft()
        for v in G._succ[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return frozenset(seen)
