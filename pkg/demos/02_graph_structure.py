"""Strong components, roots and periods decide every verdict."""
# %%
import numpy as np

import opindyn as od


def adjacency(n, arcs):
    A = np.zeros((n, n))
    for s, t in arcs:  # 1-based "s influences t"
        A[t - 1, s - 1] = 1.0
    return A


cycle_a = [(1, 2), (2, 3), (3, 1)]
cycle_b = [(k, k + 1) for k in range(5, 10)] + [(10, 5)]

# node 4 feeds both cycles: a single root
one_root = adjacency(10, cycle_a + cycle_b + [(4, 1), (4, 5)])
# the second cycle now feeds the first: two closed components, no root
no_root = adjacency(10, cycle_a + cycle_b + [(4, 1), (7, 2)])

for name, A in (("one root", one_root), ("no root", no_root)):
    G = od.graph_from_matrix(A)
    dec = od.strong_components(G)
    roots, qs = od.roots_and_quasi_strong(G, dec)
    print(f"{name}: components {[[v + 1 for v in c] for c in dec.components]}")
    print(f"  closed flags {dec.closed}; roots {sorted(v + 1 for v in roots)}; quasi-strong {qs}")
    print("  continuous-time verdict:", od.abelson_verdict(A).reason)

# %% Periods: a 4-cycle has period 4, one self-loop makes it aperiodic.
ring = np.roll(np.eye(4), 1, axis=1)
print("ring period:", od.component_period(od.graph_from_matrix(ring), range(4)).period)
ring[0, 0] = 1.0
print("with a self-loop:", od.component_period(od.graph_from_matrix(ring), range(4)).period)
