"""Anchored opinions: stability, final opinions, influence centrality and PageRank."""
# %%
import numpy as np

import opindyn as od

W = np.array([
    [0.220, 0.120, 0.360, 0.300],
    [0.147, 0.215, 0.344, 0.294],
    [0.0, 0.0, 1.0, 0.0],
    [0.090, 0.178, 0.446, 0.286],
])
u = np.array([-1.0, -0.2, 0.6, 1.0])

cases = {
    "Lambda = I": np.ones(4),
    "Lambda = I - diag(W)": 1 - np.diag(W),
    "Lambda = diag(1,0,0,1)": np.array([1.0, 0.0, 0.0, 1.0]),
}
for name, lam in cases.items():
    traj = od.fj_simulate(W, lam, u, u)
    print(f"{name:>24}: {traj.final.round(4)}  ({traj.stop_reason} after {len(traj) - 1} steps)")

# %% Stability is a reachability question.
lam = cases["Lambda = diag(1,0,0,1)"]
v = od.fj_verdict(W, lam)
print("prejudiced:", sorted(i + 1 for i in v.partition.prejudiced), "| stable:", v.stable)
fp = od.fj_stability_and_final(W, lam, u)
print("control matrix V (rows sum to 1):\n", fp.V.round(4))
print("fixed point:", fp.final[:, 0])
print("best-response residual:", od.nash_residual(W, lam, u, fp.final[:, 0]))

# %% Influence centrality interpolates towards social power as alpha -> 1.
W3 = np.array([[1 / 2, 1 / 2, 0], [1 / 3, 1 / 3, 1 / 3], [0, 1 / 2, 1 / 2]])
p = od.french_social_power(W3).vector
for alpha in (0.5, 0.9, 0.99, 0.999):
    c = od.influence_centrality(W3, alpha).vector
    print(f"alpha={alpha}: c={c.round(4)}  |c - p|_1 = {np.abs(c - p).sum():.2e}")

# %% PageRank is influence centrality with Lambda = (1 - m) I.
m = 0.15
print("pagerank:  ", od.pagerank(W3, m).vector)
print("influence: ", od.influence_centrality(W3, 1 - m).vector)
