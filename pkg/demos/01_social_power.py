"""French-DeGroot pooling: when do opinions settle, and whose opinion wins?"""
# %%
import numpy as np

import opindyn as od

W = np.array([[1 / 2, 1 / 2, 0], [1 / 3, 1 / 3, 1 / 3], [0, 1 / 2, 1 / 2]])
x0 = np.array([1.0, -2.0, 4.0])

verdict = od.degroot_verdict(W)
print("verdict:", verdict.reason, "| consensus:", verdict.consensus)

# %% The consensus value is a weighted average of the initial opinions.
p = od.french_social_power(W)
print("social power:", p.vector, "=", p.vector * 7, "/ 7")
traj = od.degroot_simulate(W, x0)
print(f"simulated: {traj.final} after {len(traj) - 1} steps ({traj.stop_reason})")
print("predicted:", p.consensus_value(x0))

# %% Two stubborn agents pull a follower to the midpoint instead of agreeing.
W_stub = np.array([[1, 0, 0], [1 / 3, 1 / 3, 1 / 3], [0, 0, 1]])
print(od.degroot_verdict(W_stub).reason)
print("limit from (0, 1, 1):", od.degroot_limit(W_stub, [0.0, 1.0, 1.0]))
try:
    od.french_social_power(W_stub)
except od.RefusalError as exc:
    print("refused:", exc)

# %% A directed cycle without self-loops oscillates forever.
swap = np.array([[0.0, 1.0], [1.0, 0.0]])
print(od.degroot_verdict(swap).reason)
print(od.degroot_simulate(swap, [0.0, 1.0], k_max=6).states[:, :, 0].T)
