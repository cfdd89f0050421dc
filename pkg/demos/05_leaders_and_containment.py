"""Static leaders: followers end up inside the leaders' convex hull."""
# %%
import numpy as np

import opindyn as od

# a path of four followers; follower 1 listens to leader 1, follower 4 to leaders 2 and 3
A = np.array([[0, 1, 0, 0], [1, 0, 1, 0], [0, 1, 0, 1], [0, 0, 1, 0]], dtype=float)
B = np.array([[1, 0, 0], [0, 0, 0], [0, 0, 0], [0, 1, 2]], dtype=float)
s = np.array([[0.0, 0.0], [4.0, 0.0], [0.0, 3.0]])

model = od.Taylor.from_sources(A, B, s)
print(od.taylor_verdict(model.A, model.gamma).reason)
x = od.taylor_final(model.A, model.gamma, model.u)
print("final positions:\n", x.round(4))

# %% Each final position is a convex combination of leader positions.
K = od.containment_certificate(A, B)
print("weights on leaders:\n", K.round(4))
print(od.containment_check(x, s, certificate=K).to_dict())

# %% Without a certificate, a random-direction support test can still catch violations.
outside = x.copy()
outside[1] = [5.0, 5.0]
report = od.containment_check(outside, s)
print(report.status, "agent", report.agent + 1, "direction", report.witness.round(3))

# %% The trajectory agrees with the algebra.
traj = od.taylor_simulate(model.A, model.gamma, model.u, np.ones((4, 2)), T=40.0, dt=0.1)
print("max gap after T=40:", np.abs(traj.final - x).max())
