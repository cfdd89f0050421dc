"""Network documents, reports and trajectory CSV files, and the same through the CLI."""
# %%
import subprocess
import sys
import tempfile
from pathlib import Path

import opindyn as od

here = Path(__file__).resolve().parent
doc = od.load_network((here / "networks" / "fj_stubborn.json").read_text())
print("model:", doc.model, "| n =", doc.n, "| lambda =", doc.lam)

report = od.analyze(doc.to_model(), x0=doc.u)
print(od.save_report(report)[:400], "...")

# %%
traj = od.simulate(doc.to_model(), doc.initial_state(), k_max=50)
csv_text = od.save_trajectory(traj)
print(csv_text.splitlines()[0])
print(csv_text.splitlines()[-1])

# %% The command-line front end writes the same artefacts.
with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp) / "power.json"
    cmd = [sys.executable, "-m", "opindyn", "centrality", "--input", str(here / "networks" / "ex1.json"),
           "--output", str(out)]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    print("exit", proc.returncode, out.read_text())
    proc = subprocess.run([sys.executable, "-m", "opindyn", "centrality",
                           "--input", str(here / "networks" / "twocycle.json")], capture_output=True, text=True)
    print("exit", proc.returncode, proc.stderr.strip())
