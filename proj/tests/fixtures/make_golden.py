"""Regenerates the golden fit dataset. Output files are committed; rerunning is optional."""
import numpy as np
from pathlib import Path

from oracle import model_correlation, COMCOL, EDGES, D

out = Path(__file__).parent / "golden"
rng = np.random.default_rng(7)
T = 60
theta = dict(comcol=0.2, glob=0.1, delta=0.6, beta=0.7)
R = model_correlation(theta)
eps = rng.multivariate_normal(np.zeros(D), R, size=T)
mu = np.linspace(-1.0, 1.0, D)
sigma = np.linspace(0.5, 2.0, D)
y = mu + sigma * eps
ids = [f"s{i}" for i in range(D)]


def write(name, rows, header=True):
    with open(out / name, "w") as f:
        if header:
            f.write(",".join(ids) + "\n")
        for r in rows:
            f.write(",".join(repr(float(v)) for v in r) + "\n")


write("data.csv", y)
write("mu.csv", [mu])
write("sigma.csv", [sigma])
with open(out / "comcol.csv", "w") as f:
    f.write("id,label\n")
    for i, c in enumerate(COMCOL):
        f.write(f"{ids[i]},c{c}\n")
with open(out / "adjacency.csv", "w") as f:
    f.write("from,to\n")
    for a, b in EDGES:
        f.write(f"{ids[a]},{ids[b]}\n")
