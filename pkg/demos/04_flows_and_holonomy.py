# %% [markdown]
# Flows, the flow pushforward identity, and holonomy along loops.

# %%
import math

import numpy as np

from singfol.cli import corpus_dir
from singfol.dsl import parse_spec
from singfol.flownum import (
    FlowParams,
    exp_combination,
    flow_pushforward_check,
    leaf_trace,
)
from singfol.scenario import Scenario

p = FlowParams(step=1e-3)

# %% [markdown]
# Time-1 flow of x d_x from 2 lands at 2e.

# %%
F = parse_spec("vars x\ngenerator dx\ngenerator x*dx").presentation()
print(exp_combination(F, [0.0, 1.0], [2.0], p), 2 * math.e)

# %% [markdown]
# The flow of X = x d_x pushes d_x to e d_x. Left side: finite differences of
# the numeric flow. Right side: ordered exponential of the structure functions.

# %%
res = flow_pushforward_check(F, [0, 1], [0.5], p)
print("lhs:\n", res.lhs)
print("rhs:\n", res.rhs)
print("residual:", res.max_residual)

# %% [markdown]
# Orbit sampling: from (1, 0) the GL(2) orbit is the punctured plane.

# %%
gl2 = parse_spec("vars x y\ngenerator x*dx\ngenerator y*dx\ngenerator x*dy\ngenerator y*dy").presentation()
trace = leaf_trace(gl2, [1.0, 0.0], n_moves=20, seed=1)
pts = np.array(trace["points"])
print("leaf dim estimate:", trace["leaf_dim_estimate"])
print("min radius along orbit:", np.linalg.norm(pts, axis=1).min())

# %% [markdown]
# Holonomy: the cylinder loop expands the transversal by e^(2 pi), the
# Moebius loop flips it.

# %%
for name in ("cylinder.json", "mobius.json"):
    rep = Scenario.load(corpus_dir() / name).run()
    for run in rep["runs"]:
        print(f"{name} {run['name']}: {np.round(run['linearization'], 6).tolist()}")
    for chk in rep["checks"]:
        print(f"  check {chk['kind']} {chk['runs']}: rel err {chk['relative_error']:.1e}")
print("e^(2 pi) =", math.exp(2 * math.pi))
