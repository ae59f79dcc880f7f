# %% [markdown]
# Isotropy Lie algebras at a singular point, and Morita-invariant reports.
#
# The linear actions of GL(2) and SL(2) on the plane have the same leaves
# ({0} and the rest) but different isotropy at the origin.

# %%
import numpy as np

from singfol.dsl import parse_spec
from singfol.folcore import isotropy_algebra, morita_report

gl2 = parse_spec("vars x y\ngenerator x*dx\ngenerator y*dx\ngenerator x*dy\ngenerator y*dy").presentation()
sl2 = parse_spec("vars x y\ngenerator x*dx - y*dy\ngenerator y*dx\ngenerator x*dy").presentation()

# %%
for name, F in (("gl2", gl2), ("sl2", sl2)):
    alg = isotropy_algebra(F, [0, 0])
    print(name, "dim", alg.dim)
    print("  basis:", [X.to_str(["x", "y"]) for X in alg.basis])
    print("  center", alg.center_dim(), "derived", alg.derived_dim())
    print("  killing form:")
    print(np.array(alg.killing_form(), dtype=float))
    print("  semisimple:", alg.is_semisimple())

# %% [markdown]
# Nonzero structure constants [e_i, e_j] = c e_k.

# %%
for i, j, k, c in isotropy_algebra(sl2, [0, 0]).sparse_constants():
    print(f"[e{i}, e{j}] = {c} e{k}")

# %%
a, b = morita_report(gl2, [0, 0]), morita_report(sl2, [0, 0])
print(a.invariants())
print(b.invariants())
print("differ in:", a.differs(b))
