# %% [markdown]
# Pointwise invariants: tangent dimension, fiber dimension, singular loci.
#
# Two foliations of the plane with the same leaves, {origin} and the punctured
# plane, but different module structure at the origin.

# %%
from fractions import Fraction

from singfol.dsl import parse_spec
from singfol.folcore import (
    check_involutive,
    fiber_dim,
    projectivity_verdict,
    regularity_verdict,
    singular_locus,
    tangent_dim,
)

F0 = parse_spec("""
vars x y
generator x*dx + y*dy
generator y*dx - x*dy
""").presentation()

F1 = parse_spec("""
vars x y
generator x*dx
generator y*dy
generator y*dx
generator x*dy
""").presentation()

# %%
for name, F in (("F0", F0), ("F1", F1)):
    print(name, "involutive:", check_involutive(F).involutive)
    for p in ([0, 0], [1, 0], [Fraction(1, 2), -3]):
        print(f"  at {p}: tangent {tangent_dim(F, p)}, fiber {fiber_dim(F, p)}")

# %% [markdown]
# Same leaves, fiber dims 2 vs 4 at the origin. F1 has two syzygies,
# e.g. y*(x dx) - x*(y dx) = 0, that become independent relations only off 0.

# %%
for rel in F1.syzygy_matrix:
    print("syzygy:", [str(c) for c in rel.components])

# %%
L = singular_locus(F1)
print("generic leaf dim:", L.generic_tangent_rank)
print("leaf dim drops on:", [p.to_str(["x", "y"]) for p in L.tangent_drop_gb])
print("fiber jumps on:", [p.to_str(["x", "y"]) for p in L.fiber_jump_gb])

# %% [markdown]
# Regularity and projectivity verdicts, with witnesses.

# %%
for k in (1, 2, 3):
    F = parse_spec(f"vars x\ngenerator x^{k}*dx").presentation()
    reg, proj = regularity_verdict(F), projectivity_verdict(F)
    print(f"x^{k} dx: {reg.kind} (witness {[str(c) for c in reg.witness]}), {proj.kind}")

print("F1:", regularity_verdict(F1).kind, projectivity_verdict(F1).kind)
