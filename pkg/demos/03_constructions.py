# %% [markdown]
# Pullback, product, quotient and slice constructions.

# %%
from singfol.dsl import parse_spec
from singfol.exactalg import module_equal
from singfol.folcore import fiber_dim, tangent_dim
from singfol.folops import (
    ProjectionSpec,
    SliceSpec,
    check_quotient_condition,
    product,
    pullback_projection,
    pushforward,
    restrict_to_slice,
)


def show(F):
    return "<" + ", ".join(X.to_str(list(F.names)) for X in F.generators) + ">"


xdx = parse_spec("vars x\ngenerator x*dx").presentation()
ydy = parse_spec("vars y\ngenerator y*dy").presentation()

# %% [markdown]
# Pullback along (x, y) -> x adds the vertical field.

# %%
P = pullback_projection(xdx, ProjectionSpec(2, (0,)))
print("pullback:", show(P))
print("fiber dim at 0:", fiber_dim(xdx, [0]), "->", fiber_dim(P, [0, 0]))

# %%
Q = product(xdx, ydy)
print("product:", show(Q), "fiber dim at 0:", fiber_dim(Q, [0, 0]))

# %% [markdown]
# Quotient of the cylinder foliation <d_th, y d_y> by dropping th.
# The bracket condition is certified first.

# %%
big = parse_spec("vars th y\ngenerator dth\ngenerator y*dy").presentation()
drop = ProjectionSpec.dropping(2, [0])
print("quotient condition:", bool(check_quotient_condition(big, drop)))
M = pushforward(big, drop)
print("pushforward:", show(M))
print("pulls back to the input:", module_equal(list(pullback_projection(M, drop).generators), list(big.generators)))

# %% [markdown]
# A non-projectable presentation: the search recombines generators.

# %%
G = parse_spec("vars x y\ngenerator dy + x*y*dx\ngenerator x*dx").presentation()
out = pushforward(G, ProjectionSpec.dropping(2, [1]))
print("pushforward:", show(out), "degree used:", out.meta["degree_cap_used"])

# %% [markdown]
# Slice through the origin transverse to <d_x, y d_y>: the leaf direction
# disappears and the singular part survives.

# %%
F = parse_spec("vars x y\ngenerator dx\ngenerator y*dy").presentation()
S = restrict_to_slice(F, SliceSpec([0, 0], [[0, 1]]))
print("slice:", show(S), S.meta)
print("tangent dim on slice at 0:", tangent_dim(S, [0]))
