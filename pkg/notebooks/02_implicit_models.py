# %% [markdown]
# # From parameterization to equations, and conditional independence
#
# Eliminating the parameters of the hidden-variable model gives the equations
# every covariance matrix in the model satisfies.

# %%
from gaussgeom.gaussmodel import ci_constraints, hidden_hub_model, implicitize, sigma_ring
from gaussgeom.groebner import Ideal, buchberger, ideal_dimension, ideal_intersect

I = implicitize(hidden_hub_model())
for g in I.generators:
    print(g)
print("dimension of the image:", ideal_dimension(I.groebner()))

# %% [markdown]
# s12 = 0 says the two causes are independent; the tetrad
# s14*s23 - s13*s24 = 0 comes from the single hidden node.
#
# Conditional independence statements are determinant conditions:

# %%
R = sigma_ring(3)
(marginal,) = ci_constraints([1], [2], [], 3)
(conditional,) = ci_constraints([1], [2], [3], 3)
print(marginal, "|", conditional)

# %% [markdown]
# Imposing both X1 _||_ X2 and X1 _||_ X2 | X3 gives the ideal
# <s12, s13*s23>, which splits into two components.  The intersection of the
# component ideals reproduces it exactly.

# %%
both = buchberger(Ideal([marginal, conditional]))
print("model ideal:", [str(g) for g in both])
union = buchberger(ideal_intersect(Ideal([R.var("s12"), R.var("s13")]), Ideal([R.var("s12"), R.var("s23")])))
print("intersection:", [str(g) for g in union])
print("equal:", both.elements == union.elements)
