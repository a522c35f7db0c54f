# %% [markdown]
# # Identifiability of a hidden-variable Gaussian DAG
#
# Two observed causes X1, X2 feed a hidden node H, which drives two observed
# effects X3, X4.  The conditional variance of H is pinned to 1.  We ask whether
# the eight parameters (b1..b4, w1..w4) are determined by the 4x4 covariance.

# %%
import random

from gaussgeom.gaussmodel import (
    build_sigma,
    hidden_hub_model,
    identifiability_ideal,
    model_dimension_numeric,
    random_theta,
    sign_flip,
    verify_fiber,
)
from gaussgeom.groebner import ideal_dimension, multiplicity

model = hidden_hub_model()
print(model.to_text())

# %% [markdown]
# The covariance is a polynomial map of the parameters:

# %%
sigma = build_sigma(model)
print(sigma)

# %% [markdown]
# Fix a rational parameter point theta0 and solve Sigma(theta) = Sigma(theta0).
# The reduced Groebner basis has the same shape for every generic draw:
# linear equations for w1..w4 and b1..b3 in terms of b4, and b4^2 = b40^2.

# %%
rng = random.Random(7)
theta0 = random_theta(model, rng)
print("theta0:", theta0)
G = identifiability_ideal(model, theta0).groebner()
print(G)
print("dim =", ideal_dimension(G), " mult =", multiplicity(G))

# %% [markdown]
# Two isolated solutions: theta0 and its image with every edge coefficient
# negated.  The model is locally but not globally identifiable.

# %%
print("sign flip in fiber:", verify_fiber(model, theta0, sign_flip(theta0)))

# %% [markdown]
# Setting b4 = 0 breaks this: the solution set becomes positive-dimensional.

# %%
vals = list(theta0.values)
vals[model.params.index("b4")] = 0
G0 = identifiability_ideal(model, model.theta(vals)).groebner()
print(G0)
print("dim =", ideal_dimension(G0))

# %% [markdown]
# The numeric Jacobian rank agrees: 8 at a generic point, less when b4 = 0.

# %%
print(model_dimension_numeric(model, [0.3, -1.2, 0.7, 2.0, 1.0, 2.0, 3.0, 1.5]))
print(model_dimension_numeric(model, [0.3, -1.2, 0.7, 0.0, 1.0, 2.0, 3.0, 1.5]))
