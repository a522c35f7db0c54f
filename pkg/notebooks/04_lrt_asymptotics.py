# %% [markdown]
# # Likelihood ratio statistics at singular points
#
# Away from singularities the likelihood ratio statistic is asymptotically
# chi-square.  At singular points other limits appear.  Here we simulate each
# scenario with a modest replicate count and compare to the limit law.

# %%
import numpy as np

from gaussgeom.simulate import (
    SCENARIOS,
    LimitLaw,
    SimulationConfig,
    ci_term_samples,
    ks_statistic,
    ks_two_sample,
    run_scenario,
)

REPS = 4000
for name in SCENARIOS:
    cfg = SimulationConfig(name, n=1000, reps=REPS, seed=11)
    dist = run_scenario(cfg)
    law = cfg.law()
    print(f"{name:14s} limit={law.kind:18s} KS={ks_statistic(dist, law):.4f}  "
          f"median={np.median(dist.samples):.3f}")

# %% [markdown]
# The regular point (s23 = 0.5) is clearly separated from the singular law:

# %%
reg = run_scenario(SimulationConfig("ci-regular", 1000, REPS, 12))
print("KS regular vs singular law:", ks_two_sample(reg, LimitLaw("w12-plus-min").oracle()))

# %% [markdown]
# At the cusp of Neil's parabola the approach to the limit is slow: the curve
# deviates from its tangent half-ray at a rate of n^(-1/4) in rescaled
# coordinates.  Drawing the sample mean directly shows the KS distance shrinking.

# %%
from gaussgeom.simulate import NEIL, project_to_curve

gen = np.random.default_rng(3)
for n in (10**3, 10**5, 10**8):
    Z = gen.standard_normal((4000, 2)) / np.sqrt(n)
    lam = [n * project_to_curve(z, NEIL)[1] for z in Z]
    print(n, round(ks_statistic(np.array(lam), LimitLaw("half-mix-chi2-1-2")), 4))

# %% [markdown]
# Under complete independence the three log terms of the statistic are
# asymptotically independent chi2_1 variables:

# %%
T = ci_term_samples(SimulationConfig("ci-singular", 2000, REPS, 13))
print(np.round(np.corrcoef(T.T), 3))
