# %% [markdown]
# # Singular points of plane curves
#
# The singular locus of a hypersurface V(f) is cut out by f and its partial
# derivatives.  For the folium and Neil's parabola it is the origin; a circle
# has none.

# %%
from gaussgeom.groebner import Ideal, buchberger, ideal_dimension, multiplicity, singular_locus_ideal
from gaussgeom.polyring import Ring

R = Ring(["mu1", "mu2"])
curves = {
    "folium": "mu2^2 - mu1^3 - mu1^2",
    "neil": "mu2^2 - mu1^3",
    "circle": "mu1^2 + mu2^2 - 1",
}
for name, text in curves.items():
    L = singular_locus_ideal(Ideal([R.parse(text)]), codim=1)
    G = buchberger(L)
    d = ideal_dimension(G)
    extra = f", mult={multiplicity(G)}" if d == 0 else ""
    print(f"{name:7s} basis={[str(g) for g in G]}  dim={d}{extra}")

# %% [markdown]
# Neil's parabola gives multiplicity 2 at the cusp (the ideal <mu1^2, mu2>),
# the folium a reduced point.
