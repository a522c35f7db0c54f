"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
Tolerances are fixed here and never tuned at run time.
"""

import itertools
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from gaussgeom.gaussmodel import (
    ci_constraints,
    hidden_hub_model,
    identifiability_ideal,
    random_theta,
    sigma_ring,
    sign_flip,
    verify_fiber,
)
from gaussgeom.groebner import (
    Ideal,
    buchberger,
    ideal_dimension,
    ideal_intersect,
    multiplicity,
    normal_form,
    singular_locus_ideal,
)
from gaussgeom.polyring import DEGREVLEX, Ring
from gaussgeom.simulate import (
    FOLIUM,
    NEIL,
    LimitLaw,
    SimulationConfig,
    ci_term_samples,
    isserlis,
    ks_statistic,
    ks_two_sample,
    lrt_ci,
    project_to_curve,
    run_scenario,
    stationarity_residual,
)

from conftest import random_poly, record

N, REPS, SEED = 1000, 20000, 20240601
KS_TOL = 0.03

# every basis computed below is re-checked by the Buchberger criterion (criterion 12)
BASES = []


def gb(ideal, order=DEGREVLEX):
    G = buchberger(ideal, order)
    BASES.append(G)
    return G


@pytest.fixture(scope="module")
def hub():
    return hidden_hub_model()


_RUNS = {}


def scenario_run(name, **kw):
    key = (name, tuple(sorted(kw.items())))
    if key not in _RUNS:
        cfg = SimulationConfig(name, N, REPS, SEED, **kw)
        _RUNS[key] = (cfg, run_scenario(cfg))
    return _RUNS[key]


def test_01_identifiability_generic(hub):
    rng = random.Random(1)
    t0 = time.time()
    results = []
    for _ in range(20):
        th = random_theta(hub, rng)
        assert th.as_dict()["b4"] != 0
        G = gb(identifiability_ideal(hub, th))
        d = ideal_dimension(G)
        m = multiplicity(G) if d == 0 else None
        results.append((d, m, verify_fiber(hub, th, sign_flip(th))))
    elapsed = time.time() - t0
    ok = all(r == (0, 2, True) for r in results) and elapsed < 60
    record("1 identifiability (20 generic trials)", ok, f"(dim, mult, flip) all (0, 2, True): {ok}; {elapsed:.2f}s")
    assert ok, results


def test_02_degenerate_locus(hub):
    rng = random.Random(2)
    dims = []
    for _ in range(10):
        vals = list(random_theta(hub, rng).values)
        vals[hub.params.index("b4")] = Fraction(0)
        dims.append(ideal_dimension(gb(identifiability_ideal(hub, hub.theta(vals)))))
    ok = all(d >= 1 for d in dims)
    record("2 degenerate b4=0", ok, f"dims {dims}")
    assert ok


def test_03_ci_constraints():
    R = sigma_ring(3)
    (f,) = ci_constraints([1], [2], [], 3)
    (g,) = ci_constraints([1], [2], [3], 3)
    want_f, want_g = R.parse("s12"), R.parse("s12*s33 - s13*s23")
    ok = f in (want_f, -want_f) and g in (want_g, -want_g)
    record("3 CI constraints", ok, f"{f} ; {g}")
    assert ok


def test_04_variety_union():
    R = sigma_ring(3)
    I = Ideal([R.parse("s12"), R.parse("s13")])
    J = Ideal([R.parse("s12"), R.parse("s23")])
    lhs = gb(ideal_intersect(I, J)).elements
    rhs = gb(Ideal([R.parse("s12"), R.parse("s13*s23")])).elements
    ok = lhs == rhs
    record("4 intersection = <s12, s13*s23>", ok, f"{[str(p) for p in lhs]}")
    assert ok


def _defines_origin(L: Ideal):
    G = gb(L)
    R = L.ring
    at_origin = all(g(0, 0) == 0 for g in L.generators)
    # some power of each coordinate lies in the ideal, so the variety is the origin alone
    radical_ok = all(any(G.contains(R.var(i) ** k) for k in range(1, 6)) for i in range(2))
    d = ideal_dimension(G)
    return d == 0 and multiplicity(G) >= 1 and at_origin and radical_ok, d


def test_05_singular_loci():
    R = Ring(["mu1", "mu2"])
    fol, fd = _defines_origin(singular_locus_ideal(Ideal([R.parse("mu2^2 - mu1^3 - mu1^2")]), 1))
    neil, nd = _defines_origin(singular_locus_ideal(Ideal([R.parse("mu2^2 - mu1^3")]), 1))
    C = Ring(["x", "y"])
    G = gb(singular_locus_ideal(Ideal([C.parse("x^2 + y^2 - 1")]), 1))
    conic = G.is_unit() and ideal_dimension(G) == -1
    ok = fol and neil and conic
    record("5 singular loci", ok, f"folium origin={fol}, neil origin={neil}, conic unit={conic}")
    assert ok


@pytest.mark.slow
def test_06_folium_law():
    cfg, dist = scenario_run("folium-origin")
    ks = ks_statistic(dist, LimitLaw("min-two-chi2-1"))
    ok = ks <= KS_TOL
    record("6 folium -> min of two chi2_1", ok, f"KS={ks:.4f} (tol {KS_TOL})")
    assert ok


@pytest.mark.slow
def test_07_neil_law():
    cfg, dist = scenario_run("neil-origin")
    ks = ks_statistic(dist, LimitLaw("half-mix-chi2-1-2"))
    ok = ks <= KS_TOL
    record("7 neil -> 1/2 chi2_1 + 1/2 chi2_2", ok, f"KS={ks:.4f} (tol {KS_TOL})")
    assert ok, f"KS {ks:.4f} exceeds {KS_TOL} at n={N}"


@pytest.mark.slow
def test_08_ci_singular_law():
    cfg, dist = scenario_run("ci-singular")
    ks = ks_two_sample(dist, LimitLaw("w12-plus-min").oracle())
    ok = ks <= KS_TOL
    record("8 ci-singular -> W12 + min(W13, W23)", ok, f"two-sample KS={ks:.4f} vs 1e6 oracle draws")
    assert ok


@pytest.mark.slow
def test_09_ci_regular_control():
    S = np.eye(3)
    S[1, 2] = S[2, 1] = 0.5
    cfg, dist = scenario_run("ci-regular")
    assert np.array_equal(cfg.true_params, S)
    ks_chi2 = ks_statistic(dist, LimitLaw("chi2", df=2))
    ks_sing = ks_two_sample(dist, LimitLaw("w12-plus-min").oracle())
    ok = ks_chi2 <= KS_TOL and ks_sing >= 0.1
    record("9 ci-regular -> chi2_2", ok, f"KS chi2_2={ks_chi2:.4f}, KS vs singular law={ks_sing:.4f}")
    assert ok


def test_10_eq4_equals_partial_variance_form():
    gen = np.random.default_rng(10)

    def pv(S, i, A):
        if not A:
            return S[i, i]
        return S[i, i] - S[i, A] @ np.linalg.inv(S[np.ix_(A, A)]) @ S[A, i]

    worst = 0.0
    for _ in range(1000):
        A = gen.normal(size=(3, 5))
        S = A @ A.T / 5 + 0.05 * np.eye(3)
        n = 1000
        alt = n * np.log(S[0, 0] * S[1, 1] / (S[0, 0] * S[1, 1] - S[0, 1] ** 2)) + n * min(
            np.log(pv(S, 2, [1]) / pv(S, 2, [0, 1])), np.log(pv(S, 2, [0]) / pv(S, 2, [0, 1]))
        )
        worst = max(worst, abs(lrt_ci(S, n) - alt) / abs(alt))
    ok = worst <= 1e-9
    record("10 LRT closed form = partial-variance form", ok, f"max rel diff {worst:.2e}")
    assert ok


@pytest.mark.slow
def test_11_term_independence():
    cfg = SimulationConfig("ci-singular", 2000, REPS, SEED + 11)
    T = ci_term_samples(cfg)
    C = np.corrcoef(T.T)
    off = [C[0, 1], C[0, 2], C[1, 2]]
    ok = all(abs(c) <= 0.03 for c in off)
    record("11 log-term correlations", ok, "corr " + ", ".join(f"{c:+.4f}" for c in off))
    assert ok


class Test12Properties:
    def test_buchberger_criterion(self, hub):
        if not BASES:
            # running in isolation: rebuild a representative set
            test_01_identifiability_generic(hub)
            test_04_variety_union()
            test_05_singular_loci()
        checked = 0
        for G in BASES:
            for f, g in itertools.combinations(G.elements, 2):
                lf, lg = f.leading_monomial(G.order), g.leading_monomial(G.order)
                l = tuple(max(a, b) for a, b in zip(lf, lg))
                s = f.mul_term(tuple(x - y for x, y in zip(l, lf)), 1 / f.terms[lf]) - g.mul_term(
                    tuple(x - y for x, y in zip(l, lg)), 1 / g.terms[lg]
                )
                assert normal_form(s, G.elements, G.order).is_zero()
                checked += 1
        ok = len(BASES) > 0
        record("12a Buchberger criterion", ok, f"{len(BASES)} bases, {checked} S-pairs reduce to 0")
        assert ok

    def test_ring_axioms(self):
        rng = random.Random(12)
        R = Ring(["x", "y", "z"])
        for _ in range(100):
            p, q, r = (random_poly(R, rng, max_deg=3) for _ in range(3))
            assert p * (q + r) == p * q + p * r
            assert (p * q) * r == p * (q * r)
            assert p + q == q + p
        record("12b ring axioms", True, "100 random triples")

    def test_projection_certificates(self):
        gen = np.random.default_rng(12)
        worst = 0.0
        for curve in (FOLIUM, NEIL):
            for x in gen.normal(scale=0.5, size=(500, 2)):
                t, d2 = project_to_curve(x, curve)
                res, scale = stationarity_residual(x, curve, t)
                worst = max(worst, res / (1 + scale))
                assert res <= 1e-10 * (1 + scale)
        record("12c projection stationarity", True, f"max |d'(t*)|/(1+scale) = {worst:.1e}")

    def test_isserlis_diagonal(self):
        for d in ([1.0, 1.0, 1.0], [0.5, 2.0, 3.0], [4.0, 0.1, 1.0]):
            M = isserlis(np.diag(d))
            assert np.count_nonzero(M - np.diag(np.diag(M))) == 0
        record("12d Isserlis diagonal for diagonal Sigma", True, "3 cases")

    def test_seeded_determinism(self):
        for name in ("folium-origin", "neil-origin", "ci-singular", "ci-regular"):
            a = run_scenario(SimulationConfig(name, 300, 50, 99))
            b = run_scenario(SimulationConfig(name, 300, 50, 99))
            assert a.samples.tobytes() == b.samples.tobytes()
        record("12e seeded determinism", True, "4 scenarios bit-identical")
