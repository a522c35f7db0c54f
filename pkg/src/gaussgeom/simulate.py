"""Seeded Monte Carlo for likelihood ratio statistics at model singularities.

Four scenarios are supported:

``folium-origin``, ``neil-origin``
    Bivariate normal with identity covariance and mean restricted to a plane
    curve; the statistic is ``n`` times the squared distance from the sample
    mean to the curve.
``ci-singular``, ``ci-regular``
    Trivariate normal under ``X1 _||_ X2`` and ``X1 _||_ X2 | X3``; the
    statistic is the closed-form likelihood ratio against the saturated
    model.

Every replicate ``r`` draws from its own generator seeded by
``(seed, r)``, so results do not depend on evaluation order.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from .polyring import Polynomial, Ring

__all__ = [
    "SCENARIOS",
    "SimulationConfig",
    "EmpiricalDistribution",
    "LimitLaw",
    "CurveSpec",
    "FOLIUM",
    "NEIL",
    "SingularCovarianceError",
    "child_rng",
    "sample_normal",
    "sample_covariance",
    "lrt_ci",
    "lrt_ci_terms",
    "project_to_curve",
    "limit_cdf",
    "limit_law_for",
    "isserlis",
    "isserlis_pairs",
    "run_scenario",
    "ci_term_samples",
    "ks_statistic",
    "ks_two_sample",
    "summarize",
    "write_results",
]

SCENARIOS = ("folium-origin", "neil-origin", "ci-singular", "ci-regular")
ORACLE_SEED = 0x5EED_0F_0AC1E
ORACLE_DRAWS = 1_000_000


class SingularCovarianceError(np.linalg.LinAlgError):
    """Sample covariance is (numerically) singular."""


# ------------------------------------------------------------------ RNG


def child_rng(seed: int, replicate: int, attempt: int = 0) -> np.random.Generator:
    """Counter-based generator for replicate ``replicate`` of master ``seed``."""
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=(int(replicate), int(attempt)))
    return np.random.Generator(np.random.Philox(ss))


def sample_normal(rng: np.random.Generator, mu, Sigma, n: int) -> np.ndarray:
    """``n`` draws from N(mu, Sigma) as an ``n x p`` array."""
    Sigma = np.atleast_2d(np.asarray(Sigma, dtype=float))
    mu = np.broadcast_to(np.asarray(mu, dtype=float), (Sigma.shape[0],))
    if not np.allclose(Sigma, Sigma.T):
        raise np.linalg.LinAlgError("covariance matrix is not symmetric")
    L = np.linalg.cholesky(Sigma)  # raises LinAlgError when not positive definite
    z = rng.standard_normal((int(n), Sigma.shape[0]))
    return mu + z @ L.T


def sample_covariance(data) -> np.ndarray:
    """Maximum-likelihood covariance ``(1/n) sum (x - xbar)(x - xbar)^T``.

    Raises :class:`SingularCovarianceError` if the result is not positive
    definite to working precision.
    """
    X = np.asarray(data, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("need an n x p array with n >= 2")
    Xc = X - X.mean(axis=0)
    S = Xc.T @ Xc / X.shape[0]
    ev = np.linalg.eigvalsh(S)
    if ev[-1] <= 0 or ev[0] <= 1e-12 * ev[-1]:
        raise SingularCovarianceError("sample covariance is singular")
    return S


# ------------------------------------------------------------ CI model


def lrt_ci(S, n: int) -> float:
    """Likelihood ratio statistic for ``X1 _||_ X2`` and ``X1 _||_ X2 | X3``.

    ``n * min(log(s11 det S[23,23] / det S), log(s22 det S[13,13] / det S))``
    """
    S = np.asarray(S, dtype=float)
    _, logdet = np.linalg.slogdet(S)
    a = math.log(S[0, 0]) + np.linalg.slogdet(S[1:, 1:])[1] - logdet
    b = math.log(S[1, 1]) + np.linalg.slogdet(S[np.ix_([0, 2], [0, 2])])[1] - logdet
    return max(n * min(a, b), 0.0)


def _partial_var(S: np.ndarray, i: int, A: Sequence[int]) -> float:
    if not A:
        return float(S[i, i])
    A = list(A)
    return float(S[i, i] - S[i, A] @ np.linalg.solve(S[np.ix_(A, A)], S[A, i]))


def lrt_ci_terms(S, n: int) -> Tuple[float, float, float]:
    """The three log terms of the partial-variance form of :func:`lrt_ci`.

    Returns ``n*log(s11 s22 / (s11 s22 - s12^2))``, ``n*log(s33.2 / s33.12)``
    and ``n*log(s33.1 / s33.12)``; the statistic equals the first plus the
    minimum of the other two.
    """
    S = np.asarray(S, dtype=float)
    s11, s22, s12 = S[0, 0], S[1, 1], S[0, 1]
    t12 = math.log(s11 * s22 / (s11 * s22 - s12 * s12))
    s33_12 = _partial_var(S, 2, [0, 1])
    t13 = math.log(_partial_var(S, 2, [1]) / s33_12)
    t23 = math.log(_partial_var(S, 2, [0]) / s33_12)
    return n * t12, n * t13, n * t23


def isserlis_pairs(p: int):
    return [(i, j) for i in range(p) for j in range(i, p)]


def isserlis(Sigma) -> np.ndarray:
    """Asymptotic covariance of the sample covariances.

    Rows and columns are indexed by ``isserlis_pairs(p)``; the entry for
    ``(i, j), (k, m)`` is ``s_ik s_jm + s_im s_jk``.
    """
    S = np.asarray(Sigma, dtype=float)
    pairs = isserlis_pairs(S.shape[0])
    I = np.array([a for a, _ in pairs])
    J = np.array([b for _, b in pairs])
    return S[np.ix_(I, I)] * S[np.ix_(J, J)] + S[np.ix_(I, J)] * S[np.ix_(J, I)]


# -------------------------------------------------------------- curves


@dataclass(frozen=True)
class CurveSpec:
    """A plane curve ``g(mu1, mu2) = 0`` with polynomial parameterization ``t -> (f1, f2)``."""

    name: str
    g: Polynomial
    f1: Polynomial
    f2: Polynomial

    def __post_init__(self):
        if self.g.ring.ngens != 2 or self.f1.ring.ngens != 1 or self.f1.ring != self.f2.ring:
            raise ValueError("g must be bivariate and f1, f2 univariate in the same variable")

    def check_identity(self) -> bool:
        return self.g.subs([self.f1, self.f2]).is_zero()

    def coeffs(self) -> Tuple[np.ndarray, np.ndarray]:
        """Float coefficient arrays of f1 and f2, highest degree first."""
        return _np_coeffs(self.f1), _np_coeffs(self.f2)


def _np_coeffs(p: Polynomial) -> np.ndarray:
    deg = max(p.total_degree(), 0)
    out = np.zeros(deg + 1)
    for (e,), c in p.terms.items():
        out[deg - e] = float(c)
    return out


_MU = Ring(["mu1", "mu2"])
_T = Ring(["t"])

FOLIUM = CurveSpec("folium", _MU.parse("mu2^2 - mu1^3 - mu1^2"), _T.parse("t^2 - 1"), _T.parse("t^3 - t"))
NEIL = CurveSpec("neil", _MU.parse("mu2^2 - mu1^3"), _T.parse("t^2"), _T.parse("t^3"))


def _distance_poly(x, curve: CurveSpec) -> np.ndarray:
    c1, c2 = curve.coeffs()
    a = np.polysub(c1, [x[0]])
    b = np.polysub(c2, [x[1]])
    return np.trim_zeros(np.polyadd(np.polymul(a, a), np.polymul(b, b)), "f")


def _real_roots(dp: np.ndarray, scan: int = 4096, width: float = 1e-14) -> np.ndarray:
    """Sign-change isolation on a uniform grid over the Cauchy bound, then bisection.

    Roots found by the companion matrix are appended as extra candidates so
    that a pair of roots sharing one grid cell cannot hide a minimizer.
    """
    lead = dp[0]
    bound = 1.0 + np.max(np.abs(dp[1:] / lead)) if len(dp) > 1 else 1.0
    grid = np.linspace(-bound, bound, scan + 1)
    vals = np.polyval(dp, grid)
    roots = [grid[vals == 0]]
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if idx.size:
        lo, hi = grid[idx].copy(), grid[idx + 1].copy()
        flo = vals[idx]
        for _ in range(200):
            if np.all(hi - lo <= width * np.maximum(1.0, np.abs(lo))):
                break
            mid = 0.5 * (lo + hi)
            fm = np.polyval(dp, mid)
            left = np.sign(fm) == np.sign(flo)
            lo = np.where(left, mid, lo)
            flo = np.where(left, fm, flo)
            hi = np.where(left, hi, mid)
        roots.append(0.5 * (lo + hi))
    comp = np.roots(dp)
    comp = comp[np.abs(comp.imag) <= 1e-7 * (1 + np.abs(comp.real))].real
    ddp = np.polyder(dp)
    for _ in range(3):
        step = np.polyval(ddp, comp)
        ok = step != 0
        comp = np.where(ok, comp - np.polyval(dp, comp) / np.where(ok, step, 1), comp)
    roots.append(comp)
    return np.concatenate(roots)


def project_to_curve(x, curve: CurveSpec) -> Tuple[float, float]:
    """Closest curve point to ``x``: returns ``(t_star, squared distance)``.

    The squared distance ``d(t)`` is a polynomial; its global minimizer is a
    real root of ``d'(t)``, so all real roots are isolated and ``d`` is
    compared across them.
    """
    d = _distance_poly(np.asarray(x, dtype=float), curve)
    dp = np.polyder(d)
    cand = _real_roots(dp)
    dv = np.polyval(d, cand)
    k = int(np.argmin(dv))
    return float(cand[k]), float(max(dv[k], 0.0))


def stationarity_residual(x, curve: CurveSpec, t: float) -> Tuple[float, float]:
    """``|d'(t)|`` and the magnitude scale it should be compared against."""
    d = _distance_poly(np.asarray(x, dtype=float), curve)
    dp = np.polyder(d)
    powers = np.abs(t) ** np.arange(len(dp) - 1, -1, -1)
    return float(abs(np.polyval(dp, t))), float(np.sum(np.abs(dp) * powers))


# ---------------------------------------------------------- limit laws


@lru_cache(maxsize=4)
def _w12_plus_min_oracle(draws: int = ORACLE_DRAWS, seed: int = ORACLE_SEED) -> np.ndarray:
    rng = child_rng(seed, 0)
    z = rng.standard_normal((draws, 3)) ** 2
    return np.sort(z[:, 0] + np.minimum(z[:, 1], z[:, 2]))


@dataclass(frozen=True)
class LimitLaw:
    """Reference distribution for a statistic.

    ``kind`` is one of ``chi2`` (with ``df``), ``min-two-chi2-1``,
    ``half-mix-chi2-1-2``, ``w12-plus-min`` or ``empirical-oracle`` (with
    ``samples``).  The last two have Monte Carlo CDFs.
    """

    kind: str
    df: int = 0
    samples: Optional[np.ndarray] = field(default=None, compare=False, repr=False)
    oracle_draws: int = ORACLE_DRAWS
    oracle_seed: int = ORACLE_SEED

    KINDS = ("chi2", "min-two-chi2-1", "half-mix-chi2-1-2", "w12-plus-min", "empirical-oracle")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown limit law {self.kind!r}")
        if self.kind == "chi2" and self.df < 1:
            raise ValueError("chi2 needs df >= 1")
        if self.kind == "empirical-oracle":
            if self.samples is None or len(self.samples) == 0:
                raise ValueError("empirical-oracle needs samples")
            object.__setattr__(self, "samples", np.sort(np.asarray(self.samples, dtype=float)))

    @property
    def closed_form(self) -> bool:
        return self.kind in ("chi2", "min-two-chi2-1", "half-mix-chi2-1-2")

    def oracle(self) -> np.ndarray:
        """Sorted reference draws (Monte Carlo laws only)."""
        if self.kind == "w12-plus-min":
            return _w12_plus_min_oracle(self.oracle_draws, self.oracle_seed)
        if self.kind == "empirical-oracle":
            return self.samples
        raise ValueError(f"{self.kind} has a closed-form CDF")

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("limit laws live on [0, inf)")
        if self.kind == "chi2":
            return stats.chi2.cdf(t, self.df)
        if self.kind == "min-two-chi2-1":
            return 1.0 - (1.0 - stats.chi2.cdf(t, 1)) ** 2
        if self.kind == "half-mix-chi2-1-2":
            return 0.5 * stats.chi2.cdf(t, 1) + 0.5 * stats.chi2.cdf(t, 2)
        ref = self.oracle()
        return np.searchsorted(ref, t, side="right") / len(ref)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "chi2":
            return rng.chisquare(self.df, size)
        if self.kind == "min-two-chi2-1":
            z = rng.standard_normal((size, 2)) ** 2
            return z.min(axis=1)
        if self.kind == "half-mix-chi2-1-2":
            z = rng.standard_normal((size, 2))
            # squared distance to the half-ray {z1 >= 0, z2 = 0}
            return np.where(z[:, 0] >= 0, z[:, 1] ** 2, (z**2).sum(axis=1))
        if self.kind == "w12-plus-min":
            z = rng.standard_normal((size, 3)) ** 2
            return z[:, 0] + np.minimum(z[:, 1], z[:, 2])
        return rng.choice(self.samples, size)


def limit_cdf(law: LimitLaw, t: float) -> float:
    if t < 0:
        raise ValueError("t must be non-negative")
    return float(law.cdf(t))


def limit_law_for(scenario: str) -> LimitLaw:
    return {
        "folium-origin": LimitLaw("min-two-chi2-1"),
        "neil-origin": LimitLaw("half-mix-chi2-1-2"),
        "ci-singular": LimitLaw("w12-plus-min"),
        "ci-regular": LimitLaw("chi2", df=2),
    }[scenario]


# ---------------------------------------------------------- empirical


@dataclass(frozen=True)
class EmpiricalDistribution:
    samples: np.ndarray

    def __post_init__(self):
        s = np.sort(np.asarray(self.samples, dtype=float).ravel())
        if s.size and s[0] < 0:
            raise ValueError("statistics must be non-negative")
        object.__setattr__(self, "samples", s)

    def __len__(self):
        return self.samples.size

    def cdf(self, t):
        return np.searchsorted(self.samples, t, side="right") / self.samples.size

    def quantiles(self, probs=(0.5, 0.9, 0.95, 0.99)) -> list:
        return [float(q) for q in np.quantile(self.samples, probs)]


def ks_statistic(samples, law: LimitLaw) -> float:
    """Sup distance between the empirical CDF of ``samples`` and ``law``.

    Monte Carlo laws are compared through their oracle draws with
    :func:`ks_two_sample`.
    """
    x = samples.samples if isinstance(samples, EmpiricalDistribution) else np.sort(np.asarray(samples, float))
    if x.size == 0:
        raise ValueError("empty sample")
    if not law.closed_form:
        return ks_two_sample(x, law.oracle())
    n = x.size
    F = law.cdf(x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def ks_two_sample(a, b) -> float:
    """Sup distance between two empirical CDFs, evaluated at every jump."""
    a = a.samples if isinstance(a, EmpiricalDistribution) else np.sort(np.asarray(a, float))
    b = b.samples if isinstance(b, EmpiricalDistribution) else np.sort(np.asarray(b, float))
    if a.size == 0 or b.size == 0:
        raise ValueError("empty sample")
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / a.size
    fb = np.searchsorted(b, pts, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


# ----------------------------------------------------------- scenarios


def _default_params(scenario: str):
    if scenario in ("folium-origin", "neil-origin"):
        return np.zeros(2)
    if scenario == "ci-singular":
        return np.eye(3)
    S = np.eye(3)
    S[1, 2] = S[2, 1] = 0.5
    return S


@dataclass
class SimulationConfig:
    scenario: str
    n: int = 1000
    reps: int = 20000
    seed: int = 0
    true_params: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}; choose from {SCENARIOS}")
        if self.n < 2 or self.reps < 1:
            raise ValueError("need n >= 2 and reps >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.true_params is None:
            self.true_params = _default_params(self.scenario)
        tp = np.asarray(self.true_params, dtype=float)
        if self.scenario.startswith("ci"):
            if tp.shape != (3, 3) or not np.allclose(tp, tp.T):
                raise ValueError("CI scenarios need a symmetric 3x3 covariance")
            off = tp[0, 1], tp[0, 2], tp[1, 2]
            if self.scenario == "ci-singular" and any(off):
                raise ValueError("ci-singular needs a diagonal covariance")
            if self.scenario == "ci-regular" and (off[0] or off[1] or not off[2]):
                raise ValueError("ci-regular needs s12 = s13 = 0 and s23 != 0")
        elif tp.shape != (2,):
            raise ValueError("curve scenarios need a 2-vector mean")
        self.true_params = tp

    @property
    def curve(self) -> Optional[CurveSpec]:
        return {"folium-origin": FOLIUM, "neil-origin": NEIL}.get(self.scenario)

    def law(self) -> LimitLaw:
        return limit_law_for(self.scenario)


def _replicate_S(config: SimulationConfig, r: int) -> np.ndarray:
    for attempt in (0, 1):
        rng = child_rng(config.seed, r, attempt)
        data = sample_normal(rng, 0.0, config.true_params, config.n)
        try:
            return sample_covariance(data)
        except SingularCovarianceError:
            if attempt:
                raise
    raise AssertionError("unreachable")


def _replicate(config: SimulationConfig, r: int) -> float:
    curve = config.curve
    if curve is not None:
        rng = child_rng(config.seed, r)
        data = sample_normal(rng, config.true_params, np.eye(2), config.n)
        _, d2 = project_to_curve(data.mean(axis=0), curve)
        return config.n * d2
    return lrt_ci(_replicate_S(config, r), config.n)


def run_scenario(config: SimulationConfig, progress: Optional[Callable[[int], None]] = None) -> EmpiricalDistribution:
    """Simulate ``config.reps`` independent values of the scenario's statistic."""
    out = np.empty(config.reps)
    for r in range(config.reps):
        out[r] = _replicate(config, r)
        if progress is not None:
            progress(r)
    return EmpiricalDistribution(out)


def ci_term_samples(config: SimulationConfig) -> np.ndarray:
    """``reps x 3`` array of the three log terms of the CI statistic per replicate."""
    if not config.scenario.startswith("ci"):
        raise ValueError("term decomposition exists only for the CI scenarios")
    return np.array([lrt_ci_terms(_replicate_S(config, r), config.n) for r in range(config.reps)])


# -------------------------------------------------------------- output


def summarize(config: SimulationConfig, dist: EmpiricalDistribution) -> dict:
    return {
        "scenario": config.scenario,
        "n": config.n,
        "reps": config.reps,
        "seed": int(config.seed),
        "limit_law": config.law().kind + (f"({config.law().df})" if config.law().kind == "chi2" else ""),
        "ks": ks_statistic(dist, config.law()),
        "quantile_levels": [0.5, 0.9, 0.95, 0.99],
        "quantiles": dist.quantiles(),
    }


def write_results(config: SimulationConfig, dist: EmpiricalDistribution, csv_path, json_path) -> dict:
    """Write one statistic per CSV line plus the JSON summary; returns the summary."""
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        for v in dist.samples:
            w.writerow([repr(float(v))])
    summary = summarize(config, dist)
    with open(json_path, "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    return summary
