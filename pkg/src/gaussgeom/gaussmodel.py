"""Gaussian DAG models as polynomial maps, and their algebraic companions.

A :class:`GaussianDagModel` holds a linear structural equation model on an
acyclic digraph.  Every edge ``u -> v`` carries a regression coefficient and
every node a (conditional) variance, unless it is flagged ``fixvar`` in which
case its variance is pinned to 1.  The covariance of the observed nodes is a
polynomial in these indeterminates because the structural matrix of an
acyclic graph is unipotent.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .groebner import DEFAULT_PAIR_CAP, Ideal, eliminate
from .polyring import Polynomial, Ring, determinant, differentiate

__all__ = [
    "Node",
    "GaussianDagModel",
    "SymbolicCovariance",
    "ThetaPoint",
    "ModelError",
    "sigma_ring",
    "sigma_name",
    "build_sigma",
    "ci_constraints",
    "parse_ci_query",
    "identifiability_ideal",
    "verify_fiber",
    "model_dimension_numeric",
    "implicitize",
    "random_theta",
    "sign_flip",
    "hidden_hub_model",
    "HIDDEN_HUB_MODEL_TEXT",
]


class ModelError(ValueError):
    """Invalid model description, index set or parameter point."""


@dataclass(frozen=True)
class Node:
    name: str
    observed: bool = True
    fixed_variance: bool = False


class GaussianDagModel:
    """Linear Gaussian structural equation model on an acyclic digraph.

    Parameters are named ``b1, b2, ...`` for edges in the order given and
    ``w1, w2, ...`` for the free variances in node order, unless names are
    supplied.  Means are zero throughout.
    """

    def __init__(
        self,
        nodes: Sequence[Node],
        edges: Sequence[Tuple[str, str]],
        edge_names: Optional[Sequence[str]] = None,
        variance_names: Optional[Sequence[str]] = None,
    ):
        self.nodes = list(nodes)
        names = [nd.name for nd in self.nodes]
        if len(set(names)) != len(names):
            raise ModelError("duplicate node names")
        self._pos = {nm: i for i, nm in enumerate(names)}
        self.edges = []
        for u, v in edges:
            if u not in self._pos or v not in self._pos:
                raise ModelError(f"edge {u} -> {v} references an unknown node")
            if u == v:
                raise ModelError(f"self-loop at {u}")
            if (u, v) in self.edges:
                raise ModelError(f"duplicate edge {u} -> {v}")
            self.edges.append((u, v))
        self.topo = self._topological_order()

        free = [nd.name for nd in self.nodes if not nd.fixed_variance]
        edge_names = list(edge_names) if edge_names else [f"b{k + 1}" for k in range(len(self.edges))]
        variance_names = list(variance_names) if variance_names else [f"w{k + 1}" for k in range(len(free))]
        if len(edge_names) != len(self.edges) or len(variance_names) != len(free):
            raise ModelError("wrong number of parameter names")
        self.edge_params = edge_names
        self.variance_params = variance_names
        self.variance_of = dict(zip(free, variance_names))
        try:
            self.ring = Ring(edge_names + variance_names)
        except ValueError as exc:
            raise ModelError(str(exc)) from None

    def _topological_order(self) -> List[str]:
        # Kahn's algorithm, ties broken by declaration order
        indeg = {nd.name: 0 for nd in self.nodes}
        for _, v in self.edges:
            indeg[v] += 1
        order = []
        ready = [nd.name for nd in self.nodes if indeg[nd.name] == 0]
        while ready:
            ready.sort(key=self._pos.__getitem__)
            u = ready.pop(0)
            order.append(u)
            for a, b in self.edges:
                if a == u:
                    indeg[b] -= 1
                    if indeg[b] == 0:
                        ready.append(b)
        if len(order) != len(self.nodes):
            raise ModelError("graph has a directed cycle")
        return order

    @property
    def params(self) -> Tuple[str, ...]:
        return self.ring.names

    @property
    def observed(self) -> List[str]:
        return [nd.name for nd in self.nodes if nd.observed]

    @property
    def p(self) -> int:
        return len(self.observed)

    def parents(self, v: str) -> List[Tuple[str, str]]:
        """``(parent, edge parameter)`` pairs of node ``v``."""
        return [(u, self.edge_params[k]) for k, (u, w) in enumerate(self.edges) if w == v]

    def variance_indices(self) -> List[int]:
        return [self.ring.index(nm) for nm in self.variance_params]

    def theta(self, values) -> "ThetaPoint":
        """Build a parameter point from a sequence or a ``{name: value}`` map."""
        if isinstance(values, dict):
            missing = set(self.params) - set(values)
            if missing:
                raise ModelError(f"missing parameter values: {sorted(missing)}")
            values = [values[nm] for nm in self.params]
        return ThetaPoint(self, tuple(Fraction(v) for v in values))

    @classmethod
    def from_text(cls, text: str) -> "GaussianDagModel":
        """Parse ``node <name> observed|hidden [fixvar]`` and ``edge <u> <v> [param]`` lines."""
        nodes, edges, enames = [], [], []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tok = line.split()
            if tok[0] == "node" and len(tok) in (3, 4):
                if tok[2] not in ("observed", "hidden"):
                    raise ModelError(f"line {lineno}: visibility must be observed or hidden")
                if len(tok) == 4 and tok[3] != "fixvar":
                    raise ModelError(f"line {lineno}: unknown node flag {tok[3]!r}")
                nodes.append(Node(tok[1], tok[2] == "observed", len(tok) == 4))
            elif tok[0] == "edge" and len(tok) in (3, 4):
                edges.append((tok[1], tok[2]))
                enames.append(tok[3] if len(tok) == 4 else None)
            else:
                raise ModelError(f"line {lineno}: cannot parse {raw.strip()!r}")
        if any(enames):
            if not all(enames):
                raise ModelError("either name every edge parameter or none")
            return cls(nodes, edges, edge_names=enames)
        return cls(nodes, edges)

    def to_text(self) -> str:
        lines = []
        for nd in self.nodes:
            flag = " fixvar" if nd.fixed_variance else ""
            lines.append(f"node {nd.name} {'observed' if nd.observed else 'hidden'}{flag}")
        for (u, v), nm in zip(self.edges, self.edge_params):
            lines.append(f"edge {u} {v} {nm}")
        return "\n".join(lines) + "\n"

    def __repr__(self):
        return f"GaussianDagModel(nodes={[nd.name for nd in self.nodes]}, edges={self.edges})"


HIDDEN_HUB_MODEL_TEXT = """\
# X1, X2 -> H -> X3, X4 with Var[H | X1, X2] = 1
node X1 observed
node X2 observed
node X3 observed
node X4 observed
node H hidden fixvar
edge X1 H b1
edge X2 H b2
edge H X3 b3
edge H X4 b4
"""


def hidden_hub_model() -> GaussianDagModel:
    """Four observed variables linked through one hidden node (two causes, two effects)."""
    return GaussianDagModel.from_text(HIDDEN_HUB_MODEL_TEXT)


@dataclass(frozen=True)
class ThetaPoint:
    model: GaussianDagModel
    values: Tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.values) != len(self.model.params):
            raise ModelError(f"expected {len(self.model.params)} values, got {len(self.values)}")
        for i in self.model.variance_indices():
            if self.values[i] <= 0:
                raise ModelError(f"variance {self.model.params[i]} must be positive")

    def as_dict(self) -> Dict[str, Fraction]:
        return dict(zip(self.model.params, self.values))

    def __str__(self):
        return ", ".join(f"{k}={v}" for k, v in self.as_dict().items())


# ----------------------------------------------------------- covariance


def sigma_name(i: int, j: int, p: int) -> str:
    """Name of the covariance indeterminate for 1-based ``i <= j``."""
    i, j = min(i, j), max(i, j)
    return f"s{i}{j}" if p <= 9 else f"s{i}_{j}"


def sigma_ring(p: int) -> Ring:
    """Ring of the ``p(p+1)/2`` covariance indeterminates, row-major upper triangle."""
    return Ring([sigma_name(i, j, p) for i in range(1, p + 1) for j in range(i, p + 1)])


class SymbolicCovariance:
    """Upper triangle of a symmetric polynomial matrix (0-based indices)."""

    def __init__(self, names: Sequence[str], entries: Dict[Tuple[int, int], Polynomial], ring: Ring):
        self.names = list(names)
        self.entries = entries
        self.ring = ring

    @property
    def p(self) -> int:
        return len(self.names)

    def __getitem__(self, ij) -> Polynomial:
        i, j = ij
        return self.entries[(min(i, j), max(i, j))]

    def upper(self) -> List[Tuple[Tuple[int, int], Polynomial]]:
        return [((i, j), self.entries[(i, j)]) for i in range(self.p) for j in range(i, self.p)]

    def matrix(self) -> List[List[Polynomial]]:
        return [[self[i, j] for j in range(self.p)] for i in range(self.p)]

    def evaluate(self, theta: Sequence) -> List[List[Fraction]]:
        vals = theta.values if isinstance(theta, ThetaPoint) else theta
        cache = {k: v(vals) for k, v in self.entries.items()}
        return [[cache[(min(i, j), max(i, j))] for j in range(self.p)] for i in range(self.p)]

    def __str__(self):
        return "\n".join(f"({i + 1},{j + 1}): {e}" for (i, j), e in self.upper())


def build_sigma(model: GaussianDagModel) -> SymbolicCovariance:
    """Covariance of the observed nodes as polynomials in the model parameters.

    Walks the nodes in topological order using
    ``cov(u, v) = sum_w beta_wv cov(u, w)`` over parents ``w`` of ``v`` and
    ``var(v) = omega_v + sum_{w, w'} beta_wv beta_w'v cov(w, w')``.
    """
    R = model.ring
    cov: Dict[Tuple[str, str], Polynomial] = {}

    def get(a, b):
        return cov[(a, b)] if (a, b) in cov else cov[(b, a)]

    done: List[str] = []
    for v in model.topo:
        pa = [(u, R.var(nm)) for u, nm in model.parents(v)]
        for u in done:
            acc = R.zero()
            for w, beta in pa:
                acc = acc + beta * get(u, w)
            cov[(u, v)] = acc
        var = R.var(model.variance_of[v]) if v in model.variance_of else R.one()
        for w, bw in pa:
            for x, bx in pa:
                var = var + bw * bx * get(w, x)
        cov[(v, v)] = var
        done.append(v)

    obs = model.observed
    entries = {}
    for i in range(len(obs)):
        for j in range(i, len(obs)):
            entries[(i, j)] = get(obs[i], obs[j])
    return SymbolicCovariance(obs, entries, R)


# ------------------------------------------------------ CI constraints


def _as_index_set(s) -> List[int]:
    if s is None:
        return []
    if isinstance(s, int):
        return [s]
    return sorted(set(int(x) for x in s))


def ci_constraints(A, B, C, p: int) -> List[Polynomial]:
    """Determinants ``det(Sigma[{i} ∪ C, {j} ∪ C])`` for ``i in A``, ``j in B``.

    Index sets are 1-based.  Rows and columns are taken in increasing index
    order, so ``({1}, {2}, {3})`` yields ``s12*s33 - s13*s23``.
    """
    A, B, C = _as_index_set(A), _as_index_set(B), _as_index_set(C)
    for s in (A, B, C):
        for x in s:
            if not 1 <= x <= p:
                raise ModelError(f"index {x} outside 1..{p}")
    if set(A) & set(B) or set(A) & set(C) or set(B) & set(C):
        raise ModelError("index sets A, B, C must be pairwise disjoint")
    if not A or not B:
        raise ModelError("A and B must be nonempty")
    R = sigma_ring(p)
    out = []
    for i in A:
        for j in B:
            rows = sorted([i] + C)
            cols = sorted([j] + C)
            M = [[R.var(sigma_name(r, c, p)) for c in cols] for r in rows]
            out.append(determinant(M))
    return out


_CI_QUERY = re.compile(
    r"^\s*ci\s+A=\{([^}]*)\}\s+B=\{([^}]*)\}\s+C=\{([^}]*)\}\s+p=(\d+)\s*$"
)


def parse_ci_query(text: str):
    """Parse ``ci A={1} B={2} C={3} p=3`` into ``(A, B, C, p)``."""
    m = _CI_QUERY.match(text)
    if not m:
        raise ModelError(f"cannot parse CI query {text!r}")

    def ints(s):
        return [int(x) for x in s.replace(",", " ").split()]

    try:
        return ints(m.group(1)), ints(m.group(2)), ints(m.group(3)), int(m.group(4))
    except ValueError:
        raise ModelError(f"non-integer index in {text!r}") from None


# ------------------------------------------------------ identifiability


def _check_theta(model: GaussianDagModel, theta) -> ThetaPoint:
    if isinstance(theta, ThetaPoint):
        if theta.model is not model and theta.model.params != model.params:
            raise ModelError("parameter point belongs to a different model")
        return theta
    return model.theta(theta)


def identifiability_ideal(model: GaussianDagModel, theta0) -> Ideal:
    """Ideal of ``Sigma(theta0) - Sigma(theta)`` over the upper triangle."""
    theta0 = _check_theta(model, theta0)
    sig = build_sigma(model)
    R = model.ring
    gens = [R.const(entry(theta0.values)) - entry for _, entry in sig.upper()]
    return Ideal(gens, R)


def verify_fiber(model: GaussianDagModel, theta0, candidate) -> bool:
    """Exact check that ``candidate`` and ``theta0`` give the same covariance."""
    theta0 = _check_theta(model, theta0)
    candidate = _check_theta(model, candidate)
    sig = build_sigma(model)
    return all(e(theta0.values) == e(candidate.values) for _, e in sig.upper())


def sign_flip(theta: ThetaPoint) -> ThetaPoint:
    """Negate every edge coefficient, keeping the variances."""
    model = theta.model
    edge_idx = {model.ring.index(nm) for nm in model.edge_params}
    vals = tuple(-v if i in edge_idx else v for i, v in enumerate(theta.values))
    return ThetaPoint(model, vals)


def random_theta(model: GaussianDagModel, rng: random.Random) -> ThetaPoint:
    """Small random rational point: ``num/den`` with ``num`` in ±1..20, ``den`` in 1..5.

    Variances are replaced by ``|q| + 1`` so they stay positive.
    """
    var_idx = set(model.variance_indices())
    vals = []
    for i in range(len(model.params)):
        num = rng.choice([k for k in range(-20, 21) if k])
        q = Fraction(num, rng.randint(1, 5))
        vals.append(abs(q) + 1 if i in var_idx else q)
    return ThetaPoint(model, tuple(vals))


def _float_eval(p: Polynomial, x: np.ndarray) -> float:
    total = 0.0
    for m, c in p.terms.items():
        v = float(c)
        for xi, e in zip(x, m):
            if e:
                v *= xi**e
        total += v
    return total


def model_dimension_numeric(model: GaussianDagModel, theta, tol: float = 1e-9) -> int:
    """Numerical rank of the Jacobian of ``theta -> upper triangle of Sigma``.

    Derivatives are exact; only the evaluation at ``theta`` is in floating
    point.  Singular values below ``tol`` times the largest one count as zero.
    """
    x = np.asarray([float(v) for v in (theta.values if isinstance(theta, ThetaPoint) else theta)])
    if x.shape != (len(model.params),):
        raise ModelError("parameter vector has the wrong length")
    if any(x[i] <= 0 for i in model.variance_indices()):
        raise ModelError("variances must be positive")
    sig = build_sigma(model)
    rows = []
    for _, entry in sig.upper():
        rows.append([_float_eval(differentiate(entry, k), x) for k in range(len(x))])
    J = np.array(rows, dtype=float).reshape(len(rows), len(x))
    if J.size == 0:
        return 0
    s = np.linalg.svd(J, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def implicitize(model: GaussianDagModel, pair_cap: int = DEFAULT_PAIR_CAP) -> Ideal:
    """Vanishing ideal of the covariance image, in the ``s_ij`` variables.

    Eliminates the model parameters from ``<s_ij - Sigma_ij(theta)>``.
    """
    sig = build_sigma(model)
    p = sig.p
    S = sigma_ring(p)
    big = Ring(tuple(model.params) + S.names)
    gens = []
    for (i, j), entry in sig.upper():
        gens.append(big.var(sigma_name(i + 1, j + 1, p)) - entry.to_ring(big))
    elim = eliminate(Ideal(gens, big), range(len(model.params)), pair_cap=pair_cap)
    return Ideal([g.to_ring(S) for g in elim.generators], S)
