"""Buchberger's algorithm and the ideal queries built on it.

Bases are always returned reduced (monic, inter-reduced) and sorted by
leading monomial, largest first, so a basis is a canonical description of
its ideal for a given order.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence

from .polyring import (
    DEGREVLEX,
    Monomial,
    MonomialOrder,
    Polynomial,
    Ring,
    determinant,
    differentiate,
    parse_poly,
)

__all__ = [
    "Ideal",
    "GroebnerBasis",
    "ResourceLimitError",
    "DimensionError",
    "DEFAULT_PAIR_CAP",
    "normal_form",
    "buchberger",
    "ideal_dimension",
    "multiplicity",
    "standard_monomials",
    "eliminate",
    "ideal_intersect",
    "jacobian",
    "singular_locus_ideal",
    "parse_ideal_file",
    "format_ideal_file",
]

DEFAULT_PAIR_CAP = 100_000


class ResourceLimitError(RuntimeError):
    """Buchberger processed more critical pairs than allowed."""


class DimensionError(ValueError):
    """Multiplicity was requested for an ideal that is not zero-dimensional."""


class Ideal:
    """An ideal given by generators; zero generators are dropped."""

    def __init__(self, generators: Iterable[Polynomial], ring: Optional[Ring] = None):
        gens = list(generators)
        if ring is None:
            if not gens:
                raise ValueError("ring required for an ideal with no generators")
            ring = gens[0].ring
        for g in gens:
            if g.ring != ring:
                raise ValueError("generators live in different rings")
        self.ring = ring
        self.generators = [g for g in gens if not g.is_zero()]
        self._gb: Dict[MonomialOrder, GroebnerBasis] = {}

    def groebner(self, order: MonomialOrder = DEGREVLEX, pair_cap: int = DEFAULT_PAIR_CAP) -> "GroebnerBasis":
        gb = self._gb.get(order)
        if gb is None:
            gb = self._gb[order] = buchberger(self, order, pair_cap=pair_cap)
        return gb

    def dimension(self) -> int:
        return ideal_dimension(self.groebner())

    def multiplicity(self) -> int:
        return multiplicity(self.groebner())

    def __contains__(self, f: Polynomial) -> bool:
        return self.groebner().contains(f)

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __repr__(self):
        return f"Ideal({[str(g) for g in self.generators]!r})"


@dataclass
class GroebnerBasis:
    elements: List[Polynomial]
    order: MonomialOrder
    ring: Ring
    reduced: bool = True
    pairs_processed: int = field(default=0, compare=False)

    def leading_monomials(self) -> List[Monomial]:
        return [g.leading_monomial(self.order) for g in self.elements]

    def normal_form(self, f: Polynomial) -> Polynomial:
        return normal_form(f, self.elements, self.order)

    def contains(self, f: Polynomial) -> bool:
        return normal_form(f, self.elements, self.order).is_zero()

    def is_unit(self) -> bool:
        return any(g.is_constant() for g in self.elements)

    def ideal(self) -> Ideal:
        return Ideal(self.elements, self.ring)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __str__(self):
        return "\n".join(g.format(self.order) for g in self.elements)


# ------------------------------------------------------------ division


def _divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub_mono(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


class _Divisor:
    __slots__ = ("lm", "lc", "tail")

    def __init__(self, g: Polynomial, order: MonomialOrder):
        self.lm = g.leading_monomial(order)
        self.lc = g.terms[self.lm]
        self.tail = [(m, c) for m, c in g.terms.items() if m != self.lm]


def _reduce(terms: Dict[Monomial, Fraction], divisors: Sequence[_Divisor], key):
    """Remainder of ``terms`` on division; mutates ``terms``."""
    rem: Dict[Monomial, Fraction] = {}
    while terms:
        m = max(terms, key=key)
        c = terms[m]
        for d in divisors:
            if _divides(d.lm, m):
                q = _sub_mono(m, d.lm)
                f = c / d.lc
                del terms[m]
                for tm, tc in d.tail:
                    mm = tuple(a + b for a, b in zip(tm, q))
                    v = terms.get(mm, 0) - f * tc
                    if v:
                        terms[mm] = v
                    else:
                        terms.pop(mm, None)
                break
        else:
            rem[m] = terms.pop(m)
    return rem


def normal_form(f: Polynomial, G: Sequence[Polynomial], order: MonomialOrder = DEGREVLEX) -> Polynomial:
    """Fully reduced remainder of ``f`` modulo ``G``.

    The result differs from ``f`` by an element of the ideal spanned by ``G``
    and none of its monomials is divisible by a leading monomial of ``G``.
    """
    for g in G:
        f._check(g)
    divisors = [_Divisor(g, order) for g in G if not g.is_zero()]
    if not divisors:
        return f
    return Polynomial._raw(f.ring, _reduce(dict(f.terms), divisors, order.key))


# ---------------------------------------------------------- Buchberger


def _spoly(f: Polynomial, g: Polynomial, lf: Monomial, lg: Monomial) -> Polynomial:
    l = _lcm(lf, lg)
    a = f.mul_term(_sub_mono(l, lf), 1 / f.terms[lf])
    b = g.mul_term(_sub_mono(l, lg), 1 / g.terms[lg])
    return a - b


def _interreduce(polys: List[Polynomial], order: MonomialOrder) -> List[Polynomial]:
    key = order.key
    polys = [p.monic(order) for p in polys if not p.is_zero()]
    lms = [p.leading_monomial(order) for p in polys]
    # minimal basis: drop elements whose leading monomial is a multiple of another's
    keep = []
    for i, li in enumerate(lms):
        redundant = False
        for j, lj in enumerate(lms):
            if i != j and _divides(lj, li) and (lj != li or j < i):
                redundant = True
                break
        if not redundant:
            keep.append(i)
    polys = [polys[i] for i in keep]
    out = []
    for i, p in enumerate(polys):
        others = [_Divisor(q, order) for j, q in enumerate(polys) if j != i]
        lm = p.leading_monomial(order)
        tail = {m: c for m, c in p.terms.items() if m != lm}
        red = _reduce(tail, others, key) if others else tail
        red[lm] = Fraction(1)
        out.append(Polynomial._raw(p.ring, red))
    out.sort(key=lambda p: key(p.leading_monomial(order)), reverse=True)
    return out


def buchberger(I: Ideal, order: MonomialOrder = DEGREVLEX, pair_cap: int = DEFAULT_PAIR_CAP) -> GroebnerBasis:
    """Reduced Groebner basis of ``I`` with respect to ``order``.

    Pairs are processed by the normal strategy (smallest lcm first).  Pairs
    with coprime leading monomials are skipped, as are pairs whose lcm is
    covered by a third element with both companion pairs already treated.
    Raises :class:`ResourceLimitError` after ``pair_cap`` processed pairs.
    """
    key = order.key
    ring = I.ring
    G: List[Polynomial] = []
    LM: List[Monomial] = []
    divisors: List[_Divisor] = []

    for p in I.generators:
        p = p.monic(order)
        G.append(p)
        LM.append(p.leading_monomial(order))
        divisors.append(_Divisor(p, order))

    if any(not any(m) for m in LM):
        return GroebnerBasis([ring.one()], order, ring, True, 0)

    pending = set()
    heap: list = []
    processed = 0

    def push(i, j):
        l = _lcm(LM[i], LM[j])
        pending.add((i, j))
        heapq.heappush(heap, (sum(l), key(l), j, i))

    for j in range(len(G)):
        for i in range(j):
            push(i, j)

    def chain_criterion(i, j, l):
        for k in range(len(G)):
            if k == i or k == j:
                continue
            if not _divides(LM[k], l):
                continue
            if (min(i, k), max(i, k)) in pending or (min(j, k), max(j, k)) in pending:
                continue
            return True
        return False

    while heap:
        _, _, j, i = heapq.heappop(heap)
        pending.discard((i, j))
        li, lj = LM[i], LM[j]
        l = _lcm(li, lj)
        if all(a == 0 or b == 0 for a, b in zip(li, lj)):
            continue
        if chain_criterion(i, j, l):
            continue
        processed += 1
        if processed > pair_cap:
            raise ResourceLimitError(f"more than {pair_cap} critical pairs processed")
        s = _spoly(G[i], G[j], li, lj)
        h = Polynomial._raw(ring, _reduce(dict(s.terms), divisors, key))
        if h.is_zero():
            continue
        h = h.monic(order)
        hl = h.leading_monomial(order)
        if not any(hl):
            return GroebnerBasis([ring.one()], order, ring, True, processed)
        n = len(G)
        G.append(h)
        LM.append(hl)
        divisors.append(_Divisor(h, order))
        for k in range(n):
            push(k, n)

    return GroebnerBasis(_interreduce(G, order), order, ring, True, processed)


# -------------------------------------------------------------- queries


def _mask(m: Monomial) -> int:
    out = 0
    for i, e in enumerate(m):
        if e:
            out |= 1 << i
    return out


def ideal_dimension(G: GroebnerBasis) -> int:
    """Krull dimension from the leading monomials; -1 for the unit ideal.

    The dimension is the size of the largest set of variables that contains
    the support of no leading monomial.
    """
    n = G.ring.ngens
    masks = [_mask(m) for m in G.leading_monomials()]
    if any(mk == 0 for mk in masks):
        return -1
    if not masks:
        return n
    full = (1 << n) - 1
    for size in range(n, -1, -1):
        for combo in itertools.combinations(range(n), size):
            s = 0
            for i in combo:
                s |= 1 << i
            if all(mk & ~s & full for mk in masks):
                return size
    return 0


def standard_monomials(G: GroebnerBasis, limit: int = 1_000_000) -> List[Monomial]:
    """Monomials divisible by no leading monomial (zero-dimensional case)."""
    if ideal_dimension(G) != 0:
        raise DimensionError("ideal is not zero-dimensional")
    lms = G.leading_monomials()
    n = G.ring.ngens
    start = (0,) * n
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for m in frontier:
            for i in range(n):
                c = m[:i] + (m[i] + 1,) + m[i + 1:]
                if c in seen or any(_divides(l, c) for l in lms):
                    continue
                seen.add(c)
                nxt.append(c)
        if len(seen) > limit:
            raise ResourceLimitError("too many standard monomials")
        frontier = nxt
    return sorted(seen, key=G.order.key)


def multiplicity(G: GroebnerBasis) -> int:
    """Vector-space dimension of the quotient ring of a zero-dimensional ideal."""
    return len(standard_monomials(G))


# ---------------------------------------------------- elimination & co.


def eliminate(I: Ideal, drop_vars: Iterable, pair_cap: int = DEFAULT_PAIR_CAP) -> Ideal:
    """Generators of the intersection of ``I`` with the subring free of ``drop_vars``.

    Variables are permuted internally so the dropped block leads a block
    order; the returned generators form the reduced degrevlex basis of the
    elimination ideal, expressed in the original ring.
    """
    ring = I.ring
    drop = sorted({ring.index(v) if isinstance(v, str) else int(v) for v in drop_vars})
    keep = [i for i in range(ring.ngens) if i not in set(drop)]
    perm = drop + keep
    pring = Ring([ring.names[i] for i in perm])
    order = MonomialOrder("block", len(drop)) if drop else DEGREVLEX
    gens = [g.to_ring(pring) for g in I.generators]
    gb = buchberger(Ideal(gens, pring), order, pair_cap=pair_cap)
    k = len(drop)
    kept = [g for g in gb.elements if all(not any(m[:k]) for m in g.terms)]
    return Ideal([g.to_ring(ring) for g in kept], ring)


def _fresh_name(ring: Ring, stem: str = "t") -> str:
    name = f"_{stem}"
    n = 0
    while name in ring.names:
        n += 1
        name = f"_{stem}{n}"
    return name


def ideal_intersect(I: Ideal, J: Ideal, pair_cap: int = DEFAULT_PAIR_CAP) -> Ideal:
    """``I ∩ J`` as the elimination of ``t`` from ``<t*I, (1-t)*J>``."""
    if I.ring != J.ring:
        raise ValueError("ideals live in different rings")
    ring = I.ring
    t_name = _fresh_name(ring)
    big = Ring((t_name,) + ring.names)
    t = big.var(0)
    gens = [t * f.to_ring(big) for f in I.generators]
    gens += [(1 - t) * g.to_ring(big) for g in J.generators]
    elim = eliminate(Ideal(gens, big), [0], pair_cap=pair_cap)
    return Ideal([g.to_ring(ring) for g in elim.generators], ring)


def jacobian(polys: Sequence[Polynomial], ring: Ring) -> List[List[Polynomial]]:
    return [[differentiate(f, j) for j in range(ring.ngens)] for f in polys]


def singular_locus_ideal(I: Ideal, codim: int) -> Ideal:
    """Generators of ``I`` together with all ``codim`` x ``codim`` Jacobian minors."""
    if codim < 1:
        raise ValueError("codim must be at least 1")
    ring = I.ring
    J = jacobian(I.generators, ring)
    minors = []
    for rows in itertools.combinations(range(len(J)), codim):
        for cols in itertools.combinations(range(ring.ngens), codim):
            sub = [[J[r][c] for c in cols] for r in rows]
            d = determinant(sub)
            if not d.is_zero():
                minors.append(d)
    return Ideal(list(I.generators) + minors, ring)


# ---------------------------------------------------------------- files


def parse_ideal_file(text: str) -> Ideal:
    """Read ``vars: x, y`` followed by one polynomial per line.

    Blank lines and lines starting with ``#`` are ignored.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].lower().startswith("vars:"):
        raise ValueError("ideal file must start with a 'vars:' line")
    names = [v.strip() for v in lines[0][5:].split(",") if v.strip()]
    ring = Ring(names)
    return Ideal([parse_poly(ln, ring) for ln in lines[1:]], ring)


def format_ideal_file(polys: Iterable[Polynomial], ring: Ring, order: MonomialOrder = DEGREVLEX) -> str:
    polys = [p for p in polys if not p.is_zero()]
    polys.sort(key=lambda p: order.key(p.leading_monomial(order)), reverse=True)
    body = [p.format(order) for p in polys]
    return "\n".join([f"vars: {', '.join(ring.names)}"] + body) + "\n"
