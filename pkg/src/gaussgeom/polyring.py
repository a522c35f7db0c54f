"""Sparse multivariate polynomials with exact rational coefficients.

A :class:`Ring` fixes an ordered list of variable names.  A
:class:`Polynomial` maps exponent tuples to nonzero :class:`fractions.Fraction`
coefficients, so two polynomials are equal exactly when their term maps are.
Monomial orders are passed to the operations that need them; polynomials
themselves carry no order.

>>> R = Ring(["x", "y"])
>>> p = R.parse("x^2 - y")
>>> p.terms == {(2, 0): 1, (0, 1): -1}
True
>>> str((R.parse("x + y") * R.parse("x - y")))
'x^2 - y^2'
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Dict, Iterable, Mapping, Sequence, Tuple

Monomial = Tuple[int, ...]
Rational = Fraction

__all__ = [
    "Monomial",
    "Rational",
    "Ring",
    "Polynomial",
    "MonomialOrder",
    "LEX",
    "DEGREVLEX",
    "compare_monomials",
    "parse_poly",
    "poly_arith",
    "differentiate",
    "evaluate",
    "determinant",
    "RingMismatchError",
    "PolySyntaxError",
    "UnknownVariableError",
]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class RingMismatchError(ValueError):
    """Operands live in different rings."""


class PolySyntaxError(ValueError):
    """Malformed polynomial text; ``pos`` is the 0-based character offset."""

    def __init__(self, message: str, pos: int, text: str = ""):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos
        self.text = text


class UnknownVariableError(ValueError):
    def __init__(self, name: str):
        super().__init__(f"unknown variable {name!r}")
        self.name = name


# ---------------------------------------------------------------- orders


def _revneg(m: Sequence[int]) -> tuple:
    return tuple(-e for e in reversed(m))


@dataclass(frozen=True)
class MonomialOrder:
    """A term order.

    ``kind`` is ``"lex"``, ``"degrevlex"`` or ``"block"``.  The block order
    compares the first ``block`` variables by degrevlex and breaks ties with
    degrevlex on the remaining ones, which makes it an elimination order for
    the leading block.
    """

    kind: str = "degrevlex"
    block: int = 0

    def __post_init__(self):
        if self.kind not in ("lex", "degrevlex", "block"):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if self.kind == "block" and self.block < 0:
            raise ValueError("block size must be non-negative")

    def key(self, m: Monomial) -> tuple:
        """Sort key: ``a < b`` in this order iff ``key(a) < key(b)``."""
        if self.kind == "lex":
            return m
        if self.kind == "degrevlex":
            return (sum(m), _revneg(m))
        k = self.block
        head, tail = m[:k], m[k:]
        return (sum(head), _revneg(head), sum(tail), _revneg(tail))

    @classmethod
    def from_name(cls, name: str) -> "MonomialOrder":
        name = name.strip().lower()
        if name in ("lp", "lex"):
            return LEX
        if name in ("dp", "degrevlex", "grevlex"):
            return DEGREVLEX
        m = re.fullmatch(r"block\((\d+)\)", name)
        if m:
            return cls("block", int(m.group(1)))
        raise ValueError(f"unknown monomial order {name!r}")

    def __str__(self):
        return f"block({self.block})" if self.kind == "block" else self.kind


LEX = MonomialOrder("lex")
DEGREVLEX = MonomialOrder("degrevlex")


def compare_monomials(a: Monomial, b: Monomial, order: MonomialOrder = DEGREVLEX) -> int:
    """Return -1, 0 or 1 as ``a`` is less than, equal to, or greater than ``b``."""
    if len(a) != len(b):
        raise ValueError("monomials have different lengths")
    ka, kb = order.key(a), order.key(b)
    return (ka > kb) - (ka < kb)


# ------------------------------------------------------------------ ring


class Ring:
    """Polynomial ring Q[x_1, ..., x_n] with a fixed variable order."""

    __slots__ = ("names", "_index")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        for nm in names:
            if not _IDENT.match(nm):
                raise ValueError(f"invalid variable name {nm!r}")
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        self.names = names
        self._index = {nm: i for i, nm in enumerate(names)}

    @property
    def ngens(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariableError(name) from None

    def __eq__(self, other):
        return isinstance(other, Ring) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"Ring({list(self.names)!r})"

    def __len__(self):
        return len(self.names)

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.const(1)

    def const(self, c) -> "Polynomial":
        return Polynomial(self, {(0,) * self.ngens: Fraction(c)})

    def var(self, which) -> "Polynomial":
        i = self.index(which) if isinstance(which, str) else int(which)
        if not 0 <= i < self.ngens:
            raise IndexError(f"variable index {i} out of range")
        e = [0] * self.ngens
        e[i] = 1
        return Polynomial(self, {tuple(e): Fraction(1)})

    def gens(self) -> list:
        return [self.var(i) for i in range(self.ngens)]

    def monomial(self, exps: Sequence[int], coeff=1) -> "Polynomial":
        return Polynomial(self, {tuple(exps): Fraction(coeff)})

    def parse(self, text: str) -> "Polynomial":
        return parse_poly(text, self)


# ------------------------------------------------------------ polynomial


def _add_into(acc: Dict[Monomial, Fraction], m: Monomial, c: Fraction) -> None:
    v = acc.get(m)
    if v is None:
        acc[m] = c
    else:
        v += c
        if v:
            acc[m] = v
        else:
            del acc[m]


class Polynomial:
    """Immutable polynomial over Q.

    ``terms`` maps exponent tuples to nonzero Fractions; treat it as
    read-only.
    """

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: Mapping[Monomial, object] | None = None):
        self.ring = ring
        clean: Dict[Monomial, Fraction] = {}
        n = ring.ngens
        for m, c in (terms or {}).items():
            m = tuple(m)
            if len(m) != n:
                raise ValueError(f"monomial {m} does not match ring of {n} variables")
            if any(e < 0 for e in m):
                raise ValueError(f"negative exponent in {m}")
            c = c if isinstance(c, Fraction) else Fraction(c)
            if c:
                _add_into(clean, m, c)
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ring: Ring, terms: Dict[Monomial, Fraction]) -> "Polynomial":
        # caller guarantees canonical form
        p = object.__new__(cls)
        p.ring = ring
        p.terms = terms
        p._hash = None
        return p

    # -- basic queries
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def degree(self, var) -> int:
        i = self.ring.index(var) if isinstance(var, str) else var
        return max((m[i] for m in self.terms), default=-1)

    def support(self) -> set:
        """Indices of the variables that occur."""
        out = set()
        for m in self.terms:
            out.update(i for i, e in enumerate(m) if e)
        return out

    def leading_monomial(self, order: MonomialOrder = DEGREVLEX) -> Monomial:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms, key=order.key)

    def leading_coefficient(self, order: MonomialOrder = DEGREVLEX) -> Fraction:
        return self.terms[self.leading_monomial(order)]

    def sorted_terms(self, order: MonomialOrder = DEGREVLEX) -> list:
        """Terms as ``(monomial, coeff)`` pairs, largest first."""
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def monic(self, order: MonomialOrder = DEGREVLEX) -> "Polynomial":
        if not self.terms:
            return self
        lc = self.leading_coefficient(order)
        if lc == 1:
            return self
        return Polynomial._raw(self.ring, {m: c / lc for m, c in self.terms.items()})

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()), Fraction(0))

    # -- arithmetic
    def _check(self, other: "Polynomial") -> None:
        if self.ring is not other.ring and self.ring != other.ring:
            raise RingMismatchError(f"{self.ring!r} vs {other.ring!r}")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, _RationalABC)):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self.terms)
        for m, c in other.terms.items():
            _add_into(acc, m, c)
        return Polynomial._raw(self.ring, acc)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self.terms)
        for m, c in other.terms.items():
            _add_into(acc, m, -c)
        return Polynomial._raw(self.ring, acc)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, _RationalABC)) and not isinstance(other, Polynomial):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                _add_into(acc, tuple(a + b for a, b in zip(m1, m2)), c1 * c2)
        return Polynomial._raw(self.ring, acc)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c) -> "Polynomial":
        c = Fraction(c)
        if not c:
            return self.ring.zero()
        return Polynomial._raw(self.ring, {m: v * c for m, v in self.terms.items()})

    def mul_term(self, mono: Monomial, c: Fraction) -> "Polynomial":
        """Multiply by the single term ``c * x^mono``."""
        return Polynomial._raw(
            self.ring,
            {tuple(a + b for a, b in zip(m, mono)): v * c for m, v in self.terms.items()},
        )

    # -- calculus / evaluation
    def diff(self, var) -> "Polynomial":
        return differentiate(self, var)

    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (list, tuple)):
            point = point[0]
        return evaluate(self, point)

    def subs(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Substitute ``images[i]`` for variable ``i``; images share one target ring."""
        if len(images) != self.ring.ngens:
            raise ValueError("need one image per variable")
        if not images:
            return self
        target = images[0].ring
        result = target.zero()
        cache: Dict[Tuple[int, int], Polynomial] = {}
        for m, c in self.terms.items():
            term = target.const(c)
            for i, e in enumerate(m):
                if e:
                    pw = cache.get((i, e))
                    if pw is None:
                        pw = cache[(i, e)] = images[i] ** e
                    term = term * pw
            result = result + term
        return result

    def to_ring(self, ring: Ring) -> "Polynomial":
        """Re-express in ``ring`` by variable name; unused variables may be dropped."""
        pos = []
        for i, nm in enumerate(self.ring.names):
            pos.append(ring._index.get(nm))
        out: Dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            e = [0] * ring.ngens
            for i, k in enumerate(m):
                if k:
                    if pos[i] is None:
                        raise UnknownVariableError(self.ring.names[i])
                    e[pos[i]] = k
            out[tuple(e)] = c
        return Polynomial._raw(ring, out)

    # -- comparison / printing
    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, _RationalABC)):
            return self.terms == self.ring.const(other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"Polynomial({str(self)!r})"

    def __str__(self):
        return self.format()

    def format(self, order: MonomialOrder = DEGREVLEX) -> str:
        if not self.terms:
            return "0"
        names = self.ring.names
        parts = []
        for m, c in self.sorted_terms(order):
            factors = []
            for nm, e in zip(names, m):
                if e == 1:
                    factors.append(nm)
                elif e:
                    factors.append(f"{nm}^{e}")
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = f"{mag}*" + "*".join(factors)
            parts.append(("-" if c < 0 else "+", body))
        sign, body = parts[0]
        out = [("-" if sign == "-" else "") + body]
        for sign, body in parts[1:]:
            out.append(f" {sign} {body}")
        return "".join(out)


# ----------------------------------------------------------- functional API


def poly_arith(p: Polynomial, q: Polynomial | None, op: str, c=None) -> Polynomial:
    """Dispatch ``add``, ``sub``, ``mul``, ``neg`` or ``scale`` (by ``c``)."""
    if op == "neg":
        return -p
    if op == "scale":
        return p.scale(c)
    if q is None:
        raise ValueError(f"{op} needs two operands")
    p._check(q)
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown operation {op!r}")


def differentiate(p: Polynomial, var) -> Polynomial:
    i = p.ring.index(var) if isinstance(var, str) else int(var)
    if not 0 <= i < p.ring.ngens:
        raise IndexError(f"variable index {i} out of range")
    out: Dict[Monomial, Fraction] = {}
    for m, c in p.terms.items():
        e = m[i]
        if e:
            out[m[:i] + (e - 1,) + m[i + 1:]] = c * e
    return Polynomial._raw(p.ring, out)


def evaluate(p: Polynomial, point: Sequence) -> Fraction:
    """Exact value at a rational point (ints, Fractions; floats are converted exactly)."""
    if len(point) != p.ring.ngens:
        raise ValueError(f"point has {len(point)} coordinates, ring has {p.ring.ngens}")
    pt = [x if isinstance(x, Fraction) else Fraction(x) for x in point]
    total = Fraction(0)
    for m, c in p.terms.items():
        v = c
        for x, e in zip(pt, m):
            if e:
                v *= x**e
        total += v
    return total


def determinant(matrix: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Determinant by cofactor expansion along the first row."""
    n = len(matrix)
    if n == 0:
        raise ValueError("empty matrix")
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix is not square")
    if n == 1:
        return matrix[0][0]
    if n == 2:
        return matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]
    total = matrix[0][0].ring.zero()
    for j, entry in enumerate(matrix[0]):
        if entry.is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        cof = entry * determinant(minor)
        total = total + cof if j % 2 == 0 else total - cof
    return total


# ---------------------------------------------------------------- parser

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def _tokenize(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m.group(0).strip() == "":
            break
        start = m.start(1) if m.group(1) else m.start(2) if m.group(2) else m.start(3)
        if m.group(1):
            toks.append(("INT", m.group(1), start))
        elif m.group(2):
            toks.append(("VAR", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*^/()":
                raise PolySyntaxError(f"unexpected character {ch!r}", start, text)
            toks.append((ch, ch, start))
        pos = m.end()
    toks.append(("EOF", "", len(text)))
    return toks


class _Parser:
    # poly := ['+'|'-'] term (('+'|'-') term)*
    # term := factor (('*'|'/') factor)*      '/' only by nonzero constants
    # factor := INT | VAR ['^' INT] | '(' poly ')' ['^' INT]

    def __init__(self, text: str, ring: Ring):
        self.text = text
        self.ring = ring
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            want = "end of input" if kind == "EOF" else repr(kind)
            got = "end of input" if tok[0] == "EOF" else repr(tok[1])
            raise PolySyntaxError(f"expected {want}, found {got}", tok[2], self.text)
        self.i += 1
        return tok

    def parse(self) -> Polynomial:
        p = self.poly()
        self.take("EOF")
        return p

    def poly(self) -> Polynomial:
        sign = 1
        if self.peek()[0] in ("+", "-"):
            sign = -1 if self.take()[0] == "-" else 1
        acc = self.term().scale(sign)
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self) -> Polynomial:
        acc = self.factor()
        while self.peek()[0] in ("*", "/"):
            op, _, pos = self.take()
            f = self.factor()
            if op == "*":
                acc = acc * f
            else:
                if not f.is_constant() or f.is_zero():
                    raise PolySyntaxError("division only by a nonzero constant", pos, self.text)
                acc = acc.scale(1 / f.constant_value())
        return acc

    def _exponent(self) -> int:
        if self.peek()[0] == "^":
            self.take()
            return int(self.take("INT")[1])
        return 1

    def factor(self) -> Polynomial:
        kind, val, pos = self.peek()
        if kind == "INT":
            self.take()
            return self.ring.const(int(val))
        if kind == "VAR":
            self.take()
            if val not in self.ring._index:
                raise UnknownVariableError(val)
            return self.ring.var(val) ** self._exponent()
        if kind == "(":
            self.take()
            inner = self.poly()
            self.take(")")
            return inner ** self._exponent()
        what = "end of input" if kind == "EOF" else repr(val)
        raise PolySyntaxError(f"unexpected {what}", pos, self.text)


def parse_poly(text: str, variables) -> Polynomial:
    """Parse ``text`` over ``variables`` (a :class:`Ring` or a list of names)."""
    ring = variables if isinstance(variables, Ring) else Ring(variables)
    if not text.strip():
        raise PolySyntaxError("empty input", 0, text)
    return _Parser(text, ring).parse()
