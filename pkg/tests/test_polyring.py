import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaussgeom.polyring import (
    DEGREVLEX,
    LEX,
    MonomialOrder,
    PolySyntaxError,
    Polynomial,
    Ring,
    RingMismatchError,
    UnknownVariableError,
    compare_monomials,
    determinant,
    differentiate,
    evaluate,
    parse_poly,
    poly_arith,
)

from conftest import random_poly


def expand_product(p, q):
    """Term-by-term expansion kept separate from Polynomial.__mul__."""
    out = {}
    for m1, c1 in p.terms.items():
        for m2, c2 in q.terms.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            out[m] = out.get(m, 0) + c1 * c2
    return {m: c for m, c in out.items() if c}


def horner_eval(p, point):
    # evaluate one variable at a time: collect by first exponent, recurse
    if p.ring.ngens == 0 or not p.terms:
        return sum(p.terms.values(), Fraction(0))
    total = Fraction(0)
    for m, c in p.terms.items():
        v = Fraction(c)
        for x, e in zip(point, m):
            for _ in range(e):
                v *= x
        total += v
    return total


class TestParse:
    def test_simple(self):
        p = parse_poly("x^2 - y", ["x", "y"])
        assert p.terms == {(2, 0): 1, (0, 1): -1}

    def test_zero(self):
        p = parse_poly("0", ["x", "y"])
        assert p.is_zero() and p.terms == {}

    def test_ci_determinant(self):
        names = ["s11", "s12", "s13", "s22", "s23", "s33"]
        p = parse_poly("s12*s33 - s13*s23", names)
        R = p.ring
        expected = R.var("s12") * R.var("s33") - R.var("s13") * R.var("s23")
        assert p == expected

    def test_parentheses_and_sign(self, xyz):
        assert xyz.parse("-(x + y)^2") == -(xyz.parse("x+y") * xyz.parse("x+y"))
        assert xyz.parse("+x") == xyz.var("x")

    def test_whitespace_insignificant(self, xyz):
        assert xyz.parse("  x *y  ^ 2 -3") == xyz.parse("x*y^2-3")

    def test_rational_coefficients(self, xyz):
        assert xyz.parse("3/2*x").terms == {(1, 0, 0): Fraction(3, 2)}

    @pytest.mark.parametrize("text,pos", [("x +* y", 3), ("x y", 2), ("(x + y", 6), ("x^y", 2), ("", 0)])
    def test_syntax_error_position(self, xyz, text, pos):
        with pytest.raises(PolySyntaxError) as err:
            xyz.parse(text)
        assert err.value.pos == pos

    def test_implicit_multiplication_rejected(self, xyz):
        with pytest.raises(PolySyntaxError):
            xyz.parse("2x")

    def test_unknown_variable(self, xyz):
        with pytest.raises(UnknownVariableError) as err:
            xyz.parse("x + w")
        assert err.value.name == "w"

    def test_division_by_polynomial_rejected(self, xyz):
        with pytest.raises(PolySyntaxError):
            xyz.parse("x/y")

    def test_round_trip(self, xyz, rng):
        for _ in range(200):
            p = random_poly(xyz, rng)
            s = str(p)
            assert xyz.parse(s) == p
            assert str(xyz.parse(s)) == s


class TestArithmetic:
    def test_difference_of_squares(self):
        R = Ring(["x", "y"])
        assert R.parse("(x+y)*(x-y)") == R.parse("x^2 - y^2")

    def test_additive_identity(self, xyz, rng):
        for _ in range(50):
            p = random_poly(xyz, rng)
            assert p + xyz.zero() == p

    def test_distributivity_against_expansion(self, xyz, rng):
        for _ in range(100):
            p, q, r = (random_poly(xyz, rng) for _ in range(3))
            lhs = p * (q + r)
            assert lhs == p * q + p * r
            assert lhs.terms == expand_product(p, q + r)

    def test_ring_axioms(self, xyz, rng):
        for _ in range(50):
            p, q, r = (random_poly(xyz, rng, max_deg=3) for _ in range(3))
            assert (p + q) + r == p + (q + r)
            assert (p * q) * r == p * (q * r)
            assert p * q == q * p
            assert p + q == q + p
            assert (p - q) + q == p
            assert p * xyz.one() == p

    def test_canonical_form(self, xyz, rng):
        for _ in range(50):
            p = random_poly(xyz, rng)
            q = random_poly(xyz, rng)
            assert (p - q).is_zero() == (p.terms == q.terms)
            assert (p - p).terms == {}

    def test_functional_dispatch(self, xyz):
        x, y = xyz.var("x"), xyz.var("y")
        assert poly_arith(x, y, "add") == x + y
        assert poly_arith(x, y, "sub") == x - y
        assert poly_arith(x, y, "mul") == x * y
        assert poly_arith(x, None, "neg") == -x
        assert poly_arith(x, None, "scale", Fraction(1, 3)) == x * Fraction(1, 3)

    def test_ring_mismatch(self, xyz):
        other = Ring(["a"])
        with pytest.raises(RingMismatchError):
            xyz.var("x") + other.var("a")
        with pytest.raises(RingMismatchError):
            poly_arith(xyz.var("x"), other.var("a"), "mul")

    def test_no_zero_coefficients_stored(self, xyz):
        p = Polynomial(xyz, {(1, 0, 0): 0, (0, 1, 0): 2})
        assert p.terms == {(0, 1, 0): 2}


class TestDifferentiate:
    def test_folium_power_rule(self):
        R = Ring(["mu1", "mu2"])
        f = R.parse("mu2^2 - mu1^3 - mu1^2")
        assert differentiate(f, 0) == R.parse("-3*mu1^2 - 2*mu1")
        assert differentiate(f, "mu2") == R.parse("2*mu2")

    def test_constant(self, xyz):
        assert differentiate(xyz.const(7), 0).is_zero()

    def test_product_rule(self, xyz, rng):
        for _ in range(50):
            p, q = random_poly(xyz, rng), random_poly(xyz, rng)
            i = rng.randrange(3)
            prod = Polynomial(xyz, expand_product(p, q))
            assert differentiate(prod, i) == p * differentiate(q, i) + q * differentiate(p, i)

    def test_index_bounds(self, xyz):
        with pytest.raises(IndexError):
            differentiate(xyz.var(0), 3)


class TestEvaluate:
    def test_basic(self):
        R = Ring(["x"])
        assert evaluate(R.parse("x^2 - 1"), [3]) == 8

    def test_zero(self, xyz):
        assert evaluate(xyz.zero(), [1, 2, 3]) == 0

    def test_homomorphism(self, xyz, rng):
        for _ in range(100):
            p, q = random_poly(xyz, rng), random_poly(xyz, rng)
            pt = [Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(3)]
            assert evaluate(p * q, pt) == horner_eval(p, pt) * horner_eval(q, pt)

    def test_wrong_length(self, xyz):
        with pytest.raises(ValueError):
            evaluate(xyz.var(0), [1])


class TestOrders:
    def test_degrevlex_example(self):
        assert compare_monomials((2, 1, 0), (1, 2, 0), DEGREVLEX) == 1

    def test_equal(self):
        assert compare_monomials((1, 2, 3), (1, 2, 3), DEGREVLEX) == 0
        assert compare_monomials((1, 2, 3), (1, 2, 3), LEX) == 0

    def test_lex_example(self):
        assert compare_monomials((1, 0), (0, 5), LEX) == 1

    def test_degrevlex_is_not_deglex(self):
        # x*z^2 vs y^3: deglex says x z^2 > y^3, degrevlex says y^3 > x z^2
        assert compare_monomials((0, 3, 0), (1, 0, 2), DEGREVLEX) == 1

    def test_block_eliminates_first_block(self):
        order = MonomialOrder("block", 1)
        assert compare_monomials((1, 0, 0), (0, 5, 5), order) == 1
        assert compare_monomials((0, 2, 0), (0, 1, 0), order) == 1

    def test_from_name(self):
        assert MonomialOrder.from_name("dp") == DEGREVLEX
        assert MonomialOrder.from_name("lex") == LEX
        assert MonomialOrder.from_name("block(2)") == MonomialOrder("block", 2)
        with pytest.raises(ValueError):
            MonomialOrder.from_name("wp")

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(st.integers(0, 4), min_size=4, max_size=4),
        st.lists(st.integers(0, 4), min_size=4, max_size=4),
        st.lists(st.integers(0, 4), min_size=4, max_size=4),
        st.sampled_from([LEX, DEGREVLEX, MonomialOrder("block", 2)]),
    )
    def test_multiplicative_and_well_ordered(self, a, b, c, order):
        a, b, c = tuple(a), tuple(b), tuple(c)
        cmp = compare_monomials(a, b, order)
        ac = tuple(x + y for x, y in zip(a, c))
        bc = tuple(x + y for x, y in zip(b, c))
        assert compare_monomials(ac, bc, order) == cmp
        assert compare_monomials((0,) * 4, a, order) <= 0
        assert compare_monomials(b, a, order) == -cmp


def test_determinant_matches_leibniz(xyz, rng):
    import itertools

    def leibniz(M):
        n = len(M)
        total = xyz.zero()
        for perm in itertools.permutations(range(n)):
            inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
            term = xyz.one()
            for i in range(n):
                term = term * M[i][perm[i]]
            total = total + term if inv % 2 == 0 else total - term
        return total

    for n in (1, 2, 3, 4):
        M = [[random_poly(xyz, rng, max_deg=1, nterms=2) for _ in range(n)] for _ in range(n)]
        assert determinant(M) == leibniz(M)


@settings(max_examples=100, deadline=None)
@given(st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(0, 3)),
    st.fractions(max_denominator=7).filter(lambda f: abs(f) < 50),
    max_size=6,
))
def test_print_parse_print_idempotent(terms):
    R = Ring(["x", "y"])
    p = Polynomial(R, terms)
    s = str(p)
    assert str(R.parse(s)) == s
    assert R.parse(s) == p
