import random
from fractions import Fraction

import pytest

from gaussgeom.polyring import Polynomial, Ring


def random_poly(ring: Ring, rng: random.Random, max_deg: int = 4, nterms: int = 5) -> Polynomial:
    terms = {}
    for _ in range(nterms):
        exps = [0] * ring.ngens
        for _ in range(rng.randint(0, max_deg)):
            exps[rng.randrange(ring.ngens)] += 1
        terms[tuple(exps)] = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
    return Polynomial(ring, terms)


@pytest.fixture
def xyz():
    return Ring(["x", "y", "z"])


@pytest.fixture
def rng():
    return random.Random(20240601)


ACCEPTANCE_LINES = []


def record(criterion: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
