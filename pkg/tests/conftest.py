import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from bigcenter.poly import Generator, Poly

SYMBOLS = ["A", "B", "C", "D", "a", "b", "c"]


@st.composite
def polys(draw, max_terms=4, max_mode=3, params=True):
    out = Poly()
    for _ in range(draw(st.integers(0, max_terms))):
        c = Fraction(draw(st.integers(-5, 5)), draw(st.integers(1, 4)))
        mono = Poly.const(c)
        for _ in range(draw(st.integers(0, 3))):
            sym = draw(st.sampled_from(SYMBOLS))
            mono = mono * Poly.var(sym, draw(st.integers(0, max_mode)))
        if params and draw(st.booleans()):
            mono = mono * Poly.var("t") ** draw(st.integers(-2, 2))
        out = out + mono
    return out


@pytest.fixture
def rng():
    return random.Random(1234)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
