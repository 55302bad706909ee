import numpy as np
import pytest
from hypothesis import settings, strategies as st

from homc import examples

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

# every (order, dim) with dim**order <= 256
SMALL_SHAPES = [(m, n) for m in range(2, 9) for n in range(2, 17) if n**m <= 256]
ROUNDTRIP_SHAPES = [(m, n) for m in range(2, 13) for n in range(2, 65) if n**m <= 4096]


def random_tensor(rng, m, n):
    return rng.standard_normal((n,) * m)


def random_stochastic(rng, m, n, sparsity=0.0):
    a = rng.random((n,) * m)
    if sparsity:
        a *= rng.random((n,) * m) >= sparsity
        # keep one positive entry per column
        empty = a.sum(axis=0) == 0
        a[0][empty] = 1.0
    return a / a.sum(axis=0, keepdims=True)


@st.composite
def small_shapes(draw, shapes=SMALL_SHAPES):
    return draw(st.sampled_from(shapes))


seeds = st.integers(0, 2**32 - 1)


@pytest.fixture
def reg():
    return examples.regular_chain()


@pytest.fixture
def erg():
    return examples.ergodic_chain()


@pytest.fixture
def first():
    return examples.first_order_chain()


@pytest.fixture
def transient():
    return examples.transient_chain()


ACCEPTANCE_LINES = []


def record_criterion(label, ok, detail=""):
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip())
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
