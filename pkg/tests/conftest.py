import numpy as np
import pytest

from maxkernel.symbols import PiecewisePoly, Sampled, Step, TrigPoly


@pytest.fixture
def affine():
    # phi(x) = 1 - x on (0, 1]
    return PiecewisePoly([1.0], [[1.0, -1.0]])


@pytest.fixture
def square():
    # phi(x) = (1 - x)^2 on (0, 1]
    return PiecewisePoly([1.0], [[1.0, -2.0, 1.0]])


@pytest.fixture
def tent():
    # plateau 1 on (0, 1/2], ramp 2(1 - x) down to 0
    return PiecewisePoly([0.5, 1.0], [[1.0], [2.0, -2.0]])


@pytest.fixture
def indicator():
    return Step([1.0], [1.0])


@pytest.fixture
def two_step():
    return Step([1.0, 2.0], [2.0, 1.0])


@pytest.fixture
def inv_tail():
    # x^-1 on [1, inf): bounded, not compact
    return PiecewisePoly([1.0], [()], tail=[(1.0, -1)])


@pytest.fixture
def inv_square_tail():
    # x^-2 on [1, inf)
    return PiecewisePoly([1.0], [()], tail=[(1.0, -2)])


@pytest.fixture
def cosine():
    # cos(2 pi t) restricted to one period
    return TrigPoly(1.0, [0.5, 0.0, 0.5])


@pytest.fixture
def hat():
    return Sampled((0.25, 0.5, 1.0), (0.0, 1.0, 0.0), "pl")


def random_step(rng, max_steps=12):
    n = int(rng.integers(1, max_steps + 1))
    cuts = np.cumsum(rng.uniform(0.1, 1.0, size=n))
    vals = rng.uniform(0.1, 2.0, size=n) * rng.choice([-1.0, 1.0], size=n)
    return Step(cuts, vals)
