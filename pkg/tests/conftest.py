import numpy as np
import pytest
from hypothesis import strategies as st

from ecomech import DriverParams, EcoProfile, Scenario, TypeProfile

BASE_PARAMS = dict(alpha=0.7, beta=2.5, gamma=3.5, xbar=4.0, ybar=1.0)


def profile(*levels) -> EcoProfile:
    return EcoProfile(np.array(levels, dtype=float))


def types(*values) -> TypeProfile:
    return TypeProfile(np.array(values, dtype=float))


@pytest.fixture
def s1() -> Scenario:
    """Single driver, no neighbors."""
    return Scenario([[1.0]], [DriverParams(**BASE_PARAMS)])


@pytest.fixture
def s2() -> Scenario:
    """Symmetric pair coupled with weight 0.5."""
    return Scenario(
        [[1.0, 0.5], [0.5, 1.0]],
        [DriverParams(**BASE_PARAMS), DriverParams(**BASE_PARAMS)],
    )


@st.composite
def game_instances(draw, min_n=1, max_n=4):
    """Scenario plus a level vector and a type vector of matching size.

    Parameter ranges are wider than the experiment defaults so invariants
    are exercised across the whole admissible family, including zero
    conformity weights and isolated drivers.
    """
    n = draw(st.integers(min_n, max_n))
    unit = st.floats(0.0, 1.0, allow_nan=False)
    w = np.eye(n)
    for i in range(n):
        for j in range(n):
            if i != j and draw(st.booleans()):
                w[i, j] = draw(unit)
    params = [
        DriverParams(
            alpha=draw(st.floats(0.05, 0.95)),
            beta=draw(st.floats(0.0, 5.0)),
            gamma=draw(st.floats(0.0, 5.0)),
            xbar=draw(st.floats(0.5, 8.0)),
            ybar=draw(st.floats(0.2, 3.0)),
        )
        for _ in range(n)
    ]
    levels = np.array([draw(unit) for _ in range(n)])
    theta = np.array([draw(unit) for _ in range(n)])
    return Scenario(w, params), levels, theta
