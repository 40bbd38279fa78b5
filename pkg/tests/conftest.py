import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from orlicz_lorentz import OrliczFunction, StepFunction, Weight

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

FAMILIES = {
    "power1.5": OrliczFunction.power(1.5),
    "power2": OrliczFunction.power(2),
    "power3": OrliczFunction.power(3),
    "exp_n": OrliczFunction.exp_n(),
}


@st.composite
def step_functions(draw, max_cells=8, T=1.0, positive=False, dyadic=False):
    n = draw(st.integers(1, max_cells))
    if dyadic:
        cuts = draw(st.lists(st.integers(1, 63), min_size=n - 1, max_size=n - 1, unique=True))
        inner = [c / 64 for c in sorted(cuts)]
        vals = draw(st.lists(st.integers(1 if positive else 0, 32), min_size=n, max_size=n))
        vals = [v / 8 for v in vals]
    else:
        inner = sorted(draw(st.lists(st.floats(0.01, 0.99), min_size=n - 1, max_size=n - 1,
                                     unique=True)))
        lo = 0.05 if positive else 0.0
        vals = draw(st.lists(st.floats(lo, 4.0, allow_subnormal=False), min_size=n, max_size=n))
    breaks = np.array([0.0, *inner, 1.0]) * T
    if np.any(np.diff(breaks) <= 1e-9):
        breaks = np.linspace(0, T, n + 1)
    return StepFunction(breaks, vals)


@st.composite
def weights(draw, max_cells=6, T=1.0):
    f = draw(step_functions(max_cells, T, positive=True))
    return Weight(f.breaks, np.sort(f.values)[::-1] + 0.1)


@pytest.fixture
def chi():
    return StepFunction([0.0, 1.0], [1.0])


@pytest.fixture
def w1():
    return Weight.constant(1.0, 1.0)


@pytest.fixture
def p2():
    return OrliczFunction.power(2)
