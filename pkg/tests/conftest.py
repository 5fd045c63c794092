import numpy as np
import pytest
from hypothesis import strategies as st

from securebackscatter.model import ChannelRealization, SystemConfig


@pytest.fixture
def unit_cfg():
    return SystemConfig(p=10.0, sigma2=1.0, k_eds=1)


@pytest.fixture
def ref_channel():
    # a = h_n g_b p / sigma2 = 10, b = h_k g_b p / (g_k p + sigma2) = 1
    return ChannelRealization(
        g_n=1.0, g_f=0.3, g_b=1.0, h_n=1.0, h_f=0.4, ed_links=((0.1, 0.2),)
    )


def random_channels(rng, n, k_eds=5, theta=0.1):
    return [
        ChannelRealization.from_row(rng.exponential(theta, 5 + 2 * k_eds)) for _ in range(n)
    ]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


gain = st.floats(min_value=0.0, max_value=5.0, allow_nan=False)


@st.composite
def channels(draw, max_eds=6):
    k = draw(st.integers(min_value=1, max_value=max_eds))
    links = tuple((draw(gain), draw(gain)) for _ in range(k))
    return ChannelRealization(draw(gain), draw(gain), draw(gain), draw(gain), draw(gain), links)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
