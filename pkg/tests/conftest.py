import numpy as np
import pytest

from cfrobust.channel import ChannelRealization, cluster_aps, compose_channel, generate_lsf, \
    generate_small_scale
from cfrobust.model import NetworkConfig

# criterion number -> CriterionResult, filled by test_acceptance.py
ACCEPTANCE_RESULTS = {}


def cn(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def ref_net():
    return NetworkConfig(num_aps=16, antennas_per_ap=4, num_ues=32, num_scheduled=16)


@pytest.fixture(scope="session")
def toy_net():
    return NetworkConfig(num_aps=2, antennas_per_ap=4, num_ues=6, num_scheduled=3)


def make_instance(net, seed, alpha):
    lsf = generate_lsf(net, seed)
    H, He = generate_small_scale(net.num_antennas, net.num_ues, seed)
    return lsf, compose_channel(lsf, H, He, alpha), cluster_aps(lsf)


def column_channel(v, ve, alpha=0.15) -> ChannelRealization:
    return ChannelRealization(np.asarray(v).reshape(-1, 1), np.asarray(ve).reshape(-1, 1), alpha)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for i in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[i].line())
