import numpy as np
import pytest

from gibbslog.models import get_model

ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture(scope="session")
def cube200():
    return get_model("cube", 200)


@pytest.fixture(scope="session")
def cube2000():
    return get_model("cube", 2000)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_addoption(parser):
    parser.addoption("--long", action="store_true", default=False, help="also run the n = 5 DFS oracle")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--long"):
        return
    skip = pytest.mark.skip(reason="needs --long")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_configure(config):
    config.stash[ACCEPTANCE] = {}


@pytest.fixture
def acceptance_results(request):
    return request.config.stash[ACCEPTANCE]


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(ACCEPTANCE, {})
    if results:
        terminalreporter.section("acceptance criteria")
        for cid in sorted(results):
            terminalreporter.write_line(results[cid].line())
