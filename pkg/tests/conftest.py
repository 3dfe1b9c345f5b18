import pytest

from smoothsmc.scenario import shipped_scenarios


@pytest.fixture(scope="session")
def benchmark_runs():
    """Shipped scenarios with their nominal closed-loop logs, simulated once."""
    return [(sc, sc.simulate()) for sc in shipped_scenarios()]


@pytest.fixture(scope="session")
def undergained_run():
    sc = shipped_scenarios(include_fixtures=True)[-1]
    assert sc.name == "undergained_n2"
    return sc, sc.simulate()
