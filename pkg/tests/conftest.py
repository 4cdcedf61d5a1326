import pytest

from lesliefront.dichotomy import thresholds
from lesliefront.model import Parameters, make_initial_profile
from lesliefront.solver import SolverConfig, run

BENCH = dict(delta=0.5, alpha=0.5, kappa=1.0, D=1.0, mu=1.0, rho=1.0)
AMP = 0.5


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config._criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        num, title = mark.args
        detail = dict(item.user_properties).get("detail", "")
        item.config._criteria[num] = (title, rep.outcome, detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    crit = getattr(config, "_criteria", {})
    if not crit:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(crit):
        title, outcome, detail = crit[num]
        tag = "PASS" if outcome == "passed" else "FAIL"
        line = f"criterion {num:2d} {tag}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def bench_params():
    return Parameters(**BENCH)


@pytest.fixture(scope="session")
def spreading_run(bench_params):
    """Spreading benchmark: h0 = 2 above pi/2, integrated to T = 150."""
    ip = make_initial_profile("cosine", AMP, AMP, h0=2.0)
    traj = run(bench_params, ip, SolverConfig(N=200, t_max=150.0))
    return bench_params, ip, traj


@pytest.fixture(scope="session")
def vanishing_run(bench_params):
    """Vanishing benchmark: h0 = 1 and mu at half the vanishing threshold, to T = 100."""
    ip = make_initial_profile("cosine", AMP, AMP, h0=1.0)
    th = thresholds(bench_params, ip)
    p = bench_params.replace(mu=0.5 * th.mu_lower)
    traj = run(p, ip, SolverConfig(N=200, t_max=100.0))
    return p, ip, thresholds(p, ip), traj
