import numpy as np
import pytest

from porolux.core import make_params


def random_draws(n, seed=20240601, mh_range=(1e-6, 700.0)):
    """Parameter/gap draws with M h log-uniform in ``mh_range``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        mu, mu_eff, K, k = 10.0 ** rng.uniform(-2, 2, size=4)
        params = make_params(mu, mu_eff, K, k)
        mh = 10.0 ** rng.uniform(np.log10(mh_range[0]), np.log10(mh_range[1]))
        h = mh / params.M
        gmag2 = 10.0 ** rng.uniform(-2, 2)
        sign = rng.choice([-1.0, 1.0])
        out.append((params, h, gmag2, sign * 10.0 ** rng.uniform(-1, 1)))
    return out


@pytest.fixture
def unit_params():
    return make_params(1, 1, 1, 1, 0)


ACCEPTANCE_LINES = []


def record_criterion(number, passed, detail):
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
