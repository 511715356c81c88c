import numpy as np
import pytest

from canonica.phase_retrieval import gaussian_mixture
from canonica.signal import Grid, Signal


def random_signal(seed, n=64, dt=0.1):
    rng = np.random.default_rng(seed)
    grid = Grid.centered(dt, n)
    return Signal(grid, rng.normal(size=n) + 1j * rng.normal(size=n))


def mixture(seed, n=256, dt=0.05):
    return gaussian_mixture(Grid.centered(dt, n), np.random.default_rng(seed))


@pytest.fixture
def grid256():
    return Grid.centered(0.05, 256)


@pytest.fixture
def gauss256(grid256):
    return Signal(grid256, np.exp(-grid256.points ** 2))


_ACCEPTANCE: dict = {}


@pytest.fixture
def acceptance():
    """Record ``(criterion, passed, detail)``; a summary line per criterion is printed at the end."""

    def record(criterion, passed, detail=""):
        _ACCEPTANCE.setdefault(criterion, []).append((bool(passed), detail))
        print(f"criterion {criterion}: {'PASS' if passed else 'FAIL'} {detail}")
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_ACCEPTANCE):
        parts = _ACCEPTANCE[crit]
        ok = all(p for p, _ in parts)
        bad = [d for p, d in parts if not p]
        if bad:
            detail = "; ".join(bad)
        elif len(parts) <= 2:
            detail = "; ".join(d for _, d in parts)
        else:
            detail = f"all {len(parts)} checks"
        terminalreporter.write_line(f"criterion {crit}: {'PASS' if ok else 'FAIL'} - {detail}")
