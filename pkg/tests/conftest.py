import numpy as np
import pytest

from dirac_lattice import Potential

ACCEPTANCE_LINES: list[str] = []


def random_potential(rng: np.random.Generator, max_width: int = 9, q_max: float = 0.8, m: float = 1.0) -> Potential:
    """Compact potential with support inside ``max_width`` consecutive sites and ``|q| <= q_max``."""
    width = int(rng.integers(1, max_width + 1))
    start = int(rng.integers(-4, 3))
    q = rng.uniform(-q_max, q_max, size=width)
    q[0] = q[0] if abs(q[0]) > 1e-3 else 0.5
    return Potential(m, tuple((start + i, float(v)) for i, v in enumerate(q) if v != 0.0))


def corpus(seed: int, count: int, **kw) -> list[Potential]:
    rng = np.random.default_rng(seed)
    return [random_potential(rng, **kw) for _ in range(count)]


@pytest.fixture(scope="session")
def random_corpus():
    return corpus(20240501, 25)


def record(line: str) -> None:
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
