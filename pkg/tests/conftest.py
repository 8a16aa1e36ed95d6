import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from simphom import ClassLabeling, build_complex  # noqa: E402

# Two classes of four. Closed triangles: 012, 123 (A), 456, 567 (B), 234, 345 (mixed).
# Filled: 012, 456, 345.
EXAMPLE_EDGES = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (4, 5), (4, 6), (5, 6),
                 (5, 7), (6, 7), (2, 4), (3, 4), (3, 5)]
EXAMPLE_FILLED = [(0, 1, 2), (4, 5, 6), (3, 4, 5)]
EXAMPLE_LABELS = ["A"] * 4 + ["B"] * 4


@pytest.fixture
def example():
    cx = build_complex(EXAMPLE_EDGES + EXAMPLE_FILLED, n_nodes=8)
    return cx, ClassLabeling.from_sequence(EXAMPLE_LABELS)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_acceptance_lines: list[str] = []


@pytest.fixture
def report():
    def add(name, ok, detail=""):
        """Record one criterion; ``ok=None`` means it could not run here."""
        status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
        line = f"[{status}] {name}" + (f"  ({detail})" if detail else "")
        _acceptance_lines.append(line)
        print(line)
        return ok

    return add


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
