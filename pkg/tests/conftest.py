from __future__ import annotations

import random
from pathlib import Path

import pytest

from meteorgraphs.io import load_graph, parse_graph_text

DATA = Path(__file__).parent / "data"


def graph(text: str):
    return parse_graph_text(text)


def cycle_edges(prefix: str, names: list[str]) -> str:
    n = len(names)
    return "\n".join(f"edge {prefix}{i} {names[i]} -> {names[(i + 1) % n]}" for i in range(n))


def two_two(trails: list[int]):
    """p = q = 2 with trails a0 -> ... -> b0 of the given edge lengths."""
    lines = [cycle_edges("c", ["a0", "a1"]), cycle_edges("d", ["b0", "b1"])]
    for t, length in enumerate(trails):
        path = ["a0"] + [f"t{t}_{k}" for k in range(length - 1)] + ["b0"]
        lines += [f"edge f{t}_{k} {path[k]} -> {path[k + 1]}" for k in range(length)]
    return graph("\n".join(lines))


@pytest.fixture
def dumbbell():
    return load_graph(DATA / "dumbbell.txt")


@pytest.fixture
def six_four():
    return load_graph(DATA / "six_four.txt")


@pytest.fixture
def three_cycle():
    return load_graph(DATA / "three_cycle.txt")


@pytest.fixture
def rng():
    return random.Random(20240607)


# one line per acceptance criterion, echoed at the end of the run
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
