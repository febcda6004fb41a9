from importlib import resources

import pytest

from kmatching.formula import FIG1, load_formula, parse_formula


def corpus_paths():
    root = resources.files("kmatching") / "data" / "corpus"
    return sorted(str(p) for p in root.iterdir() if p.name.endswith(".m1in3"))


@pytest.fixture(scope="session")
def fig1():
    return parse_formula(FIG1)


@pytest.fixture(scope="session")
def corpus():
    return {p.rsplit("/", 1)[-1].split(".")[0]: load_formula(p) for p in corpus_paths()}


RESULTS: dict = {}  # acceptance criterion -> report line


def pytest_terminal_summary(terminalreporter):
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
