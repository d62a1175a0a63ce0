from __future__ import annotations

from importlib import resources
from pathlib import Path

import pytest

from objlex.compiler import compile_lexicon, read_lemmas, read_rules, read_templates
from objlex.featgraph import parse_path
from objlex.index import build_lexicon, open_lexicon
from objlex import synthetic

DATA = Path(__file__).parent / "data"


def desk_file(name: str) -> Path:
    return Path(str(resources.files("objlex").joinpath("data", "desk", name)))


def desk_meta_paths():
    return [parse_path(line) for line in desk_file("meta_paths.txt").read_text().split()]


def desk_entries():
    return compile_lexicon(
        read_templates(desk_file("templates.lex").read_text()),
        read_lemmas(desk_file("lemmas.lex").read_text()),
        read_rules(desk_file("rules.lex").read_text()),
    )


@pytest.fixture(scope="session")
def desk_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("desk")
    build_lexicon(desk_entries(), desk_meta_paths(), d)
    return d


@pytest.fixture
def desk(desk_dir):
    with open_lexicon(desk_dir) as h:
        yield h


@pytest.fixture(scope="session")
def syn10k_entries():
    return synthetic.synthetic_lexicon(10000, seed=7)


@pytest.fixture(scope="session")
def syn10k_dir(tmp_path_factory, syn10k_entries):
    d = tmp_path_factory.mktemp("syn10k")
    build_lexicon(syn10k_entries, synthetic.meta_paths(), d)
    return d


@pytest.fixture
def syn10k(syn10k_dir):
    with open_lexicon(syn10k_dir) as h:
        yield h


# -- acceptance report -----------------------------------------------------------

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    failed = report.failed or (report.when == "call" and report.skipped)
    prev = _RESULTS.get(number, (title, True))
    if report.when == "call" or failed:
        _RESULTS[number] = (title, prev[1] and not failed)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, ok = _RESULTS[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
