import re

import hypothesis
import pytest

from medread import synthetic
from medread.corpus import save_corpus

hypothesis.settings.register_profile("default", deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("default")


@pytest.fixture(scope="session")
def synth_corpus():
    return synthetic.make_corpus(n=900, seed=7)


@pytest.fixture
def corpus_file(tmp_path, synth_corpus):
    path = tmp_path / "corpus.jsonl"
    save_corpus(synth_corpus, path)
    return path


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", nodeid)
            if m and report.when in ("call", "setup"):
                if outcome == "passed" and report.when != "call":
                    continue
                lines.append((int(m.group(1)), m.group(2), "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for num, name, verdict in sorted(lines):
            terminalreporter.write_line(f"criterion {num} [{name}]: {verdict}")
