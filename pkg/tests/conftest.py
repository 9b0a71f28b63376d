import pytest

from faultbench.classifiers import TrainConfig
from faultbench.dataset import generate_reference
from faultbench.evaluate import SplitPlan, split
from faultbench.preprocess import PreprocessPlan, Preprocessor


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture
def criterion(request):
    """Record one pass/fail line per acceptance criterion, then assert."""

    def record(number: int, ok: bool, detail: str):
        status = "PASS" if ok else "FAIL"
        request.config._acceptance_lines.append(
            f"{status} criterion {number:2d}: {detail}"
        )
        assert ok, f"criterion {number}: {detail}"

    return record


@pytest.fixture(scope="session")
def reference_raw():
    return generate_reference(1000, 0.10, seed=7)


@pytest.fixture(scope="session")
def reference_clean(reference_raw):
    return Preprocessor(PreprocessPlan()).fit_transform(reference_raw)


@pytest.fixture(scope="session")
def reference_split(reference_clean):
    return split(reference_clean, SplitPlan(seed=0))[0]


@pytest.fixture(scope="session")
def train_config():
    return TrainConfig(seed=13)
