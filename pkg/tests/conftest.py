import numpy as np
import pytest

from qarch import _fallback, kernels

BACKENDS = ["python"]
try:
    from qarch import _kernels
    BACKENDS.append("compiled")
except ImportError:  # extension not built
    _kernels = None


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run a test once per available kernel implementation."""
    impl = _fallback if request.param == "python" else _kernels
    for name in ("apply_gates", "expect_z", "expect_and_shift_grad"):
        monkeypatch.setattr(kernels, name, getattr(impl, name))
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_criteria = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    status = "PASS" if report.passed else "FAIL"
    _criteria.append((number, f"criterion {number:>2} {status}  {title}" + (f"  [{detail}]" if detail else "")))


def pytest_terminal_summary(terminalreporter):
    if _criteria:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_criteria):
            terminalreporter.write_line(line)
