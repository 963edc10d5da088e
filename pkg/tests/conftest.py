import numpy as np
import pytest

from gsik.kinematics import EffectorSite, Joint, Skeleton, build_default_biped

_ACCEPTANCE_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: shipping criteria suite")


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _ACCEPTANCE_RESULTS[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for name, outcome in _ACCEPTANCE_RESULTS.items():
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"  {mark}  {name}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def biped():
    return build_default_biped()


def make_chain(n, axes=None, offsets=None, limits=(-2 * np.pi, 2 * np.pi), site_offset=(0.3, 0, 0)):
    """Serial chain with an effector site on the last joint."""
    joints = []
    for i in range(n):
        axis = axes[i] if axes is not None else [0.0, 0.0, 1.0]
        offset = offsets[i] if offsets is not None else ([0.0, 0.0, 0.0] if i == 0 else [1.0, 0.0, 0.0])
        joints.append(Joint(f"j{i}", None if i == 0 else i - 1, axis, offset, limits))
    return Skeleton(joints, [EffectorSite("tip", n - 1, np.asarray(site_offset, dtype=float))])


def random_chain(rng, n, limits=(-2 * np.pi, 2 * np.pi)):
    axes = rng.normal(size=(n, 3))
    axes /= np.linalg.norm(axes, axis=1, keepdims=True)
    offsets = rng.uniform(-0.5, 0.5, size=(n, 3))
    site = rng.uniform(-0.5, 0.5, size=3)
    return make_chain(n, axes=axes, offsets=offsets, limits=limits, site_offset=site)
