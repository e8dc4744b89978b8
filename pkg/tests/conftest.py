import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def z2():
    from dunkl_riesz import KernelEvaluator, z2n

    return KernelEvaluator(z2n(1, 1.0))


@pytest.fixture(scope="session")
def z2sq():
    from dunkl_riesz import KernelEvaluator, z2n

    return KernelEvaluator(z2n(2, 1.0))


@pytest.fixture
def rng():
    return np.random.default_rng(0)


# -- acceptance criterion lines ------------------------------------------------------------

_CRITERIA = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_CRITERIA] = {}


@pytest.fixture
def criterion(request):
    """record(k, part, ok, detail): one measured outcome of acceptance criterion k."""
    store = request.config.stash[_CRITERIA]

    def record(k: int, part: str, ok: bool, detail: str = "") -> bool:
        store.setdefault(k, []).append((part, bool(ok), detail))
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(_CRITERIA, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(store):
        parts = store[k]
        ok = all(p[1] for p in parts)
        failed = "; ".join(f"{name}: {detail}" for name, good, detail in parts if not good)
        tail = f" ({failed})" if failed else f" ({len(parts)} part{'s' * (len(parts) > 1)})"
        terminalreporter.write_line(f"CRITERION {k}: {'PASS' if ok else 'FAIL'}{tail}")
