import os

import pytest

ACCEPTANCE_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = {}


@pytest.fixture(scope="session", autouse=True)
def _weight_cache(tmp_path_factory):
    """Keep weight tables built by the tests out of the user's cache."""
    old = os.environ.get("HERMVAR_CACHE")
    os.environ["HERMVAR_CACHE"] = str(tmp_path_factory.mktemp("weights"))
    yield
    if old is None:
        os.environ.pop("HERMVAR_CACHE", None)
    else:
        os.environ["HERMVAR_CACHE"] = old


@pytest.fixture
def acceptance_log(request):
    """Record ``(passed, detail)`` for an acceptance criterion."""
    log = request.config.stash[ACCEPTANCE_KEY]

    def record(name, passed, detail):
        log[name] = (bool(passed), detail)
        print(f"{name}: {'PASS' if passed else 'FAIL'} | {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(ACCEPTANCE_KEY, {})
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(log):
        passed, detail = log[name]
        terminalreporter.write_line(f"{name}: {'PASS' if passed else 'FAIL'} | {detail}")
