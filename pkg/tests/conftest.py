import numpy as np
import pytest

from smspike.mesh import build_domain


@pytest.fixture(scope="session")
def gs_cache(request):
    """Ground states are expensive; keep them in pytest's cache directory."""
    return request.config.cache.mkdir("smspike_ground_states")


@pytest.fixture(scope="session")
def gs_omega1(gs_cache):
    """Reference ground state (omega = q = 1, p = 5) on the default box."""
    from smspike.limit import ground_state

    return ground_state(18.0, 128, 1.0, 1.0, 5.0, cache_dir=gs_cache)


@pytest.fixture(scope="session")
def small_gs():
    """Coarse, unrefined ground state; cheap enough for unit tests."""
    from smspike.limit import ground_state

    return ground_state(12.0, 48, 1.0, refine=False, decay_tol=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def small_ball():
    return build_domain("ball", 24, radius=0.45)


@pytest.fixture(scope="session")
def small_cube():
    return build_domain("cube", 16)


# -- acceptance reporting ------------------------------------------------------

_CRITERIA: dict[int, str] = {}


class Criterion:
    """Collects the checks of one acceptance criterion; fails if any check fails."""

    def __init__(self, number: int, title: str):
        self.number, self.title = number, title
        self.notes: list[str] = []
        self.failed: list[str] = []

    def check(self, ok: bool, what: str):
        ok = bool(ok)
        self.notes.append(("ok   " if ok else "FAIL ") + what)
        if not ok:
            self.failed.append(what)

    def __enter__(self):
        return self

    def __exit__(self, kind, exc, tb):
        if exc is not None:
            self.failed.append(f"{kind.__name__}: {exc}")
        status = "PASS" if not self.failed else "FAIL"
        line = f"criterion {self.number:2d} {status}  {self.title}"
        _CRITERIA[self.number] = line + "".join(f"\n      {n}" for n in self.notes)
        print(_CRITERIA[self.number])
        if exc is None and self.failed:
            pytest.fail("; ".join(self.failed), pytrace=False)
        return False


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.write_sep("=", "acceptance criteria")
        for k in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[k])
