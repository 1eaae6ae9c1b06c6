import pytest

from anlforge import _alignment


@pytest.fixture
def pure_python_alignment():
    """Force the fallback kernel for one test, restoring the default after."""
    previous = _alignment.backend_name()
    _alignment.set_backend("python")
    yield
    _alignment.set_backend(previous)
