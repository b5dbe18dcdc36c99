import pytest

from bivlmp.config import builtin_models


@pytest.fixture(scope="session")
def models():
    """All built-in models, constructed once per session."""
    return builtin_models()
