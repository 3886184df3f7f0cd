import pytest

from crossqa.embedding import StubEmbeddingProvider


@pytest.fixture
def stub():
    return StubEmbeddingProvider(dim=64, seed=0)
