from pathlib import Path

import pytest

from p2baudit.corpus import Document, PlatformCorpus, PlatformType

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"
CORPORA = FIXTURES / "corpora"
LABELS = FIXTURES / "labels"
GOLDEN = Path(__file__).resolve().parent / "golden"

SIX_PLATFORMS = ["bing", "booking", "tripadvisor", "amazon", "google", "yahoo"]


def make_corpus(*contents, name="Test", ptype=PlatformType.INTERMEDIATION):
    docs = tuple(Document(f"https://example.test/{i}", f"doc {i}", "2023-06-13T00:00:00Z", c)
                 for i, c in enumerate(contents))
    return PlatformCorpus(name, ptype, docs)


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def manifest_paths():
    return [CORPORA / f"{p}.json" for p in SIX_PLATFORMS]
