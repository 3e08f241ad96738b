"""Platform documentation corpora: manifest loading, paragraph segmentation, statistics.

A manifest is a JSON file holding the pre-fetched text of every page that was
harvested for one platform::

    {
      "platform_name": "Yahoo",
      "platform_type": "search_engine",
      "documents": [
        {"url": "...", "title": "...", "fetched_at": "2023-06-01T00:00:00Z", "content": "..."}
      ]
    }
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass
from decimal import ROUND_DOWN, Decimal
from pathlib import Path

from .errors import EmptyCorpus, MalformedManifest, MissingFile

MIN_PARAGRAPH_WORDS = 3

_BLANK_RUN = re.compile(r"\n(?:[ \t]*\n)+")


class PlatformType(enum.Enum):
    INTERMEDIATION = "intermediation"
    SEARCH_ENGINE = "search_engine"


@dataclass(frozen=True)
class Document:
    url: str
    title: str
    fetched_at: str
    content: str

    def __post_init__(self):
        if not self.content.strip():
            raise MalformedManifest(f"document {self.url!r} has empty content")


@dataclass(frozen=True)
class Paragraph:
    doc_index: int
    para_index: int
    text: str
    word_count: int


@dataclass(frozen=True)
class PlatformCorpus:
    platform_name: str
    platform_type: PlatformType
    documents: tuple[Document, ...]

    def __post_init__(self):
        if not self.documents:
            raise EmptyCorpus(f"corpus {self.platform_name!r} has no documents")
        urls = [d.url for d in self.documents]
        if len(set(urls)) != len(urls):
            raise MalformedManifest(f"duplicate url in corpus {self.platform_name!r}")

    def paragraphs(self) -> list[Paragraph]:
        """Retained paragraphs of every document, in document order."""
        out = []
        for i, doc in enumerate(self.documents):
            out.extend(segment_paragraphs(doc, doc_index=i))
        return out


@dataclass(frozen=True)
class CorpusStats:
    link_count: int
    avg_words_per_doc: Decimal


def word_count(text: str) -> int:
    return len(text.split())


def normalize_line_endings(text: str) -> str:
    """LF line endings and no trailing whitespace on any line."""
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    return "\n".join(line.rstrip() for line in text.split("\n"))


def normalized_content(doc: Document) -> str:
    """The document text that paragraph segmentation round-trips.

    Outer blank lines are stripped and every run of blank lines collapses to
    exactly one, so that ``"\\n\\n".join(blocks)`` reproduces it.
    """
    text = normalize_line_endings(doc.content).strip("\n")
    return _BLANK_RUN.sub("\n\n", text)


def split_blocks(doc: Document) -> list[str]:
    """Blank-line separated blocks of a document, before the minimum-length filter."""
    text = normalized_content(doc)
    if not text.strip():
        return []
    return text.split("\n\n")


def segment_paragraphs(doc: Document, doc_index: int = 0) -> list[Paragraph]:
    """Split a document into paragraphs, dropping blocks shorter than three words."""
    paragraphs = []
    for block in split_blocks(doc):
        n = word_count(block)
        if n < MIN_PARAGRAPH_WORDS:
            continue
        paragraphs.append(Paragraph(doc_index, len(paragraphs), block, n))
    return paragraphs


def _require(record, key, kind, where):
    if key not in record:
        raise MalformedManifest(f"{where}: missing field {key!r}")
    value = record[key]
    if not isinstance(value, kind):
        raise MalformedManifest(f"{where}: field {key!r} must be {kind.__name__}")
    return value


def parse_manifest(data: dict, source: str = "<manifest>") -> PlatformCorpus:
    if not isinstance(data, dict):
        raise MalformedManifest(f"{source}: top level must be an object")
    name = _require(data, "platform_name", str, source)
    raw_type = _require(data, "platform_type", str, source)
    try:
        ptype = PlatformType(raw_type)
    except ValueError:
        raise MalformedManifest(f"{source}: unknown platform_type {raw_type!r}") from None
    raw_docs = _require(data, "documents", list, source)
    if not raw_docs:
        raise EmptyCorpus(f"{source}: manifest lists no documents")

    docs = []
    for i, rec in enumerate(raw_docs):
        where = f"{source}: documents[{i}]"
        if not isinstance(rec, dict):
            raise MalformedManifest(f"{where} must be an object")
        fields = {k: _require(rec, k, str, where) for k in ("url", "title", "fetched_at", "content")}
        fields["content"] = normalize_line_endings(fields["content"])
        docs.append(Document(**fields))
    return PlatformCorpus(name, ptype, tuple(docs))


def load_manifest(path) -> PlatformCorpus:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"manifest not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedManifest(f"{path}: {exc}") from exc
    return parse_manifest(data, source=str(path))


def truncate_2dp(value: Decimal) -> Decimal:
    return value.quantize(Decimal("0.01"), rounding=ROUND_DOWN)


def corpus_stats(corpus: PlatformCorpus) -> CorpusStats:
    """Number of links and mean words per document over full, unsegmented text.

    The mean is truncated (not rounded) to two decimals; this is the only rule
    consistent with the reference per-platform figures.
    """
    if not corpus.documents:
        raise EmptyCorpus(corpus.platform_name)
    total = sum(word_count(d.content) for d in corpus.documents)
    n = len(corpus.documents)
    return CorpusStats(n, truncate_2dp(Decimal(total) / Decimal(n)))


def total_words(corpus: PlatformCorpus) -> int:
    return sum(word_count(d.content) for d in corpus.documents)

