"""Document parsing for plain text, markdown, and JSONL corpora."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from tierkite.errors import EmptyDocument, InvalidConfig
from tierkite.text import language as langdetect
from tierkite.text.tokenizer import tokenize

FORMATS = ("plain_text", "markdown", "jsonl_record")

_SUFFIX_FORMAT = {".txt": "plain_text", ".md": "markdown", ".markdown": "markdown", ".jsonl": "jsonl_record"}

_WS_RE = re.compile(r"\s+")
_MD_CODE_FENCE = re.compile(r"^```.*$", re.MULTILINE)
_MD_HEADING = re.compile(r"^#{1,6}\s*", re.MULTILINE)
_MD_IMAGE = re.compile(r"!\[([^\]]*)\]\([^)]*\)")
_MD_LINK = re.compile(r"\[([^\]]*)\]\([^)]*\)")
_MD_EMPHASIS = re.compile(r"[*_~`]+")
_MD_HTML_TAG = re.compile(r"<[^>\n]{1,80}>")


@dataclass
class Document:
    doc_id: str
    source_path: str
    format: str
    raw_text: str
    detected_language: str

    @property
    def language(self) -> str:
        return self.detected_language


def format_for_path(path: str | Path) -> str | None:
    return _SUFFIX_FORMAT.get(Path(path).suffix.lower())


def _strip_markdown(text: str) -> str:
    text = _MD_CODE_FENCE.sub(" ", text)
    text = _MD_IMAGE.sub(r"\1", text)
    text = _MD_LINK.sub(r"\1", text)
    text = _MD_HEADING.sub("", text)
    text = _MD_HTML_TAG.sub(" ", text)
    text = _MD_EMPHASIS.sub(" ", text)
    return text


def _normalize(text: str) -> str:
    return _WS_RE.sub(" ", text).strip()


def _detect(text: str) -> str:
    # the first couple of KB carry enough stopwords; avoids tokenizing huge docs twice
    return langdetect.detect(tokenize(text[:2048]))


def _make_document(doc_id: str, path: str, fmt: str, text: str) -> Document:
    if fmt == "markdown":
        text = _strip_markdown(text)
    normalized = _normalize(text)
    if not normalized:
        raise EmptyDocument(f"{doc_id}: no text after normalization")
    return Document(
        doc_id=doc_id,
        source_path=path,
        format=fmt,
        raw_text=normalized,
        detected_language=_detect(normalized),
    )


def iter_documents(path: str | Path, format: str | None = None, text_key: str = "text") -> Iterator[Document]:
    """Yield every Document in a file; JSONL yields one per record."""
    path = Path(path)
    fmt = format or format_for_path(path)
    if fmt is None or fmt not in FORMATS:
        raise InvalidConfig(f"unsupported format for {path}: {fmt!r}")
    if fmt == "jsonl_record":
        with open(path, encoding="utf-8", errors="replace") as f:
            for lineno, line in enumerate(f):
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError:
                    continue
                text = record.get(text_key)
                if not isinstance(text, str):
                    continue
                doc_id = str(record.get("id", f"{path.name}#{lineno}"))
                try:
                    yield _make_document(doc_id, str(path), fmt, text)
                except EmptyDocument:
                    continue
    else:
        raw = path.read_text(encoding="utf-8", errors="replace")
        yield _make_document(str(path), str(path), fmt, raw)


def parse_document(path: str | Path, format: str | None = None, text_key: str = "text") -> Document:
    """Parse a single-document file (first record for JSONL inputs)."""
    for doc in iter_documents(path, format=format, text_key=text_key):
        return doc
    raise EmptyDocument(f"{path}: no parseable document")
