"""Segmented knowledge store: ingestion, filtered cosine search, persistence.

Three segments (function blocks, specification excerpts, auxiliary uploads)
share one in-memory index with per-doc metadata.  Persistence is an
append-safe record file: additions and source deletions append operations,
``compact`` rewrites the file to just the live docs.
"""

from __future__ import annotations

import enum
import hashlib
import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..catalog import FunctionBlockEntry
from .embedder import Embedder, HashedBagEmbedder

PERSIST_FORMAT = "stforge-index"
PERSIST_VERSION = 1

CHUNK_SIZE = 1000
CHUNK_OVERLAP = 200

_PRINTABLE_BUDGET = 0.10  # reject uploads with >10% non-printable bytes


class Segment(enum.Enum):
    FUNCTION_BLOCKS = "FunctionBlocks"
    SPECS = "Specs"
    AUXILIARY = "Auxiliary"


class KnowledgeError(Exception):
    pass


class EmptyIndex(KnowledgeError):
    pass


class DuplicateEntryName(KnowledgeError):
    pass


class BinaryContentRejected(KnowledgeError):
    pass


class EncodingRejected(KnowledgeError):
    pass


@dataclass(frozen=True)
class KnowledgeDoc:
    id: str
    segment: Segment
    text: str
    metadata: dict[str, str]
    vector: np.ndarray = field(repr=False, compare=False)

    def to_record(self) -> dict:
        # repr-based float serialization round-trips float64 exactly, which
        # keeps search results identical after persist/reload.
        return {
            "id": self.id,
            "segment": self.segment.value,
            "text": self.text,
            "metadata": self.metadata,
            "vector": [float(x) for x in self.vector],
        }


def doc_id(segment: Segment, source: str, text: str) -> str:
    """Deterministic id from the canonicalized identity triple."""
    canon = json.dumps(
        {"segment": segment.value, "source": source, "text": text},
        sort_keys=True, ensure_ascii=True,
    )
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:32]


class KnowledgeStore:
    """In-memory vector index with optional file persistence.

    Searches may run concurrently; ingestion and deletion take the writer
    lock so readers never observe a half-written index.
    """

    def __init__(self, embedder: Embedder | None = None,
                 persist_path: str | Path | None = None) -> None:
        self.embedder = embedder or HashedBagEmbedder()
        self.persist_path = Path(persist_path) if persist_path else None
        self._docs: dict[str, KnowledgeDoc] = {}
        self._lock = threading.Lock()
        if self.persist_path and self.persist_path.exists():
            self._load()

    # -- ingestion -------------------------------------------------------

    def ingest_catalog(self, entries: list[FunctionBlockEntry]) -> int:
        """One doc per catalog entry (entries are never chunked).

        Doc text is the augmented description when present, the raw one
        otherwise, always followed by the rendered signature.  Re-ingesting
        identical content is a no-op; duplicate names within one call raise.
        """
        seen: set[str] = set()
        for entry in entries:
            key = entry.name.upper()
            if key in seen:
                raise DuplicateEntryName(f"catalog entry {entry.name!r} appears twice")
            seen.add(key)

        created = 0
        with self._lock:
            for entry in entries:
                text = f"{entry.name}: {entry.description}\n{entry.signature.render()}"
                metadata = {
                    "source": "catalog",
                    "fb_name": entry.name,
                    "base_name": entry.base_name,
                    "variant_tags": ",".join(sorted(entry.variant_tags)),
                }
                if self._add(Segment.FUNCTION_BLOCKS, text, metadata):
                    created += 1
        return created

    def ingest_spec_text(self, source: str, text: str) -> list[str]:
        """Chunk a specification excerpt into the Specs segment."""
        with self._lock:
            return self._ingest_chunked(Segment.SPECS, source, text)

    def ingest_upload(self, filename: str, data: bytes) -> list[str]:
        """Validate and chunk an uploaded file into the Auxiliary segment.

        Rejects binary payloads (NUL bytes or too many non-printable bytes)
        and anything that is not valid UTF-8.
        """
        if b"\x00" in data:
            raise BinaryContentRejected(f"{filename}: contains NUL bytes")
        if data:
            non_printable = sum(
                1 for b in data if b < 0x20 and b not in (0x09, 0x0A, 0x0D)
            )
            if non_printable / len(data) > _PRINTABLE_BUDGET:
                raise BinaryContentRejected(
                    f"{filename}: {non_printable} non-printable bytes exceed the text budget"
                )
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise EncodingRejected(f"{filename}: not valid UTF-8 ({exc})") from exc
        with self._lock:
            return self._ingest_chunked(Segment.AUXILIARY, filename, text)

    def _ingest_chunked(self, segment: Segment, source: str, text: str) -> list[str]:
        ids: list[str] = []
        for chunk in chunk_text(text):
            created_id = self._add(segment, chunk, {"source": source})
            if created_id:
                ids.append(created_id)
        return ids

    def _add(self, segment: Segment, text: str, metadata: dict[str, str]) -> str | None:
        """Returns the new doc id, or None when the doc already exists."""
        new_id = doc_id(segment, metadata.get("source", ""), text)
        if new_id in self._docs:
            return None
        doc = KnowledgeDoc(
            id=new_id, segment=segment, text=text, metadata=metadata,
            vector=self.embedder.embed(text),
        )
        self._docs[new_id] = doc
        self._append_record({"op": "add", "doc": doc.to_record()})
        return new_id

    def delete_source(self, source: str) -> int:
        """Drop every doc whose metadata source matches; returns the count."""
        with self._lock:
            victims = [d.id for d in self._docs.values() if d.metadata.get("source") == source]
            for vid in victims:
                del self._docs[vid]
            if victims:
                self._append_record({"op": "delete_source", "source": source})
            return len(victims)

    # -- search ----------------------------------------------------------

    def search(self, query: str, segment: Segment | None = None,
               k: int = 5) -> list[tuple[KnowledgeDoc, float]]:
        """Top-k docs by cosine similarity, optionally filtered by segment.

        Ties break on ascending doc id.  Raises :class:`EmptyIndex` when no
        doc matches the filter.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        docs = [
            d for d in self._docs.values()
            if segment is None or d.segment is segment
        ]
        if not docs:
            where = segment.value if segment else "any segment"
            raise EmptyIndex(f"no documents indexed for {where}")
        docs.sort(key=lambda d: d.id)
        matrix = np.stack([d.vector for d in docs])
        scores = matrix @ self.embedder.embed(query)
        order = np.argsort(-scores, kind="stable")[:k]
        return [(docs[i], float(scores[i])) for i in order]

    # -- bookkeeping -------------------------------------------------------

    def __len__(self) -> int:
        return len(self._docs)

    def segment_counts(self) -> dict[str, int]:
        counts = {segment.value: 0 for segment in Segment}
        for doc in self._docs.values():
            counts[doc.segment.value] += 1
        return counts

    def documents(self, segment: Segment | None = None) -> list[KnowledgeDoc]:
        docs = [
            d for d in self._docs.values()
            if segment is None or d.segment is segment
        ]
        return sorted(docs, key=lambda d: d.id)

    # -- persistence -------------------------------------------------------

    def _append_record(self, record: dict) -> None:
        if self.persist_path is None:
            return
        if not self.persist_path.exists():
            self._write_header()
        with self.persist_path.open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(record, sort_keys=True) + "\n")

    def _write_header(self) -> None:
        assert self.persist_path is not None
        self.persist_path.parent.mkdir(parents=True, exist_ok=True)
        header = {
            "format": PERSIST_FORMAT,
            "version": PERSIST_VERSION,
            "dimension": self.embedder.dimension,
        }
        self.persist_path.write_text(json.dumps(header) + "\n", encoding="utf-8")

    def _load(self) -> None:
        assert self.persist_path is not None
        lines = self.persist_path.read_text(encoding="utf-8").splitlines()
        if not lines:
            return
        header = json.loads(lines[0])
        if header.get("format") != PERSIST_FORMAT or header.get("version") != PERSIST_VERSION:
            raise KnowledgeError(f"unsupported index file {self.persist_path}")
        if header.get("dimension") != self.embedder.dimension:
            raise KnowledgeError(
                f"index dimension {header.get('dimension')} does not match "
                f"embedder dimension {self.embedder.dimension}"
            )
        for line in lines[1:]:
            if not line.strip():
                continue
            record = json.loads(line)
            if record["op"] == "add":
                raw = record["doc"]
                doc = KnowledgeDoc(
                    id=raw["id"],
                    segment=Segment(raw["segment"]),
                    text=raw["text"],
                    metadata=raw["metadata"],
                    vector=np.asarray(raw["vector"], dtype=np.float64),
                )
                self._docs[doc.id] = doc
            elif record["op"] == "delete_source":
                source = record["source"]
                for vid in [d.id for d in self._docs.values()
                            if d.metadata.get("source") == source]:
                    del self._docs[vid]

    def compact(self) -> None:
        """Rewrite the persistence file down to the live documents."""
        if self.persist_path is None:
            return
        with self._lock:
            self._write_header()
            with self.persist_path.open("a", encoding="utf-8") as handle:
                for doc in self.documents():
                    handle.write(json.dumps({"op": "add", "doc": doc.to_record()},
                                            sort_keys=True) + "\n")


def chunk_text(text: str, size: int = CHUNK_SIZE, overlap: int = CHUNK_OVERLAP) -> list[str]:
    """Fixed-size chunks advancing by ``size - overlap`` characters."""
    if size <= overlap:
        raise ValueError("chunk size must exceed overlap")
    if not text:
        return []
    stride = size - overlap
    return [text[start:start + size] for start in range(0, len(text), stride)]
