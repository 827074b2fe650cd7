"""Segmented knowledge base: catalog, spec excerpts, uploads, and search."""

from .augment import augment_description, augment_entries, stub_augmentation
from .embedder import Embedder, HashedBagEmbedder, RemoteEmbedder
from .store import (
    BinaryContentRejected, DuplicateEntryName, EmptyIndex, EncodingRejected,
    KnowledgeDoc, KnowledgeError, KnowledgeStore, Segment, chunk_text, doc_id,
)

__all__ = [
    "BinaryContentRejected", "DuplicateEntryName", "Embedder", "EmptyIndex",
    "EncodingRejected", "HashedBagEmbedder", "KnowledgeDoc", "KnowledgeError",
    "KnowledgeStore", "RemoteEmbedder", "Segment", "augment_description",
    "augment_entries", "chunk_text", "doc_id", "stub_augmentation",
]
