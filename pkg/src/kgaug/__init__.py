"""Knowledge-graph-driven text data augmentation.

Localizes graph entities in labeled texts, rewrites them through two
complementary replacement views (graph neighborhood and training data), and
selects augmented samples by confidence-centered weighted sampling.
"""

from .assess import ConfidenceRecord, SelectionConfig, Strategy, sampling_weights, select
from .embeddings import EmbeddingTable, embed_phrase, load_embeddings
from .kg import Entity, KnowledgeGraph, Triple, load_kg, perturb_kg, triples_with_relation
from .kger import augment_kger
from .localize import MentionMatch, RelatedPair, TokenSpan, find_related_pairs, localize, preprocess
from .pipeline import RunConfig, novel_entity_coverage, resume_assess, run_augment
from .records import AugmentedSample, LabeledText, Replacement
from .trainer import augment_trainer, build_replacement_index, cluster_templates, mask_template, tfidf_vectors

__version__ = "0.1.0"

__all__ = [
    "AugmentedSample",
    "ConfidenceRecord",
    "EmbeddingTable",
    "Entity",
    "KnowledgeGraph",
    "LabeledText",
    "MentionMatch",
    "RelatedPair",
    "Replacement",
    "RunConfig",
    "SelectionConfig",
    "Strategy",
    "TokenSpan",
    "Triple",
    "augment_kger",
    "augment_trainer",
    "build_replacement_index",
    "cluster_templates",
    "embed_phrase",
    "find_related_pairs",
    "load_embeddings",
    "load_kg",
    "localize",
    "mask_template",
    "novel_entity_coverage",
    "perturb_kg",
    "preprocess",
    "resume_assess",
    "run_augment",
    "sampling_weights",
    "select",
    "tfidf_vectors",
    "triples_with_relation",
]
