"""Ranking-transparency compliance auditing for online platform documentation."""

from .checklist import ChecklistQuestion, open_form, questions_for
from .common import Binary, QuestionAssessment, Strategy
from .corpus import Document, Paragraph, PlatformCorpus, PlatformType, corpus_stats, load_manifest, segment_paragraphs
from .direct import assess_question_direct, build_direct_prompt, chunk_document, normalize_binary, parse_score
from .dox import dox_score, explanatory_relevance, sentence_split
from .providers import GenerationConfig, estimate_tokens
from .retrieval import build_synthesis_prompt, parse_verdict, pertinence_score, retrieve_top_k

__version__ = "0.1.0"
