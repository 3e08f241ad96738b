"""
Assessing a small documentation corpus
======================================

Both strategies run over the two-paragraph demo manifest with the
deterministic mock providers, so no model or network is needed.
"""

from pathlib import Path

from p2baudit.corpus import corpus_stats, load_manifest
from p2baudit.mocks import mock_embedder, mock_generator
from p2baudit.pipeline import MOCK_TIMESTAMP, AuditSettings, assess_direct, assess_retrieval
from p2baudit.providers import GenerationConfig

ROOT = Path(__file__).resolve().parents[1]
corpus = load_manifest(ROOT / "fixtures" / "corpora" / "demo.json")
print(corpus.platform_name, corpus_stats(corpus))

# Paragraphs are blank-line separated blocks of at least three words.
for p in corpus.paragraphs():
    print(p.doc_index, p.para_index, p.word_count, p.text[:60] + "...")

###############################################################################
# Direct scoring: every chunk gets a 1-5 score, the question keeps the max.
settings = AuditSettings(timestamp=MOCK_TIMESTAMP)
config = GenerationConfig("mock")
direct = assess_direct(corpus, mock_generator(), config, settings)
for q in direct["questions"][:5]:
    print(q["question_id"], q["ordinal_score"], q["binary"])

###############################################################################
# Retrieval, synthesis and DoX.
# Each open question retrieves its top paragraphs. The synthesized answer is
# then scored for explanatory depth.
dox = assess_retrieval(corpus, mock_generator(), mock_embedder(), config, settings)
for q in dox["questions"][:5]:
    print(q["question_id"], q["verdict"], round(q["dox"]["dox"], 3), round(q["explanatory_relevance"], 3))
