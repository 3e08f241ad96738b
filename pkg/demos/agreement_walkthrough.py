"""
Agreement with expert labels
============================

Majority labels come from three experts per question. Each tool's binary
answers are compared against them, and the counts are pooled over platforms.
"""

from pathlib import Path

from p2baudit.evaluation import load_expert_labels, majority_labels
from p2baudit.pipeline import load_record, record_paths
from p2baudit.reports import agreement_matrix, to_text

ROOT = Path(__file__).resolve().parents[1] / "fixtures"

truth = majority_labels(load_expert_labels(ROOT / "labels" / "expert_labels.csv"))
print({p: sum(v.value == "Yes" for v in qs.values()) for p, qs in truth.items()})

records = [load_record(p) for p in record_paths([ROOT / "records" / "table3"])]

# Pooled rates sum matches and totals; averaging the per-platform rates
# would give a different number.
matrix = agreement_matrix(records, truth, seed=42)
print(to_text(matrix.rows()))

pooled = matrix.pooled("ChatGPT 3.5")
print(pooled.matches, "/", pooled.total, "=", pooled.rate)
