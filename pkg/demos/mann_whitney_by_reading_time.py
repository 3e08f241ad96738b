"""
Survey answers by reading time
==============================

Participants rated how well each platform answers four questions. Restricting
to people who read longer changes the means, and the one-sided Mann-Whitney U
test shows how the platform gap holds up.
"""

from pathlib import Path

import numpy as np

from p2baudit.evaluation import duration_filtered_means, load_participant_ratings, threshold_sweep

path = Path(__file__).resolve().parents[1] / "fixtures" / "labels" / "participant_ratings.csv"
ratings = load_participant_ratings(path)

minutes = np.array([r.read_minutes for r in ratings])
print("median reading time", np.median(minutes), "minutes")

for key, cell in duration_filtered_means(ratings).items():
    print(key, cell.n, round(cell.mean, 2), round(cell.std, 2))

###############################################################################
# Rank-biserial r below zero means the first platform (Tripadvisor) tends to
# score higher.
for c in threshold_sweep(ratings, thresholds=(5, 0)):
    print(c.min_minutes, c.question_id, c.alternative, c.u, f"{c.p_value:.3g}", round(c.rank_biserial, 3))
