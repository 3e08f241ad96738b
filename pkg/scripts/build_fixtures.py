"""Regenerate the replication fixtures under ``fixtures/``.

The original harvested pages and per-rater data are not redistributed here, so
these fixtures are synthetic stand-ins constructed to carry the reference
aggregates:

* corpora/*.json      one manifest per platform; document counts and total word
                      counts equal the reference per-platform statistics;
* labels/expert_labels.csv       three experts per platform x question; majority
                      labels, per-platform mean scores and the per-question
                      expert means quoted for the survey questions all match;
* labels/participant_ratings.csv   134 participants rating Booking and
                      Tripadvisor on four questions; every mean and std of the
                      reference survey summary is met to within 0.005;
* records/table3/*.json   tool answers whose per-platform match counts equal the
                      reference agreement percentages.

Everything is derived from SplitMix64 draws, so a rerun is byte-identical.

    python scripts/build_fixtures.py
"""

from __future__ import annotations

import json
import math
import statistics
from pathlib import Path

from p2baudit.checklist import questions_for
from p2baudit.common import Binary
from p2baudit.corpus import PlatformType
from p2baudit.evaluation.agreement import SplitMix64
from p2baudit.evaluation.labels import (
    ExpertLabel,
    ParticipantRating,
    majority_labels,
    write_expert_labels,
    write_participant_ratings,
)
from p2baudit.pipeline import dump_record, slug

ROOT = Path(__file__).resolve().parents[1] / "fixtures"

IS, SE = PlatformType.INTERMEDIATION, PlatformType.SEARCH_ENGINE

# platform -> (type, documents, total words); mean words = total / documents
CORPORA = {
    "Amazon": (IS, 5, 2172),
    "Bing": (SE, 16, 15425),
    "Booking": (IS, 7, 4056),
    "Google": (SE, 52, 87334),
    "Tripadvisor": (IS, 10, 16539),
    "Yahoo": (SE, 3, 522),
}
TABLE_ORDER = ["Bing", "Booking", "Tripadvisor", "Amazon", "Google", "Yahoo"]

# Expert side: number of majority-Yes questions and the sum of all expert scores.
EXPERT_YES = {"Bing": 14, "Booking": 1, "Tripadvisor": 10, "Amazon": 11, "Google": 6, "Yahoo": 1}
EXPERT_SUM = {"Tripadvisor": 134, "Amazon": 131, "Booking": 89, "Bing": 202, "Google": 119, "Yahoo": 70}
FIXED_TRIPLES = {
    ("Booking", "Q3"): (3, 2, 2), ("Booking", "Q4"): (2, 2, 1),
    ("Booking", "Q15"): (4, 4, 4), ("Booking", "Q16"): (1, 1, 1),
    ("Tripadvisor", "Q3"): (5, 5, 4), ("Tripadvisor", "Q4"): (4, 4, 3),
    ("Tripadvisor", "Q15"): (4, 3, 3), ("Tripadvisor", "Q16"): (3, 3, 2),
}
YES_PRIORITY = ["Q3", "Q11", "Q15", "Q12", "Q1", "Q5", "Q9", "Q7", "Q10", "Q16", "Q2", "Q6",
                "Q4-SE", "Q4", "Q8", "Q18", "Q13", "Q14", "Q19", "Q17"]

# Reconstructed matches per platform (row order as TABLE_ORDER).
TOOL_MATCHES = {
    "ChatGPT 3.5": ("direct", "gpt-3.5-turbo-16k-0613", [13, 13, 10, 8, 7, 18]),
    "ChatGPT 4": ("direct", "gpt-4-0613", [6, 5, 9, 9, 11, 18]),
    "DoX-based": ("dox", "gpt-4-0613", [13, 6, 11, 11, 10, 18]),
}

SURVEY_TARGETS = {
    ("Booking", "Q3"): (3.56, 0.95), ("Tripadvisor", "Q3"): (3.81, 0.86),
    ("Booking", "Q4"): (3.43, 1.04), ("Tripadvisor", "Q4"): (3.66, 0.96),
    ("Booking", "Q15"): (3.79, 0.89), ("Tripadvisor", "Q15"): (3.44, 0.91),
    ("Booking", "Q16"): (2.87, 1.17), ("Tripadvisor", "Q16"): (2.91, 1.24),
}
PARTICIPANTS = 134
LONG_READERS = 55

SENTENCES = [
    "Ranking means the relative prominence given to offers when results are presented to consumers.",
    "The main parameters used for ranking are relevance to the search query, customer reviews, price and availability.",
    "We consider relevance the most important parameter because it reflects what the consumer is looking for.",
    "Other parameters such as conversion rate and cancellation history carry less weight in the ranking.",
    "The ranking mechanism considers the characteristics of the goods and services offered, including price, location and quality.",
    "The relevance of these characteristics for consumers is estimated from past search and booking behaviour.",
    "Business users can improve the ranking of their listings by keeping content accurate and responding to reviews.",
    "Partners may pay a commission to take part in visibility programmes that can influence ranking.",
    "Payments for promoted placement affect ranking only in clearly labelled sponsored positions.",
    "Paid options do not change the organic ranking of offers in the default sort order.",
    "Our teams review the main parameters regularly through internal testing and experiments.",
    "Parameters were selected because they predict consumer satisfaction better than alternatives.",
    "The relative importance of each parameter varies with the query and the device being used.",
    "For websites, the design characteristics such as page speed and mobile friendliness are taken into account.",
    "Websites with clear structure and secure connections tend to rank higher in search results.",
    "The extent to which design characteristics matter depends on the competition for a given query.",
    "Consumers can change the sort order to price, distance or rating at any time.",
    "Personalised results may reflect the consumer's location, language and previous activity.",
    "These terms apply to all business users that list goods or services on the platform.",
    "This page explains how results are ordered and which signals we use.",
    "Please contact our support team if you have questions about these policies.",
    "We may update this description when the ranking systems change.",
    "Listings that violate our content guidelines may be demoted or removed.",
    "The business logic behind paid programmes is to fund the service while keeping results useful.",
    "A potential consequence of paid programmes is that paying partners appear more often.",
    "Ranking algorithms are built by engineers and evaluated by quality raters.",
    "Signals from reviews are weighted by recency and by the number of reviews received.",
    "Availability on the requested dates is required before an offer can be ranked.",
]


def _shuffle(items, rng):
    items = list(items)
    for i in range(len(items) - 1, 0, -1):
        j = rng.next_u64() % (i + 1)
        items[i], items[j] = items[j], items[i]
    return items


def _split_total(total, parts, rng):
    """Positive integer counts summing to ``total`` with uneven, deterministic weights."""
    weights = [1 + rng.next_u64() % 1000 for _ in range(parts)]
    scale = total / sum(weights)
    counts = [max(20, int(w * scale)) for w in weights]
    diff = total - sum(counts)
    i = 0
    while diff:
        step = 1 if diff > 0 else -1
        if counts[i % parts] + step >= 20:
            counts[i % parts] += step
            diff -= step
        i += 1
    return counts


def _document_text(platform, words, rng):
    crumb = f"{platform} Help"
    remaining = words - 2
    paragraphs = []
    while remaining > 0:
        sentences = []
        for _ in range(2 + rng.next_u64() % 4):
            if remaining <= 0:
                break
            tokens = SENTENCES[rng.next_u64() % len(SENTENCES)].split()
            if len(tokens) > remaining:
                tokens = tokens[:remaining]
                tokens[-1] = tokens[-1].rstrip(".,") + "."
            sentences.append(" ".join(tokens))
            remaining -= len(tokens)
        paragraphs.append(" ".join(sentences))
    return "\n\n".join([crumb, *paragraphs]) + "\n"


def build_corpora():
    out = ROOT / "corpora"
    out.mkdir(parents=True, exist_ok=True)
    for platform, (ptype, n_docs, total) in CORPORA.items():
        rng = SplitMix64(int.from_bytes(platform.encode(), "little"))
        docs = []
        for i, words in enumerate(_split_total(total, n_docs, rng)):
            docs.append({
                "url": f"https://{slug(platform)}.example/ranking/{i + 1}",
                "title": f"{platform} ranking documentation, page {i + 1}",
                "fetched_at": "2023-06-13T00:00:00Z",
                "content": _document_text(platform, words, rng),
            })
        manifest = {"platform_name": platform, "platform_type": ptype.value, "documents": docs}
        (out / f"{slug(platform)}.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")

    demo = {
        "platform_name": "DemoMarket",
        "platform_type": "intermediation",
        "documents": [{
            "url": "https://demomarket.example/ranking",
            "title": "How DemoMarket ranks offers",
            "fetched_at": "2023-06-13T00:00:00Z",
            "content": SENTENCES[1] + " " + SENTENCES[2] + "\n\n" + SENTENCES[7] + " " + SENTENCES[9] + "\n",
        }],
    }
    (out / "demo.json").write_text(json.dumps(demo, indent=2) + "\n", encoding="utf-8")


def _triple(total, yes):
    """Three 1-5 scores with the given sum whose binarized majority is ``yes``."""
    if yes:
        vals, order, caps = [3, 3, 1], [0, 1, 2], [5, 5, 5]
    else:
        vals, order, caps = [1, 1, 1], [2, 0, 1], [2, 2, 5]
    extra = total - sum(vals)
    while extra > 0:
        progressed = False
        for i in order:
            if extra and vals[i] < caps[i]:
                vals[i] += 1
                extra -= 1
                progressed = True
        if not progressed:
            raise ValueError(f"cannot reach sum {total} with yes={yes}")
    return tuple(sorted(vals, reverse=True))


def build_expert_labels():
    labels = []
    truth = {}
    for platform in TABLE_ORDER:
        ptype = CORPORA[platform][0]
        qids = [q.id for q in questions_for(ptype)]
        fixed = {q: t for (p, q), t in FIXED_TRIPLES.items() if p == platform}
        yes = {q for q, t in fixed.items() if sum(s >= 3 for s in t) >= 2}
        for q in YES_PRIORITY:
            if len(yes) >= EXPERT_YES[platform]:
                break
            if q in qids and q not in fixed:
                yes.add(q)
        free = [q for q in qids if q not in fixed]
        budget = EXPERT_SUM[platform] - sum(sum(t) for t in fixed.values())
        sums = {q: 7 if q in yes else 3 for q in free}
        caps = {q: 15 if q in yes else 9 for q in free}
        budget -= sum(sums.values())
        while budget > 0:
            for q in free:
                if budget and sums[q] < caps[q]:
                    sums[q] += 1
                    budget -= 1
        triples = dict(fixed)
        triples.update({q: _triple(sums[q], q in yes) for q in free})
        for k, q in enumerate(qids):
            t = triples[q]
            t = t[k % 3:] + t[:k % 3]
            for e, score in enumerate(t):
                labels.append(ExpertLabel(f"E{e + 1}", platform, q, score))
        truth[platform] = {q: Binary.YES if q in yes else Binary.NO for q in qids}
    out = ROOT / "labels"
    out.mkdir(parents=True, exist_ok=True)
    write_expert_labels(out / "expert_labels.csv", labels)
    assert majority_labels(labels) == truth
    return truth


def build_tool_records(truth):
    out = ROOT / "records" / "table3"
    out.mkdir(parents=True, exist_ok=True)
    for label, (strategy, model_id, matches) in TOOL_MATCHES.items():
        for platform, m in zip(TABLE_ORDER, matches):
            qids = list(truth[platform])
            rng = SplitMix64(int.from_bytes((label + platform).encode()[:8], "little"))
            flipped = set(_shuffle(qids, rng)[: len(qids) - m])
            questions = []
            for q in qids:
                b = truth[platform][q]
                if q in flipped:
                    b = Binary.NO if b is Binary.YES else Binary.YES
                entry = {"question_id": q, "binary": b.value}
                if strategy == "direct":
                    entry["ordinal_score"] = 4 if b is Binary.YES else 2
                else:
                    entry["verdict"] = b.value
                questions.append(entry)
            record = {
                "record_version": 1,
                "reconstructed": True,
                "platform_name": platform,
                "platform_type": CORPORA[platform][0].value,
                "strategy": strategy,
                "label": label,
                "model_id": model_id,
                "timestamp": "2023-06-13T00:00:00Z",
                "questions": questions,
                "failures": [],
            }
            name = f"{slug(platform)}__{slug(label)}.json"
            (out / name).write_text(dump_record(record), encoding="utf-8")


def _ok(stat, target):
    return abs(stat - target) <= 0.0049


def _count_vector(mean, std, n=PARTICIPANTS):
    """Counts of ratings 1..5 summing to n with mean and sample std near the targets."""
    best = None
    for c5 in range(n + 1):
        for c4 in range(n + 1 - c5):
            for c3 in range(n + 1 - c5 - c4):
                rest = n - c5 - c4 - c3
                # c1 + c2 = rest, c1 + 2 c2 = s - (3c3 + 4c4 + 5c5)
                s = round(mean * n)
                c2 = s - 3 * c3 - 4 * c4 - 5 * c5 - rest
                c1 = rest - c2
                if c1 < 0 or c2 < 0:
                    continue
                counts = (c1, c2, c3, c4, c5)
                m = s / n
                sq = sum((k + 1) ** 2 * c for k, c in enumerate(counts))
                sd = math.sqrt((sq - n * m * m) / (n - 1))
                if _ok(m, mean) and _ok(sd, std):
                    err = abs(m - mean) + abs(sd - std)
                    if best is None or err < best[0]:
                        best = (err, counts)
    if best is None:
        raise ValueError(f"no rating distribution for {mean} ± {std}")
    return best[1]


def build_participant_ratings():
    rng = SplitMix64(134)
    ids = [f"P{i + 1:03d}" for i in range(PARTICIPANTS)]
    long_readers = set(_shuffle(ids, rng)[:LONG_READERS])
    minutes = {}
    for pid in ids:
        tenths = rng.next_u64() % 50
        minutes[pid] = 5.1 + (tenths * 3) / 10 if pid in long_readers else tenths / 10
    ratings = []
    for (platform, q), (mean, std) in sorted(SURVEY_TARGETS.items(), key=lambda kv: (kv[0][0], int(kv[0][1][1:]))):
        counts = _count_vector(mean, std)
        values = _shuffle([k + 1 for k, c in enumerate(counts) for _ in range(c)], rng)
        assert _ok(statistics.fmean(values), mean) and _ok(statistics.stdev(values), std)
        for pid, v in zip(ids, values):
            ratings.append(ParticipantRating(pid, platform, q, v, round(minutes[pid], 1)))
    ratings.sort(key=lambda r: (r.participant_id, r.platform, int(r.question_id[1:])))
    write_participant_ratings(ROOT / "labels" / "participant_ratings.csv", ratings)


def main():
    build_corpora()
    truth = build_expert_labels()
    build_tool_records(truth)
    build_participant_ratings()
    print(f"fixtures written to {ROOT}")


if __name__ == "__main__":
    main()
