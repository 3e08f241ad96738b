"""Evaluation reports built purely from persisted records and label fixtures."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .common import Binary, round_half_up
from .errors import KeyMismatch
from .evaluation.agreement import AgreementCount, agreement_rate, always_yes_baseline, pooled_agreement, random_baseline
from .evaluation.stats import Alternative, mann_whitney_u, rank_biserial
from .evaluation.survey import DEFAULT_THRESHOLDS, duration_filtered_means, threshold_sweep

RANDOM = "Random"
ALWAYS_YES = "Always Yes"
ALL_ROW = "All"
ALIGNMENT_METRICS = ("explanatory_relevance", "max_pertinence", "dox")


def record_answers(record: dict) -> dict:
    return {q["question_id"]: Binary(q["binary"]) for q in record["questions"]}


@dataclass
class AgreementMatrix:
    platforms: list[str]
    columns: list[str]
    cells: dict = field(default_factory=dict)  # (platform, column) -> AgreementCount

    def pooled(self, column) -> AgreementCount | None:
        counts = [self.cells[(p, column)] for p in self.platforms if (p, column) in self.cells]
        return pooled_agreement(counts) if counts else None

    def rows(self):
        """Header plus one row per platform and the pooled row, as printed percentages."""
        def fmt(c):
            return "-" if c is None else f"{c.rate}%"
        yield ["Platform", *self.columns]
        for p in self.platforms:
            yield [p, *(fmt(self.cells.get((p, c))) for c in self.columns)]
        yield [ALL_ROW, *(fmt(self.pooled(c)) for c in self.columns)]


def _check_keys(platform, label, tool, truth):
    if set(tool) != set(truth):
        only_t, only_h = set(tool) - set(truth), set(truth) - set(tool)
        raise KeyMismatch(f"{platform} / {label}: questions only in records {sorted(only_t)}, "
                          f"only in labels {sorted(only_h)}", only_left=only_t, only_right=only_h)


def agreement_matrix(records, truth: dict, seed: int | None = 42, always_yes: bool = True) -> AgreementMatrix:
    """Agreement of each record label (column) with the majority labels, per platform.

    ``truth`` is ``{platform: {question_id: Binary}}``. The random column draws
    one SplitMix64 stream over platforms (in row order) and questions (in
    record order).
    """
    records = list(records)
    platforms: list[str] = []
    columns: list[str] = []
    answers: dict = {}
    for rec in records:
        p, label = rec["platform_name"], rec["label"]
        if p not in truth:
            continue
        if p not in platforms:
            platforms.append(p)
        if label not in columns:
            columns.append(label)
        answers[(p, label)] = record_answers(rec)
    if not platforms:
        raise KeyMismatch("no platform in the records has expert labels",
                          only_left={r["platform_name"] for r in records}, only_right=set(truth))

    matrix = AgreementMatrix(platforms, list(columns))
    for (p, label), tool in answers.items():
        _check_keys(p, label, tool, truth[p])
        matrix.cells[(p, label)] = agreement_rate(tool, truth[p])

    question_order = {p: list(next(a for (pp, _), a in answers.items() if pp == p)) for p in platforms}
    if seed is not None:
        keys = [(p, q) for p in platforms for q in question_order[p]]
        draws = random_baseline([f"{p}/{q}" for p, q in keys], seed)
        matrix.columns.append(RANDOM)
        for p in platforms:
            tool = {q: draws[f"{p}/{q}"] for q in question_order[p]}
            matrix.cells[(p, RANDOM)] = agreement_rate(tool, truth[p])
    if always_yes:
        matrix.columns.append(ALWAYS_YES)
        for p in platforms:
            matrix.cells[(p, ALWAYS_YES)] = agreement_rate(always_yes_baseline(question_order[p]), truth[p])
    return matrix


def survey_table(ratings, min_minutes: float = 0.0):
    """Rows of question x platform 'mean ± std' cells."""
    cells = duration_filtered_means(ratings, min_minutes)
    platforms = sorted({p for p, _ in cells})
    questions = sorted({q for _, q in cells}, key=lambda q: int(q[1:].split("-")[0]))
    rows = [["Question", *platforms]]
    for q in questions:
        row = [q]
        for p in platforms:
            c = cells.get((p, q))
            if c is None or c.n == 0:
                row.append("-")
            elif c.std is None:
                row.append(f"{round_half_up(c.mean)} (n={c.n})")
            else:
                row.append(f"{round_half_up(c.mean)} ± {round_half_up(c.std)} (n={c.n})")
        rows.append(row)
    return rows


def survey_tests(ratings, thresholds=DEFAULT_THRESHOLDS):
    rows = [["min_minutes", "question_id", "first", "second", "n_first", "n_second", "mean_first",
             "mean_second", "alternative", "U", "p_value", "method", "rank_biserial", "cles"]]
    for c in threshold_sweep(ratings, thresholds=thresholds):
        rows.append([f"{c.min_minutes:g}", c.question_id, c.first, c.second, c.n_first, c.n_second,
                     f"{c.mean_first:.4f}", f"{c.mean_second:.4f}", c.alternative, f"{c.u:g}",
                     f"{c.p_value:.6g}", c.method, f"{c.rank_biserial:.4f}", f"{c.cles:.4f}"])
    return rows


def score_alignment(records, truth: dict):
    """MWU of retrieval scores between expert-Yes and expert-No questions.

    The Yes group is the first sample, tested for larger scores; a negative
    rank-biserial r means higher scores go with expert approval.
    """
    rows = [["label", "metric", "n_yes", "n_no", "U", "p_value", "method", "rank_biserial"]]
    by_label: dict = {}
    for rec in records:
        if rec.get("strategy") != "dox" or rec["platform_name"] not in truth:
            continue
        labels = truth[rec["platform_name"]]
        for q in rec["questions"]:
            if q["question_id"] in labels:
                by_label.setdefault(rec["label"], []).append((labels[q["question_id"]], q))
    for label, items in by_label.items():
        for metric in ALIGNMENT_METRICS:
            scored = [(t, _metric(q, metric)) for t, q in items]
            yes = [v for t, v in scored if t is Binary.YES and v is not None]
            no = [v for t, v in scored if t is Binary.NO and v is not None]
            if not yes or not no:
                continue
            res = mann_whitney_u(yes, no, Alternative.GREATER)
            r = rank_biserial(res.u_statistic, len(yes), len(no))
            rows.append([label, metric, len(yes), len(no), f"{res.u_statistic:g}", f"{res.p_value:.6g}",
                         res.method.value, f"{r:.4f}"])
    return rows


def _metric(q, metric):
    if metric == "dox":
        return q.get("dox", {}).get("dox")
    return q.get(metric)


def assessment_summary(records):
    """Per platform, one row per question with each strategy's outcome."""
    rows = [["platform", "label", "question_id", "outcome", "binary", "explanatory_relevance"]]
    for rec in records:
        for q in rec["questions"]:
            if rec["strategy"] == "direct":
                outcome, er = f"score {q['ordinal_score']}", "-"
            else:
                er = q.get("explanatory_relevance")
                outcome, er = q["verdict"], "-" if er is None else f"{er:.4f}"
            rows.append([rec["platform_name"], rec["label"], q["question_id"], outcome, q["binary"], er])
        for f in rec.get("failures", []):
            rows.append([rec["platform_name"], rec["label"], f["question_id"], f"FAILED {f['error']}", "-", "-"])
    return rows


def to_tsv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n")
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def to_text(rows) -> str:
    """Fixed-width rendering for terminals."""
    rows = [[str(c) for c in r] for r in rows]
    if not rows:
        return ""
    widths = [max(len(r[i]) for r in rows if i < len(r)) for i in range(len(rows[0]))]
    lines = []
    for j, r in enumerate(rows):
        lines.append("  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(r, widths))).rstrip())
        if j == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
