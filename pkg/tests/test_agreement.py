from decimal import Decimal

import pytest
from hypothesis import given
from hypothesis import strategies as st

from p2baudit.common import Binary
from p2baudit.errors import EmptyList, EvenLabelCount, KeyMismatch
from p2baudit.evaluation import (
    AgreementCount,
    ExpertLabel,
    SplitMix64,
    agreement_rate,
    always_yes_baseline,
    load_expert_labels,
    majority_label,
    majority_labels,
    pooled_agreement,
    random_baseline,
    write_expert_labels,
)

Y, N = Binary.YES, Binary.NO


def truth_with(yes, total):
    return {f"Q{i}": Y if i < yes else N for i in range(total)}


def tool_matching(truth, matches):
    keys = list(truth)
    return {q: truth[q] if i < matches else (N if truth[q] is Y else Y) for i, q in enumerate(keys)}


@pytest.mark.parametrize("scores,label", [([4, 2, 5], Y), ([1, 2, 3], N), ([3, 3, 1], Y), ([5], Y)])
def test_majority_label(scores, label):
    assert majority_label(scores) is label


def test_majority_needs_odd_count():
    with pytest.raises(EvenLabelCount):
        majority_label([4, 2])


def test_majority_labels_groups_by_platform_and_question():
    labels = [ExpertLabel(e, "P", "Q1", s) for e, s in zip("abc", [4, 2, 5])]
    labels += [ExpertLabel(e, "P", "Q2", s) for e, s in zip("abc", [1, 2, 5])]
    assert majority_labels(labels) == {"P": {"Q1": Y, "Q2": N}}


def test_label_csv_round_trip(tmp_path):
    labels = [ExpertLabel("e1", "Yahoo", "Q1", 2), ExpertLabel("e2", "Yahoo", "Q1", 4)]
    path = tmp_path / "labels.csv"
    write_expert_labels(path, labels)
    assert load_expert_labels(path) == labels


@pytest.mark.parametrize("matches,total,rate", [(18, 19, "94.74"), (13, 17, "76.47"), (0, 17, "0.00"),
                                                (8, 17, "47.06"), (7, 19, "36.84")])
def test_agreement_rate(matches, total, rate):
    truth = truth_with(5, total)
    c = agreement_rate(tool_matching(truth, matches), truth)
    assert (c.matches, c.total, c.rate) == (matches, total, Decimal(rate))


def test_agreement_rate_key_mismatch():
    with pytest.raises(KeyMismatch) as exc:
        agreement_rate({"Q1": Y, "Q2": Y}, {"Q1": Y, "Q3": N})
    assert exc.value.only_left == ["Q2"] and exc.value.only_right == ["Q3"]


def test_pooling_sums_counts():
    counts = [AgreementCount(m, t) for m, t in [(13, 19), (13, 17), (10, 17), (8, 17), (7, 19), (18, 19)]]
    pooled = pooled_agreement(counts)
    assert (pooled.matches, pooled.total, pooled.rate) == (69, 108, Decimal("63.89"))
    mean_of_rates = sum(c.fraction for c in counts) / len(counts) * 100
    assert round(mean_of_rates, 2) == 63.73
    assert pooled_agreement([AgreementCount(3, 7)]) == AgreementCount(3, 7)
    with pytest.raises(EmptyList):
        pooled_agreement([])


def test_always_yes_examples():
    yahoo = truth_with(1, 19)
    assert agreement_rate(always_yes_baseline(yahoo), yahoo).rate == Decimal("5.26")
    assert agreement_rate(always_yes_baseline(yahoo), truth_with(19, 19)).rate == Decimal("100.00")
    assert agreement_rate(always_yes_baseline(yahoo), truth_with(0, 19)).rate == Decimal("0.00")


@given(st.lists(st.booleans(), min_size=1, max_size=40))
def test_always_yes_equals_yes_fraction(flags):
    truth = {f"Q{i}": Y if f else N for i, f in enumerate(flags)}
    c = agreement_rate(always_yes_baseline(truth), truth)
    assert c.matches == sum(flags) and c.total == len(flags)


def test_splitmix64_reference_vectors():
    r = SplitMix64(0)
    assert r.next_u64() == 0xE220A8397B1DCDAF
    assert r.next_u64() == 0x6E789E6AA1B965F4
    r = SplitMix64(1234567)
    assert [r.next_u64() for _ in range(5)] == [6457827717110365317, 3203168211198807973, 9817491932198370423,
                                                4593380528125082431, 16408922859458223821]


def test_random_baseline_is_reproducible_and_uses_top_bit():
    qs = [f"Q{i}" for i in range(64)]
    assert random_baseline(qs, 42) == random_baseline(qs, 42)
    assert random_baseline(qs, 42) != random_baseline(qs, 43)
    r = SplitMix64(7)
    expected = {q: Y if r.next_u64() >> 63 else N for q in qs}
    assert random_baseline(qs, 7) == expected


def test_random_baseline_is_balanced():
    draws = random_baseline([f"q{i}" for i in range(10_000)], 42)
    share = sum(v is Y for v in draws.values()) / len(draws)
    assert 0.47 <= share <= 0.53
