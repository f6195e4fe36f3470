import numpy as np
import pytest

from washwatch.metrics import ConfusionMatrix, EvaluationError, evaluate
from washwatch.movements import CODE_ORDER

from conftest import random_labels


def test_perfect_predictor():
    truth = [2, 3, 4, 5, 6, 7, 10, 0] * 5
    matrix = evaluate(truth, truth)
    assert matrix.accuracy == 1.0
    off_diagonal = matrix.counts - np.diag(np.diag(matrix.counts))
    assert off_diagonal.sum() == 0


def test_all_wrong_predictor():
    truth = [2] * 40
    predictions = [3] * 40
    assert evaluate(predictions, truth).accuracy == 0.0


def test_64_of_100_correct():
    truth = [2] * 100
    predictions = [2] * 64 + [3] * 36
    matrix = evaluate(predictions, truth)
    assert matrix.accuracy == 0.64
    assert matrix.total == 100


def test_length_mismatch_rejected():
    with pytest.raises(EvaluationError, match="length mismatch"):
        evaluate([2, 3], [2])


def test_rows_are_truth_columns_prediction():
    matrix = evaluate([3], [2])
    assert matrix.counts[CODE_ORDER.index(2), CODE_ORDER.index(3)] == 1


def test_accuracy_equals_mean_correctness(rng):
    for _ in range(20):
        n = rng.randrange(1, 300)
        truth = random_labels(rng, n)
        predictions = random_labels(rng, n)
        expected = sum(1 for p, t in zip(predictions, truth) if p == t) / n
        assert evaluate(predictions, truth).accuracy == pytest.approx(expected, abs=1e-12)


def test_merge_adds_counts():
    a = evaluate([2, 3], [2, 3])
    b = evaluate([2], [3])
    merged = a.merge(b)
    assert merged.total == 3
    assert merged.accuracy == pytest.approx(2 / 3)


def test_csv_layout():
    matrix = evaluate([2, 2, 3], [2, 2, 2])
    lines = matrix.to_csv().strip().splitlines()
    assert lines[0] == "truth\\pred,0,2,3,4,5,6,7,10"
    assert len(lines) == 9
    row2 = lines[2].split(",")
    assert row2[0] == "2"
    assert row2[1:] == ["0", "2", "1", "0", "0", "0", "0", "0"]


def test_empty_matrix_accuracy_zero():
    assert ConfusionMatrix().accuracy == 0.0
