import numpy as np
import pytest

from insbank.geometry import CrossSimilarityMatrix
from insbank.history import (
    HistoryBlocks,
    build_momentum,
    estimate_bottom_left,
    estimate_top_right,
    extract_history,
    history_aware_blend,
    MomentumMatrix,
)
from insbank.errors import IndexOutOfRange

from conftest import make_point


# 2 bank members a, b (also the only participants), one new point c with
# cosine similarities 0.6 and 0.2 -> weights 0.75 / 0.25
H_SQUARE = np.array([[0.0, -1.0], [-2.0, 0.0]])
SIM = CrossSimilarityMatrix(values=np.array([[0.6], [0.2]]))


def hand_history():
    return HistoryBlocks(
        bank_rows=H_SQUARE.copy(),
        bank_cols=H_SQUARE.copy(),
        participant_embeddings=np.array([[1.0, 0.0], [0.0, 1.0]]),
        bank_ids=("a", "b"),
        participant_positions=np.array([0, 1]),
    )


def test_estimate_top_right_hand_case():
    block = estimate_top_right(H_SQUARE, SIM)
    assert block.shape == (2, 1)
    assert block[0, 0] == pytest.approx(-0.25, abs=1e-12)
    assert block[1, 0] == pytest.approx(0.75 * -2.0, abs=1e-12)


def test_estimate_top_right_uniform_column():
    sim = CrossSimilarityMatrix(values=np.array([[0.5], [0.5]]))
    block = estimate_top_right(H_SQUARE, sim)
    assert np.allclose(block[:, 0], H_SQUARE.mean(axis=1))


def test_estimate_top_right_point_mass():
    sim = CrossSimilarityMatrix(values=np.array([[1.0], [0.0]]))
    block = estimate_top_right(H_SQUARE, sim)
    assert np.allclose(block[:, 0], H_SQUARE[:, 0])


def test_estimate_top_right_degenerate_column_uniform_fallback():
    sim = CrossSimilarityMatrix(values=np.array([[-0.3], [-0.7]]))  # clamps to zero mass
    block = estimate_top_right(H_SQUARE, sim)
    assert np.allclose(block[:, 0], H_SQUARE.mean(axis=1))


def test_estimate_bottom_left_hand_case():
    block = estimate_bottom_left(H_SQUARE, SIM)
    assert block.shape == (1, 2)
    assert block[0, 0] == pytest.approx(0.75 * 0.0 + 0.25 * -2.0, abs=1e-12)  # -0.5
    assert block[0, 1] == pytest.approx(0.75 * -1.0 + 0.25 * 0.0, abs=1e-12)


def test_estimates_stay_in_history_hull():
    rng = np.random.default_rng(5)
    rows = rng.normal(size=(3, 6))
    sim = CrossSimilarityMatrix(values=np.abs(rng.normal(size=(6, 4))))
    block = estimate_top_right(rows, sim)
    for i in range(3):
        assert np.all(block[i] >= rows[i].min() - 1e-12)
        assert np.all(block[i] <= rows[i].max() + 1e-12)


def test_build_momentum_hand_fixture():
    # new point chosen so its cosines to the participants are proportional
    # to 0.6 / 0.2, which is all the weight normalization sees
    hist = hand_history()
    new = [make_point("c", [0.6, 0.2])]
    M = build_momentum(hist, new).values
    assert M.shape == (3, 3)
    assert np.array_equal(M[:2, :2], H_SQUARE)
    assert M[0, 2] == pytest.approx(-0.25, abs=1e-9)
    assert M[2, 0] == pytest.approx(-0.5, abs=1e-9)
    expected_fill = np.median([0.0, -1.0, -2.0, 0.0, -0.25, -1.5, -0.5, -0.75])
    assert M[2, 2] == pytest.approx(expected_fill, abs=1e-9)


def test_build_momentum_no_new_points():
    hist = hand_history()
    M = build_momentum(hist, []).values
    assert np.array_equal(M, H_SQUARE)


def test_build_momentum_all_zero_history():
    hist = HistoryBlocks(
        bank_rows=np.zeros((2, 2)),
        bank_cols=np.zeros((2, 2)),
        participant_embeddings=np.array([[1.0, 0.0], [0.0, 1.0]]),
        bank_ids=("a", "b"),
        participant_positions=np.array([0, 1]),
    )
    M = build_momentum(hist, [make_point("c", [1.0, 1.0])]).values
    assert np.all(M == 0.0)


def test_history_aware_blend():
    M = MomentumMatrix(values=np.full((2, 2), 10.0))
    R_new = np.full((2, 2), 2.0)
    R_prev = np.zeros((2, 2))
    assert np.allclose(history_aware_blend(M, R_new, R_prev, 0.0, 1.0), R_new)
    assert np.allclose(history_aware_blend(M, R_new, R_prev, 1.0, 0.5), M.values)
    out = history_aware_blend(M, R_new, R_prev, 0.3, 0.5)
    assert np.allclose(out, 0.3 * 10.0 + 0.7 * 1.0)


def test_alpha_decay_schedule():
    alpha, lam = 0.3, 0.9
    seq = []
    for _ in range(3):
        alpha *= lam
        seq.append(alpha)
    assert seq[0] == pytest.approx(0.27)
    assert seq[1] == pytest.approx(0.243)
    assert all(b < a for a, b in zip(seq, seq[1:]))


def test_extract_history_full_bank():
    R = np.arange(9.0).reshape(3, 3)
    emb = np.ones((3, 2))
    hist = extract_history(R, [0, 1, 2], emb, ["a", "b", "c"])
    assert np.array_equal(hist.bank_rows, R)
    assert np.array_equal(hist.bank_cols, R)
    assert np.array_equal(hist.bank_square(), R)


def test_extract_history_slicing():
    R = np.arange(9.0).reshape(3, 3)
    hist = extract_history(R, [0, 2], np.ones((3, 2)), ["a", "c"])
    assert np.array_equal(hist.bank_rows, R[[0, 2], :])
    assert np.array_equal(hist.bank_cols, R[:, [0, 2]])
    assert hist.bank_index == {"a": 0, "c": 1}


def test_extract_then_rebuild_topleft_roundtrip():
    rng = np.random.default_rng(11)
    for _ in range(5):
        R = rng.normal(size=(8, 8))
        positions = sorted(rng.choice(8, size=4, replace=False).tolist())
        ids = [f"b{i}" for i in positions]
        hist = extract_history(R, positions, rng.normal(size=(8, 3)), ids)
        M = build_momentum(hist, []).values
        assert np.array_equal(M, R[np.ix_(positions, positions)])


def test_extract_history_bad_positions():
    with pytest.raises(IndexOutOfRange):
        extract_history(np.zeros((3, 3)), [0, 5], np.ones((3, 2)), ["a", "b"])
