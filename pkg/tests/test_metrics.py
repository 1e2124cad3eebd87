import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fvq.errors import LengthMismatch, ZeroVariance
from fvq.metrics import pcc, rank, srcc

from oracles import pcc_oracle, rank_oracle, srcc_oracle


def test_pcc_positive_affine_is_one():
    x = np.array([1.0, 2.0, 5.0, 7.0])
    assert pcc(x, 2 * x + 1) == pytest.approx(1.0, abs=1e-12)


def test_pcc_negation_is_minus_one():
    x = np.array([1.0, 2.0, 5.0, 7.0])
    assert pcc(x, -x) == pytest.approx(-1.0, abs=1e-12)


def test_pcc_matches_direct_formula_oracle():
    rng = np.random.default_rng(5)
    for _ in range(50):
        x = rng.normal(size=10)
        y = rng.normal(size=10)
        assert pcc(x, y) == pytest.approx(pcc_oracle(list(x), list(y)), abs=1e-12)


def test_pcc_errors():
    with pytest.raises(LengthMismatch):
        pcc([1, 2, 3], [1, 2])
    with pytest.raises(LengthMismatch):
        pcc([1, 2], [1, 2])
    with pytest.raises(ZeroVariance):
        pcc([1, 1, 1], [1, 2, 3])


def test_srcc_monotone_map_is_one():
    x = np.array([0.3, 1.1, 2.0, 2.5])
    assert srcc(x, np.exp(x)) == pytest.approx(1.0, abs=1e-12)


def test_srcc_reversed_is_minus_one():
    x = np.array([4.0, 3.0, 2.0, 1.0])
    assert srcc(x, np.arange(4.0)) == pytest.approx(-1.0, abs=1e-12)


def test_srcc_tied_data_matches_hand_ranks():
    x = [1.0, 2.0, 2.0, 3.0]
    y = [1.0, 3.0, 2.0, 4.0]
    # ranks of x: [1, 2.5, 2.5, 4]; of y: [1, 3, 2, 4]
    assert srcc(x, y) == pytest.approx(pcc_oracle([1, 2.5, 2.5, 4], [1, 3, 2, 4]),
                                       abs=1e-14)
    assert srcc(x, y) == pytest.approx(srcc_oracle(x, y), abs=1e-14)


def test_rank_basic():
    assert rank([10.0, 30.0, 20.0]).tolist() == [1.0, 3.0, 2.0]
    assert rank([5.0, 5.0]).tolist() == [1.5, 1.5]


def test_rank_matches_sort_based_oracle():
    rng = np.random.default_rng(6)
    for _ in range(30):
        x = rng.integers(0, 6, size=12).astype(float)
        assert rank(x).tolist() == rank_oracle(list(x))


@given(st.integers(0, 10 ** 6))
@settings(max_examples=30, deadline=None)
def test_srcc_invariant_under_monotone_map(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=8)
    y = rng.normal(size=8)
    assert srcc(x, y) == srcc(np.exp(x) + 3.0, y)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=30, deadline=None)
def test_pcc_srcc_symmetric(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=9)
    y = rng.normal(size=9)
    assert abs(pcc(x, y) - pcc(y, x)) < 1e-15
    assert abs(srcc(x, y) - srcc(y, x)) < 1e-15


def test_correlations_bounded():
    rng = np.random.default_rng(7)
    for _ in range(50):
        x = rng.normal(size=6)
        y = rng.normal(size=6)
        assert -1 - 1e-12 <= pcc(x, y) <= 1 + 1e-12
        assert -1 - 1e-12 <= srcc(x, y) <= 1 + 1e-12
