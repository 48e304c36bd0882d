import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from costreg.data import Dataset, load_csv, split_folds, standardize, unstandardize
from costreg.errors import (BadFoldCount, EmptyFile, MissingLabelColumn,
                            NonNumericCell, RaggedRow, TooFewRows)


def write(tmp_path, text, name="d.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_load_csv_basic(tmp_path):
    d = load_csv(write(tmp_path, "x1,x2,y\n1,2,3\n4,5,6\n7,8,9\n"), "y")
    assert (d.T, d.p) == (3, 2)
    assert d.feature_names == ("x1", "x2")
    np.testing.assert_array_equal(d.labels, [3, 6, 9])
    np.testing.assert_array_equal(d.features[:, 1], [2, 5, 8])


def test_label_column_anywhere(tmp_path):
    d = load_csv(write(tmp_path, "y,a,b\n1,2,3\n"), "y")
    assert d.feature_names == ("a", "b")
    np.testing.assert_array_equal(d.features, [[2, 3]])


def test_scientific_notation(tmp_path):
    d = load_csv(write(tmp_path, "x,y\n1e-3,2.5E2\n"), "y")
    assert d.features[0, 0] == 1e-3 and d.labels[0] == 250.0


def test_non_numeric_cell(tmp_path):
    with pytest.raises(NonNumericCell) as info:
        load_csv(write(tmp_path, "x1,x2,y\n1,2,3\nabc,5,6\n"), "y")
    assert (info.value.row, info.value.col) == (2, 0)


@pytest.mark.parametrize("cell", ["nan", "inf", "", "1,5"])
def test_rejects_missing_or_nonfinite(tmp_path, cell):
    with pytest.raises((NonNumericCell, RaggedRow)):
        load_csv(write(tmp_path, f"x,y\n{cell},1\n"), "y")


def test_empty_and_missing_label(tmp_path):
    with pytest.raises(EmptyFile):
        load_csv(write(tmp_path, "x1,x2,y\n"), "y")
    with pytest.raises(EmptyFile):
        load_csv(write(tmp_path, ""), "y")
    with pytest.raises(MissingLabelColumn):
        load_csv(write(tmp_path, "x1,x2\n1,2\n"), "y")


def test_ragged_row(tmp_path):
    with pytest.raises(RaggedRow):
        load_csv(write(tmp_path, "x1,x2,y\n1,2,3\n4,5\n"), "y")


def test_dataset_is_read_only():
    d = Dataset([[1.0, 2.0]], [0.0])
    with pytest.raises(ValueError):
        d.features[0, 0] = 5.0


def test_standardize_examples():
    d = Dataset(np.array([[1.0, 5.0, 0.0], [2.0, 5.0, 10.0], [3.0, 5.0, 10.0]]), [0, 0, 0])
    z, info = standardize(Dataset(d.features[:, :2], d.labels))
    np.testing.assert_allclose(z.features[:, 0], [-1, 0, 1])
    assert info.mean[0] == 2 and info.scale[0] == 1
    np.testing.assert_array_equal(z.features[:, 1], 0.0)
    assert info.constant_columns == (1,)

    z, info = standardize(Dataset([[0.0], [10.0]], [0, 0]))
    # sample sd of (0, 10) is sqrt(50) = 7.0711
    np.testing.assert_allclose(z.features[:, 0], [-1 / np.sqrt(2), 1 / np.sqrt(2)], rtol=1e-14)
    np.testing.assert_allclose(info.scale, [np.sqrt(50.0)])


def test_standardize_needs_two_rows():
    with pytest.raises(TooFewRows):
        standardize(Dataset([[1.0]], [1.0]))


@settings(max_examples=60, deadline=None)
@given(arrays(float, st.tuples(st.integers(2, 12), st.integers(1, 4)),
              elements=st.floats(-1e3, 1e3, allow_subnormal=False)))
def test_standardize_round_trip(X):
    d = Dataset(X, np.zeros(X.shape[0]))
    z, info = standardize(d)
    back = unstandardize(z.features, info)
    np.testing.assert_allclose(back, X, rtol=1e-12, atol=1e-12 * max(1.0, np.abs(X).max()))
    live = [j for j in range(X.shape[1]) if j not in info.constant_columns]
    if live:
        np.testing.assert_allclose(z.features[:, live].mean(axis=0), 0, atol=1e-10)
        np.testing.assert_allclose(z.features[:, live].std(axis=0, ddof=1), 1, atol=1e-10)


def test_split_folds_balance_and_determinism():
    d6 = Dataset(np.zeros((6, 1)), np.zeros(6))
    assert sorted(split_folds(d6, 3, 0).sizes()) == [2, 2, 2]
    d5 = Dataset(np.zeros((5, 1)), np.zeros(5))
    assert sorted(split_folds(d5, 3, 0).sizes()) == [1, 2, 2]
    a, b = split_folds(d5, 3, 7), split_folds(d5, 3, 7)
    np.testing.assert_array_equal(a.fold_of_row, b.fold_of_row)


@given(st.integers(2, 60), st.integers(2, 60), st.integers(0, 2**31))
def test_split_folds_partition(T, k, seed):
    if k > T:
        with pytest.raises(BadFoldCount):
            split_folds(T, k, seed)
        return
    folds = split_folds(T, k, seed)
    sizes = folds.sizes()
    assert sizes.min() >= 1 and sizes.max() - sizes.min() <= 1
    rows = np.concatenate([folds.test_rows(f) for f in range(k)])
    np.testing.assert_array_equal(np.sort(rows), np.arange(T))


def test_bad_fold_count():
    with pytest.raises(BadFoldCount):
        split_folds(5, 1, 0)
