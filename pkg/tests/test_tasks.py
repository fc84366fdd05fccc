import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lskin_qrc.tasks import (TaskSpec, generate_inputs, read_series_csv, rescale_unit,
                             target_series, write_series_csv)
from lskin_qrc.validation import (check_input_series, check_n_samples, check_targets, child_seed)


def test_inputs_deterministic_per_seed():
    spec = TaskSpec("stm", seed=3, washout=50, train=50, test=50)
    np.testing.assert_array_equal(generate_inputs(spec), generate_inputs(spec))
    other = TaskSpec("stm", seed=4, washout=50, train=50, test=50)
    assert not np.array_equal(generate_inputs(spec), generate_inputs(other))


def test_stm_inputs_range():
    s = generate_inputs(TaskSpec("stm", seed=0))
    assert s.shape == (3000,)
    assert s.min() >= 0 and s.max() <= 1


def test_xor_bits_are_fair():
    s = generate_inputs(TaskSpec("xor", washout=4000, train=3000, test=3000, seed=1))
    assert set(np.unique(s)) <= {0.0, 1.0}
    assert 0.47 <= s.mean() <= 0.53


def test_xor_worked_example():
    spec = TaskSpec("xor", washout=2, train=3, test=2)
    s = np.array([0, 1, 1, 0, 0, 1, 1], dtype=float)
    y = target_series(spec, s)
    assert np.isnan(y[:2]).all()
    # y_k = s_{k-1} xor s_{k-2}
    np.testing.assert_array_equal(y[2:], [1, 0, 1, 0, 1])


def test_stm_alignment():
    spec = TaskSpec("stm", delay=5, washout=10, train=10, test=10)
    s = np.arange(30) / 30
    y = target_series(spec, s)
    np.testing.assert_array_equal(y[5:], s[:-5])
    assert np.isnan(y[:5]).all()
    _, train, test = spec.segments()
    assert not np.isnan(y[train]).any() and not np.isnan(y[test]).any()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 9), st.integers(1, 10))
def test_stm_translation_covariance(delay, shift):
    spec = TaskSpec("stm", delay=delay, washout=10, train=20, test=20)
    s = np.random.default_rng(delay).uniform(size=spec.length + shift)
    y_full = target_series(spec, s)
    y_shift = target_series(spec, s[shift:])
    np.testing.assert_array_equal(y_full[shift + delay:], y_shift[delay:])


def test_insufficient_prefix():
    spec = TaskSpec("stm", delay=5, washout=5, train=10, test=10)
    with pytest.raises(ValueError):
        target_series(spec, np.zeros(24))
    target_series(spec, np.zeros(25))


def test_spec_validation():
    with pytest.raises(ValueError):
        TaskSpec("parity")
    with pytest.raises(ValueError):
        TaskSpec("stm", delay=20, washout=10)
    with pytest.raises(ValueError):
        TaskSpec("stm", train=0)
    with pytest.raises(ValueError):
        TaskSpec("stm", delay=-1)
    assert TaskSpec("xor", delay=40).lookback == 2
    assert TaskSpec("stm", delay=3).label() == "stm(tau=3)"


def test_csv_round_trip(tmp_path):
    spec = TaskSpec("xor", washout=5, train=5, test=5, seed=2)
    s = generate_inputs(spec)
    y = target_series(spec, s)
    path = tmp_path / "series.csv"
    write_series_csv(path, s, y)
    s2, y2 = read_series_csv(path)
    np.testing.assert_array_equal(s, s2)
    np.testing.assert_array_equal(np.isnan(y), np.isnan(y2))
    np.testing.assert_array_equal(y[2:], y2[2:])
    assert path.read_text().splitlines()[0] == "step,s,y"


def test_csv_rejects_unordered_steps(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("step,s,y\n1,0.5,\n0,0.2,\n")
    with pytest.raises(ValueError):
        read_series_csv(path)


def test_rescale_unit():
    np.testing.assert_allclose(rescale_unit([-2.0, 0.0, 2.0]), [0, 0.5, 1])
    np.testing.assert_array_equal(rescale_unit([3.0, 3.0]), [0.5, 0.5])


def test_input_validation():
    np.testing.assert_array_equal(check_input_series([[0.1], [0.2]]), [0.1, 0.2])
    with pytest.raises(ValueError):
        check_input_series([0.2, 1.5])
    with pytest.raises(ValueError):
        check_input_series([[0.1, 0.2]])
    with pytest.raises(ValueError):
        check_input_series([0.1, np.nan])
    with pytest.raises(ValueError):
        check_targets([1.0, np.inf], 2)
    with pytest.raises(ValueError):
        check_targets([1.0], 2)


def test_n_samples_parsing():
    assert check_n_samples(None) == np.inf
    assert check_n_samples(np.inf) == np.inf
    assert check_n_samples(1e4) == 1e4
    with pytest.raises(ValueError):
        check_n_samples(0)


def test_child_seed_is_pure():
    root = np.random.SeedSequence(42)
    a = child_seed(root, 3).generate_state(2)
    b = child_seed(root, 3).generate_state(2)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, child_seed(root, 4).generate_state(2))
    assert root.n_children_spawned == 0
