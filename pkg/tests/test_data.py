import dataclasses

import numpy as np
import pytest

from ilssvm.data import (
    BUILTIN_SPECS,
    DataError,
    Dataset,
    DatasetSpec,
    NoiseRule,
    apply_norm,
    builtin_spec,
    generate_dataset,
    invert_norm,
    normalize_minmax,
    read_csv,
    subset,
    write_csv,
)
from ilssvm.expr import parse_expr


def test_builtin_shapes():
    expected = {
        "friedman1": (60, 5),
        "friedman2": (60, 5),
        "plane1": (60, 2),
        "plane2": (60, 3),
        "multi1": (60, 5),
        "multi2": (60, 10),
        "gabor1": (60, 2),
        "gabor2": (60, 2),
    }
    for name, (n, d) in expected.items():
        ds = generate_dataset(builtin_spec(name), seed=7)
        assert ds.X.shape == (n, d), name
        assert ds.y.shape == (n,)
        assert ds.y_clean is not None


def test_generation_deterministic_bitwise():
    for name in BUILTIN_SPECS:
        a = generate_dataset(builtin_spec(name), seed=3)
        b = generate_dataset(builtin_spec(name), seed=3)
        assert np.array_equal(a.X, b.X) and np.array_equal(a.y, b.y)
        c = generate_dataset(builtin_spec(name), seed=4)
        assert not np.array_equal(a.y, c.y)


def test_zero_noise_equals_clean():
    spec = dataclasses.replace(builtin_spec("plane1"), noise_plan=())
    ds = generate_dataset(spec, seed=1)
    assert np.array_equal(ds.y, ds.y_clean)


def test_zero_std_rule_adds_nothing():
    spec = dataclasses.replace(
        builtin_spec("plane1"), noise_plan=(NoiseRule(0, 60, 0.0, 0.0),)
    )
    ds = generate_dataset(spec, seed=1)
    assert np.array_equal(ds.y, ds.y_clean)


def test_friedman2_composition():
    spec = builtin_spec("friedman2")
    assert spec.noise_plan == (
        NoiseRule(0, 20, 0.0, 1.0),
        NoiseRule(20, 40, 0.0, 2.0),
        NoiseRule(40, 60, 0.0, 3.0),
    )
    assert spec.permuted_plan == builtin_spec("friedman1").permuted_plan
    # tier structure shows up in per-block noise variance across regenerations;
    # each row also carries the permuted 50/50 mix of std 1 and std 5 (var 13)
    blocks = {0: [], 1: [], 2: []}
    for seed in range(400):
        ds = generate_dataset(spec, seed)
        noise = ds.y - ds.y_clean
        for b in blocks:
            blocks[b].extend(noise[20 * b : 20 * (b + 1)])
    expected = {0: 14.0, 1: 17.0, 2: 22.0}
    for b, vals in blocks.items():
        assert expected[b] * 0.8 < np.var(vals) < expected[b] * 1.2


def test_friedman_inputs_unit_interval():
    ds = generate_dataset(builtin_spec("friedman1"), seed=0)
    assert ds.X.min() >= 0.0 and ds.X.max() <= 1.0


def test_noise_unbiased_over_regenerations():
    # mean of (y - y_clean) over 1000 seeds within 3*std/sqrt(1000*N) of 0
    per_spec_var = {
        "friedman1": 13.0,
        "friedman2": 17.0 + 2 / 3,
        "plane1": 1.0,
        "plane2": 1.0,
        "multi1": 1.0,
        "multi2": 1.0,
        "gabor1": 1.0,
        "gabor2": (0.01 + 0.25) / 2,
    }
    for name, var in per_spec_var.items():
        spec = builtin_spec(name)
        total = 0.0
        count = 0
        for seed in range(1000):
            ds = generate_dataset(spec, seed)
            total += float(np.sum(ds.y - ds.y_clean))
            count += ds.n
        bound = 3.0 * np.sqrt(var) / np.sqrt(count)
        assert abs(total / count) < bound, name


def test_nuisance_nearly_uncorrelated_with_targets():
    for name in ("plane2", "multi2"):
        spec = builtin_spec(name)
        d_gen = len(spec.input_ranges)
        for seed in range(10):
            ds = generate_dataset(spec, seed)
            for j in range(d_gen, ds.d):
                r = np.corrcoef(ds.X[:, j], ds.y)[0, 1]
                assert abs(r) < 0.5, (name, seed, j)


def test_generator_variable_out_of_range():
    with pytest.raises(DataError, match="x3"):
        DatasetSpec(
            name="bad",
            generator=parse_expr("x1 + x3"),
            n_samples=10,
            input_ranges=((0.0, 1.0), (0.0, 1.0)),
        )


def test_spec_validation():
    gen = parse_expr("x1")
    with pytest.raises(DataError, match="low < high"):
        DatasetSpec(name="b", generator=gen, n_samples=5, input_ranges=((1.0, 1.0),))
    with pytest.raises(DataError, match="out of bounds"):
        DatasetSpec(
            name="b",
            generator=gen,
            n_samples=5,
            input_ranges=((0.0, 1.0),),
            noise_plan=(NoiseRule(0, 9, 0.0, 1.0),),
        )
    with pytest.raises(DataError, match="overlap"):
        DatasetSpec(
            name="b",
            generator=gen,
            n_samples=10,
            input_ranges=((0.0, 1.0),),
            noise_plan=(NoiseRule(0, 6, 0.0, 1.0), NoiseRule(5, 10, 0.0, 1.0)),
        )


def test_normalize_endpoints():
    ds = Dataset(
        X=np.array([[0.0], [5.0], [10.0]]),
        y=np.array([0.0, 5.0, 10.0]),
        y_clean=None,
        attr_names=("x1",),
        name="t",
        seed=0,
    )
    norm, params = normalize_minmax(ds)
    assert np.allclose(norm.X[:, 0], [-1.0, 0.0, 1.0])
    assert np.allclose(norm.y, [-1.0, 0.0, 1.0])


def test_normalize_identity_on_pm1():
    ds = Dataset(
        X=np.array([[-1.0], [1.0]]),
        y=np.array([-1.0, 1.0]),
        y_clean=None,
        attr_names=("x1",),
        name="t",
        seed=0,
    )
    norm, _ = normalize_minmax(ds)
    assert np.array_equal(norm.X, ds.X)
    assert np.array_equal(norm.y, ds.y)


def test_apply_norm_matches_hand_formula():
    ds = generate_dataset(builtin_spec("plane1"), seed=2)
    _, params = normalize_minmax(ds)
    fresh = generate_dataset(builtin_spec("plane1"), seed=9)
    out = apply_norm(params, fresh)
    man_x = 2 * (fresh.X - params.x_min) / (params.x_max - params.x_min) - 1
    man_y = 2 * (fresh.y - params.y_min) / (params.y_max - params.y_min) - 1
    assert np.allclose(out.X, man_x, atol=1e-15)
    assert np.allclose(out.y, man_y, atol=1e-15)


def test_norm_round_trip():
    ds = generate_dataset(builtin_spec("plane1"), seed=5)
    norm, params = normalize_minmax(ds)
    back = invert_norm(params, norm.y)
    assert np.abs(back - ds.y).max() < 1e-12


def test_out_of_range_point_maps_outside():
    ds = generate_dataset(builtin_spec("plane1"), seed=5)
    _, params = normalize_minmax(ds)
    big = dataclasses.replace(ds, X=ds.X * 10, y=ds.y * 10, y_clean=None)
    out = apply_norm(params, big)
    assert out.X.max() > 1.0 or out.X.min() < -1.0


def test_constant_column_error():
    ds = Dataset(
        X=np.array([[1.0], [1.0]]),
        y=np.array([0.0, 1.0]),
        y_clean=None,
        attr_names=("x1",),
        name="t",
        seed=0,
    )
    with pytest.raises(DataError, match="constant"):
        normalize_minmax(ds)


def test_apply_norm_dimension_mismatch():
    ds = generate_dataset(builtin_spec("plane1"), seed=5)
    _, params = normalize_minmax(ds)
    wide = generate_dataset(builtin_spec("multi1"), seed=5)
    with pytest.raises(DataError, match="columns"):
        apply_norm(params, wide)


def test_csv_round_trip(tmp_path):
    ds = generate_dataset(builtin_spec("multi1"), seed=11)
    path = tmp_path / "multi1.csv"
    write_csv(ds, path)
    back = read_csv(path)
    assert np.abs(back.X - ds.X).max() < 1e-15
    assert np.abs(back.y - ds.y).max() < 1e-15
    assert np.abs(back.y_clean - ds.y_clean).max() < 1e-15
    assert back.attr_names == ds.attr_names


def test_csv_missing_y(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x1,x2\n1,2\n")
    with pytest.raises(DataError, match="y column"):
        read_csv(path)


def test_csv_ragged_row(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x1,y\n1,2\n3\n")
    with pytest.raises(DataError, match="cells"):
        read_csv(path)


def test_csv_non_numeric(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x1,y\n1,two\n")
    with pytest.raises(DataError, match="non-numeric"):
        read_csv(path)


def test_csv_without_clean_column(tmp_path):
    ds = generate_dataset(builtin_spec("plane1"), seed=1)
    ds2 = dataclasses.replace(ds, y_clean=None)
    path = tmp_path / "p.csv"
    write_csv(ds2, path)
    back = read_csv(path)
    assert back.y_clean is None


def test_unknown_builtin_lists_names():
    with pytest.raises(DataError) as err:
        builtin_spec("nosuch")
    for name in BUILTIN_SPECS:
        assert name in str(err.value)


def test_subset_keeps_alignment():
    ds = generate_dataset(builtin_spec("plane1"), seed=1)
    sub = subset(ds, np.arange(10))
    assert sub.X.shape == (10, 2) and sub.y.shape == (10,)
    assert np.array_equal(sub.y_clean, ds.y_clean[:10])
