import numpy as np
import pytest

from pfcm import (ConfigurationError, DataError, DataSet, InjectionSpec, MixtureSpec,
                  generate_mixture, inject_missing, load_builtin, load_csv, write_csv)
from pfcm.data import (Component, InjectionError, default_mixture, injection_from_config,
                       mixture_from_config, read_config, read_table, builtin_mixture_config)


def test_builtin_shapes():
    iris = load_builtin("iris")
    wine = load_builtin("wine")
    assert (iris.data.n, iris.data.s) == (150, 4)
    assert (wine.data.n, wine.data.s) == (178, 13)
    assert iris.data.is_complete and len(iris.labels) == 150


def test_missing_tokens(tmp_path):
    f = tmp_path / "t.csv"
    f.write_text("1.0,?,3.0\n4.0,5.0,NaN\n,7.0,8.0\n")
    d = load_csv(f)
    assert d.mask.tolist() == [[True, False, True], [True, True, False], [False, True, True]]
    assert d.values[0, 1] == 0.0


def test_header_and_label_column(tmp_path):
    f = tmp_path / "t.csv"
    f.write_text("a,b,label\n1,2,x\n3,4,y\n")
    t = read_table(f, label_column="label")
    assert t.columns == ["a", "b"] and t.labels == ["x", "y"]
    np.testing.assert_array_equal(t.data.values, [[1, 2], [3, 4]])
    t = read_table(f, label_column=-1)
    assert t.labels == ["x", "y"]


def test_parse_error_has_location(tmp_path):
    f = tmp_path / "t.csv"
    f.write_text("1,2\n3,abc\n")
    with pytest.raises(DataError, match=r"t.csv:2: column 2"):
        load_csv(f)


def test_invariant_violation_on_load(tmp_path):
    f = tmp_path / "t.csv"
    f.write_text("1,?\n2,?\n")
    with pytest.raises(DataError):
        load_csv(f)


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    x = rng.normal(size=(12, 3))
    mask = rng.random((12, 3)) > 0.3
    mask[:, 0] = True
    d = DataSet(x, mask)
    f = tmp_path / "rt.csv"
    write_csv(f, d, columns=["p", "q", "r"])
    back = load_csv(f)
    assert back == d
    write_csv(f, back)
    assert load_csv(f) == d
    assert "?" in f.read_text()


def test_mixture_shapes():
    for s in (2, 14):
        data, labels = generate_mixture(default_mixture(s=s))
        assert data.values.shape == (1000, s)
        assert labels.shape == (1000,) and data.is_complete


def test_mixture_deterministic():
    a, la = generate_mixture(default_mixture(seed=4))
    b, lb = generate_mixture(default_mixture(seed=4))
    assert a == b and np.array_equal(la, lb)


def test_mixture_degenerate_spread():
    spec = MixtureSpec((Component([1.0, -2.0], 1e-12 * np.eye(2), 1.0),), n=200, seed=1)
    data, _ = generate_mixture(spec)
    assert np.abs(data.values - [1.0, -2.0]).max() < 1e-4


def test_mixture_means_converge():
    cov = np.array([[2.0, 0.5], [0.5, 1.0]])
    spec = MixtureSpec((Component([0.0, 0.0], cov, 0.5), Component([4.0, -3.0], cov, 0.5)),
                       n=20000, seed=9)
    data, labels = generate_mixture(spec)
    for i, comp in enumerate(spec.components):
        pts = data.values[labels == i]
        se = np.sqrt(np.diag(comp.cov) / len(pts))
        assert np.all(np.abs(pts.mean(axis=0) - comp.mean) < 5 * se)


def test_mixture_validation():
    with pytest.raises(ConfigurationError, match="positive definite"):
        MixtureSpec((Component([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]], 1.0),), n=10)
    with pytest.raises(ConfigurationError, match="sum to"):
        MixtureSpec((Component([0.0], [[1.0]], 0.4),), n=10)


def test_mixture_config_files():
    spec = mixture_from_config(read_config(builtin_mixture_config("mixture1")))
    assert spec.n == 1000 and spec.s == 2 and len(spec.components) == 2
    spec = mixture_from_config(read_config(builtin_mixture_config("mixture2")))
    assert spec.s == 14


def test_injection_config(tmp_path):
    f = tmp_path / "inj.cfg"
    f.write_text("fraction = 0.15  # share of cells\nseed = 8\n")
    assert injection_from_config(read_config(f)) == InjectionSpec(0.15, 8)


def test_inject_exact_count(iris):
    out = inject_missing(iris, InjectionSpec(0.05, 0))
    assert out.n_missing == 30
    np.testing.assert_array_equal(out.values, iris.values)


def test_inject_zero_fraction(iris):
    assert inject_missing(iris, InjectionSpec(0.0, 0)) == iris


@pytest.mark.parametrize("fraction", [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.45])
def test_inject_keeps_rows_and_columns(fraction):
    data, _ = generate_mixture(default_mixture(n=1000))
    out = inject_missing(data, InjectionSpec(fraction, 3))
    assert out.n_missing == round(fraction * 2000)
    assert out.mask.any(axis=1).all() and out.mask.any(axis=0).all()


def test_inject_unsatisfiable():
    d = DataSet.complete(np.zeros((4, 2)))
    with pytest.raises(InjectionError):
        inject_missing(d, InjectionSpec(0.75, 0))


def test_pick_kernels_agree(kernels):
    from pfcm import _kernels
    order = np.random.default_rng(2).permutation(300).astype(np.int64)
    np.testing.assert_array_equal(kernels["pick_missing"](order, 100, 3, 120),
                                  _kernels.pick_missing_np(order, 100, 3, 120))
