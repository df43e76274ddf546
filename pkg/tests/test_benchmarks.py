import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from balancedbo import benchmarks as bm
from balancedbo import gp
from balancedbo.baselines import mle_lengthscale
from balancedbo.errors import DataFormatError, InputError
from balancedbo.kernels import KernelSpec


def toy_reference(x):
    # written out independently of the package
    return 0.6 * math.exp(-((x - 1) ** 2) / 0.125) + math.exp(-((x - 0.3) ** 2) / (2 * 0.035**2))


def test_toy_values_and_shape():
    for x in (0.0, 0.3, 0.55, 1.0):
        assert bm.toy_1d(x) == pytest.approx(toy_reference(x), rel=1e-14)
    assert bm.toy_1d(0.3) > bm.toy_1d(1.0)
    with pytest.raises(InputError):
        bm.toy_1d(1.5)


def test_toy_known_max_against_dense_grid():
    grid = np.linspace(0, 1, 1_000_001)
    vals = np.array([toy_reference(x) for x in grid[::10]])
    i = int(np.argmax(vals))
    assert abs(grid[::10][i] - bm.TOY_ARGMAX) <= 1e-5
    assert 0 <= bm.TOY_MAX - vals[i] <= 1e-8


def test_michalewicz_values():
    assert bm.michalewicz(np.zeros(5)) == 0.0
    x = np.array([2.20, 1.57])
    expected = sum(math.sin(v) * math.sin(i * v * v / math.pi) ** 20 for i, v in enumerate(x, 1))
    assert bm.michalewicz(x, d=2) == pytest.approx(expected, rel=1e-14)
    # commonly quoted 2-D optimum
    assert bm.MICHALEWICZ_MAX[2] == pytest.approx(1.8013, abs=1e-4)
    with pytest.raises(InputError):
        bm.michalewicz(np.full(5, 4.0))
    with pytest.raises(InputError):
        bm.michalewicz(np.zeros(3))


def test_michalewicz_max_is_not_exceeded_by_samples():
    obj = bm.michalewicz_objective(2)
    X = obj.domain.sample(np.random.default_rng(0), 200_000)
    assert obj.values(X).max() <= obj.known_max + 1e-9


def test_objective_domain_checks():
    obj = bm.toy_objective()
    with pytest.raises(InputError):
        obj([1.1])
    with pytest.raises(InputError):
        obj([0.1, 0.2])
    assert bm.unit_cube(bm.michalewicz_objective(2))([0.5, 0.5]) == pytest.approx(
        bm.michalewicz([math.pi / 2, math.pi / 2], d=2), rel=1e-15)


def test_noise_std():
    obj = bm.constant_objective(1.0, noise=0.05)
    rng = np.random.default_rng(3)
    ys = np.array([obj.evaluate([0.4], rng)[0] for _ in range(10_000)])
    assert 0.8 * 0.05 <= ys.std(ddof=1) <= 1.2 * 0.05
    y, f = bm.constant_objective(2.0, noise=0.0).evaluate([0.1], rng)
    assert y == f == 2.0


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**31), m=st.integers(1, 30), norm=st.floats(0.1, 10),
       d=st.integers(1, 3), family=st.sampled_from(["rbf", "matern"]))
def test_rkhs_norm_is_exact(seed, m, norm, d, family):
    obj = bm.sample_rkhs_function(KernelSpec(family, 0.3, d), norm, m, seed, scan=False)
    assert abs(bm.rkhs_norm(obj) - norm) <= 1e-10


def test_single_basis_function():
    obj = bm.sample_rkhs_function(KernelSpec("matern", 0.2, 1), 2.5, 1, seed=4, scan=False)
    c = obj.meta["centers"][0]
    assert obj(c) == pytest.approx(2.5, rel=1e-14)


def test_rkhs_known_max_dominates_samples():
    obj = bm.sample_rkhs_function(KernelSpec("matern", 0.15, 1), 2.0, 20, seed=1)
    grid = np.linspace(0, 1, 20_001).reshape(-1, 1)
    assert obj.values(grid).max() <= obj.known_max + 1e-9


def test_rkhs_mle_recovers_lengthscale():
    spec = KernelSpec("matern", 0.2, 1)
    obj = bm.sample_rkhs_function(spec, 2.0, 30, seed=9, scan=False)
    rng = np.random.default_rng(1)
    X = rng.random((200, 1))
    y = obj.values(X) + 0.01 * rng.standard_normal(200)
    theta = mle_lengthscale(gp.ObservationLog(1, 0.01, X, y), spec, 1e-3, 2.0)
    assert 0.1 <= theta <= 0.4


def write(tmp_path, text, name="t.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_tabular_basic(tmp_path):
    tb = bm.load_tabular(write(tmp_path, "a,b,y\n0,10,1.0\n1,20,2.0\n0.5,15,3.0\n"))
    assert len(tb) == 3 and tb.d == 2
    assert tb.X.tolist() == [[0.0, 0.0], [1.0, 1.0], [0.5, 0.5]]
    assert tb.known_max == 3.0
    obj = tb.objective()
    assert obj([1.0, 1.0]) == 2.0
    with pytest.raises(InputError):
        obj([0.2, 0.2])


def test_load_tabular_duplicates_averaged(tmp_path):
    tb = bm.load_tabular(write(tmp_path, "x,y\n0,1\n1,5\n0,3\n"))
    assert tb.y.tolist() == [2.0, 5.0]


def test_load_tabular_errors(tmp_path):
    with pytest.raises(DataFormatError, match=r"t.csv:3"):
        bm.load_tabular(write(tmp_path, "x,y\n0,1\n1,abc\n"))
    with pytest.raises(DataFormatError, match=r":2"):
        bm.load_tabular(write(tmp_path, "x,y\n0,nan\n"))
    with pytest.raises(DataFormatError, match=r":2"):
        bm.load_tabular(write(tmp_path, "x,y\n0,1,2\n"))
    with pytest.raises(InputError):
        bm.load_tabular(write(tmp_path, ""))
    with pytest.raises(InputError):
        bm.load_tabular(write(tmp_path, "x,y\n"))
    with pytest.raises(DataFormatError):
        bm.load_tabular(write(tmp_path, "x,y\n0,1\n"), bm.TabularSchema(("z",), "y"))


def test_load_tabular_idempotent_and_fixture():
    a, b = bm.load_tabular(bm.FIXTURE), bm.load_tabular(bm.FIXTURE)
    assert np.array_equal(a.X, b.X) and np.array_equal(a.y, b.y)
    lines = [ln for ln in bm.FIXTURE.read_text().splitlines()[1:] if ln.strip()]
    assert len(a) == len({tuple(ln.split(",")[:-1]) for ln in lines})
    assert a.d == 4
    assert np.all((a.X >= 0) & (a.X <= 1))


def test_registry():
    for name in bm.REGISTRY:
        params = {"seed": 0} if name == "rkhs" else {}
        assert bm.make_objective(name, **params).dim >= 1
    with pytest.raises(InputError):
        bm.make_objective("nope")
    with pytest.raises(InputError):
        bm.make_objective("toy_1d", bogus=1)
