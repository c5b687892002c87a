import json
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistorfill import disk_analysis as da
from twistorfill.errors import AliasingWarning, SingularLevi, TruncationOverflow

seeds = st.integers(0, 2 ** 32 - 1)


def _random_disk(rng, degree):
    return da.DiskFunction({(p, q): complex(*rng.normal(size=2))
                            for p in range(degree + 1) for q in range(degree + 1 - p)})


def _random_problem(rng, n, degree=5):
    levi = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) + 2 * np.eye(n)
    return da.RHProblem(_random_disk(rng, degree), [_random_disk(rng, degree) for _ in range(n)],
                        [_random_disk(rng, degree) for _ in range(n)], levi, band=32)


def test_fourier_series_basics():
    s = da.FourierSeries({-1: 1j, 0: 2.0, 1: -1j}, 2)
    assert s.is_real
    theta = np.linspace(0, 2 * np.pi, 9)
    assert np.allclose(s.evaluate(theta), 2 + 2 * np.sin(theta))
    assert np.allclose(s.samples(8), s.evaluate(2 * np.pi * np.arange(8) / 8))
    assert s.max_abs() == 2.0
    assert json.loads(json.dumps(s.to_dict(), sort_keys=True))["band"] == 2
    with pytest.raises(TruncationOverflow):
        da.FourierSeries({5: 1.0}, 4)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 20))
def test_fourier_decompose_round_trip(seed, band):
    rng = np.random.default_rng(seed)
    s = da.FourierSeries({k: complex(*rng.normal(size=2)) for k in range(-band, band + 1)}, band)
    back = da.fourier_decompose(s.samples(64), band=band)
    assert max(abs(back[k] - s[k]) for k in range(-band, band + 1)) < 1e-12


def test_fourier_decompose_checks():
    with pytest.raises(ValueError):
        da.fourier_decompose(np.ones(12))
    with pytest.raises(ValueError):
        da.fourier_decompose(np.ones(8), band=8)
    loud = da.FourierSeries({10: 1.0, 0: 1.0}, 10).samples(32)
    with pytest.warns(AliasingWarning):
        da.fourier_decompose(loud, band=4)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        da.fourier_decompose(da.FourierSeries({3: 1.0}, 3).samples(32), band=4)


def test_positivity_filter_modes():
    s = da.FourierSeries({-2: 1e-3, 0: 1.0, 3: 2.0}, 3)
    ok, bad = da.positivity_filter(s)
    assert not ok and list(bad) == [-2]
    ok, bad = da.positivity_filter(s, "strict")
    assert list(bad) == [-2, 0]
    assert da.positivity_filter(s, tol=1e-2)[0]
    with pytest.raises(ValueError):
        da.positivity_filter(s, "loose")


def test_disk_function_calculus_against_finite_differences():
    rng = np.random.default_rng(3)
    f = _random_disk(rng, 5)
    z = 0.3 + 0.2j
    h = 1e-6
    dx = (f.evaluate(z + h) - f.evaluate(z - h)) / (2 * h)
    dy = (f.evaluate(z + 1j * h) - f.evaluate(z - 1j * h)) / (2 * h)
    assert abs(f.dbar().evaluate(z) - 0.5 * (dx + 1j * dy)) < 1e-7
    assert abs(f.dz().evaluate(z) - 0.5 * (dx - 1j * dy)) < 1e-7
    assert abs(f.conj().evaluate(z) - np.conj(f.evaluate(z))) < 1e-12
    assert abs(f.times_abs2().evaluate(z) - abs(z) ** 2 * f.evaluate(z)) < 1e-12
    assert abs(f.times_zeta(2).evaluate(z) - z ** 2 * f.evaluate(z)) < 1e-12
    assert (f - f).max_abs() == 0
    assert da.DiskFunction.holomorphic({2: 1.0}).is_holomorphic
    with pytest.raises(ValueError):
        da.DiskFunction({(-1, 0): 1.0})


def test_boundary_trace_and_polar_fit():
    f = da.DiskFunction({(2, 1): 1.0, (0, 3): 2j, (1, 0): -1.0})
    tr = f.boundary_trace()
    assert tr[1] == 0 and tr[-3] == 2j
    radii = np.linspace(0.2, 1.0, 12)
    theta = 2 * np.pi * np.arange(16) / 16
    values = np.array([f.evaluate(r * np.exp(1j * theta)) for r in radii])
    fit = da.DiskFunction.from_polar_samples(values, radii, band=4)
    assert (fit - f).max_abs() < 1e-9
    assert da.DiskFunction.from_dict(json.loads(json.dumps(f.to_dict()))).terms == f.terms


def test_extend_disk_evaluates_on_circle():
    s = da.FourierSeries({0: 1.0, 2: 0.5j}, 2)
    f = da.extend_disk(s)
    theta = np.linspace(0, 2 * np.pi, 7)
    assert np.allclose(f.evaluate(np.exp(1j * theta)), s.evaluate(theta))
    assert f.taylor == {0: 1.0, 2: 0.5j}


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_dbar_solve_has_negative_trace(seed):
    rng = np.random.default_rng(seed)
    g = _random_disk(rng, 6)
    u = da.dbar_disk_solve(g)
    assert (u.dbar() - g).max_abs() < 1e-14
    assert all(abs(v) < 1e-13 for k, v in u.boundary_trace().coefficients.items() if k >= 0)


def test_dbar_solve_band_overflow():
    with pytest.raises(TruncationOverflow):
        da.dbar_disk_solve(da.DiskFunction({(0, 10): 1.0}), band=5)


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(1, 3))
def test_random_problems_are_solved(seed, n):
    sol = da.solve_rh(_random_problem(np.random.default_rng(seed), n))
    assert sol.max_residual < 1e-9
    assert sol.max_defect < 1e-9


def test_solver_is_linear():
    rng = np.random.default_rng(11)
    a, b = _random_problem(rng, 2), _random_problem(rng, 2)
    b = da.RHProblem(b.g0, b.g, b.rho, a.levi, a.band)
    sa, sb, sab = da.solve_rh(a), da.solve_rh(b), da.solve_rh(a + b)
    assert (sab.f0 - sa.f0 - sb.f0).max_abs() < 1e-10
    for x, y, z in zip(sab.f, sa.f, sb.f):
        assert (x - y - z).max_abs() < 1e-10


def test_problem_serialization(tmp_path):
    p = _random_problem(np.random.default_rng(2), 2)
    path = tmp_path / "problem.json"
    path.write_text(json.dumps(p.to_dict(), sort_keys=True))
    q = da.RHProblem.from_dict(json.loads(path.read_text()))
    assert np.allclose(q.levi, p.levi) and q.band == p.band
    assert (da.solve_rh(q).f0 - da.solve_rh(p).f0).max_abs() < 1e-12
    assert json.loads(json.dumps(da.solve_rh(q).to_dict(), sort_keys=True))["defects"]


def test_singular_levi_rejected():
    p = da.RHProblem.zero(np.array([[1.0, 1.0], [1.0, 1.0]]))
    with pytest.raises(SingularLevi):
        da.solve_rh(p)
    assert p.condition_number > 1e12


@pytest.mark.parametrize("levi", [[[1.0]], [[1.0, 0.0], [0.0, -1.0]], [[2.0, 0.5j], [-0.5j, -1.0]]])
def test_injectivity_bounded_below(levi):
    values = [da.injectivity_singular_value(np.array(levi), n) for n in (16, 64)]
    assert min(values) > 0.05
    assert abs(values[0] - values[1]) < 0.05
