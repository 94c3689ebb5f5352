import numpy as np
import pytest

from netshrink.distfit import SmoothedDist, empirical_ccdf, fit_smoothing_spline


def test_empirical_ccdf_hand_case():
    e = empirical_ccdf([1, 1, 2, 4])
    assert e.xs.tolist() == [1, 2, 4]
    assert e.ccdf.tolist() == [1.0, 0.5, 0.25]


def test_empirical_ccdf_single_value():
    e = empirical_ccdf([5])
    assert e.xs.tolist() == [5]
    assert e.ccdf.tolist() == [1.0]


def test_empirical_ccdf_rejects_bad_input():
    with pytest.raises(ValueError, match="no values"):
        empirical_ccdf([])
    with pytest.raises(ValueError, match="positive"):
        empirical_ccdf([1.0, -2.0])
    with pytest.raises(ValueError, match="finite"):
        empirical_ccdf([1.0, np.inf])


def test_powerlaw_ccdf_slope():
    # continuous power law with ccdf x^-1.1; log-log slope of the empirical
    # ccdf over the mid-range should be close to -1.1
    rng = np.random.default_rng(5)
    x = (1.0 - rng.random(100_000)) ** (-1.0 / 1.1)
    e = empirical_ccdf(x)
    mask = (e.xs >= 2) & (e.xs <= 100)
    slope = np.polyfit(np.log(e.xs[mask]), np.log(e.ccdf[mask]), 1)[0]
    assert slope == pytest.approx(-1.1, abs=0.1)


def test_spline_reproduces_exact_powerlaw():
    xs = np.geomspace(1, 1000, 50)
    cc = xs ** -1.1
    cc[0] = 1.0
    d = fit_smoothing_spline(empirical_ccdf_from_points(xs, cc))
    grid = np.geomspace(1, 1000, 200)
    rel = np.abs(d.ccdf(grid) - grid ** -1.1) / grid ** -1.1
    assert rel.max() < 0.02


def empirical_ccdf_from_points(xs, cc):
    from netshrink.distfit import EmpiricalCCDF
    return EmpiricalCCDF(np.asarray(xs, float), np.asarray(cc, float))


def test_point_mass():
    d = fit_smoothing_spline(empirical_ccdf([5.0, 5.0, 5.0]))
    assert d.kind == "point"
    assert d.sample(3, 0).tolist() == [5.0, 5.0, 5.0]
    assert d.ccdf(4.9) == 1.0
    assert d.ccdf(5.1) == 0.0


def test_step_fallback_below_four_points():
    d = fit_smoothing_spline(empirical_ccdf([1.0, 2.0, 2.0, 3.0]))
    assert d.kind == "step"
    # inverse transform respects the empirical masses
    s = d.sample(20_000, 1)
    frac_ge_2 = np.mean(s >= 2.0)
    assert frac_ge_2 == pytest.approx(0.75, abs=0.02)


def test_uniform_delay_ccdf_midpoint():
    rng = np.random.default_rng(9)
    vals = rng.uniform(1, 500, 20_000)
    d = fit_smoothing_spline(empirical_ccdf(vals))
    assert d.ccdf(250.0) == pytest.approx(0.5, abs=0.05)


def test_fitted_ccdf_monotone_and_starts_at_one():
    rng = np.random.default_rng(3)
    vals = (1.0 - rng.random(5000)) ** (-1.0 / 1.1)
    d = fit_smoothing_spline(empirical_ccdf(vals))
    grid = np.geomspace(d.x_lo, d.x_hi, 1000)
    cc = d.ccdf(grid)
    assert np.all(np.diff(cc) <= 1e-15)
    assert d.ccdf(d.x_lo) == pytest.approx(1.0)


def test_sampling_matches_fitted_curve():
    rng = np.random.default_rng(17)
    vals = (1.0 - rng.random(50_000)) ** (-1.0 / 1.1)
    d = fit_smoothing_spline(empirical_ccdf(vals))
    s = np.sort(d.sample(100_000, 4))
    # one-sample KS against the fitted ccdf (atom at the domain top excluded)
    inside = s < d.x_hi
    grid = np.unique(s[inside])
    ecdf_lo = np.searchsorted(s, grid, side="left") / s.size
    ecdf_hi = np.searchsorted(s, grid, side="right") / s.size
    model = 1.0 - d.ccdf(grid)
    ks = max(np.abs(ecdf_lo - model).max(), np.abs(ecdf_hi - model).max())
    assert ks <= 0.02


def test_sampling_deterministic():
    vals = np.geomspace(1, 100, 30)
    d = fit_smoothing_spline(empirical_ccdf(np.repeat(vals, 10)))
    a = d.sample(1000, 123)
    b = d.sample(1000, 123)
    assert np.array_equal(a, b)
    c = d.sample(1000, 124)
    assert not np.array_equal(a, c)


def test_integer_sampling_floors_at_one():
    rng = np.random.default_rng(21)
    degs = np.clip((1.0 - rng.random(5000)) ** (-1.0 / 1.1), 1, 200).astype(int) + 0
    d = fit_smoothing_spline(empirical_ccdf(degs), integer_valued=True)
    s = d.sample(10_000, 2)
    assert s.dtype.kind == "i"
    assert s.min() >= 1


def test_integer_ccdf_consistent_with_sampler():
    rng = np.random.default_rng(8)
    degs = np.clip((1.0 - rng.random(20_000)) ** (-1.0 / 1.1), 1, 500).astype(int)
    d = fit_smoothing_spline(empirical_ccdf(degs), integer_valued=True)
    s = d.sample(200_000, 11)
    for k in (2, 3, 5, 10, 30):
        frac = np.mean(s >= k)
        assert frac == pytest.approx(d.integer_ccdf(k), abs=0.01)


def test_serialization_roundtrip(tmp_path):
    rng = np.random.default_rng(6)
    vals = rng.uniform(1, 500, 3000)
    d = fit_smoothing_spline(empirical_ccdf(vals))
    p = tmp_path / "dist.txt"
    d.save(p)
    d2 = SmoothedDist.load(p)
    grid = np.geomspace(d.x_lo, d.x_hi, 257)
    assert np.array_equal(d.ccdf(grid), d2.ccdf(grid))
    assert np.array_equal(d.sample(100, 5), d2.sample(100, 5))


def test_serialization_roundtrip_step_and_point(tmp_path):
    for vals in ([2.0, 2.0], [1.0, 2.0, 3.0]):
        d = fit_smoothing_spline(empirical_ccdf(vals))
        p = tmp_path / "d.txt"
        d.save(p)
        d2 = SmoothedDist.load(p)
        assert d2.kind == d.kind
        assert np.array_equal(d.sample(50, 9), d2.sample(50, 9))
