"""Tests for the scaling toolkit on synthetic data with known answers."""

import math

import numpy as np
import pytest

from mincutmc.ensemble import ObservableRecord
from mincutmc.scaling import (
    ScalingError,
    collapse_dynamic,
    collapse_two_param,
    crossing_points,
    fit_beta,
    fit_log_growth,
    fit_powerlaw,
    lmin_sweep,
    master_curve_quality,
    size_curve,
    slice_curves,
    time_curves,
)


# -- record regrouping --------------------------------------------------------


def _rec(L, p, q, t, obs, mean, err=0.1, n=100):
    return ObservableRecord(L=L, p=p, q=q, t=t, observable=obs,
                            mean=mean, stderr=err, n=n)


def _toy_records():
    records = []
    for L in (8, 16):
        for q in (0.3, 0.5, 0.7):
            for t in (10, 2 * L * L):
                records.append(_rec(L, 0.0, q, t, "s_half", mean=L * q + t * 1e-3))
                records.append(_rec(L, 0.0, q, t, "s_a", mean=q))
    return records


def test_slice_curves_latest_time_default():
    curves = slice_curves(_toy_records(), "s_half", x="q")
    assert sorted(curves) == [8, 16]
    x, y, e = curves[8]
    assert list(x) == [0.3, 0.5, 0.7]
    # default picks the latest checkpoint (t = 2 L^2)
    assert y == pytest.approx([8 * q + 128e-3 for q in (0.3, 0.5, 0.7)])
    assert all(e == 0.1)


def test_slice_curves_explicit_and_callable_t():
    curves = slice_curves(_toy_records(), "s_half", x="q", t=10)
    assert curves[16][1] == pytest.approx([16 * q + 1e-2 for q in (0.3, 0.5, 0.7)])
    curves = slice_curves(_toy_records(), "s_half", x="q", t=lambda L: 2 * L * L)
    assert curves[8][1][0] == pytest.approx(8 * 0.3 + 128e-3)


def test_slice_curves_filters_and_errors():
    records = _toy_records()
    curves = slice_curves(records, "s_a", x="q", p=0.0)
    assert curves[8][1] == pytest.approx([0.3, 0.5, 0.7])
    with pytest.raises(ScalingError):
        slice_curves(records, "s_half", x="L")
    with pytest.raises(ScalingError):
        slice_curves(records, "i3")
    with pytest.raises(ScalingError):
        slice_curves(records, "s_half", x="q", t=999)


def test_time_curves_groups_by_size():
    curves = time_curves(_toy_records(), "s_half", q=0.5)
    t, y, e = curves[16]
    assert list(t) == [10, 512]
    assert y == pytest.approx([8.0 + 1e-2, 8.0 + 512e-3])
    with pytest.raises(ScalingError):
        time_curves([], "s_half")


def test_size_curve():
    records = [_rec(L, 0.25, 0.4, 50, "corr", mean=1.0 / L) for L in (8, 16, 32)]
    L, y, e = size_curve(records, "corr", p=0.25, q=0.4)
    assert list(L) == [8, 16, 32]
    assert y == pytest.approx([1 / 8, 1 / 16, 1 / 32])
    # two parameter points per size is ambiguous
    records.append(_rec(8, 0.25, 0.5, 50, "corr", mean=0.9))
    with pytest.raises(ScalingError):
        size_curve(records, "corr", p=0.25)


# -- master curve quality ------------------------------------------------------


def test_master_curve_quality_zero_for_identical_curves():
    u = np.linspace(0, 1, 20)
    y = np.sin(u)
    var = np.full_like(u, 0.01)
    quality, n = master_curve_quality([(u, y, var), (u, y, var), (u, y, var)])
    assert quality == pytest.approx(0.0, abs=1e-12)
    assert n == 60


def test_master_curve_quality_scales_with_deviation():
    u = np.linspace(0, 1, 20)
    y = np.zeros_like(u)
    var = np.full_like(u, 1.0)
    off = np.full_like(u, 2.0)
    # each point deviates by 2 with combined variance 2: chi2 = 4/2 = 2
    quality, _ = master_curve_quality([(u, y, var), (u, off, var)])
    assert quality == pytest.approx(2.0, rel=1e-6)


def test_master_curve_quality_requires_overlap():
    u1 = np.linspace(0, 1, 10)
    u2 = np.linspace(5, 6, 10)
    var = np.full(10, 0.01)
    with pytest.raises(ScalingError):
        master_curve_quality([(u1, np.sin(u1), var), (u2, np.sin(u2), var)])


# -- collapse fits -------------------------------------------------------------


def _two_param_curves(x_c=0.5, nu=1.3, sizes=(16, 32, 64), noise=0.0, seed=0):
    rng = np.random.default_rng(seed)
    curves = {}
    for L in sizes:
        x = np.arange(0.35, 0.651, 0.01)
        u = (x - x_c) * L ** (1.0 / nu)
        y = np.tanh(u) + noise * rng.standard_normal(len(x))
        e = np.full_like(x, max(noise, 0.01))
        curves[L] = (x, y, e)
    return curves


def test_collapse_two_param_recovers_parameters():
    curves = _two_param_curves()
    fit = collapse_two_param(curves, (0.40, 0.60), (0.8, 2.0),
                             n_grid=21, bootstrap=20, seed=1)
    assert fit.x_c == pytest.approx(0.5, abs=0.005)
    assert fit.nu == pytest.approx(1.3, abs=0.08)
    assert fit.quality < 0.5
    assert fit.n_points > 50
    assert fit.x_c_err < 0.02 and fit.nu_err < 0.3


def test_collapse_two_param_with_noise():
    curves = _two_param_curves(noise=0.02, seed=5)
    fit = collapse_two_param(curves, (0.40, 0.60), (0.8, 2.0),
                             n_grid=21, bootstrap=20, seed=1)
    assert fit.x_c == pytest.approx(0.5, abs=0.02)
    assert fit.nu == pytest.approx(1.3, abs=0.25)


def test_collapse_two_param_validation():
    curves = _two_param_curves()
    only_one = {16: curves[16]}
    with pytest.raises(ScalingError):
        collapse_two_param(only_one, (0.4, 0.6), (0.8, 2.0), bootstrap=0)
    with pytest.raises(ScalingError):
        collapse_two_param(curves, (0.4, 0.6), (-1.0, 2.0), bootstrap=0)


def test_collapse_dynamic_recovers_z():
    curves = {}
    for L in (8, 16, 32):
        t = np.unique(np.geomspace(1, 2 * L * L, 40).astype(int)).astype(float)
        y = np.exp(-t / L**2)
        curves[L] = (t, y, np.full_like(t, 0.01))
    fit = collapse_dynamic(curves, (1.0, 3.0), n_grid=41, bootstrap=20, seed=2)
    assert fit.name == "z"
    assert fit.value == pytest.approx(2.0, abs=0.05)
    assert fit.error < 0.2
    assert fit.quality < 0.5


def test_collapse_dynamic_t_min_filter():
    curves = {
        8: (np.array([0.5, 0.8]), np.array([1.0, 1.0]), np.array([0.1, 0.1])),
        16: (np.array([1.0, 2.0]), np.array([1.0, 1.0]), np.array([0.1, 0.1])),
    }
    with pytest.raises(ScalingError):
        collapse_dynamic(curves, (1.0, 3.0), bootstrap=0, t_min=1.0)


def test_fit_beta_recovers_exponent():
    beta = 0.4
    curves = {}
    for L in (16, 32, 64):
        x = np.arange(0.1, 0.51, 0.05)
        y = L**beta * (1.0 + x**2)
        curves[L] = (x, y, 0.01 * L**beta * np.ones_like(x))
    fit = fit_beta(curves, (0.0, 1.0), n_grid=41, bootstrap=20, seed=3)
    assert fit.name == "beta"
    assert fit.value == pytest.approx(beta, abs=0.01)
    assert fit.quality < 0.5
    assert fit.error < 0.1


def test_fit_beta_rejects_flat_zero_signal():
    x = np.linspace(0, 1, 5)
    curves = {L: (x, np.zeros_like(x), np.ones_like(x)) for L in (8, 16)}
    with pytest.raises(ScalingError):
        fit_beta(curves, (0.0, 1.0), bootstrap=0)


# -- direct exponent fits -------------------------------------------------------


def test_fit_powerlaw_exact():
    x = np.geomspace(1, 100, 10)
    y = 3.0 * x**-0.3
    fit = fit_powerlaw(x, y, 0.01 * y)
    assert fit.value == pytest.approx(0.3, abs=1e-6)
    assert fit.details["amplitude"] == pytest.approx(3.0, rel=1e-6)
    assert fit.quality == pytest.approx(0.0, abs=1e-9)
    assert fit.name == "eta"


def test_fit_powerlaw_drops_nonpositive_and_validates():
    x = np.array([1.0, 2.0, 4.0, 8.0])
    y = np.array([1.0, 0.0, 0.25, 0.125])
    fit = fit_powerlaw(x, y)
    assert fit.details["dropped"] == 1
    assert fit.details["n_points"] == 3
    with pytest.raises(ScalingError):
        fit_powerlaw(np.array([1.0, 2.0]), np.array([1.0, 0.5]))


def test_fit_powerlaw_flags_curvature():
    x = np.geomspace(1, 10, 8)
    y = np.exp(-x)
    fit = fit_powerlaw(x, y, 0.001 * y)
    assert fit.quality > 10


def test_fit_log_growth_exact_and_window():
    x = np.geomspace(1, 1000, 20)
    y = 0.54 * np.log(x) + 2.0
    fit = fit_log_growth(x, y, 0.01 * np.ones_like(y))
    assert fit.name == "alpha"
    assert fit.value == pytest.approx(0.54, abs=1e-6)
    assert fit.details["intercept"] == pytest.approx(2.0, abs=1e-6)

    # early transient outside the window must not bias the slope
    y_bent = y.copy()
    y_bent[x < 10] += 1.0
    fit = fit_log_growth(x, y_bent, 0.01 * np.ones_like(y), window=(10, 1000))
    assert fit.value == pytest.approx(0.54, abs=1e-6)
    assert fit.details["n_points"] == int((x >= 10).sum())
    with pytest.raises(ScalingError):
        fit_log_growth(x, y, window=(400, 500))


# -- crossings -------------------------------------------------------------------


def test_crossing_points_common_crossing():
    x = np.linspace(0.3, 0.7, 41)
    curves = {L: (x, (x - 0.5) * L, 0.01 * np.ones_like(x)) for L in (8, 16, 32)}
    report = crossing_points(curves)
    assert len(report.pairs) == 3
    for L1, L2, xc in report.pairs:
        assert L1 < L2
        assert xc == pytest.approx(0.5, abs=1e-3)
    assert report.x_c == pytest.approx(0.5, abs=1e-3)
    assert abs(report.drift) < 0.05


def test_crossing_points_drift_extrapolates():
    # pair (L1, L2) crosses at 0.5 + a / (L1 L2), drifting to 0.5
    a = 0.8
    x = np.linspace(0.3, 0.7, 201)
    curves = {L: (x, L * (x - 0.5) + a / L, 0.005 * np.ones_like(x))
              for L in (8, 16, 32)}
    report = crossing_points(curves)
    for L1, L2, xc in report.pairs:
        assert xc == pytest.approx(0.5 + a / (L1 * L2), abs=1e-3)
    assert report.x_c == pytest.approx(0.5, abs=0.01)
    assert report.drift > 0


def test_crossing_points_requires_a_crossing():
    x = np.linspace(0, 1, 11)
    curves = {
        8: (x, np.zeros_like(x), 0.1 * np.ones_like(x)),
        16: (x, np.ones_like(x), 0.1 * np.ones_like(x)),
    }
    with pytest.raises(ScalingError):
        crossing_points(curves)


# -- cutoff sweep -----------------------------------------------------------------


def test_lmin_sweep():
    curves = _two_param_curves(sizes=(16, 32, 64))
    sweep = lmin_sweep(curves, (0, 20, 40), (0.4, 0.6), (0.8, 2.0),
                       n_grid=15, bootstrap=0)
    assert [l_min for l_min, _ in sweep] == [0, 20]
    for _, fit in sweep:
        assert fit.x_c == pytest.approx(0.5, abs=0.01)
    with pytest.raises(ScalingError):
        lmin_sweep(curves, (100,), (0.4, 0.6), (0.8, 2.0), bootstrap=0)
