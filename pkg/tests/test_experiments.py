import numpy as np
import pytest

from cuspfield.experiments import (
    ExperimentConfig,
    format_csv,
    run_forced_ridge,
    run_free_tip_ridge,
    run_gorge,
    run_horn_eps_study,
    run_overlap_demo,
)
from cuspfield.fitting import fit_loglog

FAST = ExperimentConfig(n_s=36, n_eta=8, nx=40, nz=28, n_side=28)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(m=1.0)
    with pytest.raises(ValueError):
        ExperimentConfig(rho_list=(0.02, 0.01, 0.005))
    with pytest.raises(ValueError):
        ExperimentConfig(rho_list=(0.005, 0.007, 0.01, 0.014, 0.02))
    with pytest.raises(ValueError):
        ExperimentConfig(rho_list=(0.02, 0.019, 0.018, 0.001, 0.0001))
    with pytest.raises(ValueError):
        ExperimentConfig(ell=0.05)
    with pytest.raises(ValueError):
        ExperimentConfig(n_rings=1)


def test_fit_loglog_exact_power():
    x = np.geomspace(0.01, 1.0, 9)
    fit = fit_loglog(x, 2.5 * x**-1.7)
    assert abs(fit.slope + 1.7) < 1e-12
    assert abs(np.exp(fit.intercept) - 2.5) < 1e-12
    assert fit.r_squared > 1.0 - 1e-12
    assert fit.points == 9
    pred = fit.predict(np.array([0.1]))
    assert abs(pred[0] - 2.5 * 0.1**-1.7) < 1e-12


def test_fit_loglog_window_and_noise():
    rng = np.random.default_rng(7)
    x = np.geomspace(0.01, 10.0, 40)
    y = 3.0 * x**2.0 * np.exp(rng.normal(0.0, 0.01, x.size))
    fit = fit_loglog(x, y, window=(0.05, 5.0))
    assert abs(fit.slope - 2.0) < 0.05
    assert fit.points < 40


def test_fit_loglog_failures():
    x = np.geomspace(0.1, 1.0, 10)
    with pytest.raises(ValueError):
        fit_loglog(x[:3], x[:3])
    with pytest.raises(ValueError):
        fit_loglog(x, -x)
    with pytest.raises(ArithmeticError):
        rng = np.random.default_rng(2)
        fit_loglog(x, np.exp(rng.normal(0.0, 1.0, x.size)), min_r_squared=0.98)


def test_format_csv_layout():
    text = format_csv("a,b", [(1.0, 2.5), (0.125, 3.0)])
    assert text == "a,b\n1,2.5\n0.125,3\n"


def test_free_tip_sweep_scaling():
    res = run_free_tip_ridge(FAST)
    assert res.header == "rho,percentile_stress,energy"
    assert len(res.rows) == 5
    assert 0.8 < res.stress_fit.slope < 1.3
    assert res.stress_fit.r_squared > 0.98
    # bounded tip energy: nearly flat in the cutoff
    assert abs(res.energy_fit.slope) < 0.1


def test_forced_sweep_scaling():
    res = run_forced_ridge(FAST)
    assert abs(res.stress_fit.slope - (-FAST.m)) < 0.2
    assert abs(res.energy_fit.slope - (1.0 - FAST.m)) < 0.15
    # forced stresses dwarf the free-tip ones at the same cutoffs
    free = run_free_tip_ridge(FAST)
    forced_smallest = res.rows[-1][1]
    free_smallest = free.rows[-1][1]
    assert forced_smallest > 10.0 * free_smallest


def test_gorge_ring_decay():
    res = run_gorge(FAST)
    assert res.header == "r,percentile_stress"
    assert len(res.rows) == FAST.n_rings
    assert abs(res.stress_fit.slope - (-0.5)) < 0.05
    radii = [row[0] for row in res.rows]
    assert all(a < b for a, b in zip(radii, radii[1:]))


def test_horn_eps_study_wrapper():
    fit, rows = run_horn_eps_study(eps_list=(0.05, 0.1, 0.2, 0.4))
    assert abs(fit.slope - 4.0) < 0.05
    assert len(rows) == 4


def test_overlap_demo_decreases():
    rows = run_overlap_demo()
    mismatches = [m for _, m in rows]
    assert all(a > b for a, b in zip(mismatches, mismatches[1:]))
    table = dict(rows)
    # loose factor-2 envelope around the reference mismatch levels
    for r, ref in ((10.0, 1.29e-1), (30.0, 4.64e-2), (100.0, 1.43e-2)):
        assert ref / 2.0 < table[r] < ref * 2.0
    with pytest.raises(ValueError):
        run_overlap_demo(alpha=1.5)


def test_sweeps_deterministic():
    a = run_gorge(FAST)
    b = run_gorge(FAST)
    assert format_csv(a.header, a.rows) == format_csv(b.header, b.rows)
