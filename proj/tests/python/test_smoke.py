import math

import pytest

import stsmc


def test_perturbation_roundtrip():
    spec = stsmc.normalized_ripple(2.5, 0.25)
    assert spec.is_periodic()
    assert spec.period == pytest.approx(0.25)
    assert abs(stsmc.mean_rate(spec)) < 1e-12
    check = stsmc.verify_rate_bound(spec, 2000)
    assert check.ok
    assert check.max_abs_q == pytest.approx(0.76980035891950102 * 2.5, rel=1e-9)

    parsed = stsmc.spec_from_json(stsmc.spec_to_json(spec))
    assert parsed.period == spec.period


def test_field_primitives():
    assert stsmc.signum(-2.0) == -1.0
    assert stsmc.phi_delta(0.5, 1.0) == 0.5
    assert stsmc.rho(2.0, 1.0) == 0.0
    d = stsmc.eval_regularized(stsmc.State(1.0, 0.0), stsmc.Gains(2.0, 3.0), 0.5, 0.01)
    assert d == pytest.approx((-2.0, -2.5))
    with pytest.raises(ValueError):
        stsmc.phi_delta(1.0, 0.0)


def test_bounds():
    g = stsmc.Gains(1.0, 2.0)
    assert stsmc.prop3_bound(g, 2.5, 0.25) == pytest.approx(0.03515625)
    assert stsmc.chatter_bound(g, 2.5, 0.25) == pytest.approx(0.5625)
    assert stsmc.w1_tuning_bound(stsmc.Gains(1.76, 1.08), 2.5, 0.25, 0.5) == pytest.approx(
        1.4707211334439258
    )
    with pytest.raises(ValueError):
        stsmc.w1_tuning_bound(stsmc.Gains(2.0, 0.5), 2.5, 0.25, 0.5)


def test_simulate_and_detect():
    L, T, delta = 2.5, 0.25, 1e-4
    g = stsmc.Gains(1.76, 1.08)
    report = stsmc.simulate_ripple_cycle(L, T, g, delta)
    assert report.converged
    assert report.w1_max > 0.0
    assert report.w1_max == pytest.approx(-report.w1_min, rel=0.05)
    assert report.w1_max < stsmc.prop3_bound(g, L, T)


def test_divergence_surface():
    spec = stsmc.PerturbationSpec()
    spec.constant_rate = 2.5
    spec.rate_bound = 2.5
    cfg = stsmc.SimConfig()
    cfg.delta = 1.0
    cfg.t_end = 2e6
    cfg.record_stride = 5000
    traj = stsmc.integrate(cfg, stsmc.Gains(1.0, 1.25), spec)
    assert traj.diverged
    assert traj.divergence_time is not None


def test_tuning():
    p = stsmc.TuningProblem()
    p.L, p.T, p.eta = 2.5, 0.25, 0.01
    result = stsmc.tune_gains(p)
    assert result.feasible
    assert not result.target_unmet
    assert result.constraints.all()
    assert abs(result.W1 - 0.01) <= 1e-3
    assert 0.0 < result.gains.k2 < p.L
