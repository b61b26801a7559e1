import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.optimize import minimize_scalar

import fraczero as fz
from conftest import analytic_step


def test_open_loop_undershoot_matches_analytic_oracle(discrete_plant):
    """Undershoot of the sampled open-loop step equals the partial-fraction
    oracle evaluated on the same grid (the continuous minimum is 41.55%)."""
    traj = fz.simulate_open_step(discrete_plant, 30.0)
    m = fz.step_metrics(traj)
    oracle = -analytic_step(traj.t[1:]).min() * 100.0
    assert m.undershoot_pct == pytest.approx(oracle, abs=1e-9)
    cont_min = minimize_scalar(analytic_step, bounds=(0.01, 2.0), method="bounded")
    assert -cont_min.fun * 100.0 == pytest.approx(41.546, abs=1e-3)
    assert m.undershoot_pct == pytest.approx(41.55, abs=0.5)


def test_open_loop_steady_state_and_shape(discrete_plant):
    traj = fz.simulate_open_step(discrete_plant, 30.0)
    m = fz.step_metrics(traj)
    assert m.steady_state == pytest.approx(1.0, abs=1e-3)
    assert m.overshoot_pct == pytest.approx(0.0, abs=1e-9)
    # response crosses zero exactly once (skipping the zero initial sample)
    signs = np.sign(traj.y[1:])
    assert np.count_nonzero(np.diff(signs) != 0) == 1
    assert m.settled


def test_closed_loop_dc_values(discrete_plant, fir_n2):
    cfg = fz.LoopConfig(kp=1.07, plant=discrete_plant)
    m = fz.step_metrics(fz.simulate_closed_step(cfg))
    assert m.steady_state == pytest.approx(0.51691, abs=1e-3)
    cfg2 = fz.LoopConfig(kp=1.85, plant=discrete_plant, canceller=fir_n2,
                         t_final=60.0)
    m2 = fz.step_metrics(fz.simulate_closed_step(cfg2))
    assert m2.steady_state == pytest.approx(1.85 / 2.85, abs=1e-3)


def test_closed_loop_dc_consistency_property(discrete_plant, fir_n2):
    """Steady state tracks kp/(1+kp) for unit-DC plant and canceller.

    Gains are kept where the loops settle inside the horizon; the bare
    sampled loop is nearly marginal above kp ~ 1.2 and rings for hundreds of
    seconds."""
    for kp in (0.5, 0.9, 1.07):
        cfg = fz.LoopConfig(kp=kp, plant=discrete_plant, t_final=60.0)
        m = fz.step_metrics(fz.simulate_closed_step(cfg))
        assert m.steady_state == pytest.approx(kp / (1.0 + kp), abs=1e-3)
    for kp in (0.5, 1.07, 1.2):
        cfg = fz.LoopConfig(kp=kp, plant=discrete_plant, canceller=fir_n2,
                            t_final=60.0)
        m = fz.step_metrics(fz.simulate_closed_step(cfg))
        assert m.steady_state == pytest.approx(kp / (1.0 + kp), abs=1e-3)


def test_zero_gain_gives_zero_output(discrete_plant):
    cfg = fz.LoopConfig(kp=0.0, plant=discrete_plant)
    traj = fz.simulate_closed_step(cfg)
    assert not traj.y.any()
    with pytest.raises(fz.MetricsUndefinedError):
        fz.step_metrics(traj)


def test_scenario1_orderings(discrete_plant, fir_n2):
    """Inserting the canceller at fixed gain calms every metric except rise
    time, which pays for the bandwidth loss."""
    bare = fz.step_metrics(fz.simulate_closed_step(
        fz.LoopConfig(kp=1.07, plant=discrete_plant)))
    canc = fz.step_metrics(fz.simulate_closed_step(
        fz.LoopConfig(kp=1.07, plant=discrete_plant, canceller=fir_n2)))
    assert canc.undershoot_pct < bare.undershoot_pct
    assert canc.overshoot_pct < bare.overshoot_pct
    assert canc.settling_time_s < bare.settling_time_s
    assert canc.rise_time_s > bare.rise_time_s
    assert bare.steady_state == pytest.approx(canc.steady_state, abs=1e-3)


def test_scenario2_orderings(discrete_plant, fir_n2):
    """Higher gain plus canceller beats the bare loop on steady-state error
    and undershoot."""
    bare = fz.step_metrics(fz.simulate_closed_step(
        fz.LoopConfig(kp=1.07, plant=discrete_plant)))
    canc = fz.step_metrics(fz.simulate_closed_step(
        fz.LoopConfig(kp=1.85, plant=discrete_plant, canceller=fir_n2)))
    assert abs(1.0 - canc.steady_state) < abs(1.0 - bare.steady_state)
    assert canc.undershoot_pct < bare.undershoot_pct


def test_determinism(discrete_plant, fir_n2):
    cfg = fz.LoopConfig(kp=1.07, plant=discrete_plant, canceller=fir_n2)
    a = fz.simulate_closed_step(cfg)
    b = fz.simulate_closed_step(cfg)
    assert np.array_equal(a.y, b.y)
    assert np.array_equal(a.u2, b.u2)


def test_instability_detected(discrete_plant):
    with pytest.raises(fz.InstabilityError) as exc:
        fz.simulate_closed_step(fz.LoopConfig(kp=8.0, plant=discrete_plant,
                                              t_final=120.0))
    assert exc.value.time_s >= 0.0


def test_loop_config_validation(discrete_plant, fir_n2):
    with pytest.raises(ValueError):
        fz.LoopConfig(kp=1.0, plant=discrete_plant, t_final=0.0)
    other = fz.FirFilter(fir_n2.taps, period_T=0.1)
    with pytest.raises(ValueError, match="period"):
        fz.LoopConfig(kp=1.0, plant=discrete_plant, canceller=other)


def test_reference_scaling(discrete_plant):
    cfg = fz.LoopConfig(kp=1.07, plant=discrete_plant, reference=2.5)
    m = fz.step_metrics(fz.simulate_closed_step(cfg))
    assert m.steady_state == pytest.approx(2.5 * 1.07 / 2.07, abs=2.5e-3)


def test_loop_signal_chain(discrete_plant, fir_n2):
    traj = fz.simulate_closed_step(
        fz.LoopConfig(kp=1.3, plant=discrete_plant, canceller=fir_n2))
    # e[k] = r[k] - y[k-1], u1 = kp e, u2 = FIR(u1)
    assert traj.e[0] == traj.r[0]
    assert_allclose(traj.e[1:], traj.r[1:] - traj.y[:-1], rtol=0)
    assert_allclose(traj.u1, 1.3 * traj.e, rtol=0)
    assert_allclose(traj.u2, fz.fir_apply(fir_n2, traj.u1), rtol=1e-12, atol=1e-14)


def test_unsettled_flagging(discrete_plant):
    # a horizon too short to settle leaves the flag off and the time None
    traj = fz.simulate_closed_step(fz.LoopConfig(kp=1.07, plant=discrete_plant,
                                                 t_final=2.0))
    m = fz.step_metrics(traj)
    assert not m.settled
    assert m.settling_time_s is None


def test_metrics_dict_shape(discrete_plant):
    m = fz.step_metrics(fz.simulate_open_step(discrete_plant, 30.0))
    d = m.as_dict()
    assert set(d) == {"undershoot_pct", "overshoot_pct", "rise_time_s",
                      "settling_time_s", "steady_state", "settled"}


def test_write_trajectory_csv(tmp_path, discrete_plant):
    traj = fz.simulate_open_step(discrete_plant, 1.0)
    out = tmp_path / "traj.csv"
    fz.loopsim.write_trajectory_csv(traj, out)
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "t_s,r,e,u1,u2,y"
    assert len(lines) == traj.t.size + 1
