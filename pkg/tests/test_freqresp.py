import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

import fraczero as fz
from conftest import Z_NMP, bare_loop_mag, bare_loop_phase, cancelled_loop_mag

# frozen independent-oracle values (closed-form magnitude/phase + brentq)
WGC_107 = 2.3210812573993027        # sqrt(1.07^2 - 1) / tp
PM_107 = 61.231043702977914         # 180 + phase(WGC_107) in degrees
WU_BARE = 5.358901585669583         # brentq on the closed-form phase
KAPPA_BARE = 0.7511380880121397     # 1/sqrt(1 + (tp*wu)^2)
WU_CANC = 3.6981877643783254        # brentq on the cancelled closed-form phase
GM_CANC_107 = 7.534170279291087     # -20 log10 |1.07 Cc P| at WU_CANC


# ---------------------------------------------------------------------------
# closed forms of the partly-cancelled zero term
# ---------------------------------------------------------------------------

def test_nmp_mag_closed_values():
    assert fz.nmp_mag_at_zero_freq(1.0) == pytest.approx(math.sqrt(2.0), abs=1e-15)
    assert fz.nmp_mag_at_zero_freq(2.0 / 3.0) == pytest.approx(1.0, abs=1e-15)
    assert fz.nmp_mag_at_zero_freq(0.5) == pytest.approx(0.76536686473, rel=1e-10)


def test_nmp_mag_matches_direct_eval():
    for alpha in (0.1, 0.25, 0.5, 0.75, 1.0):
        f = fz.fractional_zero_term(alpha, 2.0)
        assert abs(fz.evaluate(f, 2.0j)) == pytest.approx(
            fz.nmp_mag_at_zero_freq(alpha), rel=1e-12)


def test_nmp_phase_closed_values():
    assert fz.nmp_phase_at_zero_freq(1.0) == pytest.approx(-math.pi / 4.0, abs=1e-15)
    assert fz.nmp_phase_at_zero_freq(0.5) == pytest.approx(-3.0 * math.pi / 8.0, abs=1e-15)


def test_nmp_phase_lag_delta_property():
    for alpha in (0.1, 0.3, 0.5, 0.9):
        delta = fz.nmp_phase_at_zero_freq(alpha) - fz.nmp_phase_at_zero_freq(1.0)
        assert delta == pytest.approx(-(1.0 - alpha) * math.pi / 4.0, abs=1e-15)


def test_gain_reduction_values():
    assert fz.gain_reduction_at_zero_freq(1.0) == pytest.approx(0.0, abs=1e-15)
    assert fz.gain_reduction_at_zero_freq(2.0 / 3.0) == pytest.approx(
        math.sqrt(2.0) - 1.0, abs=1e-12)
    assert fz.gain_reduction_at_zero_freq(0.5) == pytest.approx(0.648847, abs=1e-6)


def test_gain_reduction_is_magnitude_drop():
    # the reduction equals sqrt(2) minus the partly-cancelled magnitude
    for alpha in (0.2, 0.5, 2.0 / 3.0, 0.9, 1.0):
        expect = math.sqrt(2.0) - fz.nmp_mag_at_zero_freq(alpha)
        assert fz.gain_reduction_at_zero_freq(alpha) == pytest.approx(expect, abs=1e-14)


def test_closed_forms_reject_bad_alpha():
    for fn in (fz.nmp_mag_at_zero_freq, fz.nmp_phase_at_zero_freq,
               fz.gain_reduction_at_zero_freq):
        with pytest.raises(ValueError):
            fn(0.0)
        with pytest.raises(ValueError):
            fn(1.5)


def test_omega_min_values():
    assert fz.omega_min(0.5, 2.0202) == pytest.approx(1.0101, abs=1e-4)
    assert fz.omega_min(1.0, 2.0202) == 0.0  # no decreasing region
    assert fz.omega_min(0.999, 1.0) < 1e-2


def test_omega_min_matches_brute_force_argmin():
    """Grid argmin of |F(jw)| agrees with the closed form within one step."""
    z = 2.0
    w = np.geomspace(0.05 * z, 2.0 * z, 100_000)
    for alpha in np.arange(0.1, 0.95, 0.1):
        f = fz.fractional_zero_term(float(alpha), z)
        mag = np.abs(fz.evaluate_grid(f, 1j * w))
        i = int(np.argmin(mag))
        w_formula = fz.omega_min(float(alpha), z)
        step = w[min(i + 1, w.size - 1)] - w[i]
        assert abs(w[i] - w_formula) <= 1.01 * step


def test_partial_cancellation_shrinks_magnitude_everywhere():
    """|F_a(jw)| < |F_1(jw)| for all w > 0 and every a in (0, 1)."""
    z = Z_NMP
    w = np.geomspace(1e-2 * z, 1e2 * z, 10_000)
    f1 = np.abs(1.0 - 1j * w / z)
    for alpha in (0.1, 0.25, 0.5, 0.75, 0.9):
        fa = np.abs(fz.evaluate_grid(fz.fractional_zero_term(alpha, z), 1j * w))
        assert np.all(fa < f1)


def test_magnitude_monotone_around_omega_min():
    z = 3.0
    for alpha in (0.2, 0.5, 0.8):
        wmin = fz.omega_min(alpha, z)
        f = fz.fractional_zero_term(alpha, z)
        w_lo = np.geomspace(1e-3 * z, 0.98 * wmin, 400)
        w_hi = np.geomspace(1.02 * wmin, 1e3 * z, 400)
        m_lo = np.abs(fz.evaluate_grid(f, 1j * w_lo))
        m_hi = np.abs(fz.evaluate_grid(f, 1j * w_hi))
        assert np.all(np.diff(m_lo) < 0)
        assert np.all(np.diff(m_hi) > 0)


# ---------------------------------------------------------------------------
# response sampling
# ---------------------------------------------------------------------------

def test_freq_response_fractional_point_values():
    z = 2.0
    f1 = fz.freq_response(fz.fractional_zero_term(1.0, z), np.array([z / 2, z]))
    assert abs(f1.response[-1]) == pytest.approx(math.sqrt(2.0), rel=1e-12)
    assert f1.phase_deg[-1] == pytest.approx(-45.0, abs=1e-9)
    f5 = fz.freq_response(fz.fractional_zero_term(0.5, z), np.array([z / 2, z]))
    assert abs(f5.response[-1]) == pytest.approx(0.76536686473, rel=1e-9)
    assert f5.phase_deg[-1] == pytest.approx(-67.5, abs=1e-9)


def test_freq_response_magnitude_oracle(plant):
    w = np.geomspace(0.01, 100, 500)
    series = fz.freq_response(plant, w)
    assert_allclose(np.abs(series.response), bare_loop_mag(w), rtol=1e-12)
    assert_allclose(series.magnitude_db, 20 * np.log10(bare_loop_mag(w)),
                    rtol=1e-10, atol=1e-8)


def test_freq_response_phase_unwrapped_and_anchored(plant):
    w = np.geomspace(1e-3, 1e3, 800)
    series = fz.freq_response(plant, w)
    assert_allclose(np.radians(series.phase_deg), bare_loop_phase(w), atol=1e-9)
    assert np.all(np.abs(np.diff(series.phase_deg)) < 180.0)


def test_freq_response_pole_on_axis():
    osc = fz.FoTransferFunction(1.0, 1, np.array([1.0]), np.array([1.0, 0.0, 1.0]))
    with pytest.raises(fz.PoleHitError, match="omega = 1"):
        fz.freq_response(osc, np.array([0.5, 1.0, 2.0]))


def test_freq_response_rejects_nonpositive_frequency(plant):
    with pytest.raises(ValueError):
        fz.freq_response(plant, np.array([0.0, 1.0]))


# ---------------------------------------------------------------------------
# crossovers and margins
# ---------------------------------------------------------------------------

def test_gain_crossover_bare_closed_form(plant):
    got = fz.gain_crossover(fz.scale(plant, 1.07))
    assert got == pytest.approx(WGC_107, rel=1e-9)


def test_gain_crossover_absent_for_unit_gain(plant):
    assert fz.gain_crossover(plant) is None


def test_gain_crossover_vs_brute_force_scan(plant):
    """1.85 Cc P crossover against a 1e6-point grid scan oracle."""
    tf = fz.scale(fz.augmented_plant(plant, 2), 1.85)
    got = fz.gain_crossover(tf)
    w = np.geomspace(1e-2, 1e2, 1_000_000)
    mag = cancelled_loop_mag(w, 1.85)
    i = int(np.argmax(mag < 1.0))  # first grid point past the crossing
    assert got is not None
    assert w[i - 1] <= got <= w[i]
    assert got == pytest.approx(1.7322, abs=2e-3)


def test_phase_crossover_bare(plant):
    got = fz.phase_crossover(plant)
    assert got == pytest.approx(WU_BARE, rel=1e-9)


def test_phase_crossover_absent_for_first_order_lag():
    lag = fz.FoTransferFunction(1.0, 1, np.array([1.0]), np.array([1.0, 1.0]))
    assert fz.phase_crossover(lag) is None


def test_phase_crossover_cancelled_far_above_wgc(plant):
    tf = fz.scale(fz.augmented_plant(plant, 2), 1.07)
    wu = fz.phase_crossover(tf)
    wgc = fz.gain_crossover(tf)
    assert wu == pytest.approx(WU_CANC, rel=1e-9)
    assert wu > 100 * wgc


def test_margins_bare_107(plant):
    rep = fz.margins(fz.scale(plant, 1.07))
    assert rep.pm_deg == pytest.approx(PM_107, abs=1e-6)
    assert rep.omega_gc == pytest.approx(WGC_107, rel=1e-9)
    assert rep.omega_u == pytest.approx(WU_BARE, rel=1e-9)
    assert rep.gm_db == pytest.approx(-20 * math.log10(1.07 * KAPPA_BARE), abs=1e-9)
    assert rep.dc_gain == pytest.approx(1.07)


def test_margins_cancelled_107(plant):
    rep = fz.margins(fz.scale(fz.augmented_plant(plant, 2), 1.07))
    assert rep.pm_deg == pytest.approx(175.135235, abs=1e-4)
    assert rep.omega_gc == pytest.approx(0.0185961759, rel=1e-8)
    assert rep.gm_db == pytest.approx(GM_CANC_107, abs=1e-6)
    # phase at the gain crossover is a few degrees below zero
    assert -10.0 < rep.pm_deg - 180.0 < 0.0


def test_margins_kappa_of_raw_plant(plant):
    rep = fz.margins(plant)
    assert rep.kappa == pytest.approx(KAPPA_BARE, rel=1e-9)
    # kappa > 0.4: this benchmark sits on the hard side of the heuristic
    assert rep.kappa > 0.4
    assert rep.omega_gc is None and rep.pm_deg is None


def test_margins_absent_fields_propagate():
    lag = fz.FoTransferFunction(1.0, 1, np.array([1.0]), np.array([1.0, 1.0]))
    rep = fz.margins(lag)
    assert rep.omega_u is None and rep.gm_db is None and rep.kappa is None
    d = rep.as_dict()
    assert set(d) == {"omega_gc", "omega_u", "pm_deg", "gm_db", "kappa", "dc_gain"}


def test_wgc_nondecreasing_in_gain(plant):
    """Crossover frequency grows with loop gain for the benchmark family."""
    last = 0.0
    for k in np.linspace(0.5, 5.0, 25):
        rep = fz.margins(fz.scale(plant, float(k)))
        if rep.omega_gc is None:
            assert k <= 1.0
            continue
        assert rep.omega_gc >= last
        last = rep.omega_gc


def test_pm_continuous_in_kp(plant):
    """Dense PM(kp) sweep on the cancelled loop shows no jumps; this is the
    premise of the design bisections."""
    aug = fz.augmented_plant(plant, 2)
    kps = np.geomspace(1.05, 2.4, 60)
    pms = np.array([fz.margins(fz.scale(aug, float(k))).pm_deg for k in kps])
    assert np.all(np.isfinite(pms))
    assert np.all(np.abs(np.diff(pms)) < 25.0)
    assert np.all(np.diff(pms) < 0)  # monotone decreasing on this range


def test_phase_delta_at_zero_frequency(plant):
    """Cancellation adds exactly -(1-alpha) pi/4 of phase at s = j z_nmp,
    independent of the proportional gain."""
    z = plant.nmp_zero
    for kp in (0.3, 1.07, 4.2):
        L = fz.scale(plant, kp)
        base = np.angle(fz.evaluate(L, 1j * z))
        for n in (2, 3, 5):
            Lc = fz.scale(fz.augmented_plant(plant, n), kp)
            delta = np.angle(fz.evaluate(Lc, 1j * z)) - base
            assert delta == pytest.approx(-(1.0 - 1.0 / n) * math.pi / 4.0, abs=1e-10)


def test_write_series_csv(tmp_path, plant):
    series = fz.freq_response(plant, np.geomspace(0.1, 10, 16))
    out = tmp_path / "bode.csv"
    fz.freqresp.write_series_csv(series, out)
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "omega_rad_s,re,im,mag_db,phase_deg"
    assert len(lines) == 17
    first = [float(v) for v in lines[1].split(",")]
    assert first[0] == pytest.approx(0.1)
