"""
Tests de la solution externe: exposants fermés, critère d'instabilité, ajustement des taux et profil ᾱ(ξ)
"""

import time
from dataclasses import replace

import numpy as np
import pytest

from modules.tumour_model import (
    ModelParameters, find_base_states, NoRootError, DegenerateWindowError, PreconditionError, SnapshotTooEarlyError,
)
from modules.perturbation import Grid, initial_state, simulate, default_time_step
from modules.asymptotics import (
    compute_rates, margin_from_identity, classify_stability, fit_rate, fit_series_rates, outer_profile,
    predict_outer_fields, instability_indicators,
)

RATE_WINDOW = (15.0, 30.0)
WIDE_WINDOW = (24.0, 30.0)


def test_reference_exponents(ref1_rates):
    assert ref1_rates.gamma0 == pytest.approx(-0.8365645, abs=1e-5)
    assert ref1_rates.margin == pytest.approx(-0.9216426, abs=1e-5)
    assert ref1_rates.gamma1 == pytest.approx(-0.1324115, abs=1e-5)
    assert ref1_rates.gamma3.real == pytest.approx(0.0, abs=1e-14)
    assert ref1_rates.gamma3.imag == pytest.approx(-0.3814070, abs=2e-5)
    assert ref1_rates.outer_rates["vc1"] == pytest.approx(ref1_rates.gamma0 - 2.0 * ref1_rates.lambda2)
    assert ref1_rates.layer_rates["a0"] == pytest.approx(-2.0 * ref1_rates.lambda2)


def test_second_reference_exponents(ref2_params, ref2_base):
    rates = compute_rates(ref2_params, ref2_base)
    assert rates.gamma0 == pytest.approx(-0.716667, abs=1e-6)
    assert rates.margin == pytest.approx(-0.766667, abs=1e-6)


def test_margin_identity_on_random_parameters():
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(50):
        alpha_star = rng.uniform(0.3, 0.6)
        params = ModelParameters(s0=rng.uniform(0.5, 2.0), s1=rng.uniform(0.0, 2.0), s2=rng.uniform(0.01, 0.1),
                                 Sigma_hat=rng.uniform(0.05, 0.5), r=rng.uniform(1.0, 2.0),
                                 q=rng.uniform(0.5, 2.0), alpha_star=alpha_star, alpha_min=0.5 * alpha_star)
        try:
            states = find_base_states(params)
        except NoRootError:
            continue
        for base in states:
            if base.alpha_h <= params.alpha_min or base.alpha_h == params.alpha_star:
                continue
            direct = compute_rates(params, base).margin
            assert margin_from_identity(params, base) == pytest.approx(direct, abs=1e-10)
            checked += 1
    assert checked > 10


def test_margin_identity_requires_simple_death_rate(ref1_base):
    with pytest.raises(PreconditionError):
        margin_from_identity(ModelParameters(s3=0.1), ref1_base)


def test_classification(ref1_params, ref1_base):
    verdict = classify_stability(ref1_params, ref1_base)
    assert verdict.verdict == "stable"
    assert verdict.margin < 0.0
    assert verdict.exponents[0] == pytest.approx(verdict.margin)


def test_classification_requires_growth():
    params = ModelParameters(s2=0.25)
    base = [s for s in find_base_states(params) if abs(s.alpha_h - 0.5) < 1e-9][0]
    with pytest.raises(PreconditionError):
        classify_stability(params, base)


def test_fit_rate_exact_exponential():
    t = np.linspace(0.0, 10.0, 101)
    report = fit_rate(t, 3.0 * np.exp(-2.0 * t), window=(0.0, 10.0), predicted_rate=-2.0, field="alpha")
    assert report.fitted_rate == pytest.approx(-2.0, abs=1e-12)
    assert report.r_squared == pytest.approx(1.0)
    assert report.rel_err == pytest.approx(0.0, abs=1e-12)


def test_fit_rate_ignores_phase_and_scale():
    t = np.linspace(0.0, 10.0, 101)
    values = np.exp((-0.3 + 1.5j) * t)
    base = fit_rate(t, values, window=(0.0, 10.0))
    assert base.fitted_rate == pytest.approx(-0.3, abs=1e-12)
    assert fit_rate(t, 1e5 * values, window=(0.0, 10.0)).fitted_rate == pytest.approx(base.fitted_rate, abs=1e-12)


def test_fit_rate_default_window_is_second_half():
    t = np.linspace(0.0, 20.0, 41)
    report = fit_rate(t, np.exp(-t))
    assert report.t0 == pytest.approx(10.0)
    assert report.t1 == pytest.approx(20.0)


def test_fit_rate_degenerate_windows():
    t = np.linspace(0.0, 1.0, 5)
    with pytest.raises(DegenerateWindowError):
        fit_rate(t, np.exp(-t), window=(0.0, 1.0))
    t = np.linspace(0.0, 10.0, 101)
    values = np.exp(-t)
    values[60:] = 0.0
    with pytest.raises(DegenerateWindowError):
        fit_rate(t, values, window=(0.0, 10.0))


@pytest.mark.parametrize("name,xi,tolerance", [
    ("alpha_t", 0.5, 0.05),
    ("vc2_t", 0.5, 0.05),
    ("vc1_t", 0.35, 0.08),
    ("vw1_t", 0.5, 0.08),
])
def test_simulated_rates_match_outer_exponents(wide_simulation, wide_rates, name, xi, tolerance):
    predicted = wide_rates.outer_rates[name[:-2]]
    report = fit_rate(wide_simulation.times, wide_simulation.at_xi(name, xi), window=WIDE_WINDOW,
                      predicted_rate=predicted)
    assert report.rel_err <= tolerance
    assert report.r_squared > 0.99


def test_series_rates_cover_every_field(ref1_simulation, ref1_rates):
    reports = fit_series_rates(ref1_simulation, ref1_rates, [0.5], RATE_WINDOW)
    assert [r.field for r in reports] == ["alpha", "vc1", "vc2", "vw1", "vw2"]
    assert all(r.location == "xi=0.5" for r in reports)
    assert set(reports[0].to_row()) == {"field", "location", "t0", "t1", "fitted_rate", "r_squared",
                                        "predicted_rate", "rel_err"}


def test_rates_do_not_depend_on_wavenumber(ref1_params, ref1_base, ref1_rates):
    fitted = []
    for kappa in (8.0, 12.0):
        params = replace(ref1_params, kappa=kappa)
        grid = Grid(200)
        series = simulate(params, ref1_base, grid, initial_state(params, ref1_base, grid),
                          t_end=30.0, dt=0.05, output_every=10)
        fitted.append(fit_rate(series.times, series.at_xi("alpha_t", 0.5), window=WIDE_WINDOW).fitted_rate)
    assert fitted[1] == pytest.approx(fitted[0], rel=0.05)
    assert fitted[0] == pytest.approx(ref1_rates.margin, rel=0.05)


def test_free_boundary_family_dominates_small_wavenumbers(ref1_params, ref1_base, ref1_simulation, ref1_rates):
    # À κ=2, R̃ croît au taux ≈ λ₂ et son empreinte e^(−κ(1−ξ)R_*) couvre encore ξ=0.5 sur [15, 30]
    displacement = fit_rate(ref1_simulation.times, ref1_simulation.radius_perturbation(), window=RATE_WINDOW)
    assert displacement.fitted_rate > 0.0

    params = replace(ref1_params, kappa=4.0)
    grid = Grid(200)
    series = simulate(params, ref1_base, grid, initial_state(params, ref1_base, grid),
                      t_end=30.0, dt=0.05, output_every=10)
    other = fit_rate(series.times, series.radius_perturbation(), window=RATE_WINDOW)
    assert other.fitted_rate == pytest.approx(displacement.fitted_rate, rel=0.1)

    edge = fit_rate(ref1_simulation.times, ref1_simulation.at_xi("alpha_t", 1.0), window=RATE_WINDOW)
    assert edge.fitted_rate == pytest.approx(displacement.fitted_rate, rel=0.1)

    interior = fit_rate(ref1_simulation.times, ref1_simulation.at_xi("alpha_t", 0.5), window=RATE_WINDOW,
                        predicted_rate=ref1_rates.margin)
    assert interior.rel_err > 0.3


def test_stability_sign_agrees_with_simulation(wide_simulation, wide_rates, ref2_params, ref2_base):
    report = fit_rate(wide_simulation.times, wide_simulation.at_xi("alpha_t", 0.5), window=WIDE_WINDOW)
    assert np.sign(report.fitted_rate) == np.sign(wide_rates.margin)

    params = replace(ref2_params, kappa=8.0)
    grid = Grid(200)
    series = simulate(params, ref2_base, grid, initial_state(params, ref2_base, grid),
                      t_end=30.0, dt=0.05, output_every=10)
    report = fit_rate(series.times, series.at_xi("alpha_t", 0.5), window=WIDE_WINDOW)
    assert np.sign(report.fitted_rate) == np.sign(compute_rates(params, ref2_base).margin)


def test_outer_profile_collapses_in_time(wide_simulation, wide_rates):
    early = outer_profile(wide_simulation, wide_rates, 25.0)
    late = outer_profile(wide_simulation, wide_rates, 30.0)
    common, i_early, i_late = np.intersect1d(early.xi, late.xi, return_indices=True)
    assert len(common) >= 20
    difference = np.max(np.abs(early.alpha_bar[i_early] - late.alpha_bar[i_late]))
    assert difference <= 0.05 * np.max(np.abs(late.alpha_bar[i_late]))


def test_outer_profile_endpoint_slopes(wide_simulation, wide_rates):
    profile = outer_profile(wide_simulation, wide_rates, 30.0)
    assert profile.exclusion_width == pytest.approx(5.0 / (8.0 * np.exp(30.0 * wide_rates.lambda2)), rel=1e-6)
    assert profile.C1 == -profile.slope_at_one
    assert profile.D1 == profile.slope_at_zero
    assert abs(profile.C1) > 0.0 and abs(profile.D1) > 0.0
    assert 0.0 <= profile.linearity_at_zero <= 1.0


def test_outer_profile_too_early(ref1_simulation, ref1_rates, wide_simulation, wide_rates):
    with pytest.raises(SnapshotTooEarlyError):
        outer_profile(ref1_simulation, ref1_rates, 5.0)
    with pytest.raises(SnapshotTooEarlyError):
        outer_profile(wide_simulation, wide_rates, 0.0)


def test_predicted_outer_fields(wide_params, ref1_base, wide_rates, wide_simulation):
    profile = outer_profile(wide_simulation, wide_rates, 30.0)
    fields = predict_outer_fields(wide_params, ref1_base, wide_rates, profile.alpha_bar, profile.xi, 30.0)
    assert set(fields) == {"alpha", "vc1", "vc2", "vw1", "vw2"}
    state = wide_simulation.snapshot_at(30.0)
    j = wide_simulation.node_index(0.5)
    k = int(np.argmin(np.abs(profile.xi - 0.5)))
    assert fields["alpha"][k] == pytest.approx(state.alpha_t[j], rel=1e-10)
    assert abs(fields["vc2"][k] - state.vc2_t[j]) <= 0.05 * abs(state.vc2_t[j])


def test_instability_indicators(ref1_simulation):
    frame = instability_indicators(ref1_simulation)
    assert list(frame.columns) == ["t", "alpha", "vc1", "vc2", "vw1", "vw2", "R"]
    assert len(frame) == len(ref1_simulation)
    assert frame["alpha"].iloc[0] == pytest.approx(1.0)
    assert frame["R"].iloc[0] == 0.0
    assert np.all(np.isfinite(frame.to_numpy()))


@pytest.mark.slow
def test_reference_run_meets_runtime_budget(ref1_params, ref1_base):
    grid = Grid(400)
    start = time.perf_counter()
    series = simulate(ref1_params, ref1_base, grid, initial_state(ref1_params, ref1_base, grid), t_end=30.0)
    assert time.perf_counter() - start < 60.0
    assert series.dt == pytest.approx(default_time_step(grid, ref1_base))
