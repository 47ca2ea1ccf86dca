"""
Tests des couches limites externe et interne, de la fermeture en champ lointain et du raccordement
"""

import numpy as np
import pytest

from modules.tumour_model import ModelParameters, find_base_states, PreconditionError, ClosureUnresolvedError
from modules.perturbation import sample_layer_coordinates
from modules.asymptotics import (
    solve_outer_layer, solve_inner_layer, solve_layer, check_closure, a_ode_residual, inner_far_field_constants,
    matching_amplitude_from_simulation, layer_time_collapse, outer_profile, predicted_log_derivative, fit_rate,
)

# κx = 2, 3, 4 pour κ=8
INNER_STATIONS = [0.25, 0.375, 0.5]


@pytest.fixture(scope="module")
def outer_layer(ref1_params, ref1_base):
    return solve_outer_layer(ref1_params, ref1_base)


@pytest.fixture(scope="module")
def inner_layer(ref1_params, ref1_base):
    return solve_inner_layer(ref1_params, ref1_base)


def test_outer_far_field(outer_layer, ref1_base, ref1_rates):
    assert outer_layer.x_max == pytest.approx(10.0)
    far = outer_layer.far_field()
    assert abs(far["A_ratio"] - 1.0) <= 0.02
    assert abs(far["Vc1_end"] + ref1_rates.gamma1) <= 0.05 * abs(ref1_rates.gamma1)
    a = ref1_base.alpha_h
    plateau = ref1_base.lambda2 * ref1_base.R0 / (2j * a * (1.0 - a) ** 2)
    assert abs(far["Vw2_end"] - plateau) <= 0.05 * abs(plateau)
    assert outer_layer.matching_amplitude == pytest.approx(1.0, abs=1e-6)


def test_inner_far_field(inner_layer, ref1_params, ref1_base, ref1_rates):
    far = inner_layer.far_field()
    assert abs(far["A_ratio"] - 1.0) <= 0.02
    assert abs(far["Vc1_end"] - ref1_rates.gamma1) <= 0.05 * abs(ref1_rates.gamma1)
    beta = inner_far_field_constants(ref1_params, ref1_base)["beta"]
    assert beta == pytest.approx(ref1_base.lambda2 / (ref1_base.alpha_h * (1.0 - ref1_base.alpha_h)))
    assert abs(far["Vw1_end"] / inner_layer.x_max ** 2 - beta) <= 0.05 * beta


def test_inner_center_conditions(inner_layer):
    scale = max(np.max(np.abs(inner_layer.profile(name))) for name in ("Vc1", "Vc2", "Vw1"))
    for name in ("Vc1", "Vc2", "Vw1"):
        assert abs(inner_layer.profile(name)[0]) <= 1e-12 * scale, name


@pytest.mark.parametrize("side", ["outer", "inner"])
def test_far_field_closure_is_resolved(ref1_params, ref1_base, side):
    assert check_closure(ref1_params, ref1_base, side) <= 0.01


def test_closure_failure_is_reported(ref1_params, ref1_base):
    with pytest.raises(ClosureUnresolvedError) as info:
        check_closure(ref1_params, ref1_base, "outer", tol=0.0)
    assert info.value.change is not None


def test_reduced_equation_residual(outer_layer, ref1_params, ref1_base):
    residual = a_ode_residual(ref1_params, ref1_base, outer_layer.stations, outer_layer.A,
                              window=(1.0, 9.0))
    assert residual <= 1e-3


def test_linear_mode_solves_reduced_equation(ref1_params, ref1_base):
    X = np.linspace(0.0, 10.0, 401)
    assert a_ode_residual(ref1_params, ref1_base, X, X.astype(complex)) <= 1e-9


def test_decaying_mode_log_derivative(outer_layer, ref1_params):
    index = int(0.75 * outer_layer.n_layer)
    X = outer_layer.stations
    deviation = outer_layer.A - X
    slope = (deviation[index + 1] - deviation[index - 1]) / (2.0 * outer_layer.h)
    observed = np.real(slope / deviation[index])
    expected = predicted_log_derivative(ref1_params, X[index])
    assert observed == pytest.approx(expected, rel=0.05)


def test_layer_refinement_converges(ref1_params, ref1_base):
    layers = [solve_outer_layer(ref1_params, ref1_base, n_layer=n) for n in (200, 400, 800)]
    window = layers[0].stations >= 0.1 * layers[0].x_max
    coarse, fine = 0.0, 0.0
    for name in ("A", "Vc1", "Vc2"):
        profiles = [layer.profile(name)[::step] for layer, step in zip(layers, (1, 2, 4))]
        coarse = max(coarse, np.max(np.abs(profiles[0] - profiles[1])[window]))
        fine = max(fine, np.max(np.abs(profiles[1] - profiles[2])[window]))
    assert np.log2(coarse / fine) >= 1.9


def test_layer_refinement_near_singular_point(ref1_params, ref1_base):
    # la composante X^(5/3) de A borne l'ordre en norme max au voisinage de X=0
    profiles = [solve_outer_layer(ref1_params, ref1_base, n_layer=n).A for n in (200, 400, 800)]
    coarse = np.max(np.abs(profiles[0] - profiles[1][::2]))
    fine = np.max(np.abs(profiles[1] - profiles[2][::2]))
    assert np.log2(coarse / fine) >= 1.5


def test_layer_preconditions(ref1_params, ref1_base):
    with pytest.raises(PreconditionError):
        solve_outer_layer(ref1_params, ref1_base, x_max=5.0)
    with pytest.raises(PreconditionError):
        solve_outer_layer(ref1_params, ref1_base, n_layer=100)
    with pytest.raises(ValueError):
        solve_layer(ref1_params, ref1_base, "middle")
    params = ModelParameters(s2=0.25)
    flat = [s for s in find_base_states(params) if abs(s.alpha_h - 0.5) < 1e-9][0]
    with pytest.raises(PreconditionError):
        solve_outer_layer(params, flat)


def test_layer_frame_columns(outer_layer):
    frame = outer_layer.to_frame()
    assert list(frame.columns) == ["x", "A_re", "A_im", "Vc1_re", "Vc1_im", "Vc2_re", "Vc2_im",
                                   "Vw1_re", "Vw1_im", "Vw2_re", "Vw2_im"]
    assert len(frame) == outer_layer.n_layer + 1


def test_inner_matching_amplitude(wide_params, ref1_base, wide_simulation, wide_rates):
    layer = solve_inner_layer(wide_params, ref1_base)
    samples = sample_layer_coordinates(wide_simulation, "inner", INNER_STATIONS, t_min=25.0)
    measured = matching_amplitude_from_simulation(layer, samples, wide_rates)
    profile = outer_profile(wide_simulation, wide_rates, 30.0)
    assert abs(measured - profile.D1) <= 0.1 * abs(profile.D1)


def test_inner_layer_fields_collapse_in_time(wide_simulation, wide_rates):
    samples = sample_layer_coordinates(wide_simulation, "inner", INNER_STATIONS, t_min=24.0)
    assert layer_time_collapse(samples, wide_rates, window=(24.0, 30.0)) <= 0.1


def test_outer_layer_is_carried_by_boundary_displacement(wide_simulation, wide_rates):
    # près de ξ=1 la famille portée par R̃ masque la décroissance e^((γ₀−2λ₂)t) du mode de couche
    samples = sample_layer_coordinates(wide_simulation, "outer", [0.5], t_min=24.0)
    assert layer_time_collapse(samples, wide_rates, window=(24.0, 30.0)) > 1.0
    displacement = fit_rate(wide_simulation.times, wide_simulation.radius_perturbation(), window=(24.0, 30.0))
    edge = fit_rate(samples.times, samples.series("alpha_t", 0), window=(24.0, 30.0))
    assert edge.fitted_rate == pytest.approx(displacement.fitted_rate, rel=0.1)
