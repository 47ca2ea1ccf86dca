"""
Tests du système linéarisé: solveurs bande, sous-problèmes de vitesse, intégration RK4, coordonnées de couche
"""

from dataclasses import replace

import numpy as np
import pytest

from modules.perturbation import (
    BandedSystem, RadialBands, Grid, PerturbationState, PerturbationCoefficients, CellForcing, SimulationSeries,
    solve_cell_velocities, initial_state, simulate, step, default_time_step, layer_coordinate_to_xi,
    sample_layer_coordinates, layer_gradient_peaks, boundary_residuals, FIELD_NAMES,
)
from modules.tumour_model import DomainError, PreconditionError, SingularSystemError


def _manufactured_error(params, base, n):
    """Erreur max de (ṽ_c¹, ṽ_c²) pour ṽ_c¹ = ξ sin ξ, ṽ_c² = i(1 − cos ξ) à α̃ = 0, R̃ = 0, t = 0"""
    c = PerturbationCoefficients.from_model(params, base)
    grid = Grid(n)
    xi = grid.nodes
    ik, a = c.ik, c.alpha_h
    v1 = xi * np.sin(xi)
    v2 = 1j * (1.0 - np.cos(xi))
    dv1 = np.sin(xi) + xi * np.cos(xi)
    d2v1 = 2.0 * np.cos(xi) - xi * np.sin(xi)
    dv2 = 1j * np.sin(xi)
    d2v2 = 1j * np.cos(xi)
    forcing = CellForcing(
        f3=c.mu_hat * d2v1 + (c.lambda_c + c.mu_c) * ik * dv2 - c.mu_c * c.kappa ** 2 * v1,
        f4=c.mu_c * a * d2v2 + (c.mu_c + c.lambda_c) * a * ik * dv1 - a * c.kappa ** 2 * c.mu_hat * v2,
        g1=c.mu_hat * dv1[-1] + c.lambda_c * ik * v2[-1],
        g2=ik * v1[-1] + dv2[-1],
    )
    zero = np.zeros(n + 1, dtype=complex)
    vc1, vc2 = solve_cell_velocities(params, base, grid, zero, 0.0j, 0.0, forcing=forcing)
    return max(np.max(np.abs(vc1 - v1)), np.max(np.abs(vc2 - v2)))


def test_banded_solve_matches_dense():
    rng = np.random.default_rng(3)
    size = 12
    system = BandedSystem(size, 2, 1)
    for i in range(size):
        system.add(i, i, 6.0 + rng.uniform())
        if i > 0:
            system.add(i, i - 1, rng.uniform() + 1j * rng.uniform())
        if i > 1:
            system.add(i, i - 2, rng.uniform())
        if i + 1 < size:
            system.add(i, i + 1, rng.uniform())
    system.add_rhs(np.arange(size), rng.uniform(size=size))
    dense = system.to_dense()
    expected = np.linalg.solve(dense, system.rhs)
    assert np.allclose(system.solve(), expected, atol=1e-12)


def test_banded_rejects_out_of_band_and_singular():
    system = BandedSystem(4, 1, 1)
    with pytest.raises(ValueError):
        system.add(0, 3, 1.0)
    system.add(np.arange(3), np.arange(3), 1.0)
    system.add_rhs(3, 1.0)
    with pytest.raises(SingularSystemError) as info:
        system.solve()
    assert info.value.condition is not None


def test_grid_requires_minimum_resolution():
    assert Grid(32).h == pytest.approx(1.0 / 32)
    with pytest.raises(PreconditionError):
        Grid(16)


def test_cell_solver_is_second_order(ref1_params, ref1_base):
    errors = [_manufactured_error(ref1_params, ref1_base, n) for n in (64, 128, 256)]
    orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert np.all(orders >= 1.9)


def test_boundary_conditions_hold(ref1_params, ref1_base):
    grid = Grid(64)
    state = initial_state(ref1_params, ref1_base, grid)
    state = step(ref1_params, ref1_base, grid, state, 0.05)
    residuals = boundary_residuals(ref1_params, ref1_base, grid, state)
    scale = max(np.max(np.abs(state.field(name))) for name in FIELD_NAMES)
    for key in ("vc1_center", "vc2_center", "vw1_center"):
        assert residuals[key] <= 1e-12 * scale, key
    for key in ("normal_stress", "tangential_stress", "water_tangential", "mixture_divergence"):
        assert residuals[key] <= 1e-9 * scale, key


def test_zero_initial_state_stays_zero(ref1_params, ref1_base):
    grid = Grid(32)
    series = simulate(ref1_params, ref1_base, grid, initial_state(ref1_params, ref1_base, grid, kind="zero"),
                      t_end=1.0, dt=0.05)
    for name in FIELD_NAMES:
        assert np.all(series.field(name) == 0.0)
    assert np.all(series.radius_perturbation() == 0.0)
    assert series.frozen_fields == ()


def test_evolution_is_linear(ref1_params, ref1_base):
    grid = Grid(32)
    u = initial_state(ref1_params, ref1_base, grid)
    xi = grid.nodes
    w = replace(u, alpha_t=(xi ** 2 * (1.0 - xi)).astype(complex), R_t=0.1 + 0.0j)
    a, b = 2.0 - 1.0j, 0.5
    combined = replace(u, alpha_t=a * u.alpha_t + b * w.alpha_t, R_t=a * u.R_t + b * w.R_t)

    run = dict(t_end=1.0, dt=0.05, output_times=[1.0])
    final_u = simulate(ref1_params, ref1_base, grid, u, **run)[-1]
    final_w = simulate(ref1_params, ref1_base, grid, w, **run)[-1]
    final_c = simulate(ref1_params, ref1_base, grid, combined, **run)[-1]
    for name in FIELD_NAMES:
        expected = a * final_u.field(name) + b * final_w.field(name)
        scale = np.max(np.abs(expected))
        assert np.max(np.abs(final_c.field(name) - expected)) <= 1e-10 * scale, name

    scaled = simulate(ref1_params, ref1_base, grid, u.scaled(3.0), **run)[-1]
    assert np.max(np.abs(scaled.alpha_t - 3.0 * final_u.alpha_t)) <= 1e-10 * np.max(np.abs(final_u.alpha_t))


def test_time_stepping_is_fourth_order(ref1_params, ref1_base):
    grid = Grid(32)
    initial = initial_state(ref1_params, ref1_base, grid)
    finals = [simulate(ref1_params, ref1_base, grid, initial, t_end=1.0, dt=dt, output_times=[1.0])[-1]
              for dt in (0.1, 0.05, 0.025)]
    coarse = np.max(np.abs(finals[0].alpha_t - finals[1].alpha_t))
    fine = np.max(np.abs(finals[1].alpha_t - finals[2].alpha_t))
    assert np.log2(coarse / fine) >= 3.8


def test_conjugate_wavenumber_gives_conjugate_fields(ref1_params, ref1_base):
    grid = Grid(32)
    forward = simulate(ref1_params, ref1_base, grid, initial_state(ref1_params, ref1_base, grid),
                       t_end=1.0, dt=0.05)
    mirrored = simulate(ref1_params, ref1_base, grid,
                        initial_state(ref1_params, ref1_base, grid, kappa=-2.0), t_end=1.0, dt=0.05, kappa=-2.0)
    assert mirrored.kappa == -2.0
    for name in FIELD_NAMES:
        values = forward.field(name)
        scale = max(np.max(np.abs(values)), 1e-300)
        assert np.max(np.abs(mirrored.field(name) - np.conj(values))) <= 1e-12 * scale, name


def test_underflow_freezes_alpha(ref1_params, ref1_base):
    grid = Grid(32)
    tiny = replace(initial_state(ref1_params, ref1_base, grid, kind="zero"),
                   alpha_t=1e-255 * np.sin(np.pi * grid.nodes).astype(complex))
    series = simulate(ref1_params, ref1_base, grid, tiny, t_end=0.2, dt=0.05)
    assert "alpha_t" in series.frozen_fields
    assert np.all(series[-1].alpha_t == 0.0)


def test_time_step_adjustment_and_outputs(ref1_params, ref1_base):
    grid = Grid(32)
    initial = initial_state(ref1_params, ref1_base, grid)
    series = simulate(ref1_params, ref1_base, grid, initial, t_end=1.0, dt=0.3)
    assert series.dt == pytest.approx(0.25)
    assert series.times[-1] == pytest.approx(1.0)
    assert default_time_step(grid, ref1_base) == pytest.approx(0.25 / 32)
    with pytest.raises(PreconditionError):
        simulate(ref1_params, ref1_base, grid, initial, t_end=0.0)


def test_series_accessors_and_long_frame(ref1_simulation):
    series = ref1_simulation
    assert len(series) == 61
    assert series.times[1] - series.times[0] == pytest.approx(0.5)
    assert series.field("alpha_t").shape == (61, 101)
    assert series.node_index(0.5) == 50
    frame = series.to_long_frame("vc2_t")
    assert list(frame.columns) == ["t", "xi", "re", "im"]
    assert len(frame) == 61 * 101
    assert series.snapshot_at(10.2).t == pytest.approx(10.0)
    with pytest.raises(DomainError):
        series.node_index(1.5)


def test_layer_coordinate_conversion(ref1_base):
    outer_xi = layer_coordinate_to_xi(ref1_base, "outer", 2.0, 10.0)
    assert outer_xi == pytest.approx(1.0 - 2.0 * np.exp(-10.0 * ref1_base.lambda2) / ref1_base.R0, rel=1e-12)
    assert outer_xi == pytest.approx(0.1458375, abs=1e-6)
    assert layer_coordinate_to_xi(ref1_base, "inner", 0.5, 0.0) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        layer_coordinate_to_xi(ref1_base, "outer", 2.0, 0.0)


def test_layer_sampling_interpolates_nodes(ref1_simulation):
    samples = sample_layer_coordinates(ref1_simulation, "inner", [0.5, 1.0])
    assert samples.fields["alpha_t"].shape == (61, 2)
    # à t=0, R_*=1 et les stations tombent sur les nœuds ξ=0.5 et ξ=1
    assert samples.series("alpha_t", 0)[0] == pytest.approx(ref1_simulation[0].alpha_t[50], abs=1e-12)
    later = sample_layer_coordinates(ref1_simulation, "outer", [1.0, 2.0], t_min=20.0)
    assert later.times[0] == pytest.approx(20.0)
    assert np.all(np.isfinite(later.fields["vw2_t"]))


def test_gradient_peaks_locate_steep_edges(ref1_params, ref1_base):
    grid = Grid(64)
    xi = grid.nodes
    zero = np.zeros(grid.n + 1, dtype=complex)
    states = []
    for t in (5.0, 10.0, 15.0):
        alpha = (np.tanh(xi / 0.03) * np.tanh((1.0 - xi) / 0.03)).astype(complex)
        states.append(PerturbationState(t=t, alpha_t=alpha, vc1_t=zero, vc2_t=zero, vw1_t=zero, vw2_t=zero, R_t=0j))
    series = SimulationSeries(ref1_params, ref1_base, grid, states, dt=0.05, kappa=2.0)
    left, right = layer_gradient_peaks(series, 5.0, 20.0)
    assert left <= 2
    assert right >= grid.n - 2
    with pytest.raises(DomainError):
        layer_gradient_peaks(series, 40.0, 50.0)


def test_water_radial_velocity_follows_outer_relation(wide_simulation, ref1_base):
    state = wide_simulation.snapshot_at(30.0)
    j = wide_simulation.node_index(0.5)
    a, lambda2 = ref1_base.alpha_h, ref1_base.lambda2
    radius = ref1_base.R0 * np.exp(lambda2 * state.t)
    expected = lambda2 * 0.5 * radius * state.alpha_t[j] / (a * (1.0 - a))
    assert abs(state.vw1_t[j] - expected) <= 0.05 * abs(expected)


def test_gradient_peaks_move_to_the_edges(wide_simulation):
    n = wide_simulation.grid.n
    early_left, early_right = layer_gradient_peaks(wide_simulation, 1.0, 5.0)
    late_left, late_right = layer_gradient_peaks(wide_simulation, 25.0, 30.0)
    assert late_left <= early_left
    assert late_right >= early_right
    assert late_left <= 0.1 * n
    assert late_right >= 0.9 * n


def test_radial_bands_recombine_like_direct_assembly():
    rng = np.random.default_rng(11)
    size, R = 10, 2.5
    bands = RadialBands(size, 1, 1)
    direct = BandedSystem(size, 1, 1)
    rows = np.arange(size)
    parts = ((bands.constant, 1.0), (bands.inverse, 1.0 / R), (bands.inverse_square, 1.0 / R ** 2))
    for part, scale in parts:
        diagonal = rng.uniform(1.0, 2.0, size) + 1j * rng.uniform(size=size)
        lower = rng.uniform(size=size - 1)
        part.add(rows, rows, diagonal)
        part.add(rows[1:], rows[:-1], lower)
        direct.add(rows, rows, diagonal * scale)
        direct.add(rows[1:], rows[:-1], lower * scale)
    rhs = rng.uniform(size=size) + 0j
    direct.add_rhs(rows, rhs)
    assert np.allclose(bands.solve(rhs, R), direct.solve(), atol=1e-12)


def test_cell_solve_reuses_operator_across_radii(ref1_params, ref1_base):
    grid = Grid(64)
    alpha = np.sin(np.pi * grid.nodes).astype(complex)
    first = solve_cell_velocities(ref1_params, ref1_base, grid, alpha, 0.1j, 0.0)
    later = solve_cell_velocities(ref1_params, ref1_base, grid, alpha, 0.1j, 5.0)
    again = solve_cell_velocities(ref1_params, ref1_base, grid, alpha, 0.1j, 0.0)
    assert not np.allclose(first[0], later[0])
    assert np.array_equal(first[0], again[0])
    assert np.array_equal(first[1], again[1])
