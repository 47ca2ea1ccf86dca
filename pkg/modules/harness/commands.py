"""
Module Commandes - Orchestration des runs de la ligne de commande
État de base, simulation, couches limites, stabilité avec balayage, ajustement de taux et scripts de tracé
"""

import os
import time
import numpy as np
import pandas as pd
from typing import Dict, List, Optional, Any, Tuple
from concurrent.futures import ThreadPoolExecutor
import logging

from data_manager import DataManager
from .. import __version__
from ..tumour_model.base_state import BaseState, find_base_states, select_branch
from ..tumour_model.errors import (
    DegenerateWindowError, DomainError, NoRootError, PreconditionError, SnapshotTooEarlyError, ConfigError,
)
from ..perturbation.dynamics import (
    Grid, FIELD_NAMES, initial_state, simulate, sample_layer_coordinates, layer_gradient_peaks,
    boundary_residuals,
)
from ..asymptotics.outer import (
    compute_rates, classify_stability, default_window, fit_rate, outer_profile, instability_indicators,
    RateReport,
)
from ..asymptotics.boundary_layer import (
    solve_layer, check_closure, a_ode_residual, inner_far_field_constants,
)
from ..asymptotics.wkbj import wkbj_exponents, predicted_log_derivative, tail_integral
from .config import RunConfig
from .plotscripts import emit_plot_scripts

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

RATE_COLUMNS = ["field", "location", "t0", "t1", "fitted_rate", "r_squared", "predicted_rate", "rel_err"]
SWEEP_COLUMNS = ["parameter", "value", "alpha_h", "lambda2", "gamma0", "margin", "verdict"]
DETECTION_WINDOW = (5.0, 20.0)
# Fraction de [0, x_max] hors du point singulier X=0 et de la fermeture
INTERIOR = (0.1, 0.9)


def _select_base(config: RunConfig) -> BaseState:
    states = find_base_states(config.params, config.scan_points)
    return select_branch(states, config.branch_id)


def _finish(manager: DataManager, config: RunConfig, base: Optional[BaseState], started: float) -> Dict[str, Any]:
    return manager.write_manifest(config.to_dict(), __version__, None if base is None else base.to_dict(),
                                  time.perf_counter() - started)


def _rates_frame(reports: List[RateReport]) -> pd.DataFrame:
    return pd.DataFrame([report.to_row() for report in reports], columns=RATE_COLUMNS)


def cmd_basestate(config: RunConfig) -> pd.DataFrame:
    """
    Racines de l'état de base exportées dans basestate.csv

    Returns:
        DataFrame (alpha_h, lambda2, residual, branch_id)
    """
    started = time.perf_counter()
    manager = DataManager(config.out_dir)
    states = find_base_states(config.params, config.scan_points)
    frame = pd.DataFrame([{"alpha_h": s.alpha_h, "lambda2": s.lambda2, "residual": s.residual,
                           "branch_id": s.branch_id} for s in states])
    manager.save_frame(frame, "basestate.csv")
    _finish(manager, config, None, started)
    return frame


def _layer_station_reports(series, config: RunConfig, rates, window) -> List[RateReport]:
    reports = []
    base = series.base
    for side, key in (("outer", "X"), ("inner", "x")):
        stations = config.rate_stations.get(key) or []
        if not stations:
            continue
        reachable = float(np.log(max(stations) / base.R0) / base.lambda2) if max(stations) > base.R0 else 0.0
        t_min = max(reachable, window[0] if window else series.times[0] + 0.5 * (series.times[-1] - series.times[0]))
        samples = sample_layer_coordinates(series, side, stations, t_min=t_min)
        predicted = rates.layer_decay(side)["alpha"]
        for k, station in enumerate(stations):
            try:
                reports.append(fit_rate(samples.times, samples.series("alpha_t", k), window,
                                        predicted_rate=predicted, field="alpha", location=f"{key}={station:g}"))
            except DegenerateWindowError as exc:
                logger.warning(f"Taux de couche non ajusté ({key}={station:g}): {exc}")
    return reports


def cmd_simulate(config: RunConfig) -> Dict[str, Any]:
    """
    Simulation complète: champs (format long), R̃, indicateurs, taux ajustés, rapport et manifeste

    Returns:
        Résumé du run (taux, constantes de raccordement, pics de gradient)
    """
    started = time.perf_counter()
    manager = DataManager(config.out_dir)
    params = config.params
    base = _select_base(config)
    grid = Grid(config.grid_n)
    initial = initial_state(params, base, grid, config.initial)
    series = simulate(params, base, grid, initial, config.t_end, config.dt, config.output_times,
                      config.output_every)

    for name in FIELD_NAMES:
        manager.save_frame(series.to_long_frame(name), f"{name[:-2]}.csv")
    manager.save_frame(series.radius_frame(), "R.csv")
    manager.save_frame(instability_indicators(series), "indicators.csv")

    rates = compute_rates(params, base)
    reports: List[RateReport] = []
    if config.initial == "zero":
        logger.warning("Donnée initiale nulle: aucun taux ajusté")
    else:
        for name in FIELD_NAMES:
            key = name[:-2]
            for xi in config.rate_stations.get("xi", []):
                try:
                    reports.append(fit_rate(series.times, series.at_xi(name, xi), config.rate_window,
                                            predicted_rate=rates.outer_rates[key], field=key,
                                            location=f"xi={xi:g}"))
                except DegenerateWindowError as exc:
                    logger.warning(f"Taux non ajusté pour {key} en xi={xi:g}: {exc}")
        reports.extend(_layer_station_reports(series, config, rates, config.rate_window))
    manager.save_frame(_rates_frame(reports), "rates.csv")

    summary: Dict[str, Any] = {
        "gamma0": rates.gamma0,
        "margin": rates.margin,
        "outer_rates": rates.outer_rates,
        "frozen_fields": list(series.frozen_fields),
        "boundary_residuals": boundary_residuals(params, base, grid, series[-1]),
        "dt": series.dt,
    }
    try:
        profile = outer_profile(series, rates, series.times[-1])
        summary.update({"C1": profile.C1, "D1": profile.D1, "profile_t": profile.t})
    except SnapshotTooEarlyError as exc:
        logger.warning(f"Profil externe indisponible: {exc}")
    if series.times[-1] >= DETECTION_WINDOW[1] and np.any(series.field("alpha_t")):
        left, right = layer_gradient_peaks(series, *DETECTION_WINDOW)
        summary["gradient_peaks"] = {"left": left, "right": right, "n": grid.n}
    manager.save_report(summary, "simulate_report.json")
    _finish(manager, config, base, started)
    summary["rates"] = [report.to_row() for report in reports]
    return summary


def _log_derivative(stations: np.ndarray, deviation: np.ndarray, index: int) -> float:
    h = stations[1] - stations[0]
    slope = (deviation[index + 1] - deviation[index - 1]) / (2.0 * h)
    return float(np.real(slope / deviation[index]))


def cmd_layer(config: RunConfig, side: str) -> Dict[str, Any]:
    """
    Couche limite d'un côté: profils CSV et rapport de champ lointain

    Returns:
        Rapport (ω, rapports de champ lointain, fermeture, résidu de l'équation réduite, intégrale de queue)
    """
    started = time.perf_counter()
    manager = DataManager(config.out_dir)
    params = config.params
    base = _select_base(config)
    layer = solve_layer(params, base, side, config.x_max, config.n_layer)
    closure_change = check_closure(params, base, side, config.x_max, config.n_layer)
    rates = compute_rates(params, base)
    omega = wkbj_exponents(params)["omega"]

    check_index = int(0.75 * layer.n_layer)
    X_check = float(layer.stations[check_index])
    far = layer.far_field()
    a = base.alpha_h
    report: Dict[str, Any] = {
        "side": side,
        "omega": omega,
        "x_max": layer.x_max,
        "n_layer": layer.n_layer,
        "matching_amplitude": layer.matching_amplitude,
        "A_ratio": far["A_ratio"],
        "Vc1_end": far["Vc1_end"],
        "Vc1_expected": -rates.gamma1 if side == "outer" else rates.gamma1,
        "closure_change": closure_change,
        "a_ode_residual": a_ode_residual(params, base, layer.stations, layer.A,
                                         window=(INTERIOR[0] * layer.x_max, INTERIOR[1] * layer.x_max)),
        "log_derivative": _log_derivative(layer.stations, layer.A - layer.stations, check_index),
        "log_derivative_expected": predicted_log_derivative(params, X_check),
        "log_derivative_station": X_check,
    }
    tail = tail_integral(0.5 * layer.x_max, 2.0 * omega, params.kappa, 4)
    report["tail_integral"] = {"X": 0.5 * layer.x_max, "eta": 2.0 * omega, "expansion": tail.expansion,
                               "quadrature": tail.quadrature, "rel_err": tail.rel_err}
    if side == "outer":
        report["Vw2_end"] = far["Vw2_end"]
        report["Vw2_expected"] = base.lambda2 * base.R0 / (1j * params.kappa * a * (1.0 - a) ** 2)
    else:
        constants = inner_far_field_constants(params, base)
        report["Vw1_ratio"] = far["Vw1_end"] / layer.x_max ** 2
        report["Vw1_ratio_expected"] = constants["beta"]
        report["Vw2_slope"] = far["Vw2_slope"]
        report["B1"] = constants["B1"]
        report["center_values"] = {"Vc1": abs(layer.Vc1[0]), "Vc2": abs(layer.Vc2[0]), "Vw1": abs(layer.Vw1[0])}

    manager.save_frame(layer.to_frame(), f"layer_{side}.csv")
    manager.save_report(report, f"layer_{side}_report.json")
    _finish(manager, config, base, started)
    return report


def _sweep_point(config: RunConfig, value: float) -> Dict[str, Any]:
    name = config.sweep.name
    row = {"parameter": name, "value": value, "alpha_h": np.nan, "lambda2": np.nan, "gamma0": np.nan,
           "margin": np.nan, "verdict": "no base state"}
    try:
        params = config.params.with_changes(**{name: value})
        base = select_branch(find_base_states(params, config.scan_points), config.branch_id)
    except (NoRootError, DomainError) as exc:
        logger.warning(f"Point de balayage {name}={value:g} sans état de base: {exc}")
        return row
    row.update({"alpha_h": base.alpha_h, "lambda2": base.lambda2})
    try:
        verdict = classify_stability(params, base)
        row.update({"gamma0": compute_rates(params, base).gamma0, "margin": verdict.margin,
                    "verdict": verdict.verdict})
    except PreconditionError:
        row["verdict"] = "criterion inapplicable"
    return row


def cmd_stability(config: RunConfig) -> Any:
    """
    Marge γ₀−λ₂ et verdict; avec balayage, tableau ordonné des points calculés en parallèle

    Returns:
        Dictionnaire du verdict ou DataFrame du balayage
    """
    started = time.perf_counter()
    manager = DataManager(config.out_dir)
    if config.sweep is None:
        base = _select_base(config)
        verdict = classify_stability(config.params, base)
        report = {"margin": verdict.margin, "verdict": verdict.verdict, "exponents": list(verdict.exponents),
                  "alpha_h": base.alpha_h, "lambda2": base.lambda2}
        manager.save_report(report, "stability.json")
        _finish(manager, config, base, started)
        return report

    values = config.sweep.values()
    logger.info(f"Balayage {config.sweep.name}: {len(values)} points sur {config.workers} worker(s)")
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        rows = list(pool.map(lambda value: _sweep_point(config, value), values))
    frame = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
    manager.save_frame(frame, "sweep.csv")
    _finish(manager, config, None, started)
    return frame


def _field_series(frame: pd.DataFrame, xi: float) -> Tuple[float, np.ndarray, np.ndarray]:
    nodes = np.sort(frame["xi"].unique())
    node = float(nodes[np.argmin(np.abs(nodes - xi))])
    selected = frame[frame["xi"] == node].sort_values("t")
    return node, selected["t"].to_numpy(), (selected["re"] + 1j * selected["im"]).to_numpy()


def _station_window(config: RunConfig, times: np.ndarray, values: np.ndarray,
                    override: Tuple[Optional[float], Optional[float]]) -> Tuple[float, float]:
    """Fenêtre d'ajustement: bornes de la ligne de commande, sinon configuration, sinon seconde moitié"""
    fallback = config.rate_window or default_window(times, values)
    t0, t1 = override
    return (fallback[0] if t0 is None else float(t0), fallback[1] if t1 is None else float(t1))


def cmd_rates(config: RunConfig, in_file: str, t0: Optional[float] = None, t1: Optional[float] = None) -> pd.DataFrame:
    """
    Ajuste les taux d'un fichier de champ (format long) aux stations ξ de la configuration

    Returns:
        DataFrame au format du fichier de taux
    """
    started = time.perf_counter()
    if not os.path.exists(in_file):
        raise ConfigError(f"Fichier de champ introuvable: {in_file}")
    frame = pd.read_csv(in_file)
    missing = {"t", "xi", "re", "im"} - set(frame.columns)
    if missing:
        raise ConfigError(f"Colonnes manquantes dans {in_file}: {', '.join(sorted(missing))}")

    field = os.path.splitext(os.path.basename(in_file))[0]
    base = _select_base(config)
    rates = compute_rates(config.params, base)
    predicted = rates.outer_rates.get(field)
    override = (t0, t1)

    manager = DataManager(config.out_dir)
    reports = []
    for xi in config.rate_stations.get("xi", []):
        node, times, values = _field_series(frame, xi)
        window = _station_window(config, times, values, override)
        reports.append(fit_rate(times, values, window, predicted_rate=predicted, field=field,
                                location=f"xi={node:g}"))
    result = _rates_frame(reports)
    manager.save_frame(result, f"rates_{field}.csv")
    _finish(manager, config, base, started)
    return result


def cmd_plotscripts(run_dir: str) -> List[str]:
    """Scripts plotly pour les CSV d'un répertoire de run"""
    return emit_plot_scripts(run_dir)
