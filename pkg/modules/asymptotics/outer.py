"""
Module Solution Externe - Taux de décroissance asymptotiques et critère d'instabilité
Évaluation de γ₀, γ₁, γ₃, classification de stabilité et ajustement empirique des taux simulés
"""

import numpy as np
import pandas as pd
from typing import Dict, List, Optional, Sequence, Tuple
from dataclasses import dataclass, asdict
from sklearn.linear_model import LinearRegression
from sklearn.metrics import r2_score
import logging

from ..tumour_model.constitutive import ModelParameters, eval_dSc_dalpha, eval_Sigma_c, eval_dSigma_c
from ..tumour_model.base_state import BaseState, R_star
from ..tumour_model.errors import DegenerateWindowError, PreconditionError, SnapshotTooEarlyError
from ..perturbation.dynamics import SimulationSeries, FIELD_NAMES, UNDERFLOW

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

MIN_SAMPLES = 10
EXCLUSION_LAYERS = 5.0
MATCHING_WINDOW = 0.25
MIN_WINDOW_NODES = 4


@dataclass(frozen=True)
class AsymptoticRates:
    """Exposants de la solution externe et des couches limites"""
    gamma0: float
    gamma1: float
    gamma3: complex
    lambda2: float
    kappa: float
    outer_rates: Dict[str, float]
    layer_rates: Dict[str, float]
    margin: float

    def layer_decay(self, side: str) -> Dict[str, float]:
        """Taux absolus des champs de couche: e^((γ₀−2λ₂)t) pour α̃, ṽ_c, e^((γ₀−λ₂)t) pour ṽ_w côté externe"""
        cell = self.gamma0 - 2.0 * self.lambda2
        water = self.gamma0 - self.lambda2 if side == "outer" else cell
        return {"alpha": cell, "vc1": cell, "vc2": cell, "vw1": water, "vw2": water}


@dataclass
class RateReport:
    """Taux exponentiel ajusté sur une fenêtre temporelle"""
    field: str
    location: str
    t0: float
    t1: float
    fitted_rate: float
    r_squared: float
    predicted_rate: Optional[float] = None
    rel_err: Optional[float] = None

    def to_row(self) -> Dict[str, object]:
        return asdict(self)


@dataclass
class StabilityVerdict:
    margin: float
    verdict: str
    exponents: Tuple[float, float, float]


@dataclass
class OuterProfile:
    """Profil externe ᾱ(ξ) = α̃(ξ,t)e^(−(γ₀−λ₂)t) et constantes de raccordement"""
    t: float
    xi: np.ndarray
    alpha_bar: np.ndarray
    exclusion_width: float
    slope_at_zero: complex
    slope_at_one: complex
    C1: complex
    D1: complex
    linearity_at_zero: float
    linearity_at_one: float


def compute_rates(params: ModelParameters, base: BaseState) -> AsymptoticRates:
    """
    Évalue les formules fermées de la solution externe

    Args:
        params: Paramètres du modèle
        base: État de base

    Returns:
        AsymptoticRates (γ₀, γ₁, γ₃, taux par champ, marge γ₀−λ₂)
    """
    alpha_h, lambda2 = base.alpha_h, base.lambda2
    mu_hat, mu_c, lambda_c, kappa = params.mu_hat_c, params.mu_c, params.lambda_c, params.kappa
    dS = float(eval_dSc_dalpha(params, alpha_h, params.C_inf))
    sigma = float(eval_Sigma_c(params, alpha_h))
    dsigma = float(eval_dSigma_c(params, alpha_h))
    N = -sigma - alpha_h * dsigma + lambda_c * lambda2

    gamma0 = dS - alpha_h * dsigma / mu_hat + lambda2 * (lambda_c / mu_hat - 1.0)
    gamma1 = -dsigma / (mu_c * kappa ** 2) - (lambda_c + mu_c) * N / (mu_c * kappa ** 2 * mu_hat * alpha_h)
    gamma3 = complex(-N / (mu_hat * alpha_h * 1j * kappa))

    a0 = -2.0 * lambda2
    outer_rates = {
        "alpha": gamma0 - lambda2,
        "vc1": gamma0 - 2.0 * lambda2,
        "vc2": gamma0 - lambda2,
        "vw1": gamma0,
        "vw2": gamma0 - lambda2,
    }
    layer_rates = {"a0": a0, "a1": a0, "a2": a0, "b1": a0 + lambda2, "b2": a0 + lambda2}
    return AsymptoticRates(gamma0=gamma0, gamma1=gamma1, gamma3=gamma3, lambda2=lambda2, kappa=kappa,
                           outer_rates=outer_rates, layer_rates=layer_rates, margin=gamma0 - lambda2)


def margin_from_identity(params: ModelParameters, base: BaseState) -> float:
    """
    Marge γ₀−λ₂ réécrite avec ∂S_c/∂α = λ₂ − α_h s₀C∞/(1+s₁C∞) (valable si s₃=s₄=0)
    """
    if params.s3 != 0.0 or params.s4 != 0.0:
        raise PreconditionError("Identité de marge valable uniquement pour s3 = s4 = 0")
    dsigma = float(eval_dSigma_c(params, base.alpha_h))
    return (-base.alpha_h * params.birth_factor - base.alpha_h * dsigma / params.mu_hat_c
            + base.lambda2 * (params.lambda_c / params.mu_hat_c - 1.0))


def classify_stability(params: ModelParameters, base: BaseState) -> StabilityVerdict:
    """
    Critère d'instabilité bidimensionnelle d'un état de base en croissance: γ₀−λ₂ > 0

    Returns:
        StabilityVerdict (stable, unstable ou marginal)
    """
    if base.lambda2 <= 0.0:
        raise PreconditionError(f"Critère établi pour λ₂ > 0 uniquement (λ₂={base.lambda2:.6g})")
    rates = compute_rates(params, base)
    margin = rates.margin
    if margin > 0.0:
        verdict = "unstable"
    elif margin < 0.0:
        verdict = "stable"
    else:
        verdict = "marginal"
    exponents = (rates.gamma0 - base.lambda2, rates.gamma0 - 2.0 * base.lambda2, rates.gamma0 - 3.0 * base.lambda2)
    return StabilityVerdict(margin=margin, verdict=verdict, exponents=exponents)


def default_window(times: np.ndarray, values: np.ndarray) -> Tuple[float, float]:
    """Seconde moitié de l'intervalle simulé, tronquée au premier sous-dépassement"""
    times = np.asarray(times, dtype=float)
    t0 = times[0] + 0.5 * (times[-1] - times[0])
    usable = np.abs(values) > UNDERFLOW
    t1 = times[-1]
    if not np.all(usable):
        first_bad = int(np.argmin(usable))
        t1 = times[max(first_bad - 1, 0)]
    return float(t0), float(t1)


def fit_rate(times: Sequence[float], values: Sequence[complex], window: Optional[Tuple[float, float]] = None,
             predicted_rate: Optional[float] = None, field: str = "", location: str = "") -> RateReport:
    """
    Pente des moindres carrés de log|valeur| en fonction du temps

    Args:
        times: Instants
        values: Valeurs complexes (la phase est ignorée)
        window: Fenêtre (t0, t1), par défaut la seconde moitié
        predicted_rate: Taux théorique pour l'erreur relative
        field: Nom du champ
        location: Étiquette de la station

    Returns:
        RateReport
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=complex)
    t0, t1 = default_window(times, values) if window is None else window
    mask = (times >= t0 - 1e-12) & (times <= t1 + 1e-12)
    selected_t, moduli = times[mask], np.abs(values[mask])
    if len(selected_t) < MIN_SAMPLES:
        raise DegenerateWindowError(f"Fenêtre [{t0}, {t1}] avec {len(selected_t)} échantillons (< {MIN_SAMPLES})")
    if np.any(moduli <= UNDERFLOW):
        raise DegenerateWindowError(f"Valeurs sous-dépassées dans la fenêtre [{t0}, {t1}] ({field} {location})")
    if predicted_rate and (t1 - t0) < 5.0 / abs(predicted_rate):
        logger.warning(f"Fenêtre courte pour {field} {location}: {t1 - t0:.3g} < 5/|taux|={5.0 / abs(predicted_rate):.3g}")

    X = selected_t.reshape(-1, 1)
    y = np.log(moduli)
    model = LinearRegression().fit(X, y)
    fitted = float(model.coef_[0])
    r_squared = float(np.clip(r2_score(y, model.predict(X)), 0.0, 1.0))

    rel_err = None
    if predicted_rate is not None:
        rel_err = abs(fitted - predicted_rate) / abs(predicted_rate) if predicted_rate != 0.0 else abs(fitted)
    return RateReport(field=field, location=location, t0=float(t0), t1=float(t1), fitted_rate=fitted,
                      r_squared=r_squared, predicted_rate=predicted_rate, rel_err=rel_err)


def fit_series_rates(series: SimulationSeries, rates: AsymptoticRates, stations: Sequence[float],
                     window: Optional[Tuple[float, float]] = None) -> List[RateReport]:
    """Ajuste le taux de chaque champ aux stations ξ données et le compare aux exposants externes"""
    reports = []
    for name in FIELD_NAMES:
        key = name[:-2]
        for xi in stations:
            values = series.at_xi(name, xi)
            reports.append(fit_rate(series.times, values, window, predicted_rate=rates.outer_rates[key],
                                    field=key, location=f"xi={xi:g}"))
    return reports


def _endpoint_fit(s: np.ndarray, values: np.ndarray) -> Tuple[complex, float]:
    # Extrapolation polynomiale sans terme constant: la pente en s=0 est le premier coefficient
    basis = np.column_stack([s, s ** 2, s ** 3]).astype(complex)
    coefficients = np.linalg.lstsq(basis, values, rcond=None)[0]
    linear = np.vdot(s, values) / np.dot(s, s)
    residual = values - linear * s
    spread = values - values.mean()
    total = float(np.real(np.vdot(spread, spread)))
    linearity = 1.0 - float(np.real(np.vdot(residual, residual))) / total if total > 0.0 else 1.0
    return complex(coefficients[0]), float(np.clip(linearity, 0.0, 1.0))


def outer_profile(series: SimulationSeries, rates: AsymptoticRates, t_snapshot: float) -> OuterProfile:
    """
    Profil externe et pentes extrapolées aux extrémités

    Les nœuds à moins de 5 épaisseurs de couche 1/(κR_*(t)) d'une extrémité sont exclus;
    les pentes sont extrapolées vers ξ=0 et ξ=1 depuis une fenêtre adjacente à la zone exclue.

    Args:
        series: Simulation
        rates: Exposants asymptotiques
        t_snapshot: Instant visé (instantané le plus proche)

    Returns:
        OuterProfile
    """
    state = series.snapshot_at(t_snapshot)
    radius = R_star(series.base, state.t)
    width = EXCLUSION_LAYERS / (abs(rates.kappa) * radius)
    span = min(MATCHING_WINDOW, 0.5 - width)
    nodes = series.grid.nodes
    h = series.grid.h
    if span * series.grid.n < MIN_WINDOW_NODES:
        raise SnapshotTooEarlyError(
            f"Instantané t={state.t:.3g} trop précoce: zone d'exclusion {width:.3g} recouvre l'intérieur"
        )

    alpha_bar = state.alpha_t * np.exp(-(rates.gamma0 - rates.lambda2) * state.t)
    interior = (nodes >= width - 1e-12) & (nodes <= 1.0 - width + 1e-12)

    left = (nodes >= width - 1e-12) & (nodes <= width + span + 1e-12)
    right = (nodes <= 1.0 - width + 1e-12) & (nodes >= 1.0 - width - span - 1e-12)
    if left.sum() < MIN_WINDOW_NODES or right.sum() < MIN_WINDOW_NODES:
        raise SnapshotTooEarlyError(f"Fenêtre de raccordement trop courte à t={state.t:.3g} (h={h:.3g})")

    slope_zero, linear_zero = _endpoint_fit(nodes[left], alpha_bar[left])
    slope_s, linear_one = _endpoint_fit(1.0 - nodes[right], alpha_bar[right])
    slope_one = -slope_s
    R0 = series.base.R0
    return OuterProfile(
        t=state.t,
        xi=nodes[interior],
        alpha_bar=alpha_bar[interior],
        exclusion_width=width,
        slope_at_zero=slope_zero,
        slope_at_one=slope_one,
        C1=-slope_one / R0,
        D1=slope_zero / R0,
        linearity_at_zero=linear_zero,
        linearity_at_one=linear_one,
    )


def predict_outer_fields(params: ModelParameters, base: BaseState, rates: AsymptoticRates,
                         alpha_bar: np.ndarray, xi: np.ndarray, t: float) -> Dict[str, np.ndarray]:
    """
    Champs externes d'ordre dominant reconstruits depuis ᾱ(ξ)

    Returns:
        Dictionnaire alpha, vc1, vc2, vw1, vw2
    """
    alpha_bar = np.asarray(alpha_bar, dtype=complex)
    xi = np.asarray(xi, dtype=float)
    a, lambda2, R0, ik = base.alpha_h, base.lambda2, base.R0, 1j * params.kappa
    slope = np.gradient(alpha_bar, xi, edge_order=2)
    growth = np.exp((rates.gamma0 - lambda2) * t)
    return {
        "alpha": growth * alpha_bar,
        "vc1": rates.gamma1 / R0 * np.exp((rates.gamma0 - 2.0 * lambda2) * t) * slope,
        "vc2": rates.gamma3 * growth * alpha_bar,
        "vw1": lambda2 * R0 / (a * (1.0 - a)) * np.exp(rates.gamma0 * t) * xi * alpha_bar,
        "vw2": -growth * (lambda2 / (ik * a * (1.0 - a) ** 2) * (alpha_bar + xi * slope)
                          + a * rates.gamma3 / (1.0 - a) * alpha_bar),
    }


def instability_indicators(series: SimulationSeries) -> pd.DataFrame:
    """
    Grandeurs dont le caractère non borné définit l'instabilité de l'état de base en croissance

    Returns:
        DataFrame indexé par instant: max|α̃|, max|ṽ|e^(−λ₂t) par composante, |R̃|e^(−λ₂t)
    """
    lambda2 = series.base.lambda2
    rows = []
    for state in series:
        damping = np.exp(-lambda2 * state.t)
        row = {"t": state.t, "alpha": float(np.max(np.abs(state.alpha_t)))}
        for name in FIELD_NAMES[1:]:
            row[name[:-2]] = float(np.max(np.abs(state.field(name)))) * damping
        row["R"] = abs(state.R_t) * damping
        rows.append(row)
    return pd.DataFrame(rows)
