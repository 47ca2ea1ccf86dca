"""
Module Couches Limites - Problèmes internes près de ξ=1 (externe) et ξ=0 (interne)
Résolution couplée (A, V_c¹, V_c²) puis (V_w¹, V_w²) sur grille tronquée, fermeture de Robin en champ lointain,
résidu de l'équation réduite du troisième ordre et raccordement avec la simulation
"""

import numpy as np
import pandas as pd
from typing import Dict, Optional, Tuple
from dataclasses import dataclass
from scipy.interpolate import CubicSpline
import logging

from ..tumour_model.constitutive import ModelParameters
from ..tumour_model.base_state import BaseState
from ..tumour_model.errors import ClosureUnresolvedError, PreconditionError
from ..perturbation.banded import BandedSystem, backward_difference
from ..perturbation.dynamics import PerturbationCoefficients, LayerSamples
from .outer import AsymptoticRates, compute_rates
from .wkbj import wkbj_exponents

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

MIN_LAYER_NODES = 200
MIN_EXTENT = 20.0
SIDES = ("outer", "inner")


@dataclass
class LayerSolution:
    """Profils de couche normalisés (amplitude linéaire C₁ ou D₁ égale à 1)"""
    side: str
    stations: np.ndarray
    A: np.ndarray
    Vc1: np.ndarray
    Vc2: np.ndarray
    Vw1: np.ndarray
    Vw2: np.ndarray
    matching_amplitude: complex
    x_max: float
    n_layer: int
    kappa: float

    @property
    def h(self) -> float:
        return self.x_max / self.n_layer

    def profile(self, name: str) -> np.ndarray:
        if name not in ("A", "Vc1", "Vc2", "Vw1", "Vw2"):
            raise ValueError(f"Profil non supporté: {name}")
        return getattr(self, name)

    def interpolate(self, name: str, points: np.ndarray) -> np.ndarray:
        values = self.profile(name)
        return CubicSpline(self.stations, values.real)(points) + 1j * CubicSpline(self.stations, values.imag)(points)

    def far_field(self) -> Dict[str, complex]:
        """Valeurs en X_max utilisées pour la vérification du champ lointain"""
        back = backward_difference(self.h)
        tail = slice(self.n_layer, self.n_layer - 3, -1)
        return {
            "A_ratio": complex(self.A[-1] / self.x_max),
            "dA_end": complex(np.dot(back, self.A[tail])),
            "Vc1_end": complex(self.Vc1[-1]),
            "Vc2_slope": complex(np.dot(back, self.Vc2[tail])),
            "Vw1_end": complex(self.Vw1[-1]),
            "Vw2_end": complex(self.Vw2[-1]),
            "Vw2_slope": complex(np.dot(back, self.Vw2[tail])),
        }

    def to_frame(self) -> pd.DataFrame:
        """Format large: coordonnée puis parties réelle et imaginaire de chaque profil"""
        data = {"x": self.stations}
        for name in ("A", "Vc1", "Vc2", "Vw1", "Vw2"):
            values = self.profile(name)
            data[f"{name}_re"] = values.real
            data[f"{name}_im"] = values.imag
        return pd.DataFrame(data)


def _check_layer_inputs(params: ModelParameters, base: BaseState, x_max: Optional[float],
                        n_layer: int) -> float:
    extent = MIN_EXTENT / params.kappa if x_max is None else float(x_max)
    if extent < MIN_EXTENT / params.kappa * (1.0 - 1e-12):
        raise PreconditionError(f"Domaine de couche trop court: x_max={extent} < 20/kappa={MIN_EXTENT / params.kappa}")
    if n_layer < MIN_LAYER_NODES:
        raise PreconditionError(f"Grille de couche trop grossière: n_layer={n_layer} < {MIN_LAYER_NODES}")
    if base.lambda2 <= 0.0:
        raise PreconditionError(f"Couches limites définies pour une base en croissance (λ₂={base.lambda2:.6g})")
    return extent


NODE = 5
_A, _V1, _Q, _V2, _P = range(NODE)


def _box(system: BandedSystem, rows: np.ndarray, j: np.ndarray, h: float, component: int,
         deriv=0.0, mean=0.0) -> None:
    """Ajoute deriv·(u_{j+1}−u_j)/h + mean·(u_j+u_{j+1})/2 pour une composante nodale"""
    system.add(rows, NODE * j + component, -np.asarray(deriv) / h + 0.5 * np.asarray(mean))
    system.add(rows, NODE * (j + 1) + component, np.asarray(deriv) / h + 0.5 * np.asarray(mean))


def _solve_cell_layer(c: PerturbationCoefficients, rates: AsymptoticRates, omega: float, X: np.ndarray,
                      side: str) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Schéma boîte sur le système du premier ordre (A, V_c¹, Q, V_c², P)

    Q = μ̂V_c¹' + σΣ'A − σ(λ_c+μ_c)iκV_c² est régulier en X=0 alors que A
    y contient une composante en X^(5/3); P = V_c²'.

    Returns:
        (A, V_c¹, V_c², V_c²') aux stations
    """
    n = len(X) - 1
    h = X[1] - X[0]
    ik, a, mu_hat = c.ik, c.alpha_h, c.mu_hat
    sign = 1.0 if side == "outer" else -1.0
    shear = c.lambda_c + c.mu_c
    coef_A = c.dS - rates.gamma0 + c.lambda2
    # μ̂V_c¹' = Q − σΣ'A + σ(λ_c+μ_c)iκV_c²
    slope = {_Q: 1.0 / mu_hat, _A: -sign * c.dSigma / mu_hat, _V2: sign * shear * ik / mu_hat}
    system = BandedSystem(NODE * (n + 1), 8, 8)

    j = np.arange(n)
    X_m = 0.5 * (X[j] + X[j + 1])
    rows = 2 + NODE * j

    # Transport de A: coef·A − λ₂XA' + σα_hV_c¹' − α_h iκV_c² = 0
    _box(system, rows, j, h, _A, deriv=-c.lambda2 * X_m, mean=coef_A)
    for component, weight in slope.items():
        _box(system, rows, j, h, component, mean=sign * a * weight)
    _box(system, rows, j, h, _V2, mean=-a * ik)

    _box(system, rows + 1, j, h, _V1, deriv=1.0)
    for component, weight in slope.items():
        _box(system, rows + 1, j, h, component, mean=-weight)

    _box(system, rows + 2, j, h, _Q, deriv=1.0)
    _box(system, rows + 2, j, h, _V1, mean=-c.mu_c * c.kappa ** 2)

    _box(system, rows + 3, j, h, _V2, deriv=1.0)
    _box(system, rows + 3, j, h, _P, mean=-1.0)

    # μ_cα_hP' − α_hκ²μ̂V_c² + N iκA − σ(μ_c+λ_c)α_h iκV_c¹' = 0
    _box(system, rows + 4, j, h, _P, deriv=c.mu_c * a)
    _box(system, rows + 4, j, h, _V2, mean=-a * c.kappa ** 2 * mu_hat)
    _box(system, rows + 4, j, h, _A, mean=c.N * ik)
    for component, weight in slope.items():
        _box(system, rows + 4, j, h, component, mean=-sign * shear * a * ik * weight)

    if side == "outer":
        # −Σ'A − μ̂V_c¹' + λ_c iκV_c² = 0 se réduit à Q + μ_c iκV_c² = 0
        system.add(0, _Q, 1.0)
        system.add(0, _V2, c.mu_c * ik)
        system.add(1, _P, (3.0 * c.lambda2 - rates.gamma0) / ik)
        system.add(1, _V1, rates.gamma0 - c.lambda2)
    else:
        system.add(0, _V1, 1.0)
        system.add(1, _V2, 1.0)

    # Robin en X_max; les écarts de vitesse portent un facteur X de plus que l'écart A − X
    far, row, X_n = NODE * n, 2 + NODE * n, X[n]
    kappa = abs(c.kappa)
    rho = -kappa + omega / X_n
    rho_v = -kappa + (omega + 1.0) / X_n

    # A' tiré de l'équation de transport au dernier nœud
    transport = c.lambda2 * X_n
    system.add(row, far + _A, coef_A / transport - rho)
    for component, weight in slope.items():
        system.add(row, far + component, sign * a * weight / transport)
    system.add(row, far + _V2, -a * ik / transport)
    system.add_rhs(row, 1.0 - rho * X_n)

    # V_c¹ → −σγ₁
    for component, weight in slope.items():
        system.add(row + 1, far + component, weight)
    system.add(row + 1, far + _V1, -rho_v)
    system.add_rhs(row + 1, rho_v * sign * rates.gamma1)

    # V_c² → γ₃X
    system.add(row + 2, far + _P, 1.0)
    system.add(row + 2, far + _V2, -rho_v)
    system.add_rhs(row + 2, rates.gamma3 - rho_v * rates.gamma3 * X_n)

    solution = system.solve()
    return (solution[_A::NODE].copy(), solution[_V1::NODE].copy(), solution[_V2::NODE].copy(),
            solution[_P::NODE].copy())


def _solve_outer_water(c: PerturbationCoefficients, X: np.ndarray, A: np.ndarray, V1: np.ndarray,
                       V2: np.ndarray, dV2: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    n = len(X) - 1
    h = X[1] - X[0]
    ik, a, water = c.ik, c.alpha_h, 1.0 - c.alpha_h
    slope = c.lambda2 * c.R0 / (a * water)
    plateau = c.lambda2 * c.R0 / (ik * a * water ** 2)
    system = BandedSystem(2 * (n + 1), 6, 6)

    system.add(0, 1, 1.0)
    system.add_rhs(0, c.R0 / (2.0 * water) * (dV2[0] - ik * V1[0]))

    j = np.arange(n)
    A_m = 0.5 * (A[j] + A[j + 1])
    dA_m = (A[j + 1] - A[j]) / h
    row = 2 * j + 1
    system.add(row, 2 * j, 1.0 / h)
    system.add(row, 2 * (j + 1), -1.0 / h)
    system.add(row, 2 * j + 1, 0.5 * ik)
    system.add(row, 2 * (j + 1) + 1, 0.5 * ik)
    system.add_rhs(row, c.lambda2 * c.R0 / water ** 2 * dA_m)

    row = 2 * j + 2
    system.add(row, 2 * j + 1, 1.0 / h)
    system.add(row, 2 * (j + 1) + 1, -1.0 / h)
    system.add(row, 2 * j, -0.5 * ik)
    system.add(row, 2 * (j + 1), -0.5 * ik)
    system.add_rhs(row, -ik * slope * A_m)

    kappa = abs(c.kappa)
    back = backward_difference(h)
    system.add(2 * n + 1, 2 * np.array([n, n - 1, n - 2]) + 1, back)
    system.add(2 * n + 1, 2 * n + 1, kappa)
    system.add_rhs(2 * n + 1, kappa * plateau)

    solution = system.solve()
    return solution[0::2].copy(), solution[1::2].copy()


def _solve_inner_water(c: PerturbationCoefficients, constants: Dict[str, complex], x: np.ndarray,
                       A: np.ndarray, V1: np.ndarray, V2: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    n = len(x) - 1
    h = x[1] - x[0]
    ik, a, water = c.ik, c.alpha_h, 1.0 - c.alpha_h
    system = BandedSystem(2 * (n + 1), 6, 6)

    system.add(0, 0, 1.0)

    j = np.arange(n)
    x_m = 0.5 * (x[j] + x[j + 1])
    A_m = 0.5 * (A[j] + A[j + 1])
    dA_m = (A[j + 1] - A[j]) / h
    V1_m = 0.5 * (V1[j] + V1[j + 1])
    V2_m = 0.5 * (V2[j] + V2[j + 1])
    dV1_m = (V1[j + 1] - V1[j]) / h
    dV2_m = (V2[j + 1] - V2[j]) / h

    row = 2 * j + 1
    system.add(row, 2 * j, -water / h)
    system.add(row, 2 * (j + 1), water / h)
    system.add(row, 2 * j + 1, 0.5 * water * ik)
    system.add(row, 2 * (j + 1) + 1, 0.5 * water * ik)
    system.add_rhs(row, -(c.lambda2 / water * (A_m + x_m * dA_m) + a * dV1_m + a * ik * V2_m))

    row = 2 * j + 2
    system.add(row, 2 * j + 1, -a / h)
    system.add(row, 2 * (j + 1) + 1, a / h)
    system.add(row, 2 * j, -0.5 * a * ik)
    system.add(row, 2 * (j + 1), -0.5 * a * ik)
    system.add_rhs(row, -(c.lambda2 * ik * x_m * A_m / water + a * ik * V1_m - a * dV2_m))

    # Robin sur l'écart au mode lointain V_w¹ = βx² + b₀
    beta, b0 = constants["beta"], constants["b0"]
    kappa = abs(c.kappa)
    back = backward_difference(h)
    system.add(2 * n + 1, 2 * np.array([n, n - 1, n - 2]), back)
    system.add(2 * n + 1, 2 * n, kappa)
    system.add_rhs(2 * n + 1, 2.0 * beta * x[n] + kappa * (beta * x[n] ** 2 + b0))

    solution = system.solve()
    return solution[0::2].copy(), solution[1::2].copy()


def inner_far_field_constants(params: ModelParameters, base: BaseState) -> Dict[str, complex]:
    """
    Constantes du mode linéaire exact de la couche interne:
    A=x, V_c¹=γ₁, V_c²=γ₃x, V_w¹=βx²+b₀, V_w²=B₁x

    Returns:
        {"beta": β, "b0": b₀, "B1": B₁}
    """
    rates = compute_rates(params, base)
    a, lambda2, ik = base.alpha_h, base.lambda2, 1j * params.kappa
    beta = lambda2 / (a * (1.0 - a))
    B1 = -(2.0 * lambda2 / (a * (1.0 - a)) + a * ik * rates.gamma3) / ((1.0 - a) * ik)
    b0 = rates.gamma1 + (B1 - rates.gamma3) / ik
    return {"beta": beta, "b0": complex(b0), "B1": complex(B1)}


def _solve_layer(params: ModelParameters, base: BaseState, side: str, x_max: Optional[float],
                 n_layer: int) -> LayerSolution:
    if side not in SIDES:
        raise ValueError(f"Côté non supporté: {side}")
    extent = _check_layer_inputs(params, base, x_max, n_layer)
    logger.info(f"Couche {side}: x_max={extent:.4g}, n_layer={n_layer}")
    coeffs = PerturbationCoefficients.from_model(params, base)
    rates = compute_rates(params, base)
    omega = wkbj_exponents(params)["omega"]
    stations = np.linspace(0.0, extent, n_layer + 1)

    A, V1, V2, dV2 = _solve_cell_layer(coeffs, rates, omega, stations, side)
    if side == "outer":
        Vw1, Vw2 = _solve_outer_water(coeffs, stations, A, V1, V2, dV2)
    else:
        Vw1, Vw2 = _solve_inner_water(coeffs, inner_far_field_constants(params, base), stations, A, V1, V2)

    back = backward_difference(stations[1] - stations[0])
    amplitude = complex(np.dot(back, A[n_layer:n_layer - 3:-1]))
    return LayerSolution(side=side, stations=stations, A=A, Vc1=V1, Vc2=V2, Vw1=Vw1, Vw2=Vw2,
                         matching_amplitude=amplitude, x_max=extent, n_layer=n_layer, kappa=params.kappa)


def solve_outer_layer(params: ModelParameters, base: BaseState, x_max: Optional[float] = None,
                      n_layer: int = 400) -> LayerSolution:
    """
    Couche limite près du bord libre ξ=1 en X=(1−ξ)R_*(t)

    Args:
        params: Paramètres du modèle
        base: État de base en croissance
        x_max: Troncature (défaut 20/κ, minimum 20/κ)
        n_layer: Nombre de cellules (≥ 200)

    Returns:
        LayerSolution normalisée par C₁=1
    """
    return _solve_layer(params, base, "outer", x_max, n_layer)


def solve_inner_layer(params: ModelParameters, base: BaseState, x_max: Optional[float] = None,
                      n_layer: int = 400) -> LayerSolution:
    """Couche limite près du centre ξ=0 en x=ξR_*(t), normalisée par D₁=1"""
    return _solve_layer(params, base, "inner", x_max, n_layer)


def solve_layer(params: ModelParameters, base: BaseState, side: str, x_max: Optional[float] = None,
                n_layer: int = 400) -> LayerSolution:
    return _solve_layer(params, base, side, x_max, n_layer)


def check_closure(params: ModelParameters, base: BaseState, side: str, x_max: Optional[float] = None,
                  n_layer: int = 400, tol: float = 0.01) -> float:
    """
    Vérifie que doubler x_max (même pas) ne modifie pas la solution sur [0, x_max]

    Returns:
        Variation relative maximale en norme infinie

    Raises:
        ClosureUnresolvedError: variation supérieure à tol
    """
    short = solve_layer(params, base, side, x_max, n_layer)
    long = solve_layer(params, base, side, 2.0 * short.x_max, 2 * n_layer)
    change = 0.0
    for name in ("A", "Vc1", "Vc2", "Vw1", "Vw2"):
        reference = short.profile(name)
        extended = long.profile(name)[:n_layer + 1]
        scale = np.max(np.abs(reference))
        if scale > 0.0:
            change = max(change, float(np.max(np.abs(extended - reference)) / scale))
    logger.info(f"Fermeture {side}: variation relative {change:.3e} en doublant x_max")
    if change > tol:
        raise ClosureUnresolvedError(
            f"Fermeture non résolue côté {side}: variation {change:.3e} > {tol} en doublant x_max", change=change
        )
    return change


def a_ode_residual(params: ModelParameters, base: BaseState, stations: np.ndarray, A: np.ndarray,
                   a0: Optional[float] = None, window: Optional[Tuple[float, float]] = None) -> float:
    """
    Résidu relatif discret de l'équation réduite du troisième ordre vérifiée par A:
    λ₂XA‴ + [a₀+λ₂(λ_c/μ̂_c+2)]A″ − λ₂κ²XA′ − κ²(a₀+λ₂)A

    Args:
        params: Paramètres du modèle
        base: État de base
        stations: Grille uniforme
        A: Profil aux stations
        a0: Exposant de raccordement (défaut −2λ₂)
        window: Intervalle de stations sur lequel mesurer le résidu

    Returns:
        max|résidu| / max(somme des modules des termes)
    """
    stations = np.asarray(stations, dtype=float)
    A = np.asarray(A, dtype=complex)
    lambda2, kappa = base.lambda2, params.kappa
    a0 = -2.0 * lambda2 if a0 is None else a0
    h = stations[1] - stations[0]
    j = np.arange(2, len(stations) - 2)
    X = stations[j]
    d1 = (A[j + 1] - A[j - 1]) / (2.0 * h)
    d2 = (A[j + 1] - 2.0 * A[j] + A[j - 1]) / h ** 2
    d3 = (A[j + 2] - 2.0 * A[j + 1] + 2.0 * A[j - 1] - A[j - 2]) / (2.0 * h ** 3)
    terms = np.array([
        lambda2 * X * d3,
        (a0 + lambda2 * (params.lambda_c / params.mu_hat_c + 2.0)) * d2,
        -lambda2 * kappa ** 2 * X * d1,
        -kappa ** 2 * (a0 + lambda2) * A[j],
    ])
    if window is not None:
        mask = (X >= window[0]) & (X <= window[1])
        terms = terms[:, mask]
    residual = np.abs(terms.sum(axis=0))
    scale = np.max(np.abs(terms).sum(axis=0)) if terms.size else 0.0
    return float(np.max(residual) / scale) if scale > 0.0 else 0.0


def matching_amplitude_from_simulation(layer: LayerSolution, samples: LayerSamples, rates: AsymptoticRates,
                                       t: Optional[float] = None) -> complex:
    """
    Amplitude c minimisant |α̃(X,t)e^(−(γ₀−2λ₂)t) − c·A(X)| aux stations échantillonnées

    Returns:
        C₁ (côté externe) ou D₁ (côté interne) mesuré sur la simulation
    """
    index = -1 if t is None else int(np.argmin(np.abs(samples.times - t)))
    time = samples.times[index]
    observed = samples.fields["alpha_t"][index] * np.exp(-(rates.gamma0 - 2.0 * rates.lambda2) * time)
    profile = layer.interpolate("A", samples.stations)
    return complex(np.vdot(profile, observed) / np.vdot(profile, profile))


def layer_time_collapse(samples: LayerSamples, rates: AsymptoticRates,
                        window: Optional[Tuple[float, float]] = None) -> float:
    """
    Dispersion relative maximale de |α̃(X,t)|e^(−(γ₀−2λ₂)t) au cours du temps, par station

    Returns:
        max sur les stations de (max − min)/moyenne
    """
    times = samples.times
    mask = np.ones(len(times), dtype=bool) if window is None else \
        (times >= window[0] - 1e-12) & (times <= window[1] + 1e-12)
    scaled = np.abs(samples.fields["alpha_t"][mask]) * np.exp(-(rates.gamma0 - 2.0 * rates.lambda2) * times[mask])[:, None]
    mean = scaled.mean(axis=0)
    spread = (scaled.max(axis=0) - scaled.min(axis=0)) / np.where(mean > 0.0, mean, 1.0)
    return float(np.max(spread))
