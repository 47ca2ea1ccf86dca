"""
Module Dynamique des Perturbations - Système linéarisé bidimensionnel sur ξ ∈ [0, 1]
Sous-problèmes de vitesse (cellules, eau), intégration RK4 de (α̃, R̃) et rééchantillonnage en coordonnées de couche
"""

import numpy as np
import pandas as pd
from typing import Dict, List, Optional, Sequence, Tuple
from dataclasses import dataclass, field, replace
from functools import lru_cache
from scipy.interpolate import CubicSpline
import logging

from ..tumour_model.constitutive import ModelParameters, eval_dSc_dalpha, eval_Sigma_c, eval_dSigma_c
from ..tumour_model.base_state import BaseState, R_star
from ..tumour_model.errors import DomainError, PreconditionError
from .banded import RadialBands, backward_difference

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

UNDERFLOW = 1e-250
FIELD_NAMES = ("alpha_t", "vc1_t", "vc2_t", "vw1_t", "vw2_t")
MIN_CELLS = 32


@dataclass(frozen=True)
class Grid:
    """Grille uniforme ξ_j = j/n sur [0, 1]"""
    n: int

    def __post_init__(self):
        if self.n < MIN_CELLS:
            raise PreconditionError(f"Grille trop grossière: n={self.n} (n ≥ {MIN_CELLS} requis)")

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n + 1)

    @property
    def midpoints(self) -> np.ndarray:
        return (np.arange(self.n) + 0.5) / self.n


@dataclass
class PerturbationState:
    """Champs complexes de perturbation à un instant donné"""
    t: float
    alpha_t: np.ndarray
    vc1_t: np.ndarray
    vc2_t: np.ndarray
    vw1_t: np.ndarray
    vw2_t: np.ndarray
    R_t: complex
    frozen_fields: Tuple[str, ...] = ()

    def scaled(self, factor: complex) -> "PerturbationState":
        return replace(
            self,
            alpha_t=self.alpha_t * factor,
            vc1_t=self.vc1_t * factor,
            vc2_t=self.vc2_t * factor,
            vw1_t=self.vw1_t * factor,
            vw2_t=self.vw2_t * factor,
            R_t=complex(self.R_t * factor),
        )

    def field(self, name: str) -> np.ndarray:
        if name not in FIELD_NAMES:
            raise ValueError(f"Champ non supporté: {name}")
        return getattr(self, name)


@dataclass(frozen=True)
class CellForcing:
    """Termes sources additionnels (solutions manufacturées) du problème des vitesses cellulaires"""
    f3: np.ndarray
    f4: np.ndarray
    g1: complex = 0.0
    g2: complex = 0.0


@dataclass(frozen=True)
class PerturbationCoefficients:
    """Coefficients constants du système linéarisé évalués à l'état de base"""
    alpha_h: float
    lambda2: float
    kappa: float
    mu_c: float
    lambda_c: float
    mu_hat: float
    dS: float
    Sigma: float
    dSigma: float
    R0: float

    @property
    def N(self) -> float:
        """−Σ_c − α_hΣ_c' + λ_cλ₂"""
        return -self.Sigma - self.alpha_h * self.dSigma + self.lambda_c * self.lambda2

    @property
    def ik(self) -> complex:
        return 1j * self.kappa

    def radius(self, t: float) -> float:
        return float(self.R0 * np.exp(self.lambda2 * t))

    @classmethod
    def from_model(cls, params: ModelParameters, base: BaseState,
                   kappa: Optional[float] = None) -> "PerturbationCoefficients":
        """
        Args:
            params: Paramètres du modèle
            base: État de base retenu
            kappa: Nombre d'onde signé (défaut params.kappa); le signe opposé donne le mode conjugué
        """
        wavenumber = params.kappa if kappa is None else float(kappa)
        if wavenumber == 0.0:
            raise PreconditionError("Nombre d'onde nul: problème non perturbé")
        return cls(
            alpha_h=base.alpha_h,
            lambda2=base.lambda2,
            kappa=wavenumber,
            mu_c=params.mu_c,
            lambda_c=params.lambda_c,
            mu_hat=params.mu_hat_c,
            dS=float(eval_dSc_dalpha(params, base.alpha_h, params.C_inf)),
            Sigma=float(eval_Sigma_c(params, base.alpha_h)),
            dSigma=float(eval_dSigma_c(params, base.alpha_h)),
            R0=base.R0,
        )


@lru_cache(maxsize=32)
def _cell_operator(c: PerturbationCoefficients, grid: Grid) -> RadialBands:
    """Opérateur des vitesses cellulaires, inconnues entrelacées [ṽ_c¹_j, ṽ_c²_j]"""
    n, h, ik = grid.n, grid.h, c.ik
    bands = RadialBands(2 * (n + 1), 4, 4)

    # ṽ_c¹ = ṽ_c² = 0 au centre
    bands.constant.add(0, 0, 1.0)
    bands.constant.add(1, 1, 1.0)

    j = np.arange(1, n)
    row1, row2 = 2 * j, 2 * j + 1
    diff2 = 1.0 / h ** 2
    diff1 = 1.0 / (2.0 * h)

    bands.inverse_square.add(row1, 2 * (j - 1), c.mu_hat * diff2)
    bands.inverse_square.add(row1, 2 * j, -2.0 * c.mu_hat * diff2)
    bands.inverse_square.add(row1, 2 * (j + 1), c.mu_hat * diff2)
    bands.constant.add(row1, 2 * j, -c.mu_c * c.kappa ** 2)
    bands.inverse.add(row1, 2 * (j + 1) + 1, (c.lambda_c + c.mu_c) * ik * diff1)
    bands.inverse.add(row1, 2 * (j - 1) + 1, -(c.lambda_c + c.mu_c) * ik * diff1)

    shear = c.mu_c * c.alpha_h
    bands.inverse_square.add(row2, 2 * (j - 1) + 1, shear * diff2)
    bands.inverse_square.add(row2, 2 * j + 1, -2.0 * shear * diff2)
    bands.inverse_square.add(row2, 2 * (j + 1) + 1, shear * diff2)
    bands.constant.add(row2, 2 * j + 1, -c.alpha_h * c.kappa ** 2 * c.mu_hat)
    bands.inverse.add(row2, 2 * (j + 1), (c.mu_c + c.lambda_c) * c.alpha_h * ik * diff1)
    bands.inverse.add(row2, 2 * (j - 1), -(c.mu_c + c.lambda_c) * c.alpha_h * ik * diff1)

    # Conditions de contrainte au bord libre ξ=1
    back = backward_difference(h)
    stencil = np.array([n, n - 1, n - 2])
    bands.inverse.add(2 * n, 2 * stencil, c.mu_hat * back)
    bands.constant.add(2 * n, 2 * n + 1, c.lambda_c * ik)
    bands.constant.add(2 * n + 1, 2 * n, ik)
    bands.inverse.add(2 * n + 1, 2 * stencil + 1, back)
    return bands


@lru_cache(maxsize=32)
def _water_operator(c: PerturbationCoefficients, grid: Grid) -> RadialBands:
    """Schéma boîte de l'eau: divergence et rotationnel aux milieux des cellules"""
    n, h, ik = grid.n, grid.h, c.ik
    a = c.alpha_h
    water = 1.0 - a
    bands = RadialBands(2 * (n + 1), 2, 2)

    # ṽ_w¹ = 0 au centre
    bands.constant.add(0, 0, 1.0)

    j = np.arange(n)
    div_row = 2 * j + 1
    bands.inverse.add(div_row, 2 * j, -water / h)
    bands.inverse.add(div_row, 2 * (j + 1), water / h)
    bands.constant.add(div_row, 2 * j + 1, 0.5 * water * ik)
    bands.constant.add(div_row, 2 * (j + 1) + 1, 0.5 * water * ik)

    curl_row = 2 * j + 2
    bands.inverse_square.add(curl_row, 2 * j + 1, -a / h)
    bands.inverse_square.add(curl_row, 2 * (j + 1) + 1, a / h)
    bands.inverse.add(curl_row, 2 * j, -0.5 * ik * a)
    bands.inverse.add(curl_row, 2 * (j + 1), -0.5 * ik * a)

    # Condition sur ṽ_w² au bord libre
    bands.constant.add(2 * n + 1, 2 * n + 1, 1.0)
    return bands


def _solve_cell(c: PerturbationCoefficients, grid: Grid, alpha_t: np.ndarray, R_t: complex,
                t: float, forcing: Optional[CellForcing] = None) -> Tuple[np.ndarray, np.ndarray]:
    n, h, ik = grid.n, grid.h, c.ik
    R = c.radius(t)
    alpha_t = np.asarray(alpha_t, dtype=complex)
    rhs = np.zeros(2 * (n + 1), dtype=complex)
    rhs[2:2 * n:2] = c.dSigma * (alpha_t[2:] - alpha_t[:-2]) / (2.0 * h * R)
    rhs[3:2 * n:2] = -c.N * ik * alpha_t[1:n]
    rhs[2 * n] = c.dSigma * alpha_t[n]
    rhs[2 * n + 1] = -2.0 * ik * c.lambda2 * R_t

    if forcing is not None:
        rhs[2:2 * n:2] += np.asarray(forcing.f3)[1:n]
        rhs[3:2 * n:2] += np.asarray(forcing.f4)[1:n]
        rhs[2 * n] += forcing.g1
        rhs[2 * n + 1] += forcing.g2

    solution = _cell_operator(c, grid).solve(rhs, R)
    return solution[0::2].copy(), solution[1::2].copy()


def _solve_water(c: PerturbationCoefficients, grid: Grid, alpha_t: np.ndarray, vc1_t: np.ndarray,
                 vc2_t: np.ndarray, R_t: complex, t: float) -> Tuple[np.ndarray, np.ndarray]:
    n, h, ik = grid.n, grid.h, c.ik
    R = c.radius(t)
    a = c.alpha_h
    water = 1.0 - a
    alpha_t = np.asarray(alpha_t, dtype=complex)

    xi_m = grid.midpoints
    alpha_m = 0.5 * (alpha_t[1:] + alpha_t[:-1])
    dalpha_m = np.diff(alpha_t) / h
    dv1_m = np.diff(vc1_t) / h
    dv2_m = np.diff(vc2_t) / h
    v1_m = 0.5 * (vc1_t[1:] + vc1_t[:-1])
    v2_m = 0.5 * (vc2_t[1:] + vc2_t[:-1])

    rhs = np.zeros(2 * (n + 1), dtype=complex)
    rhs[1:2 * n:2] = -(c.lambda2 / water * (alpha_m + xi_m * dalpha_m) + a / R * dv1_m + a * ik * v2_m)
    rhs[2:2 * n + 1:2] = a / R ** 2 * dv2_m - ik * a / R * v1_m - ik * c.lambda2 * xi_m * alpha_m / water
    rhs[2 * n + 1] = ik * c.lambda2 * R * R_t / water + vc2_t[n]

    solution = _water_operator(c, grid).solve(rhs, R)
    return solution[0::2].copy(), solution[1::2].copy()


def solve_cell_velocities(params: ModelParameters, base: BaseState, grid: Grid, alpha_t: np.ndarray,
                          R_t: complex, t: float, forcing: Optional[CellForcing] = None,
                          kappa: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Résout le problème aux limites couplé pour (ṽ_c¹, ṽ_c²)

    Différences centrées d'ordre 2 à l'intérieur, décentrées d'ordre 2 dans
    les conditions de contrainte en ξ=1, résolution bande directe.

    Args:
        params: Paramètres du modèle
        base: État de base
        grid: Grille en ξ
        alpha_t: α̃ aux nœuds
        R_t: Perturbation du rayon R̃
        t: Temps (fixe R_*(t))
        forcing: Termes sources optionnels
        kappa: Nombre d'onde signé optionnel

    Returns:
        (vc1_t, vc2_t) aux nœuds
    """
    coeffs = PerturbationCoefficients.from_model(params, base, kappa)
    return _solve_cell(coeffs, grid, alpha_t, R_t, t, forcing)


def solve_water_velocities(params: ModelParameters, base: BaseState, grid: Grid, alpha_t: np.ndarray,
                           vc1_t: np.ndarray, vc2_t: np.ndarray, R_t: complex, t: float,
                           kappa: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Reconstruit (ṽ_w¹, ṽ_w²) à partir de la divergence du mélange et de la contrainte de rotationnel

    Returns:
        (vw1_t, vw2_t) aux nœuds
    """
    coeffs = PerturbationCoefficients.from_model(params, base, kappa)
    return _solve_water(coeffs, grid, alpha_t, vc1_t, vc2_t, R_t, t)


def _time_derivative(c: PerturbationCoefficients, grid: Grid, alpha_t: np.ndarray, R_t: complex,
                     t: float) -> Tuple[np.ndarray, complex]:
    vc1, vc2 = _solve_cell(c, grid, alpha_t, R_t, t)
    dvc1 = np.gradient(vc1, grid.h, edge_order=2)
    R = c.radius(t)
    dalpha = (c.dS - c.lambda2) * alpha_t - (c.alpha_h / R) * dvc1 - c.alpha_h * c.ik * vc2
    dR = c.lambda2 * R_t + vc1[-1]
    return dalpha, complex(dR)


def _rk4(c: PerturbationCoefficients, grid: Grid, alpha_t: np.ndarray, R_t: complex,
         t: float, dt: float) -> Tuple[np.ndarray, complex]:
    k1a, k1r = _time_derivative(c, grid, alpha_t, R_t, t)
    k2a, k2r = _time_derivative(c, grid, alpha_t + 0.5 * dt * k1a, R_t + 0.5 * dt * k1r, t + 0.5 * dt)
    k3a, k3r = _time_derivative(c, grid, alpha_t + 0.5 * dt * k2a, R_t + 0.5 * dt * k2r, t + 0.5 * dt)
    k4a, k4r = _time_derivative(c, grid, alpha_t + dt * k3a, R_t + dt * k3r, t + dt)
    alpha_new = alpha_t + dt / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
    R_new = R_t + dt / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
    return alpha_new, complex(R_new)


def _complete_state(c: PerturbationCoefficients, grid: Grid, alpha_t: np.ndarray, R_t: complex,
                    t: float, frozen: Tuple[str, ...] = ()) -> PerturbationState:
    vc1, vc2 = _solve_cell(c, grid, alpha_t, R_t, t)
    vw1, vw2 = _solve_water(c, grid, alpha_t, vc1, vc2, R_t, t)
    state = PerturbationState(t=t, alpha_t=np.asarray(alpha_t, dtype=complex).copy(), vc1_t=vc1, vc2_t=vc2,
                              vw1_t=vw1, vw2_t=vw2, R_t=complex(R_t), frozen_fields=tuple(frozen))
    return _freeze_underflow(state)


def _freeze_underflow(state: PerturbationState) -> PerturbationState:
    frozen = list(state.frozen_fields)
    for name in FIELD_NAMES:
        values = getattr(state, name)
        peak = np.max(np.abs(values))
        if 0.0 < peak < UNDERFLOW:
            setattr(state, name, np.zeros_like(values))
            if name not in frozen:
                frozen.append(name)
                logger.warning(f"Champ {name} gelé à zéro (module max {peak:.3e}) à t={state.t:.4f}")
    state.frozen_fields = tuple(frozen)
    return state


def initial_state(params: ModelParameters, base: BaseState, grid: Grid, kind: str = "sine",
                  t: float = 0.0, kappa: Optional[float] = None) -> PerturbationState:
    """
    Donnée initiale: α̃ = sin(πξ), R̃ = 0 ("sine") ou état nul ("zero"); vitesses recalculées

    Returns:
        État initial cohérent avec les sous-problèmes de vitesse
    """
    if kind == "sine":
        alpha_t = np.sin(np.pi * grid.nodes).astype(complex)
    elif kind == "zero":
        alpha_t = np.zeros(grid.n + 1, dtype=complex)
    else:
        raise ValueError(f"Donnée initiale non supportée: {kind}")
    coeffs = PerturbationCoefficients.from_model(params, base, kappa)
    return _complete_state(coeffs, grid, alpha_t, 0.0j, t)


def step(params: ModelParameters, base: BaseState, grid: Grid, state: PerturbationState, dt: float,
         kappa: Optional[float] = None) -> PerturbationState:
    """
    Un pas de Runge-Kutta classique à 4 étages pour (α̃, R̃)

    Chaque étage re-résout les vitesses cellulaires; les vitesses de l'état
    retourné sont recalculées au nouvel instant.
    """
    if dt <= 0.0:
        raise PreconditionError(f"Pas de temps non positif: dt={dt}")
    coeffs = PerturbationCoefficients.from_model(params, base, kappa)
    alpha_new, R_new = _rk4(coeffs, grid, state.alpha_t, state.R_t, state.t, dt)
    return _complete_state(coeffs, grid, alpha_new, R_new, state.t + dt, state.frozen_fields)


def default_time_step(grid: Grid, base: BaseState) -> float:
    """dt = min(0.01, 0.25·h/max(1, λ₂))"""
    return min(0.01, 0.25 * grid.h / max(1.0, base.lambda2))


class SimulationSeries:
    """Suite ordonnée d'instantanés d'une simulation"""

    def __init__(self, params: ModelParameters, base: BaseState, grid: Grid,
                 states: List[PerturbationState], dt: float, kappa: float):
        self.params = params
        self.base = base
        self.grid = grid
        self.states = states
        self.dt = dt
        self.kappa = kappa

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __getitem__(self, index):
        return self.states[index]

    @property
    def times(self) -> np.ndarray:
        return np.array([state.t for state in self.states])

    @property
    def frozen_fields(self) -> Tuple[str, ...]:
        names: List[str] = []
        for state in self.states:
            names.extend(name for name in state.frozen_fields if name not in names)
        return tuple(names)

    def field(self, name: str) -> np.ndarray:
        """Tableau (n_t, n+1) du champ demandé"""
        return np.array([state.field(name) for state in self.states])

    def radius_perturbation(self) -> np.ndarray:
        return np.array([state.R_t for state in self.states])

    def node_index(self, xi: float) -> int:
        """Indice du nœud le plus proche de ξ"""
        if not 0.0 <= xi <= 1.0:
            raise DomainError(f"Station ξ={xi} hors de [0, 1]")
        return int(round(xi * self.grid.n))

    def at_xi(self, name: str, xi: float) -> np.ndarray:
        return self.field(name)[:, self.node_index(xi)]

    def snapshot_at(self, t: float) -> PerturbationState:
        """Instantané le plus proche de t"""
        index = int(np.argmin(np.abs(self.times - t)))
        return self.states[index]

    def to_long_frame(self, name: str) -> pd.DataFrame:
        """Format long (t, xi, re, im) pour l'export CSV"""
        values = self.field(name)
        n_t, n_x = values.shape
        return pd.DataFrame({
            "t": np.repeat(self.times, n_x),
            "xi": np.tile(self.grid.nodes, n_t),
            "re": values.real.ravel(),
            "im": values.imag.ravel(),
        })

    def radius_frame(self) -> pd.DataFrame:
        values = self.radius_perturbation()
        return pd.DataFrame({"t": self.times, "re": values.real, "im": values.imag})


def _output_indices(n_steps: int, dt: float, t0: float, output_times: Optional[Sequence[float]],
                    output_every: Optional[int]) -> List[int]:
    if output_times is not None:
        indices = sorted({int(round((time - t0) / dt)) for time in output_times})
        if indices and (indices[0] < 0 or indices[-1] > n_steps):
            raise DomainError(f"Instants de sortie hors de la simulation: {list(output_times)}")
        return indices
    every = output_every if output_every is not None else max(1, int(round(0.1 / dt)))
    indices = list(range(0, n_steps + 1, every))
    if indices[-1] != n_steps:
        indices.append(n_steps)
    return indices


def simulate(params: ModelParameters, base: BaseState, grid: Grid, initial: PerturbationState, t_end: float,
             dt: Optional[float] = None, output_times: Optional[Sequence[float]] = None,
             output_every: Optional[int] = None, kappa: Optional[float] = None) -> SimulationSeries:
    """
    Intègre le système linéarisé de initial.t jusqu'à t_end à pas fixe

    Args:
        params: Paramètres du modèle
        base: État de base
        grid: Grille en ξ
        initial: État initial (seuls α̃ et R̃ sont utilisés)
        t_end: Instant final
        dt: Pas de temps (défaut default_time_step)
        output_times: Instants de sortie, ramenés au pas le plus proche
        output_every: Fréquence de sortie en nombre de pas si output_times est absent
        kappa: Nombre d'onde signé optionnel

    Returns:
        SimulationSeries déterministe
    """
    if t_end <= initial.t:
        raise PreconditionError(f"t_end={t_end} doit dépasser l'instant initial {initial.t}")
    requested = default_time_step(grid, base) if dt is None else float(dt)
    if requested <= 0.0:
        raise PreconditionError(f"Pas de temps non positif: dt={requested}")
    span = t_end - initial.t
    n_steps = int(np.ceil(span / requested - 1e-9))
    dt_eff = span / n_steps
    if abs(dt_eff - requested) > 1e-12 * requested:
        logger.info(f"Pas ajusté de {requested} à {dt_eff} pour atteindre t_end={t_end}")

    coeffs = PerturbationCoefficients.from_model(params, base, kappa)
    outputs = set(_output_indices(n_steps, dt_eff, initial.t, output_times, output_every))
    logger.info(f"Simulation: n={grid.n}, kappa={coeffs.kappa}, t_end={t_end}, dt={dt_eff:.4g}, "
                f"{n_steps} pas, {len(outputs)} sorties")

    alpha_t = np.asarray(initial.alpha_t, dtype=complex).copy()
    R_t = complex(initial.R_t)
    frozen: Tuple[str, ...] = ()
    states: List[PerturbationState] = []
    if 0 in outputs:
        states.append(_complete_state(coeffs, grid, alpha_t, R_t, initial.t))

    for k in range(1, n_steps + 1):
        t = initial.t + (k - 1) * dt_eff
        if "alpha_t" not in frozen:
            alpha_t, R_t = _rk4(coeffs, grid, alpha_t, R_t, t, dt_eff)
            peak = np.max(np.abs(alpha_t))
            if 0.0 < peak < UNDERFLOW and abs(R_t) < UNDERFLOW:
                logger.warning(f"Sous-dépassement de α̃ à t={t + dt_eff:.4f}: évolution gelée")
                alpha_t = np.zeros_like(alpha_t)
                R_t = 0.0j
                frozen = ("alpha_t",)
        if k in outputs:
            state = _complete_state(coeffs, grid, alpha_t, R_t, initial.t + k * dt_eff, frozen)
            frozen = state.frozen_fields
            states.append(state)

    return SimulationSeries(params, base, grid, states, dt_eff, coeffs.kappa)


def layer_coordinate_to_xi(base: BaseState, side: str, station: float, t: float) -> float:
    """ξ correspondant à X=(1−ξ)R_*(t) (côté externe) ou x=ξR_*(t) (côté interne)"""
    radius = R_star(base, t)
    if station < 0.0 or station > radius:
        raise DomainError(f"Station {station} hors de [0, R_*(t)={radius:.6g}] à t={t}")
    if side == "outer":
        return 1.0 - station / radius
    if side == "inner":
        return station / radius
    raise ValueError(f"Côté non supporté: {side}")


@dataclass
class LayerSamples:
    """Champs rééchantillonnés à stations fixes de la coordonnée de couche"""
    side: str
    stations: np.ndarray
    times: np.ndarray
    fields: Dict[str, np.ndarray] = field(default_factory=dict)

    def series(self, name: str, station_index: int) -> np.ndarray:
        return self.fields[name][:, station_index]


def sample_layer_coordinates(series: SimulationSeries, side: str, stations: Sequence[float],
                             t_min: Optional[float] = None) -> LayerSamples:
    """
    Interpole (spline cubique) les champs sur des stations fixes X ou x au cours du temps

    Args:
        series: Simulation
        side: "outer" (X=(1−ξ)R_*) ou "inner" (x=ξR_*)
        stations: Stations de la coordonnée de couche
        t_min: Instants antérieurs ignorés

    Returns:
        LayerSamples de forme (n_t, n_stations) par champ
    """
    if len(series) == 0:
        raise PreconditionError("Série de simulation vide")
    stations = np.asarray(stations, dtype=float)
    kept = [state for state in series if t_min is None or state.t >= t_min - 1e-12]
    nodes = series.grid.nodes
    fields = {name: np.zeros((len(kept), len(stations)), dtype=complex) for name in FIELD_NAMES}
    for row, state in enumerate(kept):
        xi = np.array([layer_coordinate_to_xi(series.base, side, s, state.t) for s in stations])
        for name in FIELD_NAMES:
            values = state.field(name)
            fields[name][row] = CubicSpline(nodes, values.real)(xi) + 1j * CubicSpline(nodes, values.imag)(xi)
    return LayerSamples(side=side, stations=stations, times=np.array([s.t for s in kept]), fields=fields)


def layer_gradient_peaks(series: SimulationSeries, t_min: float, t_max: float) -> Tuple[int, int]:
    """
    Localise le maximum du gradient relatif |∂α̃/∂ξ|/max|α̃| sur chaque moitié du domaine

    Returns:
        (indice gauche, indice droit) des nœuds de gradient maximal
    """
    selected = [s for s in series if t_min - 1e-12 <= s.t <= t_max + 1e-12]
    if not selected:
        raise DomainError(f"Aucun instantané dans [{t_min}, {t_max}]")
    envelope = np.zeros(series.grid.n + 1)
    for state in selected:
        peak = np.max(np.abs(state.alpha_t))
        if peak == 0.0:
            continue
        gradient = np.abs(np.gradient(state.alpha_t, series.grid.h, edge_order=2)) / peak
        envelope = np.maximum(envelope, gradient)
    half = series.grid.n // 2
    left = int(np.argmax(envelope[:half + 1]))
    right = half + int(np.argmax(envelope[half:]))
    return left, right


def boundary_residuals(params: ModelParameters, base: BaseState, grid: Grid, state: PerturbationState,
                       kappa: Optional[float] = None) -> Dict[str, float]:
    """
    Résidus directs des conditions aux limites et de la divergence du mélange

    Returns:
        Dictionnaire nom de condition → module du résidu
    """
    c = PerturbationCoefficients.from_model(params, base, kappa)
    n, h, ik = grid.n, grid.h, c.ik
    R = c.radius(state.t)
    back = backward_difference(h)
    tail = slice(n, n - 3, -1)
    dv1_end = np.dot(back, state.vc1_t[tail])
    dv2_end = np.dot(back, state.vc2_t[tail])

    xi_m = grid.midpoints
    a, water = c.alpha_h, 1.0 - c.alpha_h
    alpha_m = 0.5 * (state.alpha_t[1:] + state.alpha_t[:-1])
    divergence = (c.lambda2 / water * (alpha_m + xi_m * np.diff(state.alpha_t) / h)
                  + a / R * np.diff(state.vc1_t) / h + a * ik * 0.5 * (state.vc2_t[1:] + state.vc2_t[:-1])
                  + water / R * np.diff(state.vw1_t) / h
                  + water * ik * 0.5 * (state.vw2_t[1:] + state.vw2_t[:-1]))
    return {
        "vc1_center": float(abs(state.vc1_t[0])),
        "vc2_center": float(abs(state.vc2_t[0])),
        "vw1_center": float(abs(state.vw1_t[0])),
        "normal_stress": float(abs(-c.dSigma * state.alpha_t[n] + c.mu_hat / R * dv1_end
                                   + c.lambda_c * ik * state.vc2_t[n])),
        "tangential_stress": float(abs(ik * (state.vc1_t[n] + 2.0 * c.lambda2 * state.R_t) + dv2_end / R)),
        "water_tangential": float(abs(state.vw2_t[n] - ik * c.lambda2 * R * state.R_t / water - state.vc2_t[n])),
        "mixture_divergence": float(np.max(np.abs(divergence))),
    }
