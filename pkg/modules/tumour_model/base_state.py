"""
Module État de Base - Solution homogène en croissance exponentielle
Recherche des racines α_h, taux de croissance λ₂, profils de vitesse et rayon R_*(t)
"""

import numpy as np
from typing import List, Tuple, Union
from dataclasses import dataclass, asdict
from scipy.optimize import brentq
import logging

from .constitutive import ModelParameters, eval_Sc, eval_Sigma_c
from .errors import DomainError, NoRootError

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

POLE_MARGIN = 1e-6
ROOT_TOLERANCE = 1e-12
MAX_SCAN_DOUBLINGS = 4


@dataclass(frozen=True)
class BaseState:
    """Racine admissible de μ̂_c S_c(α, C∞) = αΣ_c(α)"""
    alpha_h: float
    lambda2: float
    residual: float
    branch_id: int
    R0: float = 1.0

    @property
    def growing(self) -> bool:
        return self.lambda2 > 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def base_state_function(params: ModelParameters, alpha: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """f(α) = μ̂_c S_c(α, C∞) − αΣ_c(α)"""
    return params.mu_hat_c * eval_Sc(params, alpha, params.C_inf) - alpha * eval_Sigma_c(params, alpha)


def _polish(params: ModelParameters, low: float, high: float) -> float:
    # Brent: bissection sécurisée + interpolation sécante/quadratique
    root = brentq(lambda a: base_state_function(params, a), low, high,
                  xtol=1e-15, rtol=4.0 * np.finfo(float).eps, maxiter=500)
    return float(root)


def _scan_roots(params: ModelParameters, scan_points: int) -> List[float]:
    grid = np.linspace(params.alpha_min, 1.0 - POLE_MARGIN, scan_points + 1)[1:]
    values = base_state_function(params, grid)

    roots: List[float] = []
    for k in range(len(grid)):
        if values[k] == 0.0:
            roots.append(float(grid[k]))
        elif k + 1 < len(grid) and values[k] * values[k + 1] < 0.0:
            roots.append(_polish(params, float(grid[k]), float(grid[k + 1])))
    return roots


def find_base_states(params: ModelParameters, scan_points: int = 2000) -> List[BaseState]:
    """
    Recherche toutes les racines de f sur (alpha_min, 1−1e−6)

    Le balayage est doublé jusqu'à ce que le nombre de racines ne change plus

    Args:
        params: Paramètres du modèle
        scan_points: Nombre de points du balayage uniforme initial

    Returns:
        Liste des états de base triée par α_h croissant
    """
    logger.info(f"Balayage de l'état de base sur {scan_points} points")
    roots = _scan_roots(params, scan_points)
    for _ in range(MAX_SCAN_DOUBLINGS):
        scan_points *= 2
        refined = _scan_roots(params, scan_points)
        if roots and len(refined) == len(roots):
            break
        if len(refined) != len(roots):
            logger.info(f"Balayage à {scan_points} points: {len(refined)} racine(s) au lieu de {len(roots)}")
        roots = refined

    if not roots:
        raise NoRootError(
            f"Aucun changement de signe de μ̂_c S_c − αΣ_c sur ({params.alpha_min}, {1.0 - POLE_MARGIN})"
        )

    states = []
    for branch_id, alpha_h in enumerate(sorted(roots)):
        sigma = eval_Sigma_c(params, alpha_h)
        lambda2 = sigma / params.mu_hat_c
        residual = abs(base_state_function(params, alpha_h))
        scale = max(1.0, abs(alpha_h * sigma))
        if residual > ROOT_TOLERANCE * scale:
            logger.warning(f"Résidu élevé pour la branche {branch_id}: {residual:.3e}")
        if lambda2 <= 0.0:
            logger.warning(f"Branche {branch_id} sans croissance: alpha_h={alpha_h:.7f}, lambda2={lambda2:.3e}")
        states.append(BaseState(alpha_h=alpha_h, lambda2=lambda2, residual=residual,
                                branch_id=branch_id, R0=params.R0))

    logger.info(f"{len(states)} état(s) de base trouvé(s)")
    return states


def select_branch(states: List[BaseState], branch_id: int) -> BaseState:
    """Sélectionne la branche demandée parmi les racines trouvées"""
    if not 0 <= branch_id < len(states):
        raise DomainError(f"Branche {branch_id} inexistante ({len(states)} racine(s) disponible(s))")
    return states[branch_id]


def R_star(base: BaseState, t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Rayon de base R_*(t) = R₀ e^(λ₂t)"""
    if np.isscalar(t):
        return float(base.R0 * np.exp(base.lambda2 * t))
    return base.R0 * np.exp(base.lambda2 * np.asarray(t, dtype=float))


def base_velocities(base: BaseState, x: float, t: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vitesses de base des deux phases

    Args:
        base: État de base
        x: Abscisse dans [0, R_*(t)]
        t: Temps

    Returns:
        (v_c, v_w) vecteurs à deux composantes
    """
    radius = R_star(base, t)
    if x < 0.0 or x > radius:
        raise DomainError(f"Abscisse {x} hors de [0, R_*(t)={radius}]")
    v_c = np.array([base.lambda2 * x, 0.0])
    v_w = np.array([-base.lambda2 * base.alpha_h * x / (1.0 - base.alpha_h), 0.0])
    return v_c, v_w


def mixture_flux(base: BaseState, x: float, t: float = 0.0) -> float:
    """Flux du mélange α_h v_c¹ + (1−α_h) v_w¹, nul en tout point"""
    v_c, v_w = base_velocities(base, x, t)
    return float(base.alpha_h * v_c[0] + (1.0 - base.alpha_h) * v_w[0])


if __name__ == "__main__":
    for state in find_base_states(ModelParameters()):
        print(f"Branche {state.branch_id}: alpha_h={state.alpha_h:.7f}, lambda2={state.lambda2:.7f}")
