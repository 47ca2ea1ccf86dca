"""
Module WKBJ - Structure en champ lointain des couches limites
Exposant ω des modes X^ω e^(±κX) et développement asymptotique de l'intégrale de queue
"""

import math
import warnings
import numpy as np
from typing import Dict, Any
from dataclasses import dataclass
from scipy.integrate import quad, IntegrationWarning
import logging

from ..tumour_model.constitutive import ModelParameters
from ..tumour_model.errors import DomainError, QuadratureError

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TailIntegralResult:
    expansion: float
    quadrature: float
    rel_err: float


def wkbj_exponents(params: ModelParameters) -> Dict[str, Any]:
    """
    Exposant algébrique des modes exponentiels de l'équation réduite de couche

    Returns:
        {"omega": ω = −(1+λ_c/μ̂_c)/2, "modes": description des trois modes}
    """
    omega = -(1.0 + params.lambda_c / params.mu_hat_c) / 2.0
    return {
        "omega": omega,
        "modes": [
            "C1·X (mode linéaire raccordé à la solution externe)",
            f"C2·X^{omega:.6g}·exp(+{params.kappa:g}X) (croissant, écarté)",
            f"C3·X^{omega:.6g}·exp(-{params.kappa:g}X) (décroissant)",
        ],
    }


def predicted_log_derivative(params: ModelParameters, X: float) -> float:
    """Dérivée logarithmique −κ + ω/X du mode décroissant"""
    return -params.kappa + wkbj_exponents(params)["omega"] / X


def tail_integral(X: float, eta: float, kappa: float, n_terms: int = 4) -> TailIntegralResult:
    """
    Compare le développement par intégrations par parties successives de ∫ e^(−2κs) s^η ds
    à une quadrature adaptative de −∫_X^∞ e^(−2κs) s^η ds

    Args:
        X: Borne (X > 0)
        eta: Exposant η
        kappa: Nombre d'onde
        n_terms: Nombre de termes du développement (1 à 4)

    Returns:
        TailIntegralResult(expansion, quadrature, rel_err)
    """
    if X <= 0.0:
        raise DomainError(f"Borne non positive: X={X}")
    if not 1 <= n_terms <= 4:
        raise DomainError(f"Nombre de termes non supporté: {n_terms} (1 à 4)")
    if kappa <= 0.0:
        raise DomainError(f"Nombre d'onde non positif: kappa={kappa}")

    z = 2.0 * kappa * X
    series = 0.0
    falling = 1.0
    for m in range(n_terms):
        series += falling / z ** m
        falling *= eta - m

    # Forme réduite: ∫_X^∞ e^(−2κs)s^η ds = X^η e^(−2κX) ∫_0^∞ e^(−2κu)(1+u/X)^η du
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            reduced, _ = quad(lambda u: math.exp(-2.0 * kappa * u) * (1.0 + u / X) ** eta,
                              0.0, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)
        except IntegrationWarning as exc:
            raise QuadratureError(f"Quadrature non convergée (X={X}, eta={eta}): {exc}") from exc

    prefactor = X ** eta * math.exp(-2.0 * kappa * X)
    rel_err = abs(series / (2.0 * kappa) - reduced) / abs(reduced)
    return TailIntegralResult(
        expansion=-prefactor * series / (2.0 * kappa),
        quadrature=-prefactor * reduced,
        rel_err=float(rel_err),
    )
