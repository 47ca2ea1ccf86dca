"""
Module Constitutif - Lois de fermeture du mélange cellules/eau
Taux de naissance net S_c, pression excédentaire Σ_c, traînée k, consommation Q_c et dérivées analytiques
"""

import numpy as np
from typing import Dict, Any, Optional, Union
from dataclasses import dataclass, asdict, fields, replace
import logging

from .errors import DomainError, SingularityError, PreconditionError, ConfigError

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class ModelParameters:
    """Constantes constitutives et géométriques du modèle biphasique"""
    s0: float = 1.0
    s1: float = 1.0
    s2: float = 0.05
    s3: float = 0.0
    s4: float = 0.0
    Sigma_hat: float = 0.3
    r: float = 1.0
    q: float = 1.0
    alpha_star: float = 0.5
    alpha_min: float = 0.2
    mu_c: float = 1.0
    lambda_c: float = 1.0
    mu_hat_c: Optional[float] = None
    k0: float = 0.0
    Q0: float = 0.0
    Q1: float = 0.0
    C_inf: float = 1.0
    R0: float = 1.0
    kappa: float = 2.0

    def __post_init__(self):
        if self.mu_hat_c is None:
            # Viscosité composite 1-D par défaut
            object.__setattr__(self, "mu_hat_c", self.lambda_c + 2.0 * self.mu_c)
        self._validate()

    def _validate(self):
        if not 0.0 < self.alpha_min < self.alpha_star < 1.0:
            raise DomainError(
                f"Seuils invalides: il faut 0 < alpha_min < alpha_star < 1 "
                f"(alpha_min={self.alpha_min}, alpha_star={self.alpha_star})"
            )
        for name in ("s0", "s1", "s2", "s3", "s4", "k0", "Q0", "Q1"):
            if getattr(self, name) < 0.0:
                raise DomainError(f"Coefficient {name} négatif: {getattr(self, name)}")
        for name in ("mu_c", "lambda_c", "mu_hat_c", "Sigma_hat", "r", "q", "C_inf", "R0"):
            if getattr(self, name) <= 0.0:
                raise DomainError(f"Paramètre {name} doit être strictement positif: {getattr(self, name)}")
        if self.kappa <= 0.0:
            raise PreconditionError(f"Nombre d'onde non supporté: kappa={self.kappa} (kappa > 0 requis)")

    @property
    def birth_factor(self) -> float:
        """s₀C∞/(1+s₁C∞), facteur logistique évalué au bord"""
        return self.s0 * self.C_inf / (1.0 + self.s1 * self.C_inf)

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)

    def with_changes(self, **changes) -> "ModelParameters":
        """Copie modifiée; mu_hat_c reste celui de l'instance sauf s'il est fourni"""
        return replace(self, **changes)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ModelParameters":
        """
        Construit les paramètres depuis un dictionnaire de configuration

        Args:
            data: Clés snake_case des paramètres

        Returns:
            ModelParameters validés
        """
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"Paramètres inconnus: {', '.join(unknown)}")
        try:
            values = {key: (None if value is None else float(value)) for key, value in data.items()}
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"Valeur de paramètre non numérique: {exc}") from exc
        return cls(**values)


def _check_alpha(alpha: np.ndarray, low_open: bool = False, high_open: bool = False, name: str = "alpha"):
    low_bad = alpha <= 0.0 if low_open else alpha < 0.0
    high_bad = alpha >= 1.0 if high_open else alpha > 1.0
    if np.any(low_bad | high_bad | ~np.isfinite(alpha)):
        raise DomainError(f"{name} hors du domaine de définition: {alpha}")


def _output(value: np.ndarray, scalar: bool) -> ArrayLike:
    return float(value) if scalar else value


def eval_Sc(params: ModelParameters, alpha: ArrayLike, C: ArrayLike) -> ArrayLike:
    """
    Taux de naissance net des cellules

    S_c = (s₀C/(1+s₁C))α(1−α) − ((s₂+s₃C)/(1+s₄C))α

    Args:
        params: Paramètres du modèle
        alpha: Fraction volumique cellulaire dans [0, 1]
        C: Concentration en nutriment, positive

    Returns:
        Valeur de S_c (scalaire si les entrées le sont)
    """
    scalar = np.isscalar(alpha) and np.isscalar(C)
    a = np.asarray(alpha, dtype=float)
    c = np.asarray(C, dtype=float)
    _check_alpha(a)
    if np.any(c < 0.0):
        raise DomainError(f"Concentration négative: {C}")
    birth = params.s0 * c / (1.0 + params.s1 * c)
    death = (params.s2 + params.s3 * c) / (1.0 + params.s4 * c)
    return _output(birth * a * (1.0 - a) - death * a, scalar)


def eval_dSc_dalpha(params: ModelParameters, alpha: ArrayLike, C: ArrayLike) -> ArrayLike:
    """Dérivée analytique ∂S_c/∂α = (s₀C/(1+s₁C))(1−2α) − (s₂+s₃C)/(1+s₄C)"""
    scalar = np.isscalar(alpha) and np.isscalar(C)
    a = np.asarray(alpha, dtype=float)
    c = np.asarray(C, dtype=float)
    _check_alpha(a)
    if np.any(c < 0.0):
        raise DomainError(f"Concentration négative: {C}")
    birth = params.s0 * c / (1.0 + params.s1 * c)
    death = (params.s2 + params.s3 * c) / (1.0 + params.s4 * c)
    return _output(birth * (1.0 - 2.0 * a) - death, scalar)


def eval_Sigma_c(params: ModelParameters, alpha: ArrayLike) -> ArrayLike:
    """
    Pression excédentaire de la phase cellulaire

    Σ_c = Σ̂|α−α*|^(r−1)(α−α*)(1−α)^(−q) H(α−α_min), avec H(0)=0

    Args:
        params: Paramètres du modèle
        alpha: Fraction volumique dans [0, 1)

    Returns:
        Valeur de Σ_c
    """
    scalar = np.isscalar(alpha)
    a = np.asarray(alpha, dtype=float)
    _check_alpha(a, high_open=True)
    d = a - params.alpha_star
    # |d|^(r−1)·d écrit sign(d)|d|^r: nul en α* même pour r<1
    stressed = a > params.alpha_min
    value = np.where(
        stressed,
        params.Sigma_hat * np.sign(d) * np.abs(d) ** params.r * (1.0 - a) ** (-params.q),
        0.0,
    )
    return _output(value, scalar)


def eval_dSigma_c(params: ModelParameters, alpha: ArrayLike) -> ArrayLike:
    """
    Dérivée analytique de Σ_c sur la branche régulière (α_min, 1)

    Args:
        params: Paramètres du modèle
        alpha: Fraction volumique dans (alpha_min, 1)

    Returns:
        Σ_c'(α)
    """
    scalar = np.isscalar(alpha)
    a = np.asarray(alpha, dtype=float)
    if np.any((a <= params.alpha_min) | (a >= 1.0) | ~np.isfinite(a)):
        raise DomainError(f"Dérivée de Σ_c définie sur (alpha_min, 1) uniquement: {alpha}")
    d = a - params.alpha_star
    if params.r < 1.0 and np.any(d == 0.0):
        raise SingularityError(
            f"Dérivée singulière en alpha_star={params.alpha_star} pour r={params.r} < 1"
        )
    one_minus = 1.0 - a
    abs_d = np.abs(d)
    value = params.Sigma_hat * (
        params.r * abs_d ** (params.r - 1.0) * one_minus ** (-params.q)
        + np.sign(d) * abs_d ** params.r * params.q * one_minus ** (-params.q - 1.0)
    )
    return _output(value, scalar)


def eval_k(params: ModelParameters, alpha: ArrayLike) -> ArrayLike:
    """Coefficient de traînée k = k₀α(1−α)"""
    scalar = np.isscalar(alpha)
    a = np.asarray(alpha, dtype=float)
    _check_alpha(a)
    return _output(params.k0 * a * (1.0 - a), scalar)


def eval_Qc(params: ModelParameters, alpha: ArrayLike, C: ArrayLike) -> ArrayLike:
    """Consommation de nutriment Q_c = Q₀Cα/(1+Q₁C)"""
    scalar = np.isscalar(alpha) and np.isscalar(C)
    a = np.asarray(alpha, dtype=float)
    c = np.asarray(C, dtype=float)
    _check_alpha(a)
    if np.any(c < 0.0):
        raise DomainError(f"Concentration négative: {C}")
    return _output(params.Q0 * c * a / (1.0 + params.Q1 * c), scalar)


if __name__ == "__main__":
    ref = ModelParameters()
    print(f"S_c(0.5, 1) = {eval_Sc(ref, 0.5, 1.0):.6f}")
    print(f"Σ_c'(0.7298438) = {eval_dSigma_c(ref, 0.7298438):.6f}")
