"""
Module Erreurs - Hiérarchie d'exceptions du modèle tumoral
Exceptions typées partagées par le calcul numérique et la ligne de commande
"""

from enum import IntEnum
from typing import Optional
import logging

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


class TumourModelError(Exception):
    """Erreur racine du modèle"""


class DomainError(TumourModelError, ValueError):
    """Argument hors du domaine de définition d'une loi de fermeture"""


class SingularityError(DomainError):
    """Point de rebroussement de |α−α*|^(r−1) en α=α* lorsque r<1"""


class PreconditionError(TumourModelError, ValueError):
    """Précondition d'une opération non satisfaite (λ₂ ≤ 0, κ ≤ 0, grille trop courte...)"""


class NoRootError(TumourModelError, RuntimeError):
    """Aucun changement de signe de la fonction d'état de base"""


class SingularSystemError(TumourModelError, RuntimeError):
    """Système bande numériquement singulier"""

    def __init__(self, message: str, condition: Optional[float] = None):
        super().__init__(message)
        self.condition = condition


class DegenerateWindowError(TumourModelError, ValueError):
    """Fenêtre d'ajustement de taux inexploitable"""


class ClosureUnresolvedError(TumourModelError, RuntimeError):
    """La fermeture en champ lointain dépend encore de X_max"""

    def __init__(self, message: str, change: Optional[float] = None):
        super().__init__(message)
        self.change = change


class SnapshotTooEarlyError(TumourModelError, ValueError):
    """Instantané trop précoce: les couches limites recouvrent l'intérieur"""


class QuadratureError(TumourModelError, RuntimeError):
    """Quadrature adaptative non convergée"""


class ConfigError(TumourModelError, ValueError):
    """Configuration illisible ou invalide"""


class EmptyRunDirectoryError(TumourModelError, ValueError):
    """Répertoire de run sans fichier CSV"""


class ExitCode(IntEnum):
    """Codes de sortie de la ligne de commande"""
    OK = 0
    CONFIG = 3
    NO_ROOT = 4
    SINGULAR_SYSTEM = 5
    DEGENERATE_WINDOW = 6
    CLOSURE_UNRESOLVED = 7
    DOMAIN = 8
    EMPTY_DIRECTORY = 9
    PRECONDITION = 10


# Ordre significatif: les sous-classes avant leurs parentes
_EXIT_CODES = (
    (ConfigError, ExitCode.CONFIG),
    (NoRootError, ExitCode.NO_ROOT),
    (SingularSystemError, ExitCode.SINGULAR_SYSTEM),
    (DegenerateWindowError, ExitCode.DEGENERATE_WINDOW),
    (ClosureUnresolvedError, ExitCode.CLOSURE_UNRESOLVED),
    (EmptyRunDirectoryError, ExitCode.EMPTY_DIRECTORY),
    (PreconditionError, ExitCode.PRECONDITION),
    (SnapshotTooEarlyError, ExitCode.PRECONDITION),
    (QuadratureError, ExitCode.DOMAIN),
    (DomainError, ExitCode.DOMAIN),
)


def exit_code_for(error: BaseException) -> ExitCode:
    """
    Associe une exception du modèle à son code de sortie

    Args:
        error: Exception levée par une commande

    Returns:
        Code de sortie (DOMAIN pour toute autre erreur du modèle)
    """
    for error_type, code in _EXIT_CODES:
        if isinstance(error, error_type):
            return code
    return ExitCode.DOMAIN
