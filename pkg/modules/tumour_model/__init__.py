"""
Module Tumour Model - Modèle biphasique de croissance tumorale avasculaire
Lois constitutives, état de base homogène et hiérarchie d'erreurs
"""

from .constitutive import (
    ModelParameters,
    eval_Sc,
    eval_dSc_dalpha,
    eval_Sigma_c,
    eval_dSigma_c,
    eval_k,
    eval_Qc,
)
from .base_state import (
    BaseState,
    base_state_function,
    find_base_states,
    select_branch,
    base_velocities,
    mixture_flux,
    R_star,
)
from .errors import (
    TumourModelError,
    DomainError,
    SingularityError,
    PreconditionError,
    NoRootError,
    SingularSystemError,
    DegenerateWindowError,
    ClosureUnresolvedError,
    SnapshotTooEarlyError,
    QuadratureError,
    ConfigError,
    EmptyRunDirectoryError,
    ExitCode,
    exit_code_for,
)

__all__ = [
    'ModelParameters',
    'eval_Sc',
    'eval_dSc_dalpha',
    'eval_Sigma_c',
    'eval_dSigma_c',
    'eval_k',
    'eval_Qc',
    'BaseState',
    'base_state_function',
    'find_base_states',
    'select_branch',
    'base_velocities',
    'mixture_flux',
    'R_star',
    'TumourModelError',
    'DomainError',
    'SingularityError',
    'PreconditionError',
    'NoRootError',
    'SingularSystemError',
    'DegenerateWindowError',
    'ClosureUnresolvedError',
    'SnapshotTooEarlyError',
    'QuadratureError',
    'ConfigError',
    'EmptyRunDirectoryError',
    'ExitCode',
    'exit_code_for'
]

__version__ = "1.0.0"
__author__ = "Tumour Layers Team"
__description__ = "Lois constitutives et état de base du modèle biphasique de tumeur avasculaire"
