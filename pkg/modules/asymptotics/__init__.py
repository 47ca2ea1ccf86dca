"""
Module Asymptotics - Solution externe, couches limites et analyse WKBJ
Taux prédits, critère d'instabilité, problèmes de couche et raccordement avec la simulation
"""

from .outer import (
    AsymptoticRates,
    RateReport,
    StabilityVerdict,
    OuterProfile,
    compute_rates,
    margin_from_identity,
    classify_stability,
    default_window,
    fit_rate,
    fit_series_rates,
    outer_profile,
    predict_outer_fields,
    instability_indicators,
)
from .boundary_layer import (
    LayerSolution,
    solve_outer_layer,
    solve_inner_layer,
    solve_layer,
    check_closure,
    a_ode_residual,
    inner_far_field_constants,
    matching_amplitude_from_simulation,
    layer_time_collapse,
)
from .wkbj import TailIntegralResult, wkbj_exponents, predicted_log_derivative, tail_integral

__all__ = [
    'AsymptoticRates',
    'RateReport',
    'StabilityVerdict',
    'OuterProfile',
    'compute_rates',
    'margin_from_identity',
    'classify_stability',
    'default_window',
    'fit_rate',
    'fit_series_rates',
    'outer_profile',
    'predict_outer_fields',
    'instability_indicators',
    'LayerSolution',
    'solve_outer_layer',
    'solve_inner_layer',
    'solve_layer',
    'check_closure',
    'a_ode_residual',
    'inner_far_field_constants',
    'matching_amplitude_from_simulation',
    'layer_time_collapse',
    'TailIntegralResult',
    'wkbj_exponents',
    'predicted_log_derivative',
    'tail_integral'
]

__version__ = "1.0.0"
__author__ = "Tumour Layers Team"
__description__ = "Asymptotique externe, couches limites et vérification WKBJ"
