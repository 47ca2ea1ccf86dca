"""
Module Perturbation - Dynamique linéarisée des perturbations bidimensionnelles
Assemblage bande, sous-problèmes de vitesse, intégration temporelle et coordonnées de couche
"""

from .banded import BandedSystem, RadialBands, backward_difference
from .dynamics import (
    Grid,
    PerturbationState,
    PerturbationCoefficients,
    CellForcing,
    SimulationSeries,
    LayerSamples,
    solve_cell_velocities,
    solve_water_velocities,
    initial_state,
    step,
    simulate,
    default_time_step,
    layer_coordinate_to_xi,
    sample_layer_coordinates,
    layer_gradient_peaks,
    boundary_residuals,
    FIELD_NAMES,
)

__all__ = [
    'BandedSystem',
    'RadialBands',
    'backward_difference',
    'Grid',
    'PerturbationState',
    'PerturbationCoefficients',
    'CellForcing',
    'SimulationSeries',
    'LayerSamples',
    'solve_cell_velocities',
    'solve_water_velocities',
    'initial_state',
    'step',
    'simulate',
    'default_time_step',
    'layer_coordinate_to_xi',
    'sample_layer_coordinates',
    'layer_gradient_peaks',
    'boundary_residuals',
    'FIELD_NAMES'
]

__version__ = "1.0.0"
__author__ = "Tumour Layers Team"
__description__ = "Évolution du système linéarisé des perturbations sur le domaine fixe ξ ∈ [0, 1]"
