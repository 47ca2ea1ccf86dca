"""
Fixtures partagées des tests: jeux de référence REF1/REF2, simulations REF1 de session (κ=2 et κ=8)
et marqueur `slow` pour les vérifications de durée
"""

import os
import sys
from dataclasses import replace

import pytest

# Ajouter le répertoire du projet au path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from modules.tumour_model import ModelParameters, find_base_states
from modules.perturbation import Grid, initial_state, simulate
from modules.asymptotics import compute_rates
from utils.data_adapter import get_reference_parameters

# Nombre d'onde assez grand pour que la famille du bord libre quitte l'intérieur avant t=24
WIDE_KAPPA = 8.0


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: simulation de référence complète (plusieurs dizaines de secondes)")


@pytest.fixture(scope="session")
def ref1_params():
    return ModelParameters.from_dict(get_reference_parameters("REF1"))


@pytest.fixture(scope="session")
def ref2_params():
    return ModelParameters.from_dict(get_reference_parameters("REF2"))


@pytest.fixture(scope="session")
def ref1_base(ref1_params):
    return find_base_states(ref1_params)[0]


@pytest.fixture(scope="session")
def ref2_base(ref2_params):
    return find_base_states(ref2_params)[0]


@pytest.fixture(scope="session")
def ref1_rates(ref1_params, ref1_base):
    return compute_rates(ref1_params, ref1_base)


@pytest.fixture(scope="session")
def ref1_simulation(ref1_params, ref1_base):
    """REF1, κ=2, n=100, dt=0.05, t_end=30, sorties toutes les 0.5"""
    grid = Grid(100)
    initial = initial_state(ref1_params, ref1_base, grid)
    return simulate(ref1_params, ref1_base, grid, initial, t_end=30.0, dt=0.05, output_every=10)


@pytest.fixture(scope="session")
def wide_params(ref1_params):
    return replace(ref1_params, kappa=WIDE_KAPPA)


@pytest.fixture(scope="session")
def wide_rates(wide_params, ref1_base):
    return compute_rates(wide_params, ref1_base)


@pytest.fixture(scope="session")
def wide_simulation(wide_params, ref1_base):
    """REF1, κ=8, n=400, dt=0.05, t_end=30, sorties toutes les 0.1"""
    grid = Grid(400)
    initial = initial_state(wide_params, ref1_base, grid)
    return simulate(wide_params, ref1_base, grid, initial, t_end=30.0, dt=0.05, output_every=2)
