"""
Module Harness - Configuration, orchestration des runs et scripts de tracé
"""

from .config import RunConfig, SweepSpec, load_run_config, default_config_dict
from .commands import (
    cmd_basestate,
    cmd_simulate,
    cmd_layer,
    cmd_stability,
    cmd_rates,
    cmd_plotscripts,
    RATE_COLUMNS,
    SWEEP_COLUMNS,
)
from .plotscripts import emit_plot_scripts

__all__ = [
    'RunConfig',
    'SweepSpec',
    'load_run_config',
    'default_config_dict',
    'cmd_basestate',
    'cmd_simulate',
    'cmd_layer',
    'cmd_stability',
    'cmd_rates',
    'cmd_plotscripts',
    'emit_plot_scripts',
    'RATE_COLUMNS',
    'SWEEP_COLUMNS'
]

__version__ = "1.0.0"
__author__ = "Tumour Layers Team"
__description__ = "Orchestration des runs en ligne de commande et persistance des résultats"
