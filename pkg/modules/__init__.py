"""
Modules du modèle biphasique de croissance tumorale
Modèle constitutif, perturbations linéarisées, asymptotique et orchestration des runs
"""

__version__ = "1.0.0"
