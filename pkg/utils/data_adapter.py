"""
Adaptateur de données pour les jeux de paramètres de référence et l'accès tolérant aux configurations
"""
from typing import Any, Dict


def get_reference_parameters(name: str = "REF1") -> Dict[str, float]:
    """
    Récupère un jeu de paramètres de référence

    Args:
        name: Nom du jeu ('REF1' ou 'REF2')

    Returns:
        dict: Paramètres constitutifs et géométriques
    """
    # REF1: cas limite sans consommation ni traînée, κ=2
    reference_sets = {
        'REF1': {
            's0': 1.0, 's1': 1.0, 's2': 0.05, 's3': 0.0, 's4': 0.0,
            'Sigma_hat': 0.3, 'r': 1.0, 'q': 1.0, 'alpha_star': 0.5, 'alpha_min': 0.2,
            'mu_c': 1.0, 'lambda_c': 1.0, 'mu_hat_c': 3.0,
            'k0': 0.0, 'Q0': 0.0, 'Q1': 0.0, 'C_inf': 1.0, 'R0': 1.0, 'kappa': 2.0
        },
    }
    reference_sets['REF2'] = dict(reference_sets['REF1'], Sigma_hat=0.1)

    key = name.upper()
    if key not in reference_sets:
        raise ValueError(f"Jeu de paramètres non supporté: {name}")
    return dict(reference_sets[key])


def safe_get(data: Dict[str, Any], *keys: str, default: Any = None) -> Any:
    """
    Accès imbriqué sans KeyError

    Args:
        data: Dictionnaire de configuration
        keys: Chemin de clés
        default: Valeur si une clé manque ou vaut None

    Returns:
        Valeur trouvée ou default
    """
    current: Any = data
    for key in keys:
        if not isinstance(current, dict) or current.get(key) is None:
            return default
        current = current[key]
    return current
