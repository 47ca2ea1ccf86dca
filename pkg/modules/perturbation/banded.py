"""
Module Bande - Assemblage et résolution de systèmes linéaires bande complexes
Stockage diagonal de scipy.linalg.solve_banded, stencils de différences finies décentrées
"""

import numpy as np
from typing import Union
from scipy.linalg import solve_banded, LinAlgError
import logging

from ..tumour_model.errors import SingularSystemError

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

IndexLike = Union[int, np.ndarray]
DENSE_CONDITION_LIMIT = 3000


def backward_difference(h: float) -> np.ndarray:
    """Poids de f'(x_n) d'ordre 2 sur (x_n, x_n−h, x_n−2h)"""
    return np.array([3.0, -4.0, 1.0]) / (2.0 * h)


class BandedSystem:
    """
    Système A·u = b à matrice bande, assemblé coefficient par coefficient

    La matrice est stockée sous la forme ab[upper + i − j, j] = A[i, j]
    attendue par scipy.linalg.solve_banded.
    """

    def __init__(self, size: int, lower: int, upper: int):
        self.size = size
        self.lower = lower
        self.upper = upper
        self.ab = np.zeros((lower + upper + 1, size), dtype=complex)
        self.rhs = np.zeros(size, dtype=complex)

    @classmethod
    def from_bands(cls, ab: np.ndarray, rhs: np.ndarray, lower: int, upper: int) -> "BandedSystem":
        """Système déjà assemblé (stockage diagonal et second membre fournis)"""
        system = cls(ab.shape[1], lower, upper)
        system.ab = ab
        system.rhs = np.asarray(rhs, dtype=complex)
        return system

    def add(self, rows: IndexLike, cols: IndexLike, values) -> None:
        """
        Ajoute des coefficients A[rows, cols] += values (vectorisé)

        Args:
            rows: Indices de lignes
            cols: Indices de colonnes (même forme que rows après diffusion)
            values: Coefficients à ajouter
        """
        rows, cols, values = np.broadcast_arrays(np.asarray(rows), np.asarray(cols), np.asarray(values, dtype=complex))
        offsets = rows - cols
        if np.any(offsets > self.lower) or np.any(-offsets > self.upper):
            raise ValueError(f"Coefficient hors bande: décalages {offsets.min()}..{offsets.max()}")
        np.add.at(self.ab, (self.upper + offsets.ravel(), cols.ravel()), values.ravel())

    def add_rhs(self, rows: IndexLike, values) -> None:
        rows, values = np.broadcast_arrays(np.asarray(rows), np.asarray(values, dtype=complex))
        np.add.at(self.rhs, rows.ravel(), values.ravel())

    def to_dense(self) -> np.ndarray:
        """Matrice pleine équivalente (diagnostic et estimation du conditionnement)"""
        dense = np.zeros((self.size, self.size), dtype=complex)
        for offset in range(-self.upper, self.lower + 1):
            band = self.ab[self.upper + offset]
            if offset >= 0:
                idx = np.arange(0, self.size - offset)
                dense[idx + offset, idx] = band[idx]
            else:
                idx = np.arange(-offset, self.size)
                dense[idx + offset, idx] = band[idx]
        return dense

    def condition_estimate(self) -> float:
        if self.size > DENSE_CONDITION_LIMIT:
            return float("inf")
        try:
            return float(np.linalg.cond(self.to_dense(), 1))
        except LinAlgError:
            return float("inf")

    def solve(self) -> np.ndarray:
        """
        Résout le système par élimination de Gauss avec pivotage partiel

        Returns:
            Vecteur solution complexe

        Raises:
            SingularSystemError: Pivot nul ou solution non finie
        """
        try:
            solution = solve_banded((self.lower, self.upper), self.ab, self.rhs, overwrite_ab=False, check_finite=False)
        except (LinAlgError, ValueError) as exc:
            condition = self.condition_estimate()
            raise SingularSystemError(
                f"Système bande singulier (taille {self.size}, conditionnement ≈ {condition:.3e}): {exc}",
                condition=condition,
            ) from exc
        if not np.all(np.isfinite(solution)):
            condition = self.condition_estimate()
            raise SingularSystemError(
                f"Solution non finie (taille {self.size}, conditionnement ≈ {condition:.3e})",
                condition=condition,
            )
        return solution


class RadialBands:
    """
    Matrice bande A(R) = A₀ + A₁/R + A₂/R², parties assemblées une seule fois

    Seul le rayon R_*(t) varie d'un étage RK à l'autre; les trois parties
    sont remplies avec BandedSystem.add puis recombinées à chaque résolution.
    """

    def __init__(self, size: int, lower: int, upper: int):
        self.size = size
        self.lower = lower
        self.upper = upper
        self.constant = BandedSystem(size, lower, upper)
        self.inverse = BandedSystem(size, lower, upper)
        self.inverse_square = BandedSystem(size, lower, upper)

    def bands(self, R: float) -> np.ndarray:
        return self.constant.ab + self.inverse.ab / R + self.inverse_square.ab / R ** 2

    def solve(self, rhs: np.ndarray, R: float) -> np.ndarray:
        """Résout A(R)·u = rhs"""
        system = BandedSystem.from_bands(self.bands(R), rhs, self.lower, self.upper)
        return system.solve()
