"""
Module Configuration - Lecture et validation des fichiers de run
Configuration JSON imbriquée, valeurs par défaut REF1, spécification de balayage paramétrique
"""

import json
import copy
from typing import Dict, List, Optional, Any
from dataclasses import dataclass, field, fields
import logging

from ..tumour_model.constitutive import ModelParameters
from ..tumour_model.errors import ConfigError
from utils.data_adapter import get_reference_parameters, safe_get

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = {
    "params", "branch_id", "grid_n", "t_end", "dt", "output_times", "output_every", "initial",
    "layer", "rates", "scan_points", "sweep", "workers", "out_dir",
}
INITIAL_KINDS = ("sine", "zero")


@dataclass(frozen=True)
class SweepSpec:
    """Balayage linéaire d'un paramètre: count valeurs de lo à hi"""
    name: str
    lo: float
    hi: float
    count: int

    def values(self) -> List[float]:
        if self.count == 1:
            return [self.lo]
        step = (self.hi - self.lo) / (self.count - 1)
        return [self.lo + k * step for k in range(self.count)]

    @classmethod
    def parse(cls, text: str) -> "SweepSpec":
        """Analyse la forme name=lo:hi:n de la ligne de commande"""
        try:
            name, bounds = text.split("=", 1)
            lo, hi, count = bounds.split(":")
            spec = cls(name=name.strip(), lo=float(lo), hi=float(hi), count=int(count))
        except ValueError as exc:
            raise ConfigError(f"Balayage illisible '{text}' (forme attendue name=lo:hi:n)") from exc
        spec.validate()
        return spec

    def validate(self):
        known = {f.name for f in fields(ModelParameters)}
        if self.name not in known:
            raise ConfigError(f"Paramètre de balayage inconnu: {self.name}")
        if self.count < 1:
            raise ConfigError(f"Nombre de points de balayage invalide: {self.count}")


@dataclass
class RunConfig:
    """Configuration complète d'un run"""
    params: ModelParameters
    branch_id: int = 0
    grid_n: int = 400
    t_end: float = 30.0
    dt: Optional[float] = None
    output_times: Optional[List[float]] = None
    output_every: Optional[int] = None
    initial: str = "sine"
    x_max: Optional[float] = None
    n_layer: int = 400
    rate_t0: Optional[float] = None
    rate_t1: Optional[float] = None
    rate_stations: Dict[str, List[float]] = field(default_factory=lambda: {"xi": [0.35, 0.5], "X": [], "x": []})
    scan_points: int = 2000
    sweep: Optional[SweepSpec] = None
    workers: int = 4
    out_dir: str = "runs/ref1"

    def __post_init__(self):
        if self.grid_n < 32:
            raise ConfigError(f"grid_n={self.grid_n} invalide (≥ 32 requis)")
        if self.t_end <= 0.0:
            raise ConfigError(f"t_end={self.t_end} invalide (> 0 requis)")
        if self.dt is not None and self.dt <= 0.0:
            raise ConfigError(f"dt={self.dt} invalide (> 0 requis)")
        if self.initial not in INITIAL_KINDS:
            raise ConfigError(f"Donnée initiale non supportée: {self.initial}")
        if self.scan_points < 10:
            raise ConfigError(f"scan_points={self.scan_points} invalide")
        if self.workers < 1:
            raise ConfigError(f"workers={self.workers} invalide")
        if self.sweep is not None:
            self.sweep.validate()

    @property
    def rate_window(self):
        if self.rate_t0 is None or self.rate_t1 is None:
            return None
        return (self.rate_t0, self.rate_t1)

    def to_dict(self) -> Dict[str, Any]:
        """Écho de la configuration pour le manifeste"""
        return {
            "params": self.params.to_dict(),
            "branch_id": self.branch_id,
            "grid_n": self.grid_n,
            "t_end": self.t_end,
            "dt": self.dt,
            "output_times": self.output_times,
            "output_every": self.output_every,
            "initial": self.initial,
            "layer": {"x_max": self.x_max, "n_layer": self.n_layer},
            "rates": {"t0": self.rate_t0, "t1": self.rate_t1, "stations": self.rate_stations},
            "scan_points": self.scan_points,
            "sweep": None if self.sweep is None else {
                "name": self.sweep.name, "lo": self.sweep.lo, "hi": self.sweep.hi, "count": self.sweep.count
            },
            "workers": self.workers,
            "out_dir": self.out_dir,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        unknown = sorted(set(data) - TOP_LEVEL_KEYS)
        if unknown:
            raise ConfigError(f"Clés de configuration inconnues: {', '.join(unknown)}")
        params_data = data.get("params") or {}
        if not isinstance(params_data, dict):
            raise ConfigError("La clé 'params' doit être un objet")
        stations = {"xi": [0.35, 0.5], "X": [], "x": []}
        stations.update(safe_get(data, "rates", "stations", default={}))
        sweep_data = data.get("sweep")
        sweep = None
        if sweep_data:
            try:
                sweep = SweepSpec(name=sweep_data["name"], lo=float(sweep_data["lo"]),
                                  hi=float(sweep_data["hi"]), count=int(sweep_data["count"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"Balayage invalide: {sweep_data}") from exc
        try:
            return cls(
                params=ModelParameters.from_dict(params_data),
                branch_id=int(data.get("branch_id", 0)),
                grid_n=int(data.get("grid_n", 400)),
                t_end=float(data.get("t_end", 30.0)),
                dt=None if data.get("dt") is None else float(data["dt"]),
                output_times=None if data.get("output_times") is None else [float(t) for t in data["output_times"]],
                output_every=None if data.get("output_every") is None else int(data["output_every"]),
                initial=str(data.get("initial", "sine")),
                x_max=safe_get(data, "layer", "x_max"),
                n_layer=int(safe_get(data, "layer", "n_layer", default=400)),
                rate_t0=safe_get(data, "rates", "t0"),
                rate_t1=safe_get(data, "rates", "t1"),
                rate_stations={key: [float(v) for v in values] for key, values in stations.items()},
                scan_points=int(data.get("scan_points", 2000)),
                sweep=sweep,
                workers=int(data.get("workers", 4)),
                out_dir=str(data.get("out_dir", "runs/ref1")),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"Configuration invalide: {exc}") from exc


def default_config_dict() -> Dict[str, Any]:
    """Configuration par défaut: REF1, κ=2, n=400, t_end=30"""
    return {
        "params": get_reference_parameters("REF1"),
        "branch_id": 0,
        "grid_n": 400,
        "t_end": 30.0,
        "dt": None,
        "output_times": None,
        "output_every": None,
        "initial": "sine",
        "layer": {"x_max": None, "n_layer": 400},
        "rates": {"t0": 15.0, "t1": 30.0, "stations": {"xi": [0.35, 0.5], "X": [], "x": []}},
        "scan_points": 2000,
        "workers": 4,
        "out_dir": "runs/ref1",
    }


def _load_config(config_path: Optional[str]) -> Dict[str, Any]:
    """Charge la configuration JSON, ou la configuration par défaut REF1 si aucun chemin n'est donné"""
    if config_path:
        try:
            with open(config_path, 'r', encoding='utf-8') as f:
                data = json.load(f)
            if not isinstance(data, dict):
                raise ConfigError(f"Configuration {config_path}: objet JSON attendu")
            return data
        except FileNotFoundError as exc:
            raise ConfigError(f"Fichier de configuration non trouvé: {config_path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"Configuration illisible {config_path}: {exc}") from exc

    return copy.deepcopy(default_config_dict())


def load_run_config(config_path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Construit la RunConfig depuis un fichier JSON et des surcharges de la ligne de commande

    Args:
        config_path: Chemin du fichier (None → défauts REF1)
        overrides: Clés de premier niveau à remplacer (out_dir, branch_id, sweep...)

    Returns:
        RunConfig validée
    """
    data = _load_config(config_path)
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    return RunConfig.from_dict(data)
