"""
Gestionnaire de données des répertoires de run: CSV, rapports JSON, empreintes et manifeste
"""
import json
import os
import hashlib
import logging
from typing import Any, Dict, List, Optional

import pandas as pd

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.17g"
MANIFEST_NAME = "manifest.json"


class DataManager:
    """Classe pour gérer les fichiers d'un répertoire de run"""

    def __init__(self, data_dir: str = None, create: bool = True):
        if data_dir is None:
            # Répertoire par défaut à côté du fichier courant
            current_dir = os.path.dirname(os.path.abspath(__file__))
            self.data_dir = os.path.join(current_dir, "runs", "default")
        else:
            self.data_dir = data_dir
        if create:
            os.makedirs(self.data_dir, exist_ok=True)

    def path(self, filename: str) -> str:
        return os.path.join(self.data_dir, filename)

    def _load_json(self, filename: str) -> Dict:
        """Charge un fichier JSON du répertoire"""
        filepath = self.path(filename)
        try:
            with open(filepath, 'r', encoding='utf-8') as f:
                return json.load(f)
        except FileNotFoundError:
            logger.warning(f"Fichier {filepath} non trouvé")
            return {}
        except json.JSONDecodeError:
            logger.warning(f"Erreur de décodage JSON pour {filepath}")
            return {}

    def _save_json(self, data: Dict, filename: str):
        """Sauvegarde un fichier JSON"""
        filepath = self.path(filename)
        with open(filepath, 'w', encoding='utf-8', newline='\n') as f:
            json.dump(data, f, ensure_ascii=False, indent=2, sort_keys=True, default=_json_default)
            f.write('\n')

    def save_report(self, report: Dict[str, Any], filename: str) -> str:
        """Écrit un rapport JSON (complexes sous la forme {re, im}) et retourne son chemin"""
        self._save_json(report, filename)
        logger.info(f"Rapport {filename} écrit")
        return self.path(filename)

    def load_report(self, filename: str) -> Dict[str, Any]:
        return self._load_json(filename)

    def save_frame(self, frame: pd.DataFrame, filename: str) -> str:
        """
        Exporte un DataFrame en CSV (17 chiffres significatifs, fins de ligne '\\n', en-tête)

        Returns:
            Chemin du fichier écrit
        """
        filepath = self.path(filename)
        frame.to_csv(filepath, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
        logger.info(f"Export {filename}: {len(frame)} lignes")
        return filepath

    def load_frame(self, filename: str) -> pd.DataFrame:
        return pd.read_csv(self.path(filename))

    def list_files(self, suffix: Optional[str] = None) -> List[str]:
        if not os.path.isdir(self.data_dir):
            return []
        names = sorted(name for name in os.listdir(self.data_dir)
                       if os.path.isfile(self.path(name)))
        return [name for name in names if suffix is None or name.endswith(suffix)]

    def file_digest(self, filename: str) -> str:
        """Empreinte sha256 du contenu d'un fichier"""
        digest = hashlib.sha256()
        with open(self.path(filename), 'rb') as f:
            for chunk in iter(lambda: f.read(65536), b''):
                digest.update(chunk)
        return digest.hexdigest()

    def write_manifest(self, config_echo: Dict[str, Any], version: str, base_state: Optional[Dict[str, Any]],
                       wall_clock: float) -> Dict[str, Any]:
        """
        Écrit manifest.json: configuration, version, état de base, durée et inventaire des fichiers

        Returns:
            Contenu du manifeste
        """
        inventory = {name: self.file_digest(name) for name in self.list_files() if name != MANIFEST_NAME}
        manifest = {
            "config": config_echo,
            "version": version,
            "base_state": base_state,
            "wall_clock_seconds": round(wall_clock, 6),
            "files": inventory,
        }
        self._save_json(manifest, MANIFEST_NAME)
        return manifest

    def verify_manifest(self) -> bool:
        """Vérifie que les empreintes du manifeste correspondent aux fichiers"""
        manifest = self._load_json(MANIFEST_NAME)
        files = manifest.get("files", {})
        return bool(files) and all(
            os.path.exists(self.path(name)) and self.file_digest(name) == digest for name, digest in files.items()
        )


def _json_default(value: Any) -> Any:
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if hasattr(value, "item"):
        return value.item()
    if hasattr(value, "tolist"):
        return value.tolist()
    raise TypeError(f"Type non sérialisable: {type(value).__name__}")
