"""
Module Scripts de Tracé - Génération de scripts plotly à partir des CSV d'un run
Surfaces espace-temps de |α̃| et profils de couche superposés à leur asymptote
"""

import os
from typing import List
import logging

from data_manager import DataManager
from ..tumour_model.errors import EmptyRunDirectoryError

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

SURFACE_WINDOWS = ((0.0, 20.0), (5.0, 20.0))

SURFACE_TEMPLATE = '''"""
Surface espace-temps de |alpha~|(xi, t) pour t dans [{t_min:g}, {t_max:g}]
"""
import os

import numpy as np
import pandas as pd
import plotly.graph_objects as go

HERE = os.path.dirname(os.path.abspath(__file__))

frame = pd.read_csv(os.path.join(HERE, "{csv_name}"))
frame = frame[(frame["t"] >= {t_min!r}) & (frame["t"] <= {t_max!r})]
frame["modulus"] = np.hypot(frame["re"], frame["im"])
surface = frame.pivot(index="t", columns="xi", values="modulus")

fig = go.Figure(data=[go.Surface(x=surface.columns.values, y=surface.index.values, z=surface.values,
                                 colorscale="Viridis")])
fig.update_layout(
    title="|alpha~|(xi, t), t dans [{t_min:g}, {t_max:g}]",
    scene=dict(xaxis_title="xi", yaxis_title="t", zaxis_title="|alpha~|"),
)
fig.write_html(os.path.join(HERE, "{html_name}"))
'''

LAYER_TEMPLATE = '''"""
Profil de couche {side}: |A| et son asymptote linéaire en champ lointain
"""
import os

import numpy as np
import pandas as pd
import plotly.graph_objects as go

HERE = os.path.dirname(os.path.abspath(__file__))

frame = pd.read_csv(os.path.join(HERE, "{csv_name}"))
modulus = np.hypot(frame["A_re"], frame["A_im"])

fig = go.Figure()
fig.add_trace(go.Scatter(x=frame["x"], y=modulus, mode="lines", name="|A|"))
fig.add_trace(go.Scatter(x=frame["x"], y=frame["x"], mode="lines", name="asymptote", line=dict(dash="dash")))
fig.update_layout(title="Couche {side}", xaxis_title="coordonnée de couche", yaxis_title="|A|")
fig.write_html(os.path.join(HERE, "{html_name}"))
'''


def emit_plot_scripts(run_dir: str) -> List[str]:
    """
    Écrit un script plotly par vue disponible dans le répertoire de run

    Args:
        run_dir: Répertoire contenant les CSV d'un run

    Returns:
        Chemins des scripts écrits

    Raises:
        EmptyRunDirectoryError: aucun CSV exploitable
    """
    manager = DataManager(run_dir, create=False)
    csv_files = manager.list_files(".csv")
    if not csv_files:
        raise EmptyRunDirectoryError(f"Aucun fichier CSV dans {run_dir}")

    scripts = {}
    if "alpha.csv" in csv_files:
        for t_min, t_max in SURFACE_WINDOWS:
            stem = f"plot_alpha_surface_{t_min:g}_{t_max:g}"
            scripts[f"{stem}.py"] = SURFACE_TEMPLATE.format(csv_name="alpha.csv", t_min=t_min, t_max=t_max,
                                                            html_name=f"{stem}.html")
    for side in ("outer", "inner"):
        csv_name = f"layer_{side}.csv"
        if csv_name in csv_files:
            stem = f"plot_layer_{side}"
            scripts[f"{stem}.py"] = LAYER_TEMPLATE.format(side=side, csv_name=csv_name, html_name=f"{stem}.html")

    if not scripts:
        raise EmptyRunDirectoryError(f"Aucun CSV reconnu dans {run_dir}: {', '.join(csv_files)}")

    written = []
    for name, content in scripts.items():
        path = manager.path(name)
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(content)
        written.append(path)
    logger.info(f"{len(written)} script(s) de tracé écrits dans {run_dir}")
    return written
