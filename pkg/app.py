"""
Tumour Layers - Ligne de commande
Stabilité bidimensionnelle d'une tumeur avasculaire biphasique: état de base, simulation des perturbations,
couches limites, critère d'instabilité et ajustement des taux
"""

import sys
import json
import argparse
import logging
from typing import List, Optional

from modules.tumour_model.errors import TumourModelError, ExitCode, exit_code_for
from modules.harness.config import SweepSpec, load_run_config
from modules.harness.commands import (
    cmd_basestate, cmd_simulate, cmd_layer, cmd_stability, cmd_rates, cmd_plotscripts,
)

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    """Parseur des sous-commandes et des options communes"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Fichier de configuration JSON")
    common.add_argument("--out", help="Répertoire de sortie du run")
    common.add_argument("--branch", type=int, help="Indice de la branche d'état de base")
    common.add_argument("--log-level", default="INFO", choices=("DEBUG", "INFO", "WARNING", "ERROR"),
                        help="Niveau de journalisation")

    parser = argparse.ArgumentParser(prog="tumour-layers",
                                     description="Couches limites et stabilité d'une tumeur biphasique")
    commands = parser.add_subparsers(dest="command", required=True)

    basestate = commands.add_parser("basestate", parents=[common], help="Racines de l'état de base")
    basestate.add_argument("--scan-points", type=int, help="Résolution du balayage des racines")
    commands.add_parser("simulate", parents=[common], help="Simulation du système linéarisé")
    layer = commands.add_parser("layer", parents=[common], help="Problème de couche limite")
    layer.add_argument("--side", choices=("outer", "inner"), default="outer")
    stability = commands.add_parser("stability", parents=[common], help="Critère d'instabilité")
    stability.add_argument("--sweep", help="Balayage name=lo:hi:n")
    rates = commands.add_parser("rates", parents=[common], help="Ajustement de taux sur un fichier de champ")
    rates.add_argument("--in", dest="in_file", required=True, help="Fichier de champ au format long")
    rates.add_argument("--t0", type=float)
    rates.add_argument("--t1", type=float)
    plots = commands.add_parser("plotscripts", parents=[common], help="Scripts de tracé d'un run")
    plots.add_argument("run_dir", nargs="?", help="Répertoire de run (défaut --out)")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Point d'entrée de la ligne de commande

    Args:
        argv: Arguments (défaut sys.argv[1:])

    Returns:
        Code de sortie
    """
    args = build_parser().parse_args(argv)
    logging.getLogger().setLevel(args.log_level)

    try:
        if args.command == "plotscripts":
            run_dir = args.run_dir or args.out
            if run_dir is None:
                run_dir = load_run_config(args.config).out_dir
            written = cmd_plotscripts(run_dir)
            print("\n".join(written))
            return ExitCode.OK

        overrides = {"out_dir": args.out, "branch_id": args.branch}
        if getattr(args, "scan_points", None) is not None:
            overrides["scan_points"] = args.scan_points
        if getattr(args, "sweep", None):
            spec = SweepSpec.parse(args.sweep)
            overrides["sweep"] = {"name": spec.name, "lo": spec.lo, "hi": spec.hi, "count": spec.count}
        config = load_run_config(args.config, overrides)

        if args.command == "basestate":
            print(cmd_basestate(config).to_string(index=False))
        elif args.command == "simulate":
            summary = cmd_simulate(config)
            print(json.dumps({"gamma0": summary["gamma0"], "margin": summary["margin"],
                              "rates": summary["rates"]}, indent=2, default=str))
        elif args.command == "layer":
            report = cmd_layer(config, args.side)
            print(json.dumps(report, indent=2, default=str))
        elif args.command == "stability":
            result = cmd_stability(config)
            print(result.to_string(index=False) if hasattr(result, "to_string") else json.dumps(result, indent=2))
        elif args.command == "rates":
            print(cmd_rates(config, args.in_file, args.t0, args.t1).to_string(index=False))
        return ExitCode.OK
    except TumourModelError as exc:
        code = exit_code_for(exc)
        logger.error(f"{type(exc).__name__}: {exc} (code {int(code)})")
        return code


if __name__ == "__main__":
    sys.exit(int(main()))
