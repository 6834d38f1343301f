"""Command-line driver for Casimir-Polder parameter scans.

Exit codes: 0 success, 2 invalid arguments, 3 every row failed, 4 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, Sequence

from pydantic import ValidationError

from .scan import Quantity, ScanSpec, SweepVariable, resonance_annotations, run_scan
from .scan_io import emit, load_config

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_ALL_FAILED = 3
EXIT_IO = 4

_SUBCOMMANDS: Dict[str, Quantity] = {
    "ground": Quantity.GROUND_SHIFT,
    "excited": Quantity.EXCITED_SHIFT,
    "modes": Quantity.TRAPPED_MODES,
    "completeness": Quantity.COMPLETENESS,
    "greens": Quantity.GREENS,
    "resonance-map": Quantity.RESONANT_SHIFT,
}

_DEFAULT_SWEEP = {
    "ground": ("Z", "0.1:10:16:log"),
    "excited": ("Z", "0.1:10:16:log"),
    "modes": ("k_par", "0.5:10:20"),
    "completeness": ("Z", "0.5:2:4"),
    "greens": ("Z", "0.01:1:16:log"),
}

# flag name -> ScanSpec field
_VALUE_FLAGS = {
    "n_l": float,
    "n_s": float,
    "L": float,
    "Z": float,
    "E": float,
    "mu_par2": float,
    "mu_perp2": float,
    "k_par": float,
    "rho": float,
    "component": str,
    "normalize": str,
    "rel_tol": float,
}
_CONFIG_ONLY = {"sweep", "range", "format", "out", "workers", "kappa_max"}


class UsageError(ValueError):
    """Invalid command-line or configuration input."""


def parse_range(text: str) -> Dict[str, Any]:
    """``lo:hi:count[:log]`` to ScanSpec fields."""
    parts = text.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != "log"):
        raise UsageError(f"range must look like lo:hi:count[:log], got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"range must look like lo:hi:count[:log], got {text!r}") from exc
    return {"lo": lo, "hi": hi, "count": count, "log": len(parts) == 4}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n-l", dest="n_l", type=float, help="Layer refractive index")
    common.add_argument("--n-s", dest="n_s", type=float, help="Substrate refractive index")
    common.add_argument("--L", dest="L", type=float, help="Layer thickness")
    common.add_argument("--Z", dest="Z", type=float, help="Atom distance above the layer surface")
    common.add_argument("--E", dest="E", type=float, help="Transition energy (magnitude)")
    common.add_argument("--mu-par2", dest="mu_par2", type=float, help="|mu_parallel|^2")
    common.add_argument("--mu-perp2", dest="mu_perp2", type=float, help="|mu_perp|^2")
    common.add_argument("--k-par", dest="k_par", type=float, help="In-plane wavenumber (fixed)")
    common.add_argument("--rho", type=float, help="Lateral separation for the completeness audit")
    common.add_argument("--component", help="Tensor component for the completeness audit, e.g. zz or xz")
    common.add_argument("--sweep", choices=[v.value for v in SweepVariable], help="Variable to sweep")
    common.add_argument("--range", dest="range", help="Sweep range lo:hi:count[:log]")
    common.add_argument("--normalize", choices=("raw", "times-Z3", "times-Z4"), help="Scale shifts by Z^3 or Z^4")
    common.add_argument("--format", choices=("csv", "json", "stream"), help="Output format")
    common.add_argument("--out", help="Output path, '-' for stdout")
    common.add_argument("--rel-tol", dest="rel_tol", type=float, help="Relative quadrature tolerance")
    common.add_argument("--config", type=Path, help="key=value file with defaults for any flag")
    common.add_argument("--workers", type=int, help="Worker processes for independent rows")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("--quiet", action="store_true", help="Warnings and errors only")

    parser = argparse.ArgumentParser(
        prog="casimir-scan", description="Casimir-Polder shifts of an atom above a layered dielectric"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("ground", parents=[common], help="Ground-state shift")
    excited = sub.add_parser("excited", parents=[common], help="Excited-state shift of a downward transition")
    excited.add_argument("--resonant-only", action="store_true", help="Only the resonant contribution")
    sub.add_parser("modes", parents=[common], help="Trapped-mode counts")
    sub.add_parser("completeness", parents=[common], help="Mode-completeness audit")
    sub.add_parser("greens", parents=[common], help="Electrostatic shift from the quasi-static Green's function")
    resonance = sub.add_parser("resonance-map", parents=[common], help="Resonant shift against layer thickness")
    resonance.add_argument("--kappa-max", dest="kappa_max", type=int, help="Highest resonance order to list")
    return parser


def _settings(args: argparse.Namespace) -> Dict[str, Any]:
    """Merge defaults, the config file and explicit flags, in increasing priority."""
    settings: Dict[str, Any] = {"format": "csv", "out": "-", "workers": 1, "kappa_max": 2}
    if args.config is not None:
        for key, raw in load_config(args.config).items():
            if key in _VALUE_FLAGS:
                settings[key] = _VALUE_FLAGS[key](raw)
            elif key == "workers" or key == "kappa_max":
                settings[key] = int(raw)
            elif key in _CONFIG_ONLY:
                settings[key] = raw
            else:
                raise UsageError(f"unknown key {key!r} in {args.config}")
    for key in (*_VALUE_FLAGS, *_CONFIG_ONLY):
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def build_spec(args: argparse.Namespace, settings: Dict[str, Any]) -> ScanSpec:
    quantity = _SUBCOMMANDS[args.command]
    if args.command == "excited" and args.resonant_only:
        quantity = Quantity.RESONANT_SHIFT
    fields: Dict[str, Any] = {k: settings[k] for k in _VALUE_FLAGS if k in settings}
    fields["quantity"] = quantity

    if args.command == "resonance-map":
        default_sweep = "L"
        energy = abs(settings.get("E", 1.0))
        n_l = settings.get("n_l", 2.0)
        upper = math.pi / energy * (settings["kappa_max"] + 1) / n_l
        default_range = f"{upper / 64!r}:{upper!r}:64"
    else:
        default_sweep, default_range = _DEFAULT_SWEEP[args.command]
    fields["sweep"] = settings.get("sweep", default_sweep)
    fields.update(parse_range(settings.get("range", default_range)))
    return ScanSpec(**fields)


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="[%(levelname)s] %(message)s", stream=sys.stderr, force=True)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    _configure_logging(args)

    try:
        settings = _settings(args)
        spec = build_spec(args, settings)
        workers = int(settings["workers"])
        if workers < 1:
            raise UsageError(f"--workers must be >= 1, got {workers}")
    except FileNotFoundError as exc:
        LOGGER.error("%s", exc)
        return EXIT_IO
    except (UsageError, ValidationError, ValueError) as exc:
        LOGGER.error("Invalid arguments: %s", exc)
        return EXIT_INVALID

    annotations = resonance_annotations(spec, settings["kappa_max"]) if args.command == "resonance-map" else None
    table = run_scan(spec, workers=workers, annotations=annotations)

    try:
        emit(table, settings["format"], settings["out"])
    except OSError as exc:
        LOGGER.error("%s", exc)
        return EXIT_IO

    if table.all_failed:
        LOGGER.error("Every row of the scan failed")
        return EXIT_ALL_FAILED
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
