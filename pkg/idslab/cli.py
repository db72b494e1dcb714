"""
idslab command line.

    idslab <subcommand> [--spec FILE] [flags]

Flags override the config file's [run] table, which overrides the defaults
shown by --help. IDSLAB_OUT sets the output directory unless --out is given.
Progress goes to standard error; standard output carries one summary line per
result file.
"""

import argparse
import os
import sys
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from idslab.core.config import Settings, settings as default_settings
from idslab.core.errors import ConfigError
from idslab.core.logging import configure_logging, get_logger
from idslab.io.spec_file import SpecFile
from idslab.runner import LabRunner
from idslab.schemas.operator import BCType
from idslab.schemas.run import RunConfig, Subcommand

logger = get_logger("cli")

_DESCRIPTIONS = {
    Subcommand.SAMPLE_FIELD: "draw one realization of the coefficient field and export it",
    Subcommand.BANDS: "Floquet band functions of one periodized realization",
    Subcommand.IDS: "integrated density of states by finite volumes or Floquet averaging",
    Subcommand.HOMOGENIZED: "IDS of the mean (or harmonic-mean) field",
    Subcommand.SANDWICH: "compare N(E) with the homogenized IDS at E -+ E^alpha",
    Subcommand.APPROX_CHECK: "bracket N(E+eps) - N(E-eps) by periodic approximants",
    Subcommand.DEVIATION: "Monte Carlo frequency of the deviation event, with a tail fit",
    Subcommand.LD_RATE: "tail probability of the empirical mean of the site variables",
    Subcommand.SELFTEST: "run the quick exact checks",
}


def _default(name: str) -> Any:
    return RunConfig.model_fields[name].get_default(call_default_factory=True)


def _help(text: str, name: Optional[str] = None) -> str:
    if name is None:
        return text
    default = _default(name)
    if isinstance(default, Enum):
        default = default.value
    return f"{text} (default: {default})"


def _energy_range(text: str) -> Tuple[float, float]:
    lo, sep, hi = text.partition(":")
    try:
        if not sep:
            raise ValueError(text)
        return float(lo), float(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected min:max, got '{text}'")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--spec", dest="spec_path", help="coefficient-field config file (TOML); omit for rho = 1")
    parser.add_argument("--d", dest="dimension", type=int, choices=(1, 2), help="dimension, overriding the config file")
    parser.add_argument("--law", help="disorder law: bernoulli:p[:v0:v1], uniform:a:b or constant:c")
    parser.add_argument("--seed", type=int, help=_help("master seed", "seed"))
    parser.add_argument("--workers", type=int, help="worker processes (default: all cores)")
    parser.add_argument("--out", dest="output_dir", help="output directory (default: $IDSLAB_OUT or data/outputs)")


def _add_mesh(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--m", dest="mesh", type=int, help="samples per unit cell per axis (default: config file, else 8)")


def _add_box(parser: argparse.ArgumentParser, samples: bool = True, bc: bool = True) -> None:
    parser.add_argument("--n", type=int, help=_help("box radius; the box holds (2n+1)^d cells", "n"))
    if samples:
        parser.add_argument("--samples", type=int, help=_help("Monte Carlo samples", "samples"))
    if bc:
        parser.add_argument(
            "--bc", choices=[t.value for t in BCType if t is not BCType.FLOQUET],
            help=_help("boundary condition on the box", "bc"),
        )


def _add_energies(parser: argparse.ArgumentParser, grid: bool = True) -> None:
    parser.add_argument("--E", dest="energies", type=float, action="append", help="energy; repeatable")
    if grid:
        parser.add_argument(
            "--energies", dest="energy_range", type=_energy_range,
            help=f"geometric grid min:max used when no --E is given (default: {_default('e_min')}:{_default('e_max')})",
        )


def _add_theta(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--theta-nodes", dest="theta_nodes", type=int, help="theta nodes per axis (default: adaptive)")


def _add_alpha(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", dest="alphas", type=float, action="append", help=_help("window exponent; repeatable", "alphas"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="idslab",
        description="Integrated density of states of random acoustic operators -div(rho grad).",
        argument_default=argparse.SUPPRESS,
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")
    commands = parser.add_subparsers(dest="subcommand", required=True, metavar="subcommand")

    def command(sub: Subcommand) -> argparse.ArgumentParser:
        return commands.add_parser(
            sub.value, help=_DESCRIPTIONS[sub], description=_DESCRIPTIONS[sub], argument_default=argparse.SUPPRESS
        )

    p = command(Subcommand.SAMPLE_FIELD)
    _add_common(p)
    _add_mesh(p)
    _add_box(p, samples=False)
    p.add_argument("--sample-index", dest="sample_index", type=int, help=_help("sample index", "sample_index"))

    p = command(Subcommand.BANDS)
    _add_common(p)
    _add_mesh(p)
    _add_box(p, samples=False, bc=False)
    _add_theta(p)
    p.add_argument("--sample-index", dest="sample_index", type=int, help=_help("sample index", "sample_index"))
    p.add_argument("--bands", type=int, help=_help("number of bands", "bands"))

    p = command(Subcommand.IDS)
    _add_common(p)
    _add_mesh(p)
    _add_box(p)
    _add_energies(p)
    _add_theta(p)
    p.add_argument("--method", choices=("finite-volume", "floquet"), help=_help("IDS method", "method"))
    p.add_argument("--sample-index", dest="sample_index", type=int, help="sample periodized by --method floquet")

    p = command(Subcommand.HOMOGENIZED)
    _add_common(p)
    _add_mesh(p)
    _add_energies(p)
    _add_theta(p)
    p.add_argument("--harmonic", action="store_true", help="use the harmonic-mean field")

    p = command(Subcommand.SANDWICH)
    _add_common(p)
    _add_mesh(p)
    _add_box(p)
    _add_energies(p)
    _add_theta(p)
    _add_alpha(p)
    p.add_argument("--harmonic", action="store_true", help="also compare with the harmonic-mean field")

    p = command(Subcommand.APPROX_CHECK)
    _add_common(p)
    _add_mesh(p)
    _add_box(p)
    _add_energies(p, grid=False)
    _add_theta(p)
    p.add_argument("--epsilon", type=float, help=_help("half width of the energy window", "epsilon"))

    p = command(Subcommand.DEVIATION)
    _add_common(p)
    _add_mesh(p)
    _add_box(p, samples=False, bc=False)
    _add_energies(p, grid=False)
    _add_alpha(p)
    p.add_argument("--ns", type=int, nargs="+", help="several box radii; overrides --n")
    p.add_argument("--trials", type=int, help=_help("Monte Carlo trials per (n, E, alpha)", "trials"))
    p.add_argument("--cutoff", type=float, help=_help("test-subspace cutoff as a multiple of E times the rho bound", "cutoff"))
    p.add_argument(
        "--kinetic-bound", dest="kinetic_bound", choices=("upper", "lower"),
        help=_help("rho bound used for the cutoff", "kinetic_bound"),
    )

    p = command(Subcommand.LD_RATE)
    _add_common(p)
    p.add_argument("--m", "--cells", dest="cells", type=int, help=_help("number of site variables averaged", "cells"))
    p.add_argument("--t", dest="threshold", type=float, help=_help("deviation threshold", "threshold"))

    command(Subcommand.SELFTEST)
    return parser


def resolve(args: argparse.Namespace, environ: Optional[Dict[str, str]] = None) -> RunConfig:
    """Layer defaults, the config file's [run] table, IDSLAB_OUT and flags into a RunConfig."""
    environ = os.environ if environ is None else environ
    flags = {k: v for k, v in vars(args).items() if k not in ("verbose", "quiet")}
    if "energy_range" in flags:
        flags["e_min"], flags["e_max"] = flags.pop("energy_range")

    layered: Dict[str, Any] = {}
    spec_path = flags.get("spec_path")
    if spec_path:
        table = SpecFile.load(spec_path).run
        unknown = sorted(set(table) - set(RunConfig.model_fields) - {"subcommand", "spec_path"})
        if unknown:
            raise ConfigError(f"{spec_path}: unknown [run] keys {unknown}")
        layered.update({k: v for k, v in table.items() if k not in ("subcommand", "spec_path")})
    if environ.get("IDSLAB_OUT"):
        layered["output_dir"] = environ["IDSLAB_OUT"]
    layered.update(flags)
    return RunConfig(**layered)


def run(argv: Optional[Sequence[str]] = None, config: Optional[Settings] = None) -> int:
    """Parse, resolve, execute; returns 0 on success, 2 on configuration errors, 1 otherwise."""
    config = config or default_settings
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    level = "DEBUG" if getattr(args, "verbose", False) else "WARNING" if getattr(args, "quiet", False) else config.LOG_LEVEL
    configure_logging(level)

    try:
        run_config = resolve(args)
    except ConfigError as exc:
        logger.error("%s", exc)
        return 2
    except ValidationError as exc:
        for error in exc.errors():
            where = ".".join(str(part) for part in error["loc"]) or "config"
            logger.error("%s: %s", where, error["msg"])
        return 2

    try:
        result = LabRunner(config).run(run_config)
    except Exception:
        logger.exception("unexpected failure in %s", run_config.subcommand.value)
        return 1

    for line in result.summary:
        print(line)
    if result.status != "success":
        logger.error("%s", result.message)
        return result.exit_code or 1
    return 0


def main(argv: Optional[List[str]] = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
