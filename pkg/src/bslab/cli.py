"""Command line driver.

    bslab figure1 --mode perturbed --epsilon 0.01 --n 10000 --seed 1 --out-csv fig.csv
    bslab qf-sweep --n 1000 --out-json sweep.json

Exit codes: 0 success, 2 bad configuration, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import ConfigError
from .experiments import ExperimentConfig, run

EXIT_CONFIG = 2
EXIT_IO = 3

# CLI flag -> ExperimentConfig field
_FLAGS = {
    "mode": "mode",
    "n": "n",
    "seed": "seed",
    "dim_a": "d_a",
    "dim_b": "d_b",
    "epsilon": "epsilon",
    "out_csv": "out_csv",
    "out_json": "out_json",
    "tol": "violation_tol",
    "marginals": "marginal_source",
    "sigma_model": "sigma_model",
    "workers": "workers",
}


def _common(p: argparse.ArgumentParser) -> None:
    # defaults stay None so that --config values are only overridden by explicit flags
    p.add_argument("--config", help="JSON file with ExperimentConfig fields")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--dim-a", type=int)
    p.add_argument("--dim-b", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--out-csv")
    p.add_argument("--out-json")
    p.add_argument("--tol", type=float, help="violation threshold (default 1e-9)")
    p.add_argument("--workers", type=int)
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bslab", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    fig = sub.add_parser("figure1", help="superadditivity counterexample scatter")
    fig.add_argument("--mode", choices=["general", "perturbed"])
    fig.add_argument("--marginals", choices=["joint", "independent"],
                     help="how sigma_A, sigma_B and eta_A, eta_B are drawn")
    _common(fig)

    qf = sub.add_parser("qf-sweep", help="check both BS bounds and the Umegaki comparator")
    qf.add_argument("--sigma-model", choices=["general", "product", "perturbed"])
    _common(qf)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    doc = {}
    if args.config:
        with open(args.config) as fh:
            doc = json.load(fh)
        if not isinstance(doc, dict):
            raise ConfigError("config file must hold a JSON object")
    for flag, name in _FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            doc[name] = value
    if args.command == "qf-sweep":
        doc["mode"] = "qf-sweep"
    elif doc.get("mode") == "qf-sweep":
        raise ConfigError("use the qf-sweep subcommand for mode 'qf-sweep'")
    try:
        return ExperimentConfig.from_dict(doc)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
    except (ConfigError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        _, doc = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(json.dumps(doc, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
