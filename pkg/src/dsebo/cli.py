"""Command line entry point: ``dsebo run | sweep | summarize``.

Exit codes: 0 success, 2 configuration error, 3 numerical or data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import ConfigurationError, DataError, NumericalError, UsageError
from .experiment import SWEEP_PARAMS, ExperimentConfig, run_experiment, summarize, sweep

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _parser():
    p = argparse.ArgumentParser(prog="dsebo", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log per-run progress")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run all repetitions of one config")
    run.add_argument("--config", required=True)
    run.add_argument("--out", help="output directory (overrides output_dir in the config)")

    sw = sub.add_parser("sweep", help="run one config per value of a DSEBO hyperparameter")
    sw.add_argument("--config", required=True)
    sw.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    sw.add_argument("--values", required=True, help="comma-separated values, e.g. 4,12,24")
    sw.add_argument("--out", required=True)

    sm = sub.add_parser("summarize", help="recompute summary.json from trace files")
    sm.add_argument("--in", dest="in_dir", required=True)
    return p


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            cfg = ExperimentConfig.load(args.config)
            result = run_experiment(cfg, args.out)
        elif args.command == "sweep":
            cfg = ExperimentConfig.load(args.config)
            values = [v.strip() for v in args.values.split(",") if v.strip()]
            try:
                [float(v) for v in values]
            except ValueError as exc:
                raise ConfigurationError(f"bad --values list {args.values!r}") from exc
            result = sweep(cfg, args.param, values, args.out)
        else:
            result = summarize(args.in_dir)
    except (ConfigurationError, UsageError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, NumericalError) as exc:
        print(f"numerical/data error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    json.dump(result, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
