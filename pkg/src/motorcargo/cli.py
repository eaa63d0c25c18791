"""Command-line entry point: ``motorcargo <experiment> [options]``."""

from __future__ import annotations

import argparse
import json
import sys

from .experiments import EXPERIMENTS, load_config, run_experiment, spec_from_config

HELP = {
    "fv1": "one-motor force-velocity curve",
    "visc-sweep": "one- and two-motor velocity against cargo friction",
    "fv2": "two-motor force-velocity/diffusivity curves and stall forces",
    "regime-panels": "two-motor curves at raised friction vs force balance",
    "stall": "stall forces of one and two motors",
    "density-dump": "stationary separation densities",
}


def _u64(text):
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _grid(text):
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--config", help="JSON/YAML file with a 'params' section and run settings")
    g.add_argument("--seed", type=_u64, help="run seed (unsigned 64-bit)")
    g.add_argument("--out", dest="out_dir", help="output directory (default: results)")
    g.add_argument("--tol-quad", type=float, help="quadrature error above which rows are flagged")
    g.add_argument("--replicas", type=int, help="Monte Carlo replicas per grid point")
    g.add_argument("--t-bar", type=float, help="simulation horizon in slow time units")
    g.add_argument("--dt", type=float, help="fast-clock time step (<= 0.05)")
    g.add_argument("--workers", type=int, help="threads for replica integration")
    g.add_argument("--spring", help="tail law: linear, wlc(kappa, lc) or custom(file)")
    g.add_argument("--theta", type=_grid, dest="theta_grid_pN", help="load grid in pN, e.g. 0,5,10")
    g.add_argument("--gamma", type=_grid, dest="gamma_grid", help="friction grid in pN s/nm")
    g.add_argument("--no-sim", dest="simulate", action="store_false", default=None,
                   help="theory columns only")

    parser = argparse.ArgumentParser(
        prog="motorcargo",
        description="Motor-cargo transport experiments (Monte Carlo vs averaged theory).",
    )
    sub = parser.add_subparsers(dest="experiment", required=True, metavar="experiment")
    for name in EXPERIMENTS:
        sub.add_parser(name, parents=[common], help=HELP[name], description=HELP[name])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    opts = vars(args)
    experiment = opts.pop("experiment")
    config_path = opts.pop("config")
    config = load_config(config_path) if config_path else {}
    spec = spec_from_config(experiment, config, **opts)
    result = run_experiment(spec)
    for a in result.assertions:
        status = "PASS" if a.passed else "FAIL"
        print(f"[{status}] {a.name}: value={json.dumps(a.value, default=str)} expected {a.expected}")
    for path in result.files:
        print(f"wrote {path}")
    if not result.passed:
        failed = [a.name for a in result.assertions if not a.passed]
        print(f"{experiment}: {len(failed)} assertion(s) failed: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
