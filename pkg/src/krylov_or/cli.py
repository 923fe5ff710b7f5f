"""Command-line entry point: ``krylov-or <experiment> [options]``."""

import argparse
import math
import os
import sys

from .errors import NumericalError
from .experiments import EXPERIMENTS, ExperimentConfig, run_experiment
from .report import render_svg, write_csv
from .spectra import SpectrumSpec, parse_intervals

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class _ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ConfigError(message)


def build_parser():
    p = _Parser(prog="krylov-or", description="Run Lanczos-OR comparison experiments.")
    p.add_argument("experiment", choices=sorted(EXPERIMENTS))
    p.add_argument("--n", type=int, help="dimension of the model spectrum")
    p.add_argument("--kappa", type=float, help="largest model eigenvalue")
    p.add_argument("--rho", type=float, help="model clustering parameter in (0, 1]")
    p.add_argument("--spectrum", nargs="+", metavar="ARG",
                   help="'model', 'file PATH' or 'intervals SPEC' such as '[-10,-1]u[1,10]'")
    p.add_argument("--step", type=float, default=0.005, help="spacing for interval spectra")
    p.add_argument("--k-max", type=int, help="iterations (matvec budget for restart-compare)")
    p.add_argument("--c", type=float, help="shift (sign-compare) or regularization (squared-system)")
    p.add_argument("--quad-points", type=int, default=20)
    p.add_argument("--restart-lengths", default="10,20,30,38,43,inf",
                   help="comma separated restart lengths; 'inf' never restarts")
    p.add_argument("--reorth", choices=("on", "off"))
    p.add_argument("--rhs", choices=("uniform", "random"), default="uniform")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".", help="output directory for CSV and SVG")
    return p


def _restart_lengths(text):
    out = []
    for tok in text.split(","):
        tok = tok.strip().lower()
        if tok in ("inf", "none", "∞"):
            out.append(None)
            continue
        try:
            m = int(tok)
        except ValueError:
            raise _ConfigError(f"bad restart length {tok!r}") from None
        if m < 1:
            raise _ConfigError(f"restart length must be positive, got {m}")
        out.append(m)
    return out


def _spectrum(args):
    model_given = any(v is not None for v in (args.n, args.kappa, args.rho))
    if args.spectrum is None:
        if not model_given:
            return None
        kind = ["model"]
    else:
        kind = args.spectrum
    if kind[0] == "model" and len(kind) == 1:
        return SpectrumSpec(kind="model", n=args.n or 1000, kappa=args.kappa or 5e3,
                            rho=0.8 if args.rho is None else args.rho)
    if kind[0] == "file" and len(kind) == 2:
        if not os.path.isfile(kind[1]):
            raise _ConfigError(f"spectrum file not found: {kind[1]}")
        return SpectrumSpec(kind="file", path=kind[1])
    if kind[0] == "intervals" and len(kind) == 2:
        return SpectrumSpec(kind="intervals", intervals=parse_intervals(kind[1]), step=args.step)
    raise _ConfigError(f"bad --spectrum {' '.join(kind)!r}")


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        config = ExperimentConfig(
            spectrum=_spectrum(args),
            k_max=args.k_max,
            c=args.c,
            quad_points=args.quad_points,
            restart_lengths=_restart_lengths(args.restart_lengths),
            reorth=None if args.reorth is None else args.reorth == "on",
            rhs=args.rhs,
            seed=args.seed,
        )
        if config.spectrum is not None:
            config.spectrum.eigenvalues()
        result = run_experiment(args.experiment, config)
    except (_ConfigError, ValueError, OSError) as exc:
        print(f"krylov-or: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"krylov-or: numerical failure ({type(exc).__name__}) in {args.experiment}: {exc}",
              file=sys.stderr)
        return EXIT_NUMERICAL
    os.makedirs(args.out, exist_ok=True)
    base = os.path.join(args.out, args.experiment)
    with open(base + ".csv", "w", newline="") as fh:
        write_csv(result.reports, fh)
    with open(base + ".svg", "w") as fh:
        fh.write(render_svg(result.reports, title=args.experiment))
    for rep in result.reports:
        last = rep.errors[-1] if rep.errors else math.nan
        print(f"{rep.method:24s} k={rep.ks[-1] if rep.ks else 0:4d} {rep.norm:>10s} error={last:.3e}")
    print(f"wrote {base}.csv and {base}.svg")
    return 0


if __name__ == "__main__":
    sys.exit(main())
