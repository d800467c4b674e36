"""Command-line front end.

    jsrkit <command> --input set.json --out report.csv [options]

Commands: bounds, convergence, pruned, splitting, sturmian, epsilon.
Each run writes a CSV report atomically plus a JSON metadata file
(`<out>.meta.json`) echoing the configuration, budget counters and wall
time.  Exit codes: 0 success, 2 input error, 3 inconclusive (budget or
pruning did not close the gap), 4 internal invariant violation.  The
``JSRKIT_BUDGET`` environment variable overrides the multiplication
budget.
"""

import argparse
import dataclasses
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

from . import __version__, bounds, cocycle, extremal, fileio, shiftspace

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INCONCLUSIVE = 3
EXIT_INTERNAL = 4

BOUNDS_HEADER = [
    "n",
    "rho_plus_n",
    "rho_minus_n",
    "best_lower",
    "best_upper",
    "gap",
    "argmax_word_plus",
    "argmax_word_minus",
]


@dataclass
class RunConfig:
    command: str
    input: str = None
    out: str = None
    max_depth: int = 8
    norm: str = "euclidean"
    adapted_depth: int = 6
    rho_hat: float = None
    delta: float = 0.05
    gamma: str = None
    seed: int = 0
    workers: int = 1
    cycle: str = "0"
    svg: str = None
    tail_fraction: float = 0.5


def _word_text(word):
    return "-".join(str(i) for i in word)


def _fail(kind, message, code):
    sys.stderr.write("jsrkit: %s: %s\n" % (kind, message))
    return code


def _parse_gamma(text):
    out = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        p, q = token.split("/")
        out.append(Fraction(int(p), int(q)))
    return out


def _make_norm(cfg, mset):
    if cfg.norm == "euclidean":
        return extremal.EuclideanNorm()
    rho_hat = cfg.rho_hat
    if rho_hat is None:
        probe = bounds.pruned_bounds(mset, delta=max(cfg.delta, 0.05), max_depth=12)
        rho_hat = 0.5 * (probe.lower + probe.upper)
    return extremal.AdaptedNorm(mset, rho_hat=rho_hat, depth=cfg.adapted_depth)


def _metadata(cfg, counter, started, extra=None):
    payload = {
        "tool": "jsrkit",
        "version": __version__,
        "config": dataclasses.asdict(cfg),
        "budget_limit": counter.limit,
        "budget_used": counter.used,
        "wall_time_s": time.monotonic() - started,
    }
    if extra:
        payload.update(extra)
    return payload


def _bounds_rows(report):
    return [
        (
            row.n,
            row.rho_plus,
            row.rho_minus,
            row.best_lower,
            row.best_upper,
            row.gap,
            _word_text(row.word_plus),
            _word_text(row.word_minus),
        )
        for row in report.rows
    ]


def _run_bounds(cfg, fit=False):
    started = time.monotonic()
    mset = fileio.load_matrix_set(cfg.input)
    counter = bounds.BudgetCounter()
    norm = _make_norm(cfg, mset)
    report = bounds.sandwich(
        mset, cfg.max_depth, norm=norm, budget=counter, workers=cfg.workers
    )
    extra = {"norm": report.norm_label, "truncated": report.truncated}
    if fit and len(report.rows) >= 12:
        rate = bounds.fit_rate(report, cfg.tail_fraction)
        report.fitted_rate = None if rate.converged else rate.r_hat
        extra["fitted_rate"] = report.fitted_rate
        extra["fit_r_squared"] = None if rate.converged else rate.r_squared
        extra["gap_converged"] = rate.converged
    fileio.write_csv(cfg.out, BOUNDS_HEADER, _bounds_rows(report))
    if cfg.svg:
        rows = report.rows
        fileio.write_gap_svg(cfg.svg, [r.n for r in rows], [r.gap for r in rows])
    fileio.write_metadata(cfg.out + ".meta.json", _metadata(cfg, counter, started, extra))
    if report.truncated:
        return _fail("inconclusive", "budget exhausted before depth %d" % cfg.max_depth, EXIT_INCONCLUSIVE)
    return EXIT_OK


def _run_pruned(cfg):
    started = time.monotonic()
    mset = fileio.load_matrix_set(cfg.input)
    counter = bounds.BudgetCounter()
    result = bounds.pruned_bounds(mset, cfg.delta, max_depth=cfg.max_depth, budget=counter)
    fileio.write_csv(
        cfg.out,
        ["lower", "upper", "gap", "conclusive", "expanded", "deepest"],
        [
            (
                result.lower,
                result.upper,
                result.upper - result.lower,
                int(result.conclusive),
                result.expanded,
                result.deepest,
            )
        ],
    )
    fileio.write_metadata(cfg.out + ".meta.json", _metadata(cfg, counter, started))
    if not result.conclusive:
        return _fail(
            "inconclusive",
            "gap %.6g above delta %.6g at depth %d"
            % (result.upper - result.lower, cfg.delta, cfg.max_depth),
            EXIT_INCONCLUSIVE,
        )
    return EXIT_OK


def _run_splitting(cfg):
    started = time.monotonic()
    mset = fileio.load_matrix_set(cfg.input)
    counter = bounds.BudgetCounter()
    word = shiftspace.PeriodicWord([int(s) for s in cfg.cycle.split(",")])
    word.validate_for(mset)
    probe = bounds.pruned_bounds(mset, delta=0.05, max_depth=14, budget=counter)
    rho_hat = cfg.rho_hat or 0.5 * (probe.lower + probe.upper)
    working = mset.scaled(1.0 / rho_hat)
    horizon = max(4 * word.period, 2 * cfg.max_depth)
    p, thetas = cocycle.detect_p(working, word, horizon)
    result = cocycle.finite_splitting(working, word, p, cfg.max_depth)
    diag = cocycle.splitting_residuals(working, word, result, n_max=horizon)
    rows = [(n, v) for n, v in diag.cauchy_table]
    fileio.write_csv(cfg.out, ["n", "cauchy_dgr"], rows)
    fileio.write_metadata(
        cfg.out + ".meta.json",
        _metadata(
            cfg,
            counter,
            started,
            {
                "rho_hat": rho_hat,
                "p": p,
                "theta_estimates": thetas,
                "invariance_residual": diag.invariance_residual,
                "commutation_residual": diag.commutation_residual,
                "delta_hat": diag.delta_hat,
                "xi_hat": diag.xi_hat,
                "contraction_r2": diag.contraction_r2,
                "cauchy_rate": diag.cauchy_rate,
                "cauchy_r2": diag.cauchy_r2,
            },
        ),
    )
    return EXIT_OK


def _run_sturmian(cfg):
    started = time.monotonic()
    counter = bounds.BudgetCounter()
    convergents = _parse_gamma(cfg.gamma)
    point = shiftspace.sturmian_word(convergents, 0, cfg.max_depth, origin=0)
    rows = [(i, point.symbol(i)) for i in range(cfg.max_depth)]
    fileio.write_csv(cfg.out, ["i", "symbol"], rows)
    fileio.write_metadata(
        cfg.out + ".meta.json",
        _metadata(cfg, counter, started, {"gamma": str(convergents[-1])}),
    )
    return EXIT_OK


def _run_epsilon(cfg):
    started = time.monotonic()
    counter = bounds.BudgetCounter()
    system = shiftspace.SturmianSystem(_parse_gamma(cfg.gamma))
    result = shiftspace.epsilon_of_n(system, cfg.max_depth)
    rows = [(n, value, "exact" if result.exact else "upper") for n, value in result.per_n]
    fileio.write_csv(cfg.out, ["n", "epsilon", "certainty"], rows)
    fileio.write_metadata(
        cfg.out + ".meta.json",
        _metadata(
            cfg,
            counter,
            started,
            {
                "best_orbit": _word_text(result.orbit.cycle),
                "best_period": result.period,
            },
        ),
    )
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="jsrkit", description=__doc__)
    parser.add_argument("--version", action="version", version="jsrkit %s" % __version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("bounds", "convergence", "pruned", "splitting", "sturmian", "epsilon"):
        cmd = sub.add_parser(name)
        cmd.add_argument("--input", help="matrix-set JSON file")
        cmd.add_argument("--out", required=True, help="CSV output path")
        cmd.add_argument("--max-depth", type=int, default=8, dest="max_depth")
        cmd.add_argument("--norm", choices=["euclidean", "adapted"], default="euclidean")
        cmd.add_argument("--adapted-depth", type=int, default=6, dest="adapted_depth")
        cmd.add_argument("--rho-hat", type=float, default=None, dest="rho_hat")
        cmd.add_argument("--delta", type=float, default=0.05)
        cmd.add_argument("--gamma", help="comma list of convergents p/q")
        cmd.add_argument("--seed", type=int, default=0)
        cmd.add_argument("--workers", type=int, default=1)
        cmd.add_argument("--cycle", default="0", help="comma list of symbols for the orbit")
        cmd.add_argument("--svg", default=None, help="optional SVG plot of the gap column")
        cmd.add_argument("--tail-fraction", type=float, default=0.5, dest="tail_fraction")
    return parser


def run(cfg):
    needs_input = cfg.command in ("bounds", "convergence", "pruned", "splitting")
    if needs_input and not cfg.input:
        return _fail("input", "--input is required for %s" % cfg.command, EXIT_INPUT)
    if cfg.command in ("sturmian", "epsilon") and not cfg.gamma:
        return _fail("input", "--gamma is required for %s" % cfg.command, EXIT_INPUT)
    if not cfg.out:
        return _fail("input", "--out must be nonempty", EXIT_INPUT)
    if cfg.max_depth < 1:
        return _fail("input", "--max-depth must be at least 1", EXIT_INPUT)
    try:
        if cfg.command == "bounds":
            return _run_bounds(cfg)
        if cfg.command == "convergence":
            return _run_bounds(cfg, fit=True)
        if cfg.command == "pruned":
            return _run_pruned(cfg)
        if cfg.command == "splitting":
            return _run_splitting(cfg)
        if cfg.command == "sturmian":
            return _run_sturmian(cfg)
        if cfg.command == "epsilon":
            return _run_epsilon(cfg)
        return _fail("input", "unknown command %r" % cfg.command, EXIT_INPUT)
    except (fileio.MatrixSetFormatError, FileNotFoundError, IsADirectoryError) as exc:
        return _fail("input", str(exc), EXIT_INPUT)
    except (ValueError, IndexError) as exc:
        return _fail("input", str(exc), EXIT_INPUT)
    except bounds.BudgetExceededError as exc:
        return _fail("inconclusive", str(exc), EXIT_INCONCLUSIVE)
    except cocycle.AmbiguousExponentsError as exc:
        return _fail("inconclusive", str(exc), EXIT_INCONCLUSIVE)
    except bounds.InternalInvariantError as exc:
        return _fail("internal", str(exc), EXIT_INTERNAL)
    except Exception as exc:  # no partial report: writes are atomic
        return _fail("internal", "%s: %s" % (type(exc).__name__, exc), EXIT_INTERNAL)


def main(argv=None):
    args = build_parser().parse_args(argv)
    cfg = RunConfig(**vars(args))
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
