import argparse
import logging
import sys
from contextlib import contextmanager

from .brieskorn import defect, sample_binding, theta
from .concurrency import run_limited, thread_limit
from .datastructures import CotangentPoint, TorusModel, TorusPoint
from .exceptions import ConfigurationException, OpenBookException
from .logger import get_logger, setup_logging
from .pages import c_map, g_table, phi_embed
from .params import (
    DEFAULT_K,
    DEFAULT_N,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    FORMATS,
    RunConfig,
    parse_tolerance,
)
from .profile import TwistProfile, profile_table
from .report import render_csv, render_json
from .sampling import random_page_coords, random_torus_coords
from .suite import known_checks, run_cell
from .templating import render_text
from .utils import format_float, json_dumps

logger = get_logger("openbook")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

SAMPLE_KINDS = ("binding", "page", "torus", "all")
PROFILE_FORMATS = ("csv", "json")
PROFILE_COLUMNS = ("y", "f_k", "I", "h_k", "h_aux")
G_COLUMNS = ("r", "target", "g")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Numerical verification of open books on Brieskorn manifolds.",
        prog="openbook",
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", "-v", action="store_true", help="Log at DEBUG level.")
    verbosity.add_argument("--quiet", "-q", action="store_true", help="Log warnings only.")
    parser.add_argument(
        "--list-checks", action="store_true", help="Print the registered check names and exit."
    )

    commands = parser.add_subparsers(dest="command")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, action="append", help="Dimension n in [2, 4]; repeatable.")
    common.add_argument("--k", type=int, action="append", help="Exponent k >= 1; repeatable.")
    common.add_argument(
        "--seed", type=int, default=DEFAULT_SEED, help=f"Base seed (default: {DEFAULT_SEED})."
    )
    common.add_argument("--output", "-o", default=None, help="Output path (default: stdout).")

    verify = commands.add_parser("verify", parents=[common], help="Run the check suites.")
    verify.add_argument(
        "--samples",
        type=int,
        default=DEFAULT_SAMPLES,
        help=f"Samples per check (default: {DEFAULT_SAMPLES}).",
    )
    verify.add_argument(
        "--tol", action="append", default=[], metavar="CHECK=REAL", help="Override a tolerance."
    )
    verify.add_argument("--format", choices=FORMATS, default="json", help="Report format.")
    verify.add_argument(
        "--check",
        action="append",
        default=None,
        metavar="NAME",
        help="Run only this check or group (e.g. cmap); repeatable; default all.",
    )

    profile = commands.add_parser("profile", parents=[common], help="Tabulate the profile functions.")
    profile.add_argument("--format", choices=PROFILE_FORMATS, default="csv", help="Table format.")

    sample = commands.add_parser("sample", parents=[common], help="Emit sample points as JSON lines.")
    sample.add_argument("--count", type=int, default=10, help="Points per kind (default: 10).")
    sample.add_argument("--kind", choices=SAMPLE_KINDS, default="all", help="Which points to emit.")
    sample.add_argument(
        "--format", choices=("json",), default="json", help="Record format (JSON lines only)."
    )
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Build and validate a RunConfig; flags override the environment, which overrides defaults."""
    tol_overrides = dict(parse_tolerance(entry) for entry in getattr(args, "tol", []))
    config = RunConfig(
        command=args.command,
        n_list=tuple(args.n or DEFAULT_N),
        k_list=tuple(args.k or DEFAULT_K),
        samples=getattr(args, "samples", DEFAULT_SAMPLES),
        seed=args.seed,
        tol_overrides=tol_overrides,
        output=args.output,
        format=getattr(args, "format", "json"),
        checks=tuple(getattr(args, "check", None) or ("all",)),
        threads=thread_limit(),
        count=getattr(args, "count", 10),
        kind=getattr(args, "kind", "all"),
    )
    return config.validate(known_checks())


@contextmanager
def open_output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        yield handle


def _single_cell(config: RunConfig, what: str) -> tuple[int, int]:
    if len(config.k_list) != 1 or (what == "cell" and len(config.n_list) != 1):
        wanted = "one k" if what == "k" else "one n and one k"
        raise ConfigurationException(f"{config.command} takes {wanted}")
    return config.n_list[0], config.k_list[0]


def run_verify(config: RunConfig) -> int:
    """
    Run the suite for every (n, k) cell and write the report.

    Cells run concurrently, capped by OPENBOOK_THREADS; the report keeps
    the configured order. Returns 0 iff every check passes.
    """
    jobs = [
        (lambda params=params: run_cell(
            params, config.samples, config.seed, config.tol_overrides, config.selects
        ))
        for params in config.cells()
    ]
    reports = run_limited(jobs, config.threads)
    if config.format == "json":
        text = render_json(reports)
    elif config.format == "csv":
        text = render_csv(reports)
    else:
        text = render_text(reports)
    with open_output(config.output) as out:
        out.write(text)

    failing = [
        f"n={report.n} k={report.k} {name}" for report in reports for name in report.failing()
    ]
    if failing:
        print("failed checks:", file=sys.stderr)
        for name in failing:
            print(f"  {name}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def run_profile(config: RunConfig) -> int:
    """
    Write the y-table of the profile functions and the g-table.

    CSV puts a blank line between the two tables; JSON writes one document
    with both.
    """
    _, k = _single_cell(config, "k")
    profile = TwistProfile(k)
    rows, g_rows = profile_table(profile), g_table(profile)
    if config.format == "json":
        document = {
            "k": k,
            "profile": {"columns": list(PROFILE_COLUMNS), "rows": rows.tolist()},
            "g": {"columns": list(G_COLUMNS), "rows": g_rows.tolist()},
        }
        text = json_dumps(document) + "\n"
    else:
        lines = [",".join(PROFILE_COLUMNS)]
        lines += [",".join(format_float(v) for v in row) for row in rows]
        lines += ["", ",".join(G_COLUMNS)]
        lines += [",".join(format_float(v) for v in row) for row in g_rows]
        text = "\n".join(lines) + "\n"
    with open_output(config.output) as out:
        out.write(text)
    return EXIT_OK



def _defect_record(params, coords) -> dict:
    f_defect, sphere_defect = defect(params, coords)
    return {"f": f_defect, "sphere": sphere_defect}


def sample_records(config: RunConfig):
    """JSON-ready dicts for the requested sample points, in kind order."""
    n, k = _single_cell(config, "cell")
    cell = config.cells()[0]
    profile = TwistProfile(k)
    kinds = ("binding", "page", "torus") if config.kind == "all" else (config.kind,)
    for kind in kinds:
        for i in range(config.count):
            record = {"kind": kind, "index": i, "n": n, "k": k}
            if kind == "binding":
                z = sample_binding(cell, config.seed, i)
            elif kind == "page":
                y = random_page_coords(n, config.seed, "sample/page", i)
                base = CotangentPoint.from_array(y[1:])
                z = phi_embed(cell, y[0], base)
                angle = theta(z)
                record.update(t=float(y[0]), q=base.q.tolist(), p=base.p.tolist())
                record["theta"] = [angle.real, angle.imag]
            else:
                y = random_torus_coords(profile, n, config.seed, "sample/torus", i, config.count)
                point = TorusPoint.from_array(y, TorusModel.TWIST)
                z = c_map(cell, profile, point)
                record["torus"] = point.to_dict()
            record["z"] = z.coords.tolist()
            record["defect"] = _defect_record(cell, z.coords)
            yield record


def run_sample(config: RunConfig) -> int:
    with open_output(config.output) as out:
        for record in sample_records(config):
            out.write(json_dumps(record, indent=False) + "\n")
    return EXIT_OK


COMMANDS = {"verify": run_verify, "profile": run_profile, "sample": run_sample}


def main(argv=None) -> int:
    """
    Main entry point for the openbook CLI.

    Exit codes: 0 when everything passes, 1 on a numeric failure, 2 on a
    usage or configuration error.
    """
    parser = build_parser()
    args = parser.parse_args(argv)

    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    setup_logging(level)

    if args.list_checks:
        print("\n".join(known_checks()))
        return EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    try:
        config = config_from_args(args)
        return COMMANDS[config.command](config)
    except ConfigurationException as e:
        print(f"Error: {e.message}", file=sys.stderr)
        return EXIT_USAGE
    except OpenBookException as e:
        logger.error(f"{args.command} failed: {e.message}")
        return EXIT_FAILED
    except OSError as e:
        print(f"Error writing output: {e}", file=sys.stderr)
        return EXIT_FAILED
    except KeyboardInterrupt:
        print("\nInterrupted.", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
