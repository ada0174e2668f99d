"""``aec-sim``: run echo cancellation scenarios and write metrics as CSV."""
import argparse
import contextlib
import re
import sys

from ..canceller import POLICIES
from ..errors import ConfigError
from .harness import nfr_sweep, run_scenario, write_metrics_csv, write_summary_csv
from .scenario import ScenarioConfig

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def _optional_seconds(text):
    if text.lower() in ("none", "off"):
        return None
    return float(text)


def _float_list(values):
    out = []
    for v in values:
        out.extend(float(t) for t in v.split(",") if t.strip())
    return out


def _scenario_args(p):
    p.add_argument("--noise-db", type=float, default=-20.0,
                   help="background noise relative to echo power (use --noise-db=-inf to disable)")
    p.add_argument("--duration-s", type=float, default=32.0)
    p.add_argument("--path-change-at-s", type=_optional_seconds, default=16.0,
                   help="echo path change time in seconds, or 'none'")
    p.add_argument("--path-similarity", type=float, default=0.5)
    p.add_argument("--sample-rate", type=int, default=8000)
    p.add_argument("--block-size", type=int, default=64)
    p.add_argument("--partitions", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--far-wav", default=None, help="16-bit PCM mono far-end source")
    p.add_argument("--near-wav", default=None, help="16-bit PCM mono near-end source")
    p.add_argument("--mu", type=float, default=0.25, help="rate of the fixed policy")
    p.add_argument("--out", required=True, help="output CSV path, '-' for stdout")


def build_parser():
    parser = argparse.ArgumentParser(prog="aec-sim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario and write per-frame metrics")
    run.add_argument("--policy", choices=POLICIES, default="proposed")
    run.add_argument("--nfr-db", type=float, default=0.0,
                     help="near-end to far-end ratio (-inf for no near-end talker)")
    _scenario_args(run)

    sweep = sub.add_parser("sweep", help="steady-state summary over NFR values and policies")
    sweep.add_argument("--nfr-db-list", nargs="+", required=True, help="NFR values, space or comma separated")
    sweep.add_argument("--policies", nargs="+", choices=POLICIES, default=list(POLICIES))
    sweep.add_argument("--jobs", type=int, default=1)
    _scenario_args(sweep)
    return parser


def _scenario(args, nfr_db):
    return ScenarioConfig(
        sample_rate=args.sample_rate,
        duration_s=args.duration_s,
        path_change_at_s=args.path_change_at_s,
        path_similarity=args.path_similarity,
        nfr_db=nfr_db,
        noise_db=args.noise_db,
        far_wav=args.far_wav,
        near_wav=args.near_wav,
        seed=args.seed,
        block_size=args.block_size,
        partitions=args.partitions,
    )


@contextlib.contextmanager
def _open_out(path):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


_NEGATIVE = re.compile(r"^-(\d|\.\d|inf\b)", re.IGNORECASE)


def _protect_negative_numbers(argv):
    # argparse only recognizes plain negative numbers as values; "-inf" and "-10,0" would be taken for flags
    return [" " + a if _NEGATIVE.match(a) else a for a in argv]


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_protect_negative_numbers(argv))
    try:
        if args.command == "run":
            result = run_scenario(_scenario(args, args.nfr_db), args.policy, mu=args.mu)
            with _open_out(args.out) as fh:
                write_metrics_csv(result.rows, fh)
            s = result.summary
            print(
                f"{s.policy}: steady-state ERLE {s.erle_ss_db:.2f} dB "
                f"({s.erle_ss_excl_switch_db:.2f} dB excluding the path change), "
                f"final misalignment {s.final_misalignment_db:.2f} dB",
                file=sys.stderr,
            )
        else:
            nfrs = _float_list(args.nfr_db_list)
            summaries = nfr_sweep(_scenario(args, 0.0), nfrs, args.policies, jobs=args.jobs, mu=args.mu)
            with _open_out(args.out) as fh:
                write_summary_csv(summaries, fh)
    except ConfigError as exc:
        print(f"aec-sim: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"aec-sim: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
