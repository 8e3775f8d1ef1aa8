"""``star`` command line: simulate, metrics, assess, schedule, report, encrypt, decrypt.

JSON goes to stdout, diagnostics to stderr. Exit codes: 0 success,
1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .assessment import analyze_cohort, load_groupings, pair_records, read_records_csv, write_records_csv
from .metrics import compute_all, load_lexicon
from .reporting import load_thresholds, weekly_reports
from .scheduler import SchedulerConfig, SchedulerState, personalize_plan
from .session_model import (
    Phase,
    decrypt_log,
    encrypt_log,
    load_catalog,
    parse_log,
    random_nonce,
    read_key_file,
    serialize_log,
)
from .simulator import CohortConfig, phase_metric_pairs, simulate_study

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, sort_keys=False)
    sys.stdout.write("\n")


def _key(args) -> Optional[bytes]:
    return read_key_file(args.key_file) if getattr(args, "key_file", None) else None


def read_log_file(path, key: Optional[bytes] = None):
    data = Path(path).read_bytes()
    if str(path).endswith(".enc"):
        if key is None:
            raise ValueError(f"{path}: encrypted log needs --key-file")
        data = decrypt_log(data, key)
    return parse_log(data)


def _log_paths(target: Path) -> list[Path]:
    if target.is_dir():
        return sorted(p for p in target.rglob("*") if p.name.endswith((".slog", ".slog.enc")))
    return [target]


def cmd_metrics(args) -> int:
    lex = load_lexicon(args.lexicon)
    log = read_log_file(args.log, _key(args))
    _emit(compute_all(log, lex).to_dict())
    return EXIT_OK


def cmd_assess(args) -> int:
    items = load_groupings(args.groupings)
    records = read_records_csv(Path(args.records).read_text("utf-8"))
    metric_pairs = None
    if args.logs:
        key = _key(args)
        root = Path(args.logs)
        base = [read_log_file(p, key) for p in _log_paths(root / "baseline")]
        post = [read_log_file(p, key) for p in _log_paths(root / args.post_phase.lower())]
        metric_pairs = phase_metric_pairs(base, post, load_lexicon(args.lexicon))
    results = analyze_cohort(pair_records(records), metric_pairs, items)
    _emit([r.to_dict() for r in results])
    return EXIT_OK


def cmd_schedule(args) -> int:
    state = SchedulerState.load(args.state)
    catalog = load_catalog(args.catalog)
    plan = personalize_plan(state, catalog, args.horizon, now=args.now)
    _emit({"plan": plan})
    return EXIT_OK


def cmd_simulate(args) -> int:
    cohort = CohortConfig.from_dict(json.loads(Path(args.cohort).read_text("utf-8")))
    catalog = load_catalog(args.catalog)
    config = None
    if args.config:
        config = SchedulerConfig.from_dict(json.loads(Path(args.config).read_text("utf-8")))
    key = _key(args)
    result = simulate_study(cohort, catalog, config, lexicon=load_lexicon(args.lexicon))
    out = Path(args.out)
    written = 0
    for folder, logs in (
        ("baseline", result.baseline_logs),
        ("intervention", result.intervention_logs),
        ("exit", result.exit_logs),
    ):
        (out / folder).mkdir(parents=True, exist_ok=True)
        for log in logs:
            name = f"p{log.participant_id}_s{log.session_index:02d}.slog"
            data = serialize_log(log)
            if key is not None:
                data = encrypt_log(data, key, random_nonce())
                name += ".enc"
            (out / folder / name).write_bytes(data)
            written += 1
    (out / "records.csv").write_text(write_records_csv(result.records), "utf-8")
    schedules = {str(pid): s.to_dict() for pid, s in result.scheduler_states.items()}
    (out / "schedules.json").write_text(json.dumps(schedules, indent=1), "utf-8")
    _emit({"logs": written, "records": str(out / "records.csv"), "schedules": str(out / "schedules.json")})
    return EXIT_OK


def cmd_report(args) -> int:
    key = _key(args)
    logs = [read_log_file(p, key) for target in args.logs for p in _log_paths(Path(target))]
    logs = [log for log in logs if log.phase == Phase(args.phase)]
    activities = None
    if args.schedules:
        doc = json.loads(Path(args.schedules).read_text("utf-8"))
        activities = {int(pid): [(int(i), a) for i, a in s["history"]] for pid, s in doc.items()}
    reports = weekly_reports(logs, load_lexicon(args.lexicon), load_thresholds(args.thresholds),
                             activities=activities)
    _emit([r.to_dict() for r in reports])
    return EXIT_OK


def cmd_encrypt(args) -> int:
    nonce = bytes.fromhex(args.nonce) if args.nonce else random_nonce()
    Path(args.output).write_bytes(encrypt_log(Path(args.input).read_bytes(), _key(args), nonce))
    _emit({"written": args.output})
    return EXIT_OK


def cmd_decrypt(args) -> int:
    Path(args.output).write_bytes(decrypt_log(Path(args.input).read_bytes(), _key(args)))
    _emit({"written": args.output})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="star", description="Session metrics, adaptive scheduling, assessment statistics and study simulation.")
    p.add_argument("--version", action="version", version=f"star {__version__}")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", required=True)

    s = sub.add_parser("metrics", help="compute the seven behavior metrics of one log")
    s.add_argument("log", help=".slog or .slog.enc file")
    s.add_argument("--lexicon", help="lexicon JSON (default: bundled)")
    s.add_argument("--key-file", help="key for .slog.enc input (64 hex chars)")
    s.set_defaults(func=cmd_metrics)

    s = sub.add_parser("assess", help="paired t-tests for assessment categories (and metrics)")
    s.add_argument("--records", required=True, help="CSV: participant_id,phase,item_key,score")
    s.add_argument("--groupings", help="groupings JSON (default: bundled)")
    s.add_argument("--logs", help="simulate output dir; adds metric tests from baseline/ vs exit/ logs")
    s.add_argument("--post-phase", default="Exit", choices=["Exit", "Intervention"],
                   help="folder holding post logs (default: Exit)")
    s.add_argument("--lexicon", help="lexicon JSON (default: bundled)")
    s.add_argument("--key-file", help="key for encrypted logs")
    s.set_defaults(func=cmd_assess)

    s = sub.add_parser("schedule", help="plan the next activities for one child")
    s.add_argument("--state", required=True, help="scheduler state JSON")
    s.add_argument("--catalog", required=True, help="activity catalog JSON")
    s.add_argument("--horizon", type=int, default=1, help="number of sessions to plan")
    s.add_argument("--now", type=int, help="session index of the first planned session")
    s.set_defaults(func=cmd_schedule)

    s = sub.add_parser("simulate", help="run the simulated study and write logs + records")
    s.add_argument("--cohort", required=True, help="cohort JSON")
    s.add_argument("--catalog", help="activity catalog JSON (default: bundled)")
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--config", help="scheduler config JSON")
    s.add_argument("--lexicon", help="lexicon JSON (default: bundled)")
    s.add_argument("--key-file", help="write .slog.enc files encrypted with this key")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("report", help="weekly progress reports (star-report/1)")
    s.add_argument("logs", nargs="+", help="log files or directories")
    s.add_argument("--phase", default="Intervention", choices=[ph.value for ph in Phase])
    s.add_argument("--schedules", help="schedules.json from simulate, for activities_completed")
    s.add_argument("--lexicon", help="lexicon JSON (default: bundled)")
    s.add_argument("--thresholds", help="suggestion thresholds JSON (default: bundled)")
    s.add_argument("--key-file", help="key for encrypted logs")
    s.set_defaults(func=cmd_report)

    for name, func, what in (("encrypt", cmd_encrypt, "encrypt a file (AES-256-GCM)"),
                             ("decrypt", cmd_decrypt, "decrypt and authenticate a file")):
        s = sub.add_parser(name, help=what)
        s.add_argument("input")
        s.add_argument("output")
        s.add_argument("--key-file", required=True, help="32-byte key as 64 hex chars")
        if name == "encrypt":
            s.add_argument("--nonce", help="24 hex chars; random if omitted (never reuse per key)")
        s.set_defaults(func=func)
    return p


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError, ArithmeticError) as exc:
        print(f"star {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(cli_main())
