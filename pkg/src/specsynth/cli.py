"""Command-line entry point: ``specsynth {ingest,run,replay,report,check}``.

Exit codes: 0 success, 1 pipeline error (or a rejected contract / an
unreproduced counterexample), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .engine import EngineConfig, run_corpus
from .fuzz import (
    FuzzConfig,
    HarnessError,
    Status,
    build_harness,
    fuzz_contract,
    replay_counterexample,
    run_unit_stage,
)
from .generate import Enumerative, GeneratorError, RemoteChat, RemoteConfig, ScriptedMock
from .minilang import SourceError
from .mining import IngestError, ingest_corpus, manifest_json
from .report import FORMATS, aggregate, emit, load_report, report_json
from .speclang import ParseError, level_leq, level_of, parse_contract, print_contract

EXIT_OK, EXIT_PIPELINE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror or e}") from e


def _ingest(path):
    if not Path(path).exists():
        raise UsageError(f"no such corpus: {path}")
    return ingest_corpus(path)


def _prices(args):
    return tuple(args.prices) if args.prices else None


def cmd_ingest(args) -> int:
    corpus = _ingest(args.corpus)
    for a in corpus:
        f = a.features
        print(f"{a.name}: target {a.target_level.value} (loop={f.has_loop}, "
              f"heap_syntax={f.heap_syntax}, heap_dynamic={f.heap_dynamic}, "
              f"tests={len(a.tests)})")
    for note in corpus.notes:
        print(note)
    if args.manifest:
        Path(args.manifest).write_text(manifest_json(corpus), encoding="utf-8")
    return EXIT_OK


def _generator_factory(spec: str, remote_config):
    if spec == "enum":
        return lambda artifact: Enumerative()
    if spec.startswith("mock:"):
        script = spec[len("mock:"):]
        if not Path(script).exists():
            raise UsageError(f"no such mock script: {script}")
        return lambda artifact: ScriptedMock.from_file(script)
    if spec == "remote":
        if not remote_config:
            raise UsageError("--generator remote needs --remote-config")
        cfg = RemoteConfig.load(remote_config)
        return lambda artifact: RemoteChat(cfg)
    raise UsageError(f"unknown generator {spec!r}; expected mock:<script>, enum or remote")


def cmd_run(args) -> int:
    make = _generator_factory(args.generator, args.remote_config)
    corpus = _ingest(args.corpus)
    fuzz = FuzzConfig(max_execs=args.fuzz_execs, wall_budget=args.fuzz_seconds)
    cfg = EngineConfig(args.max_attempts, fuzz, args.generator, seed=args.seed,
                       persist_corpus=args.persist_corpus)
    records = run_corpus(corpus, make, cfg, args.parallel)
    config = {"corpus": Path(args.corpus).name, "generator": args.generator,
              "max_attempts": args.max_attempts, "fuzz_execs": args.fuzz_execs,
              "fuzz_seconds": args.fuzz_seconds, "seed": args.seed,
              "persist_corpus": args.persist_corpus, "excluded": corpus.excluded}
    Path(args.out).write_text(report_json(records, config, args.timings, _prices(args)),
                              encoding="utf-8")
    m = aggregate(records).metrics
    print(f"{m.total} functions: {m.test_valid} valid, {m.test_invalid} invalid, "
          f"{m.compile_error} compile errors -> {args.out}")
    return EXIT_OK


def cmd_replay(args) -> int:
    try:
        d = json.loads(_read(args.counterexample))
    except json.JSONDecodeError as e:
        raise UsageError(f"{args.counterexample} is not JSON: {e}") from e
    r = replay_counterexample(d)
    print(f"{d.get('function', '?')}: recorded {r.recorded}, replayed "
          f"{r.verdict.outcome.value}" + (f" ({r.verdict.detail})" if r.verdict.detail else ""))
    print("reproduced" if r.reproduced else "NOT reproduced")
    return EXIT_OK if r.reproduced else EXIT_PIPELINE


def cmd_report(args) -> int:
    try:
        records = load_report(_read(args.report))
    except (json.JSONDecodeError, ValueError, KeyError) as e:
        raise UsageError(f"{args.report}: {e}") from e
    sys.stdout.write(emit(aggregate(records, _prices(args), args.timings), args.format))
    return EXIT_OK


def cmd_check(args) -> int:
    corpus = _ingest(args.entry)
    if len(corpus) != 1:
        raise UsageError(f"{args.entry} must hold exactly one function with unit tests "
                         f"(found {len(corpus)})")
    artifact = corpus[0]
    contract = parse_contract(_read(args.contract), params=artifact.fn.param_names)
    level = level_of(contract)
    print(f"{artifact.name}: contract level {level.value}, target "
          f"{artifact.target_level.value}")
    print(print_contract(contract))
    ok = level_leq(artifact.target_level, level)
    if not ok:
        print("level: below target")
    unit = run_unit_stage(artifact, contract)
    print(f"unit stage: {unit.status.value} ({unit.tests_run} tests)")
    if unit.status is not Status.PASS:
        print(unit.counterexample.feedback())
        return EXIT_PIPELINE
    res = fuzz_contract(artifact, contract, build_harness(artifact),
                        FuzzConfig(max_execs=args.fuzz_execs, wall_budget=args.fuzz_seconds,
                                   seed=args.seed))
    print(f"fuzz stage: {res.status.value} after {res.executions} executions "
          f"({res.skipped_pre_failed} rejected by the precondition)")
    if res.counterexample is not None:
        print(res.counterexample.feedback())
        if args.counterexample_out:
            Path(args.counterexample_out).write_text(
                json.dumps(res.counterexample.to_json(), indent=2, sort_keys=True) + "\n",
                encoding="utf-8")
    return EXIT_OK if ok and res.status is Status.PASSED else EXIT_PIPELINE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="specsynth", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ingest", help="parse a corpus and select target logics")
    s.add_argument("corpus")
    s.add_argument("--manifest", metavar="OUT.json")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("run", help="synthesize contracts for every function of a corpus")
    s.add_argument("corpus")
    s.add_argument("--generator", required=True, metavar="{mock:<script>|enum|remote}")
    s.add_argument("--remote-config", metavar="CONFIG.json")
    s.add_argument("--max-attempts", type=int, default=20)
    s.add_argument("--fuzz-execs", type=int, default=100_000)
    s.add_argument("--fuzz-seconds", type=float, default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--parallel", type=int, default=1)
    s.add_argument("--persist-corpus", action="store_true",
                   help="carry the fuzz corpus across a function's attempts")
    s.add_argument("--timings", action="store_true", help="include wall-clock durations")
    s.add_argument("--prices", type=float, nargs=2, metavar=("IN", "OUT"),
                   help="price per input and per output token")
    s.add_argument("--out", required=True, metavar="REPORT.json")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("replay", help="re-run a serialized counterexample")
    s.add_argument("counterexample")
    s.set_defaults(func=cmd_replay)

    s = sub.add_parser("report", help="render the tables of a run report")
    s.add_argument("report")
    s.add_argument("--format", choices=FORMATS, default="text")
    s.add_argument("--timings", action="store_true")
    s.add_argument("--prices", type=float, nargs=2, metavar=("IN", "OUT"))
    s.set_defaults(func=cmd_report)

    s = sub.add_parser("check", help="check one contract against one corpus entry")
    s.add_argument("entry")
    s.add_argument("contract")
    s.add_argument("--fuzz-execs", type=int, default=100_000)
    s.add_argument("--fuzz-seconds", type=float, default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--counterexample-out", metavar="CX.json")
    s.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "max_attempts", 1) < 1 or getattr(args, "fuzz_execs", 1) < 1 \
                or getattr(args, "parallel", 1) < 1:
            raise UsageError("--max-attempts, --fuzz-execs and --parallel must be positive")
        return args.func(args)
    except UsageError as e:
        print(f"specsynth {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (IngestError, SourceError, ParseError, HarnessError, GeneratorError) as e:
        print(f"specsynth {args.command}: {e}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
