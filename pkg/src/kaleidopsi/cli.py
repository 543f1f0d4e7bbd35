"""Command-line entry point.

Subcommands:
  run     execute one PSI run over a config, domain file, and relation CSVs
  gen     generate a synthetic domain + relation workload
  bench   time every scheme on identical generated data, emit a report
  attack  leakage clustering or the CPA distinguishing game

Exit codes: 0 success, 2 parameter error, 3 protocol error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from .attack import build_leakage_report, run_cpa_game
from .bench import BenchmarkRecord, run_benchmark
from .domain import DomainCatalog, load_domain_file, load_relation_csv
from .errors import DataError, ParameterError, ProtocolError
from .groups import GroupParams
from .oracle import Scheme, config_from_file, make_run_config, parse_config_file
from .prf import PrfKey
from .report import (
    format_bench_table,
    print_timings,
    write_bench_csv,
    write_bench_figures,
)
from .rng import RandomSource, SecureRandomSource, SeededRandomSource
from .runner import execute_run, make_backend, simulate_protocol
from .workload import WORKLOADS, domain_values, generate_workload

EXIT_OK = 0
EXIT_PARAMETER = 2
EXIT_PROTOCOL = 3
EXIT_IO = 4


def _master_rng(seed: int | None) -> RandomSource:
    return SeededRandomSource(seed) if seed is not None else SecureRandomSource()


def _spawn(master: RandomSource, tag: str) -> RandomSource:
    if isinstance(master, SeededRandomSource):
        return master.spawn(tag)
    return master


def _load_run_inputs(args) -> tuple[DomainCatalog, list]:
    catalog = load_domain_file(args.domain)
    relations = [load_relation_csv(path, i) for i, path in enumerate(args.relations)]
    return catalog, relations


def cmd_run(args) -> int:
    catalog, relations = _load_run_inputs(args)
    m = len(relations)
    master = _master_rng(args.seed)
    config = config_from_file(args.config, m, catalog.n, _spawn(master, "oracle"))
    if args.scheme is not None:
        scheme = Scheme.parse(args.scheme)
        config = make_run_config(
            scheme, config.params, m, catalog.n, _spawn(master, "oracle2"),
            protocol_iv=config.protocol_iv.value,
            prf_key=config.prf_key if scheme is Scheme.KALEIDO_AES else None,
            fixed_generator=config.fixed_generator if scheme is Scheme.PRISM else None,
            rnd_seed=config.rnd_seed if scheme is Scheme.KALEIDO_RND else None,
        )
    backend = make_backend(args.transport, m)
    try:
        outcome = execute_run(
            relations, catalog, config, backend,
            [_spawn(master, f"client:{i}") for i in range(m)],
        )
    finally:
        backend.close()

    for cid in sorted(outcome.client_results):
        result = outcome.client_results[cid]
        print(f"client {cid}:")
        for value in sorted(result.psi_values):
            print(f"PSI: {value}")
        print_timings(f"client {cid}", result.stage_timings, sys.stdout)
    record = BenchmarkRecord.from_outcome(config.scheme, m, catalog.n, outcome)
    print(
        f"messages: upstream={record.upstream_messages} downstream={record.downstream_messages}"
    )
    print(f"bytes: upstream={record.upstream_bytes} downstream={record.downstream_bytes}")
    return EXIT_OK


def cmd_gen(args) -> int:
    domain_path, relation_paths = generate_workload(
        args.workload, args.n, args.m, args.count, args.seed, args.out
    )
    print(f"domain: {domain_path}")
    for path in relation_paths:
        print(f"relation: {path}")
    return EXIT_OK


def cmd_bench(args) -> int:
    raw = parse_config_file(args.config)
    params = GroupParams(p=int(raw["p"]), q=int(raw["q"]))
    schemes = [Scheme.parse(s) for s in args.schemes.split(",")]
    catalog = DomainCatalog.from_values(domain_values(args.n))
    import random

    from .domain import Relation
    from .workload import sample_client_values

    rng = random.Random(args.seed if args.seed is not None else 0)
    relations = [
        Relation.from_items(i, sample_client_values(args.workload, list(catalog.values),
                                                    args.count, rng))
        for i in range(args.m)
    ]
    summaries = run_benchmark(
        schemes,
        relations,
        catalog,
        params,
        repetitions=args.repetitions,
        seed=args.seed if args.seed is not None else 0,
        backend_name=args.transport,
        protocol_iv=int(raw["protocol_iv"]) if "protocol_iv" in raw else None,
    )
    print(format_bench_table(summaries))
    if args.out:
        write_bench_csv(summaries, args.out)
        figures = write_bench_figures(summaries, args.out)
        print(f"report: {args.out}")
        for fig in figures:
            print(f"figure: {fig}")
    return EXIT_OK


def cmd_attack(args) -> int:
    raw = parse_config_file(args.config)
    params = GroupParams(p=int(raw["p"]), q=int(raw["q"]))
    scheme = Scheme.parse(args.scheme if args.scheme else raw.get("scheme", "prism"))
    master = _master_rng(args.seed)

    if args.mode == "cpa":
        outcome = run_cpa_game(scheme, params, args.m, args.trials, _spawn(master, "cpa"))
        print(f"cpa scheme={scheme.value} trials={outcome.trials} "
              f"successes={outcome.successes} success_rate={outcome.success_rate:.4f}")
        return EXIT_OK

    # Leakage analysis: run one instance (supplied or generated) and report
    # the ciphertext-equality structure with per-client inferences.
    oracle_rng = _spawn(master, "oracle")
    if args.domain and args.relations:
        catalog = load_domain_file(args.domain)
        relations = [load_relation_csv(p, i) for i, p in enumerate(args.relations)]
    else:
        import random

        from .domain import Relation
        from .workload import sample_client_values

        rng = random.Random(args.seed if args.seed is not None else 0)
        values = domain_values(16)
        catalog = DomainCatalog.from_values(values)
        relations = [
            Relation.from_items(i, sample_client_values("uniform", values, 8, rng))
            for i in range(args.m)
        ]
    m = len(relations)
    kwargs = {}
    if scheme is Scheme.PRISM and "prism_generator" in raw:
        kwargs["fixed_generator"] = int(raw["prism_generator"])
    if scheme is Scheme.KALEIDO_AES and "prf_key_hex" in raw:
        kwargs["prf_key"] = PrfKey.from_hex(raw["prf_key_hex"])
    if "protocol_iv" in raw:
        kwargs["protocol_iv"] = int(raw["protocol_iv"])
    config = make_run_config(scheme, params, m, catalog.n, oracle_rng, **kwargs)
    trace = simulate_protocol(
        relations, catalog, config, [_spawn(master, f"client:{i}") for i in range(m)]
    )
    report = build_leakage_report(trace.combined, trace.plain_vectors, relations, catalog)
    print(f"leakage scheme={scheme.value} m={m} n={catalog.n}")
    print(f"psi_positions: {sorted(trace.psi_positions)}")
    for group in report.equal_groups:
        print("group: " + ",".join(str(i) for i in sorted(group)))
    for inf in report.inferences:
        print(f"inference: client={inf.client} pair={inf.positions[0]},{inf.positions[1]} "
              f"case={inf.case.value} :: {inf.statement}")
    if report.card_correlation is not None:
        print(f"clusters_match_holder_counts: {report.card_correlation}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kpsi", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one PSI run")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--domain", required=True)
    p_run.add_argument("--relations", nargs="+", required=True)
    p_run.add_argument("--scheme", default=None)
    p_run.add_argument("--transport", choices=("inproc", "tcp"), default="inproc")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.set_defaults(func=cmd_run)

    p_gen = sub.add_parser("gen", help="generate a synthetic workload")
    p_gen.add_argument("--workload", choices=WORKLOADS, default="uniform")
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--m", type=int, required=True)
    p_gen.add_argument("--count", type=int, required=True)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True, help="output directory")
    p_gen.set_defaults(func=cmd_gen)

    p_bench = sub.add_parser("bench", help="benchmark the schemes")
    p_bench.add_argument("--config", required=True)
    p_bench.add_argument("--schemes", default="prism,kaleido-rnd,kaleido-aes")
    p_bench.add_argument("--workload", choices=WORKLOADS, default="uniform")
    p_bench.add_argument("--n", type=int, default=10_000)
    p_bench.add_argument("--m", type=int, default=4)
    p_bench.add_argument("--count", type=int, default=None)
    p_bench.add_argument("--repetitions", type=int, default=1)
    p_bench.add_argument("--transport", choices=("inproc", "tcp"), default="inproc")
    p_bench.add_argument("--seed", type=int, default=None)
    p_bench.add_argument("--out", default=None, help="CSV report path (figures land beside it)")
    p_bench.set_defaults(func=cmd_bench)

    p_attack = sub.add_parser("attack", help="leakage report or CPA game")
    p_attack.add_argument("--config", required=True)
    p_attack.add_argument("--mode", choices=("leakage", "cpa"), required=True)
    p_attack.add_argument("--scheme", default=None)
    p_attack.add_argument("--trials", type=int, default=100)
    p_attack.add_argument("--m", type=int, default=4)
    p_attack.add_argument("--domain", default=None)
    p_attack.add_argument("--relations", nargs="*", default=None)
    p_attack.add_argument("--seed", type=int, default=None)
    p_attack.set_defaults(func=cmd_attack)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "count", None) is None and args.command == "bench":
        args.count = max(1, (args.n * 4) // 5)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMETER
    except ProtocolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
