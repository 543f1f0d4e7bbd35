"""Report emission: plain text tables, a delimited CSV file, and matplotlib
figures rendered next to the CSV.
"""

from __future__ import annotations

import csv
import os
from typing import Mapping, Sequence, TextIO

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .bench import CLIENT_STAGES, SERVER_STAGES, BenchmarkSummary  # noqa: E402
from .oracle import Scheme  # noqa: E402


def format_bench_table(summaries: Mapping[Scheme, BenchmarkSummary]) -> str:
    lines = []
    for scheme, s in summaries.items():
        lines.append(f"scheme={scheme.value} m={s.m} n={s.n} repetitions={s.repetitions}")
        for key, (lo, avg, hi) in s.stage_stats.items():
            lines.append(f"  {key:<22} min={lo:.6f} mean={avg:.6f} max={hi:.6f}")
        lines.append(
            f"  messages: upstream={s.upstream_messages} downstream={s.downstream_messages}"
        )
        lines.append(
            f"  bytes: upstream={s.upstream_bytes} downstream={s.downstream_bytes} "
            f"client_vector={s.client_vector_bytes} server_vector={s.server_vector_bytes}"
        )
    return "\n".join(lines)


def write_bench_csv(summaries: Mapping[Scheme, BenchmarkSummary], path: str) -> None:
    first = next(iter(summaries.values()))
    stage_keys = list(first.stage_stats)
    fields = (
        ["scheme", "m", "n", "repetitions"]
        + [f"{k}_{agg}" for k in stage_keys for agg in ("min", "mean", "max")]
        + [
            "upstream_messages",
            "downstream_messages",
            "upstream_bytes",
            "downstream_bytes",
            "client_vector_bytes",
            "server_vector_bytes",
        ]
    )
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for scheme, s in summaries.items():
            row = {"scheme": scheme.value, "m": s.m, "n": s.n, "repetitions": s.repetitions}
            for k, (lo, avg, hi) in s.stage_stats.items():
                row[f"{k}_min"] = f"{lo:.9f}"
                row[f"{k}_mean"] = f"{avg:.9f}"
                row[f"{k}_max"] = f"{hi:.9f}"
            row["upstream_messages"] = s.upstream_messages
            row["downstream_messages"] = s.downstream_messages
            row["upstream_bytes"] = s.upstream_bytes
            row["downstream_bytes"] = s.downstream_bytes
            row["client_vector_bytes"] = s.client_vector_bytes
            row["server_vector_bytes"] = s.server_vector_bytes
            writer.writerow(row)


def _stacked_stage_figure(
    summaries: Mapping[Scheme, BenchmarkSummary],
    stages: Sequence[str],
    prefix: str,
    title: str,
    path: str,
) -> None:
    schemes = list(summaries)
    labels = [s.value for s in schemes]
    bottoms = [0.0] * len(schemes)
    fig, ax = plt.subplots(figsize=(6, 4))
    for stage in stages:
        key = f"{prefix}_{stage.lower()}_s"
        heights = [summaries[s].stage_stats[key][1] for s in schemes]
        ax.bar(labels, heights, bottom=bottoms, label=stage)
        bottoms = [b + h for b, h in zip(bottoms, heights)]
    ax.set_ylabel("time (s)")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_bench_figures(summaries: Mapping[Scheme, BenchmarkSummary], csv_path: str) -> list[str]:
    """Render stage-breakdown figures alongside the CSV; returns figure paths."""
    stem, _ = os.path.splitext(csv_path)
    client_fig = f"{stem}_client_stages.png"
    server_fig = f"{stem}_server_stages.png"
    _stacked_stage_figure(
        summaries, CLIENT_STAGES, "client", "Client stage times (mean)", client_fig
    )
    _stacked_stage_figure(
        summaries, SERVER_STAGES, "server", "Server stage times (mean)", server_fig
    )
    return [client_fig, server_fig]


def print_timings(label: str, timings: Mapping[str, float], out: TextIO) -> None:
    out.write(f"{label} timings:\n")
    for stage, seconds in timings.items():
        out.write(f"  {stage:<10} {seconds:.6f} s\n")
