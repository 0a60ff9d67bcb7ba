"""File schemas: run-record JSONL, sweep CSV, and metadata sidecars.

Every output file gets a ``<file>.meta.json`` sidecar carrying the
package version, the master seed, the seed-derivation identifier, and a
canonical echo of the experiment config - enough to reproduce the file
byte for byte.  Scheduling knobs (worker count, output paths) are
deliberately not part of the echo because they cannot change results.

Serialization rules, all load-bearing for byte determinism:
floats are written with ``repr`` (shortest round-trip form), JSONL
records use a fixed key order with compact separators, metadata is
sorted-key JSON, text is UTF-8 with LF line endings.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Union

from . import __version__
from .harness import RunResult, SweepSummary
from .rng import SEED_DERIVATION_ID

RUN_RECORDS_SCHEMA = "clogsim/run-records-v1"
SWEEP_CSV_SCHEMA = "clogsim/sweep-csv-v1"
LEMMA_RECORDS_SCHEMA = "clogsim/lemma-records-v1"
VALIDATE_REPORT_SCHEMA = "clogsim/validate-report-v1"

SWEEP_CSV_HEADER = "n,runs,median_B,q25_B,q75_B,truncated_frac,slope_context"

# Occupancy profiles are stored whole up to this many sites; longer runs
# keep the head (deep sites are the interesting part) and flag the cap.
PROFILE_COUNTS_CAP = 4096


def fmt_float(value: Optional[float]) -> str:
    """Shortest round-trip decimal form; empty string for absent values."""
    if value is None:
        return ""
    return repr(float(value))


def run_record(result: RunResult) -> Dict:
    counts = result.final_counts
    capped = len(counts) > PROFILE_COUNTS_CAP
    return {
        "run_index": result.run_index,
        "seed": result.seed,
        "n": result.params.n,
        "B": result.blockage_site,
        "particles_used": result.particles_used,
        "truncated": result.truncated,
        "escaped_count": result.escaped_count,
        "profile_summary": {
            "rightmost": result.rightmost,
            "counts": counts[:PROFILE_COUNTS_CAP],
            "counts_capped": capped,
        },
    }


def dumps_record(record: Dict) -> str:
    return json.dumps(record, separators=(",", ":"), allow_nan=False)


def write_jsonl(path: Union[str, Path], records: Iterable[Dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(dumps_record(record))
            fh.write("\n")


def read_jsonl(path: Union[str, Path]) -> List[Dict]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


def sweep_rows_dicts(summary: SweepSummary) -> List[Dict]:
    return [
        {
            "n": row.n,
            "runs": row.runs,
            "median_B": row.median_B,
            "q25_B": row.q25_B,
            "q75_B": row.q75_B,
            "truncated_frac": row.truncated_frac,
        }
        for row in summary.rows
    ]


def slope_context(fit: Optional[Dict], fit_note: str = "") -> str:
    """Compact key=value;... encoding of the fit, safe inside a CSV cell."""
    if fit is None:
        if fit_note:
            reason = fit_note.replace(",", ";").replace(" ", "_")
            return f"fit=refused;reason={reason}"
        return ""
    ci_low = "none" if fit.get("ci_low") is None else fmt_float(fit["ci_low"])
    ci_high = "none" if fit.get("ci_high") is None else fmt_float(fit["ci_high"])
    return (
        f"slope={fmt_float(fit['slope'])};intercept={fmt_float(fit['intercept'])};"
        f"stderr={fmt_float(fit['stderr'])};ci95_low={ci_low};ci95_high={ci_high};"
        f"points={fit['points']}"
    )


def sweep_csv_lines(rows: List[Dict], fit: Optional[Dict], fit_note: str = "") -> List[str]:
    context = slope_context(fit, fit_note)
    lines = [SWEEP_CSV_HEADER]
    for row in rows:
        lines.append(
            ",".join(
                [
                    str(row["n"]),
                    str(row["runs"]),
                    fmt_float(row["median_B"]),
                    fmt_float(row["q25_B"]),
                    fmt_float(row["q75_B"]),
                    fmt_float(row["truncated_frac"]),
                    context,
                ]
            )
        )
    return lines


def write_sweep_csv(
    path: Union[str, Path], rows: List[Dict], fit: Optional[Dict], fit_note: str = ""
) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in sweep_csv_lines(rows, fit, fit_note):
            fh.write(line)
            fh.write("\n")


def read_sweep_csv(path: Union[str, Path]) -> List[Dict]:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != SWEEP_CSV_HEADER:
            raise ValueError(f"unexpected sweep CSV header: {header!r}")
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            n, runs, med, q25, q75, trunc, context = line.split(",")
            rows.append(
                {
                    "n": int(n),
                    "runs": int(runs),
                    "median_B": float(med) if med else None,
                    "q25_B": float(q25) if q25 else None,
                    "q75_B": float(q75) if q75 else None,
                    "truncated_frac": float(trunc),
                    "slope_context": context,
                }
            )
    return rows


def parse_slope_context(context: str) -> Dict[str, str]:
    if not context:
        return {}
    return dict(item.split("=", 1) for item in context.split(";") if "=" in item)


def metadata_block(command: str, master_seed: int, config: Dict, schema: str) -> Dict:
    return {
        "version": __version__,
        "schema": schema,
        "command": command,
        "master_seed": master_seed,
        "seed_derivation": SEED_DERIVATION_ID,
        "config": config,
    }


def dumps_metadata(meta: Dict) -> str:
    return json.dumps(meta, sort_keys=True, indent=2, allow_nan=False) + "\n"


def meta_path(path: Union[str, Path]) -> Path:
    return Path(str(path) + ".meta.json")


def write_metadata(path: Union[str, Path], meta: Dict) -> None:
    with open(meta_path(path), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_metadata(meta))


def read_metadata(path: Union[str, Path]) -> Dict:
    with open(meta_path(path), "r", encoding="utf-8") as fh:
        return json.load(fh)
