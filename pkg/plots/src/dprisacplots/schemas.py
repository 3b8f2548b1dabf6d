"""CSV schema registry shared by every figure family.

Each experiment accepts its per-seed schema and, where one exists, the
aggregated summary schema written alongside it. Validation reports the exact
column diff so a mismatched file is easy to trace.
"""

import csv

EXPERIMENTS = ("convergence", "sp_comparison", "quantization", "xpd_sweep",
               "snr_tradeoff", "beampattern")

SCHEMAS = {
    "convergence": (
        ["l", "seed", "iteration", "sum_rate_nats"],
        ["iteration", "objective", "res_x", "res_y", "res_z"],
    ),
    "sp_comparison": (
        ["n_t", "variant", "seed", "sum_rate_nats"],
        ["n_t", "variant", "mean_rate_nats", "stderr", "n"],
    ),
    "quantization": (
        ["n_t", "variant", "mode", "bits", "seed", "sum_rate_nats"],
        ["n_t", "variant", "mode", "bits", "mean_rate_nats", "stderr", "n"],
    ),
    "xpd_sweep": (
        ["l", "xpd_los_db", "xpd_nlos_db", "seed", "sum_rate_nats"],
        ["l", "xpd_los_db", "xpd_nlos_db", "mean_rate_nats", "stderr", "n"],
    ),
    "snr_tradeoff": (
        ["n_t", "gamma_th_db", "seed", "sum_rate_nats"],
        ["n_t", "gamma_th_db", "mean_rate_nats", "stderr", "n"],
    ),
    "beampattern": (
        ["angle_deg", "pv", "ph", "ptotal"],
    ),
}


class SchemaError(ValueError):
    """CSV header does not match any schema of the experiment."""


def load_rows(experiment: str, csv_path: str):
    """Read and validate a CSV; returns (header, rows as string lists)."""
    if experiment not in SCHEMAS:
        raise SchemaError(f"unknown experiment {experiment!r}; expected one of {EXPERIMENTS}")
    try:
        with open(csv_path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise SchemaError(f"{csv_path}: empty file, no header") from None
            rows = list(reader)
    except OSError as exc:
        raise SchemaError(f"cannot read {csv_path}: {exc}") from exc
    for candidate in SCHEMAS[experiment]:
        if header == candidate:
            if not rows:
                raise SchemaError(f"{csv_path}: header only, no data rows")
            return header, rows
    diffs = []
    for candidate in SCHEMAS[experiment]:
        missing = [c for c in candidate if c not in header]
        extra = [c for c in header if c not in candidate]
        diffs.append(f"  expected {candidate}: missing {missing or '-'}, unexpected {extra or '-'}")
    raise SchemaError(
        f"{csv_path}: header {header} does not match any {experiment} schema\n"
        + "\n".join(diffs))
