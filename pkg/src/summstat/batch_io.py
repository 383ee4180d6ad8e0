"""CSV ingestion of study records and enriched output.

Input format (comma separated, decimal points, empty cell = field not
reported)::

    study_id,n,min,q1,median,q3,max[,mean_method,sd_method]

Each row's scenario is detected from which fields are present, the
estimators are applied (per-row method overrides beat the file-level
defaults), and an enriched CSV is written with the original cells
passed through verbatim plus ``scenario, mean_method, sd_method,
est_mean, est_sd, flags`` columns.  Rows that cannot be processed go to
``<output>.rejects.csv`` as ``line_no,reason`` and never abort the run.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Context, Decimal
from typing import Optional, TextIO, Union

from . import estimators
from .estimators import MethodId

__all__ = [
    "BatchCounts",
    "EnrichedRecord",
    "StudyRecord",
    "UnsupportedPatternError",
    "detect_scenario",
    "process_file",
    "process_stream",
]

INPUT_FIELDS = ("study_id", "n", "min", "q1", "median", "q3", "max")
OPTIONAL_FIELDS = ("mean_method", "sd_method")
OUTPUT_FIELDS = INPUT_FIELDS + ("scenario", "mean_method", "sd_method", "est_mean", "est_sd", "flags")
REJECT_FIELDS = ("line_no", "reason")

_SIX_SIG = Context(prec=6, rounding=ROUND_HALF_UP)


class UnsupportedPatternError(ValueError):
    """Field presence matches none of the supported scenarios."""


@dataclass(frozen=True)
class StudyRecord:
    """One parsed input row; None marks a field the study did not report."""

    study_id: str
    n: int
    min: Optional[float] = None
    q1: Optional[float] = None
    median: Optional[float] = None
    q3: Optional[float] = None
    max: Optional[float] = None
    mean_method: Optional[MethodId] = None
    sd_method: Optional[MethodId] = None


@dataclass(frozen=True)
class EnrichedRecord:
    record: StudyRecord
    scenario: str
    mean_method: MethodId
    sd_method: MethodId
    est_mean: float
    est_sd: float
    flags: tuple[str, ...]


def detect_scenario(record: StudyRecord) -> str:
    """C1/C2/C3 from field presence; anything else is unsupported."""
    if record.median is None or record.n is None:
        missing = [f for f in ("median", "n") if getattr(record, f) is None]
        raise UnsupportedPatternError(f"required field(s) missing: {', '.join(missing)}")
    has_min, has_max = record.min is not None, record.max is not None
    has_q1, has_q3 = record.q1 is not None, record.q3 is not None
    if has_min and has_max and has_q1 and has_q3:
        return "C2"
    if has_min and has_max and not has_q1 and not has_q3:
        return "C1"
    if has_q1 and has_q3 and not has_min and not has_max:
        return "C3"
    present = [f for f in ("min", "q1", "q3", "max") if getattr(record, f) is not None]
    absent = [f for f in ("min", "q1", "q3", "max") if getattr(record, f) is None]
    raise UnsupportedPatternError(
        "field pattern matches no scenario "
        f"(present: {', '.join(present) or 'none'}; absent: {', '.join(absent)})"
    )


def _scenario_input(record: StudyRecord, scenario: str) -> estimators.ScenarioInput:
    if scenario == "C1":
        return estimators.C1(a=record.min, m=record.median, b=record.max, n=record.n)
    if scenario == "C2":
        return estimators.C2(
            a=record.min, q1=record.q1, m=record.median, q3=record.q3, b=record.max, n=record.n
        )
    return estimators.C3(q1=record.q1, m=record.median, q3=record.q3, n=record.n)


def enrich(
    record: StudyRecord,
    default_mean: Optional[MethodId] = None,
    default_sd: Optional[MethodId] = None,
) -> EnrichedRecord:
    """Detect the scenario and apply the estimators to one record."""
    scenario = detect_scenario(record)
    est = estimators.estimate(
        _scenario_input(record, scenario),
        record.mean_method or default_mean,
        record.sd_method or default_sd,
    )
    return EnrichedRecord(
        record=record,
        scenario=scenario,
        mean_method=est.mean_method,
        sd_method=est.sd_method,
        est_mean=est.mean,
        est_sd=est.sd,
        flags=tuple(sorted(f.value for f in est.flags)),
    )


@dataclass(frozen=True)
class BatchCounts:
    processed: int
    enriched: int
    rejected: int


def format_number(x: float) -> str:
    """Up to 6 significant digits, ties away from zero, no exponent."""
    d = _SIX_SIG.plus(Decimal(repr(float(x))))
    s = format(d, "f")
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _parse_float(cell: str, name: str) -> Optional[float]:
    cell = cell.strip()
    if not cell:
        return None
    try:
        return float(cell)
    except ValueError:
        raise ValueError(f"invalid number in column '{name}': {cell!r}") from None


def _parse_method(cell: str, name: str) -> Optional[MethodId]:
    cell = cell.strip()
    if not cell:
        return None
    try:
        return MethodId(cell)
    except ValueError:
        raise ValueError(f"unknown method token in column '{name}': {cell!r}") from None


def _parse_row(raw: dict) -> StudyRecord:
    n_cell = (raw.get("n") or "").strip()
    if not n_cell:
        raise ValueError("required column 'n' is empty")
    try:
        n = int(n_cell)
    except ValueError:
        raise ValueError(f"invalid integer in column 'n': {n_cell!r}") from None
    return StudyRecord(
        study_id=(raw.get("study_id") or "").strip(),
        n=n,
        min=_parse_float(raw.get("min") or "", "min"),
        q1=_parse_float(raw.get("q1") or "", "q1"),
        median=_parse_float(raw.get("median") or "", "median"),
        q3=_parse_float(raw.get("q3") or "", "q3"),
        max=_parse_float(raw.get("max") or "", "max"),
        mean_method=_parse_method(raw.get("mean_method") or "", "mean_method"),
        sd_method=_parse_method(raw.get("sd_method") or "", "sd_method"),
    )


def _check_header(fieldnames) -> None:
    if fieldnames is None:
        raise ValueError("input file is empty; expected a header row")
    names = [f.strip() for f in fieldnames]
    if tuple(names[: len(INPUT_FIELDS)]) != INPUT_FIELDS:
        raise ValueError(
            f"invalid header: expected it to start with {','.join(INPUT_FIELDS)}, got {','.join(names)}"
        )
    extra = names[len(INPUT_FIELDS):]
    if tuple(extra) not in ((), OPTIONAL_FIELDS[:1], OPTIONAL_FIELDS):
        raise ValueError(
            f"invalid header: trailing columns {extra} (allowed: {list(OPTIONAL_FIELDS)})"
        )


def process_stream(
    infile: TextIO,
    outfile: TextIO,
    rejects: TextIO,
    default_mean: Optional[Union[MethodId, str]] = None,
    default_sd: Optional[Union[MethodId, str]] = None,
) -> BatchCounts:
    """Core of :func:`process_file`, on already-open text streams."""
    default_mean = MethodId(default_mean) if default_mean else None
    default_sd = MethodId(default_sd) if default_sd else None

    reader = csv.DictReader(infile)
    _check_header(reader.fieldnames)
    writer = csv.writer(outfile, lineterminator="\n")
    writer.writerow(OUTPUT_FIELDS)
    reject_writer = csv.writer(rejects, lineterminator="\n")
    reject_writer.writerow(REJECT_FIELDS)

    processed = enriched_count = rejected = 0
    for line_no, raw in enumerate(reader, start=2):
        processed += 1
        try:
            enriched = enrich(_parse_row(raw), default_mean, default_sd)
        except ValueError as exc:  # parse, pattern, validation or dispatch
            rejected += 1
            reject_writer.writerow([line_no, str(exc)])
            continue
        enriched_count += 1
        writer.writerow(
            [raw.get(f) or "" for f in INPUT_FIELDS]
            + [
                enriched.scenario,
                enriched.mean_method.value,
                enriched.sd_method.value,
                format_number(enriched.est_mean),
                format_number(enriched.est_sd),
                ";".join(enriched.flags),
            ]
        )
    return BatchCounts(processed=processed, enriched=enriched_count, rejected=rejected)


def process_file(
    input_path: str,
    output_path: str,
    default_mean: Optional[Union[MethodId, str]] = None,
    default_sd: Optional[Union[MethodId, str]] = None,
) -> BatchCounts:
    """Enrich ``input_path`` into ``output_path``.

    Returns the processed/enriched/rejected counts.  The rejects file
    ``<output_path>.rejects.csv`` is always written (header only when
    nothing was rejected).
    """
    rejects_path = f"{output_path}.rejects.csv"
    with open(input_path, newline="") as infile, \
            open(output_path, "w", newline="") as outfile, \
            open(rejects_path, "w", newline="") as rejects:
        return process_stream(infile, outfile, rejects, default_mean, default_sd)
