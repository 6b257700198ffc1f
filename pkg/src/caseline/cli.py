"""Command line interface for the corpus-to-report pipeline.

Subcommands cover the pipeline stages in order: ``filter`` screens a corpus,
``extract`` turns accepted documents into timeline/demographics/diagnosis
files, ``evaluate`` and ``sweep`` score predicted timelines against
references, ``stats`` summarizes an annotation directory, and ``bench-id``
scores filter decisions against hand labels.

Exit codes: 0 success (warnings allowed), 2 usage error, 3 data error
(missing or empty inputs, zero case overlap), 4 backend unavailable.
Outputs are pure functions of the inputs, so reruns are byte-identical.
The only credential, ``LLM_API_KEY``, is read from the environment by the
HTTP backend; there is no key flag.
"""

from __future__ import annotations

import argparse
import csv
import json
import statistics
import sys
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import __version__
from .alignment import EditDistanceMetric, EmbeddingMetric
from .corpus import (
    CaseDocument,
    load_document,
    parse_demographics,
    parse_diagnoses,
    parse_timeline,
    serialize_demographics,
    serialize_timeline,
)
from .errors import BackendUnavailable, CaselineError
from .extraction import extract_demographics, extract_diagnoses, extract_timeline
from .llm import (
    DEFAULT_MODEL,
    CompletionBackend,
    HttpBackend,
    PromptTemplate,
    ReplayBackend,
    load_template,
    load_template_file,
)
from .reports import DEFAULT_TAU, aggregate_report, case_report, evaluate_case
from .screening import ConfusionCounts, classification_metrics, filter_document
from .temporal import DEFAULT_S_MAX, DEFAULT_TAUS

EXTRACT_TASKS = ("timeline", "demographics", "diagnoses")


class _CliError(Exception):
    """Command failure with an explicit exit code."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _usage(message: str) -> _CliError:
    return _CliError(2, message)


def _data_error(message: str) -> _CliError:
    return _CliError(3, message)


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def _out_dir(raw: str) -> Path:
    path = Path(raw)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_text(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")


def _write_json(path: Path, payload: object) -> None:
    _write_text(path, json.dumps(payload, indent=2, ensure_ascii=False) + "\n")


def _write_jsonl(path: Path, rows: Sequence[dict]) -> None:
    _write_text(path, "".join(json.dumps(row, ensure_ascii=False) + "\n" for row in rows))


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if cell is None else cell for cell in row])


def _corpus_files(directory: str) -> list[Path]:
    path = Path(directory)
    if not path.is_dir():
        raise _data_error(f"corpus directory not found: {directory}")
    files = sorted(path.glob("*.txt"))
    if not files:
        raise _data_error(f"no .txt documents in {directory}")
    return files


def _backend(args: argparse.Namespace) -> CompletionBackend | None:
    if args.mock_backend and args.endpoint:
        raise _usage("--mock-backend and --endpoint are mutually exclusive")
    if args.mock_backend:
        directory = Path(args.mock_backend)
        if not directory.is_dir():
            raise _data_error(f"mock backend directory not found: {args.mock_backend}")
        return ReplayBackend(directory)
    if args.endpoint:
        if args.max_retries < 0:
            raise _usage("--max-retries must be non-negative")
        return HttpBackend(
            endpoint=args.endpoint,
            model=args.model,
            temperature=args.temperature,
            timeout_seconds=args.timeout,
            max_retries=args.max_retries,
        )
    return None


def _metric(args: argparse.Namespace) -> EditDistanceMetric | EmbeddingMetric:
    if args.metric == "embedding":
        metric = EmbeddingMetric(url=args.embed_url)
        metric.health()
        return metric
    return EditDistanceMetric()


def _timeline_template(args: argparse.Namespace) -> PromptTemplate | None:
    if args.template_file:
        return load_template_file(args.template_file)
    if args.template:
        return load_template(args.template)
    return None


# ---------------------------------------------------------------- filter


def cmd_filter(args: argparse.Namespace) -> int:
    files = _corpus_files(args.corpus)
    backend = _backend(args)
    out = _out_dir(args.out)
    if backend is None:
        _warn("no backend configured; regex-passing documents stay undecided")

    rows = []
    accepted = undecided = passed_regex = errors = 0
    for path in files:
        try:
            doc = load_document(path)
        except CaselineError as exc:
            _warn(f"{path.stem}: {exc}")
            decision_row = {
                "case_id": path.stem,
                "passed_regex": False,
                "llm_case_count": None,
                "accepted": False,
                "lenient_parse": False,
                "error": str(exc),
            }
            rows.append(decision_row)
            errors += 1
            continue
        decision = filter_document(
            doc,
            backend,
            case_sensitive=args.case_sensitive,
            strict=args.strict_count,
        )
        passed_regex += decision.passed_regex
        accepted += decision.accepted
        undecided += decision.undecided
        if decision.error is not None:
            _warn(f"{decision.case_id}: {decision.error}")
        rows.append(
            {
                "case_id": decision.case_id,
                "passed_regex": decision.passed_regex,
                "llm_case_count": decision.llm_case_count,
                "accepted": decision.accepted,
                "lenient_parse": decision.lenient_parse,
                "error": decision.error,
            }
        )

    decisions_path = out / "decisions.jsonl"
    _write_jsonl(decisions_path, rows)
    print(f"documents: {len(files)}")
    print(f"passed regex: {passed_regex}")
    print(f"accepted: {accepted}")
    print(f"undecided: {undecided}")
    print(f"rejected: {len(files) - accepted - undecided}")
    print(f"document errors: {errors}")
    print(f"decisions written to {decisions_path}")
    return 0


# ---------------------------------------------------------------- extract


@dataclass
class _AuditingBackend:
    """Wraps a backend and writes every reply to ``raw/<case>.<task>.txt``.

    Replies are recorded before parsing, so the audit trail survives parse
    failures.
    """

    inner: CompletionBackend
    raw_dir: Path

    def complete(
        self, prompt: str, *, case_id: str | None = None, task: str | None = None
    ) -> str:
        reply = self.inner.complete(prompt, case_id=case_id, task=task)
        if case_id and task:
            _write_text(self.raw_dir / f"{case_id}.{task}.txt", reply)
        return reply


def _accepted_ids(decisions_file: str) -> set[str]:
    path = Path(decisions_file)
    if not path.is_file():
        raise _data_error(f"decisions file not found: {decisions_file}")
    accepted = set()
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
        except ValueError as exc:
            raise _data_error(f"{decisions_file}:{line_no}: not JSON: {exc}")
        if row.get("accepted"):
            case_id = row.get("case_id")
            if not case_id:
                raise _data_error(f"{decisions_file}:{line_no}: row has no case_id")
            accepted.add(case_id)
    return accepted


def _parse_tasks(raw: str) -> list[str]:
    tasks = []
    for name in raw.split(","):
        name = name.strip()
        if name not in EXTRACT_TASKS:
            raise _usage(f"unknown task {name!r}; choose from {', '.join(EXTRACT_TASKS)}")
        if name not in tasks:
            tasks.append(name)
    if not tasks:
        raise _usage("--tasks must name at least one task")
    return tasks


def _artifact_path(out: Path, case_id: str, task: str) -> Path:
    if task == "timeline":
        return out / f"{case_id}.bsv"
    return out / f"{case_id}.{task}.txt"


def _run_extract_task(
    doc: CaseDocument,
    task: str,
    backend: CompletionBackend,
    template: PromptTemplate | None,
) -> str:
    """Run one extraction task and return the artifact file content."""
    if task == "timeline":
        extraction = extract_timeline(doc, backend, template=template)
        return serialize_timeline(extraction.annotation) + "\n"
    if task == "demographics":
        return serialize_demographics(extract_demographics(doc, backend).record) + "\n"
    result = extract_diagnoses(doc, backend)
    return "\n".join(result.diagnoses.diagnoses) + "\n"


def cmd_extract(args: argparse.Namespace) -> int:
    files = _corpus_files(args.corpus)
    inner = _backend(args)
    if inner is None:
        raise _usage("extract needs --mock-backend or --endpoint")
    if args.jobs < 1:
        raise _usage("--jobs must be at least 1")
    tasks = _parse_tasks(args.tasks)
    template = _timeline_template(args)

    if not args.all:
        wanted = _accepted_ids(args.decisions)
        missing = wanted - {f.stem for f in files}
        files = [f for f in files if f.stem in wanted]
        for case_id in sorted(missing):
            _warn(f"accepted case {case_id} has no corpus document")
        if not files:
            raise _data_error("no accepted cases to extract")

    out = _out_dir(args.out)
    raw_dir = out / "raw"
    raw_dir.mkdir(exist_ok=True)
    backend = _AuditingBackend(inner, raw_dir)

    def run_case(path: Path) -> list[dict]:
        failures = []
        try:
            doc = load_document(path)
        except CaselineError as exc:
            return [{"case_id": path.stem, "task": "document", "error": str(exc)}]
        for task in tasks:
            artifact = _artifact_path(out, doc.id, task)
            if args.skip_existing and artifact.exists():
                continue
            try:
                _write_text(artifact, _run_extract_task(doc, task, backend, template))
            except CaselineError as exc:
                failures.append({"case_id": doc.id, "task": task, "error": str(exc)})
        return failures

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            per_case = list(pool.map(run_case, files))
    else:
        per_case = [run_case(path) for path in files]

    failures = [row for rows in per_case for row in rows]
    for row in failures:
        _warn(f"{row['case_id']}/{row['task']}: {row['error']}")
    _write_jsonl(out / "failures.jsonl", failures)
    print(f"cases processed: {len(files)}")
    print(f"task failures: {len(failures)}")
    print(f"outputs written to {out}")
    return 0


# ---------------------------------------------------------------- evaluate


def _timeline_dir(directory: str, role: str) -> dict[str, Path]:
    path = Path(directory)
    if not path.is_dir():
        raise _data_error(f"{role} directory not found: {directory}")
    files = {p.stem: p for p in path.glob("*.bsv")}
    if not files:
        raise _data_error(f"no .bsv timelines in {directory}")
    return files


def _load_case_pairs(
    args: argparse.Namespace,
) -> tuple[list[str], dict[str, Path], dict[str, Path]]:
    ref = _timeline_dir(args.ref_dir, "reference")
    pred = _timeline_dir(args.pred_dir, "predictions")
    overlap = sorted(ref.keys() & pred.keys())
    if not overlap:
        raise _data_error(
            f"no case overlap between {args.ref_dir} and {args.pred_dir}"
        )
    return overlap, ref, pred


def _evaluate_cases(args: argparse.Namespace):
    """Shared evaluate/sweep core: per-case evaluations plus a skip list."""
    overlap, ref, pred = _load_case_pairs(args)
    metric = _metric(args)
    cases = []
    skipped = []
    for case_id in overlap:
        try:
            ref_t = parse_timeline(
                ref[case_id].read_text(encoding="utf-8"), case_id=case_id
            ).annotation
            pred_t = parse_timeline(
                pred[case_id].read_text(encoding="utf-8"), case_id=case_id
            ).annotation
        except (OSError, CaselineError) as exc:
            _warn(f"{case_id}: {exc}")
            skipped.append({"case_id": case_id, "reason": str(exc)})
            continue
        cases.append(
            evaluate_case(ref_t, pred_t, metric, tau=args.tau, s_max=args.s_max)
        )
    return cases, skipped


def _config_block(args: argparse.Namespace, taus: Sequence[float]) -> dict:
    return {
        "tau": args.tau,
        "s_max": args.s_max,
        "metric": args.metric,
        "template": args.template,
        "model": args.model,
        "taus": list(taus),
    }


def cmd_evaluate(args: argparse.Namespace) -> int:
    taus = DEFAULT_TAUS
    cases, skipped = _evaluate_cases(args)
    aggregate = aggregate_report(cases, taus=taus, s_max=args.s_max)
    out = _out_dir(args.out)
    report = {
        "config": _config_block(args, taus),
        "cases": [case_report(c) for c in sorted(cases, key=lambda c: c.case_id)],
        "aggregate": aggregate,
        "skipped": skipped,
    }
    _write_json(out / "evaluation.json", report)
    _write_csv(
        out / "cdf.csv",
        ("x", "f"),
        [(point["x"], point["f"]) for point in aggregate["cdf"]],
    )
    print(f"cases evaluated: {len(cases)}")
    print(f"cases skipped: {len(skipped)}")
    print(f"report written to {out / 'evaluation.json'}")
    return 0


def _parse_taus(raw: str | None) -> tuple[float, ...]:
    if raw is None:
        return DEFAULT_TAUS
    try:
        taus = tuple(float(part) for part in raw.split(",") if part.strip())
    except ValueError:
        raise _usage(f"--taus must be comma-separated numbers, got {raw!r}")
    if not taus:
        raise _usage("--taus must name at least one threshold")
    if any(t < 0 for t in taus):
        raise _usage("thresholds must be non-negative")
    return taus


def cmd_sweep(args: argparse.Namespace) -> int:
    taus = _parse_taus(args.taus)
    cases, skipped = _evaluate_cases(args)
    aggregate = aggregate_report(cases, taus=taus, s_max=args.s_max)
    out = _out_dir(args.out)
    _write_csv(
        out / "sweep.csv",
        ("tau", "match_rate", "c_index", "aultc"),
        [
            (p["tau"], p["match_rate"], p["c_index"], p["aultc"])
            for p in aggregate["sweep"]
        ],
    )
    _write_json(
        out / "sweep.json",
        {
            "config": _config_block(args, taus),
            "sweep": aggregate["sweep"],
            "n_cases": aggregate["n_cases"],
            "skipped": skipped,
        },
    )
    print(f"cases evaluated: {len(cases)}")
    print(f"cases skipped: {len(skipped)}")
    print(f"sweep written to {out / 'sweep.csv'}")
    return 0


# ---------------------------------------------------------------- stats


def _number_summary(values: list[float]) -> dict:
    if not values:
        return {"max": None, "mean": None, "median": None, "min": None}
    return {
        "max": max(values),
        "mean": statistics.fmean(values),
        "median": statistics.median(values),
        "min": min(values),
    }


def cmd_stats(args: argparse.Namespace) -> int:
    directory = Path(args.annotations)
    if not directory.is_dir():
        raise _data_error(f"annotation directory not found: {args.annotations}")
    timeline_files = sorted(directory.glob("*.bsv"))
    if not timeline_files:
        raise _data_error(f"no .bsv annotation files in {args.annotations}")

    events_per_report: list[int] = []
    for path in timeline_files:
        try:
            result = parse_timeline(path.read_text(encoding="utf-8"), case_id=path.stem)
        except (OSError, CaselineError) as exc:
            _warn(f"{path.stem}: {exc}")
            continue
        events_per_report.append(len(result.annotation))

    ages: list[float] = []
    sex_counts: Counter[str] = Counter()
    ethnicity_counts: Counter[str] = Counter()
    n_demographics = 0
    for path in sorted(directory.glob("*.demographics.txt")):
        try:
            record = parse_demographics(path.read_text(encoding="utf-8"))
        except (OSError, CaselineError) as exc:
            _warn(f"{path.stem}: {exc}")
            continue
        n_demographics += 1
        if record.age_years is not None:
            ages.append(record.age_years)
        sex_counts[record.sex] += 1
        ethnicity_counts[record.ethnicity] += 1

    diagnosis_counts: Counter[str] = Counter()
    n_diagnoses = 0
    for path in sorted(directory.glob("*.diagnoses.txt")):
        try:
            parsed = parse_diagnoses(path.read_text(encoding="utf-8"), case_id=path.stem)
        except (OSError, CaselineError) as exc:
            _warn(f"{path.stem}: {exc}")
            continue
        n_diagnoses += 1
        diagnosis_counts.update(parsed.diagnoses)

    size_histogram = Counter(events_per_report)
    payload = {
        "timelines": {
            "n_cases": len(events_per_report),
            "n_events": sum(events_per_report),
            "events_per_report": _number_summary([float(n) for n in events_per_report]),
            "events_per_report_counts": [
                [size, count] for size, count in sorted(size_histogram.items())
            ],
        },
        "demographics": {
            "n_cases": n_demographics,
            "age_years": {
                "n_specified": len(ages),
                **_number_summary(ages),
            },
            "sex": dict(sorted(sex_counts.items())),
            "ethnicity": dict(sorted(ethnicity_counts.items())),
        },
        "diagnoses": {
            "n_cases": n_diagnoses,
            "frequency": [
                [name, count]
                for name, count in sorted(
                    diagnosis_counts.items(), key=lambda item: (-item[1], item[0])
                )
            ],
        },
    }
    text = json.dumps(payload, indent=2, ensure_ascii=False, sort_keys=True) + "\n"
    if args.out:
        _write_text(Path(args.out), text)
        print(f"stats written to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------- bench-id


def _metrics_block(counts: ConfusionCounts) -> dict:
    metrics = classification_metrics(counts)
    return {
        "counts": {"tp": counts.tp, "fp": counts.fp, "tn": counts.tn, "fn": counts.fn},
        "precision": metrics.precision,
        "recall": metrics.recall,
        "accuracy": metrics.accuracy,
        "f1": metrics.f1,
    }


def _read_labels(path_str: str) -> list[dict]:
    path = Path(path_str)
    if not path.is_file():
        raise _data_error(f"labels file not found: {path_str}")
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"case_id", "diagnosis", "label"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise _data_error(
                f"labels file needs columns case_id, diagnosis, label; "
                f"got {reader.fieldnames}"
            )
        rows = list(reader)
    if not rows:
        raise _data_error(f"labels file is empty: {path_str}")
    for row in rows:
        if row["label"] not in ("0", "1"):
            raise _data_error(
                f"label for case {row['case_id']!r} must be 0 or 1, got {row['label']!r}"
            )
    return rows


def _read_decisions(path_str: str) -> dict[str, bool]:
    path = Path(path_str)
    if not path.is_file():
        raise _data_error(f"decisions file not found: {path_str}")
    decisions = {}
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
        except ValueError as exc:
            raise _data_error(f"{path_str}:{line_no}: not JSON: {exc}")
        case_id = row.get("case_id")
        if not case_id:
            raise _data_error(f"{path_str}:{line_no}: row has no case_id")
        decisions[case_id] = bool(row.get("accepted"))
    if not decisions:
        raise _data_error(f"decisions file is empty: {path_str}")
    return decisions


def cmd_bench_id(args: argparse.Namespace) -> int:
    labels = _read_labels(args.labels)
    decisions = _read_decisions(args.decisions)

    tallies: dict[str, Counter] = {}
    aggregate: Counter = Counter()
    n_missing = 0
    for row in labels:
        case_id = row["case_id"]
        if case_id not in decisions:
            _warn(f"no filter decision for labeled case {case_id}")
            n_missing += 1
            continue
        positive = row["label"] == "1"
        predicted = decisions[case_id]
        if positive:
            outcome = "tp" if predicted else "fn"
        else:
            outcome = "fp" if predicted else "tn"
        aggregate[outcome] += 1
        tallies.setdefault(row["diagnosis"], Counter())[outcome] += 1

    if not aggregate:
        raise _data_error("no labeled case has a filter decision")

    def block(counter: Counter) -> dict:
        return _metrics_block(
            ConfusionCounts(counter["tp"], counter["fp"], counter["tn"], counter["fn"])
        )

    payload = {
        "aggregate": block(aggregate),
        "per_diagnosis": {name: block(tallies[name]) for name in sorted(tallies)},
        "n_missing": n_missing,
    }
    text = json.dumps(payload, indent=2, ensure_ascii=False, sort_keys=True) + "\n"
    if args.out:
        _write_text(Path(args.out), text)
        print(f"benchmark written to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------- parser


def _add_backend_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("backend")
    group.add_argument(
        "--mock-backend",
        metavar="DIR",
        help="replay recorded replies from DIR/<case>.<task>.txt instead of querying",
    )
    group.add_argument(
        "--endpoint",
        metavar="URL",
        help="chat-completion endpoint; the bearer token comes from LLM_API_KEY",
    )
    group.add_argument("--model", default=DEFAULT_MODEL, help="model name")
    group.add_argument(
        "--temperature",
        type=float,
        default=None,
        help="sampling temperature (default: per-model recommendation)",
    )
    group.add_argument(
        "--timeout", type=float, default=120.0, help="request timeout in seconds"
    )
    group.add_argument(
        "--max-retries",
        type=int,
        default=4,
        help="retries after a retryable backend failure",
    )


def _add_metric_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("metric")
    group.add_argument(
        "--metric",
        choices=("edit", "embedding"),
        default="edit",
        help="event distance metric",
    )
    group.add_argument(
        "--embed-url",
        default=None,
        help="embedding service URL (default: the EMBED_URL environment variable)",
    )
    group.add_argument(
        "--tau", type=float, default=DEFAULT_TAU, help="match distance threshold"
    )
    group.add_argument(
        "--s-max",
        type=float,
        default=DEFAULT_S_MAX,
        help="discrepancy saturation cutoff in hours",
    )
    group.add_argument(
        "--template",
        default=None,
        help="template name recorded in the report config",
    )
    group.add_argument(
        "--model", default=None, help="model name recorded in the report config"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="caseline",
        description="Extract and evaluate clinical timelines from case reports.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    filter_p = sub.add_parser(
        "filter", help="screen a corpus for single-patient case reports"
    )
    filter_p.add_argument("corpus", help="directory of marker-delimited .txt documents")
    filter_p.add_argument("--out", required=True, help="output directory")
    filter_p.add_argument(
        "--case-sensitive", action="store_true", help="regex screen matches case"
    )
    filter_p.add_argument(
        "--strict-count",
        action="store_true",
        help="reject case-count replies that are not a bare integer",
    )
    _add_backend_options(filter_p)
    filter_p.set_defaults(func=cmd_filter)

    extract_p = sub.add_parser(
        "extract", help="extract timelines, demographics, and diagnoses"
    )
    extract_p.add_argument("corpus", help="directory of marker-delimited .txt documents")
    extract_p.add_argument("--out", required=True, help="output directory")
    which = extract_p.add_mutually_exclusive_group(required=True)
    which.add_argument(
        "--decisions", metavar="FILE", help="decisions.jsonl; extract accepted cases"
    )
    which.add_argument(
        "--all", action="store_true", help="extract every corpus document"
    )
    extract_p.add_argument(
        "--tasks",
        default=",".join(EXTRACT_TASKS),
        help="comma-separated tasks to run (default: all)",
    )
    template_group = extract_p.add_mutually_exclusive_group()
    template_group.add_argument(
        "--template", help="shipped timeline template name (default: timeline)"
    )
    template_group.add_argument(
        "--template-file", metavar="PATH", help="timeline template file"
    )
    extract_p.add_argument(
        "--skip-existing",
        action="store_true",
        help="skip tasks whose output file already exists",
    )
    extract_p.add_argument(
        "--jobs", type=int, default=1, help="number of concurrent cases"
    )
    _add_backend_options(extract_p)
    extract_p.set_defaults(func=cmd_extract)

    evaluate_p = sub.add_parser(
        "evaluate", help="score predicted timelines against references"
    )
    evaluate_p.add_argument("ref_dir", help="directory of reference .bsv timelines")
    evaluate_p.add_argument("pred_dir", help="directory of predicted .bsv timelines")
    evaluate_p.add_argument("--out", required=True, help="output directory")
    _add_metric_options(evaluate_p)
    evaluate_p.set_defaults(func=cmd_evaluate)

    sweep_p = sub.add_parser(
        "sweep", help="sweep the match threshold over a range of values"
    )
    sweep_p.add_argument("ref_dir", help="directory of reference .bsv timelines")
    sweep_p.add_argument("pred_dir", help="directory of predicted .bsv timelines")
    sweep_p.add_argument("--out", required=True, help="output directory")
    sweep_p.add_argument(
        "--taus",
        default=None,
        help="comma-separated thresholds (default: 0.01..0.25 in steps of 0.01)",
    )
    _add_metric_options(sweep_p)
    sweep_p.set_defaults(func=cmd_sweep)

    stats_p = sub.add_parser("stats", help="summarize an annotation directory")
    stats_p.add_argument(
        "annotations", help="directory of .bsv / .demographics.txt / .diagnoses.txt"
    )
    stats_p.add_argument("--out", metavar="FILE", help="write JSON here (default: stdout)")
    stats_p.set_defaults(func=cmd_stats)

    bench_p = sub.add_parser(
        "bench-id", help="score filter decisions against hand labels"
    )
    bench_p.add_argument("labels", help="CSV with case_id, diagnosis, label columns")
    bench_p.add_argument("decisions", help="decisions.jsonl from a filter run")
    bench_p.add_argument("--out", metavar="FILE", help="write JSON here (default: stdout)")
    bench_p.set_defaults(func=cmd_bench_id)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except BackendUnavailable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
