"""Command line driver.

    equiform <subcommand> --config <path or bundled name> [options]

Subcommands named after task kinds run the matching tasks from the
config; `run` executes the whole declared task list in order; `validate`
only builds the setup and reports its checks.  A config argument that is
not an existing file is looked up among the bundled examples.

The JSON report is canonical: running the same config twice gives byte
identical output.  Exit status is 0 when every task passed, 1 when some
verification failed or some differential could not be expressed, 2 for
unusable input (bad config, unknown task, malformed expression).
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from importlib import resources

from equiform import verify
from equiform.config import (
    ConfigError,
    RealizedConfig,
    TaskSpec,
    parse_config,
    realize_config,
)
from equiform.dictionary import (
    DictionaryOptions,
    EngineError,
    completeness_check,
    differential_table,
    express_in_generators,
)
from equiform.expressions import ExpressionError, parse_form_expression
from equiform.homogeneous import (
    SetupError,
    invariant_dimension,
    stabilizer_of_vector,
)
from equiform.report import ReportDocument, TaskReport

DEFAULT_BOUNDS = (4, -2)  # engine order: highest power, lowest power


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class Overrides:
    max_length: int | None = None
    max_degree: int | None = None
    bounds: tuple[int, int] | None = None  # engine order


# -- config resolution -------------------------------------------------------


def bundled_names() -> list[str]:
    root = resources.files("equiform.configs")
    return sorted(
        p.name[: -len(".json")]
        for p in root.iterdir()
        if p.name.endswith(".json")
    )


def resolve_config(arg: str) -> tuple[str, str]:
    """Return (display name, config text) from a path or a bundled name."""
    if os.path.exists(arg):
        try:
            with open(arg, "r", encoding="utf-8") as fh:
                return os.path.basename(arg), fh.read()
        except OSError as e:
            raise UsageError(f"cannot read config {arg}: {e}") from None
    name = arg[: -len(".json")] if arg.endswith(".json") else arg
    root = resources.files("equiform.configs")
    candidate = root / f"{name}.json"
    if candidate.is_file():
        return name, candidate.read_text(encoding="utf-8")
    known = ", ".join(bundled_names()) or "none"
    raise UsageError(
        f"no such file or bundled config: {arg} (bundled: {known})"
    )


# -- task execution ----------------------------------------------------------


def _bounds_for(task: TaskSpec, ov: Overrides) -> tuple[int, int]:
    if ov.bounds is not None:
        return ov.bounds
    if task.laurent_bounds is not None:
        lo, hi = task.laurent_bounds
        return hi, lo
    return DEFAULT_BOUNDS


def _dictionary_for(rc: RealizedConfig, task: TaskSpec, ov: Overrides):
    length = ov.max_length
    if length is None:
        length = task.max_length
    return rc.dictionary(length)


def _cell_key(bidegree: tuple[int, int]) -> str:
    return f"{bidegree[0]},{bidegree[1]}"


def _run_generate(rc: RealizedConfig, task: TaskSpec, ov: Overrides) -> TaskReport:
    dictionary = _dictionary_for(rc, task, ov)
    comp = completeness_check(rc.setup, dictionary)
    cells = [
        {
            "bidegree": list(c.bidegree),
            "span_origin": c.span_origin,
            "target_origin": c.target_origin,
            "span_generic": c.span_generic,
            "target_generic": c.target_generic,
        }
        for c in sorted(comp.cells, key=lambda c: c.bidegree)
    ]
    details = {
        "total_entries": len(dictionary.entries),
        "origin_entries": len(dictionary.origin_entries()),
        "radial": (
            dictionary.radial.word.render() if dictionary.radial else None
        ),
        "counts": {
            _cell_key(cell): n for cell, n in dictionary.counts().items()
        },
        "entries": [
            {
                "word": e.word.render(),
                "bidegree": list(e.bidegree),
                "phase": e.phase,
            }
            for e in dictionary.entries
        ],
        "completeness": {
            "cells": len(comp.cells),
            "matched_cells": sum(1 for c in comp.cells if c.passed),
            "span_total": sum(c.span_generic for c in comp.cells),
            "invariant_total": sum(c.target_generic for c in comp.cells),
            "stabilizer_dim_origin": comp.stabilizer_dim_origin,
            "stabilizer_dim_generic": comp.stabilizer_dim_generic,
            "cells_detail": cells,
        },
    }
    status = "pass" if comp.passed else "fail"
    return TaskReport(name=task.name, kind=task.kind, status=status, details=details)


def _duality_classes(n: int) -> list[list[int]]:
    out = []
    for p in range(n // 2 + 1):
        out.append(sorted({p, n - p}))
    return out


def _grouped(grid: list[list[int]], cp, cq) -> dict:
    table = []
    constant = True
    for rows in cp:
        line = []
        for cols in cq:
            values = {grid[p][q] for p in rows for q in cols}
            if len(values) == 1:
                line.append(values.pop())
            else:
                line.append(None)
                constant = False
        table.append(line)
    return {
        "classes_p": cp,
        "classes_q": cq,
        "table": table,
        "constant_on_classes": constant,
    }


def _run_dim_table(rc: RealizedConfig, task: TaskSpec, ov: Overrides) -> TaskReport:
    setup = rc.setup
    field = setup.field
    k = setup.fiber_dim
    origin = [field.zero] * k
    generic = [field.one] + [field.zero] * (k - 1)
    stab0 = stabilizer_of_vector(setup, origin)
    stabv = stabilizer_of_vector(setup, generic)
    grids = {}
    for label, stab in (("origin", stab0), ("generic", stabv)):
        grids[label] = [
            [
                invariant_dimension(setup, (p, q), stab)
                for q in range(setup.fiber_dim + 1)
            ]
            for p in range(setup.horizontal_dim + 1)
        ]
    cp = _duality_classes(setup.horizontal_dim)
    cq = _duality_classes(setup.fiber_dim)
    details = {
        "origin": grids["origin"],
        "generic": grids["generic"],
        "stabilizer_dim_origin": len(stab0),
        "stabilizer_dim_generic": len(stabv),
        "grouped_origin": _grouped(grids["origin"], cp, cq),
        "grouped_generic": _grouped(grids["generic"], cp, cq),
    }
    return TaskReport(name=task.name, kind=task.kind, status="pass", details=details)


def _run_d_table(rc: RealizedConfig, task: TaskSpec, ov: Overrides) -> TaskReport:
    max_degree = ov.max_degree if ov.max_degree is not None else task.max_degree
    if max_degree is None:
        raise UsageError(f"task {task.name}: d_table needs max_degree")
    dictionary = _dictionary_for(rc, task, ov)
    rows = differential_table(
        rc.setup,
        dictionary,
        max_degree,
        degree_bounds=_bounds_for(task, ov),
        allow_triples=task.allow_triples,
    )
    failed = [r.word.render() for r in rows if r.differential.residual]
    details = {
        "rows": len(rows),
        "table": [
            {
                "word": r.word.render(),
                "kind": r.kind,
                "differential": r.differential.render(),
            }
            for r in rows
        ],
        "failed_rows": failed,
    }
    status = "pass" if not failed else "fail"
    return TaskReport(name=task.name, kind=task.kind, status=status, details=details)


def _run_verify_closed(
    rc: RealizedConfig, task: TaskSpec, ov: Overrides
) -> TaskReport:
    verdicts = []
    ok = True
    for i, text in enumerate(task.forms):
        label = task.name if len(task.forms) == 1 else f"{task.name}[{i}]"
        form = _parse(rc, text, f"task {task.name}: forms[{i}]")
        v = verify.verify_closed(
            rc.setup, form, name=label, on_sphere=task.on_sphere
        )
        ok = ok and v.holds
        verdicts.append(
            {
                "form": text,
                "holds": v.holds,
                "statement": v.describe(),
                "residual": str(v.residual),
            }
        )
    details = {"on_sphere": task.on_sphere, "verdicts": verdicts}
    return TaskReport(
        name=task.name,
        kind=task.kind,
        status="pass" if ok else "fail",
        details=details,
    )


def _run_verify_equation(
    rc: RealizedConfig, task: TaskSpec, ov: Overrides
) -> TaskReport:
    lhs = _parse(rc, task.lhs, f"task {task.name}: lhs")
    rhs = _parse(rc, task.rhs, f"task {task.name}: rhs")
    v = verify.verify_equation(
        rc.setup, lhs, rhs, name=task.name, on_sphere=task.on_sphere
    )
    details = {
        "on_sphere": task.on_sphere,
        "verdicts": [
            {
                "lhs": task.lhs,
                "rhs": task.rhs,
                "holds": v.holds,
                "statement": v.describe(),
                "residual": str(v.residual),
            }
        ],
    }
    return TaskReport(
        name=task.name,
        kind=task.kind,
        status="pass" if v.holds else "fail",
        details=details,
    )


def _run_express(rc: RealizedConfig, task: TaskSpec, ov: Overrides) -> TaskReport:
    form = _parse(rc, task.expression, f"task {task.name}: expression")
    dictionary = _dictionary_for(rc, task, ov)
    comb = express_in_generators(
        rc.setup,
        dictionary,
        form,
        degree_bounds=_bounds_for(task, ov),
        allow_triples=task.allow_triples,
    )
    details = {
        "target": task.expression,
        "expression": None if comb.residual else comb.render(),
    }
    return TaskReport(
        name=task.name,
        kind=task.kind,
        status="fail" if comb.residual else "pass",
        details=details,
    )


def _parse(rc: RealizedConfig, text: str, where: str):
    try:
        return parse_form_expression(text, rc.context)
    except ExpressionError as e:
        raise UsageError(f"{where}: {e}") from None


_RUNNERS = {
    "generate": _run_generate,
    "dim_table": _run_dim_table,
    "d_table": _run_d_table,
    "verify_closed": _run_verify_closed,
    "verify_equation": _run_verify_equation,
    "express": _run_express,
}


def run_task(rc: RealizedConfig, task: TaskSpec, ov: Overrides) -> TaskReport:
    try:
        return _RUNNERS[task.kind](rc, task, ov)
    except (EngineError, verify.VerifyError) as e:
        raise UsageError(f"task {task.name}: {e}") from None


def _subject(rc: RealizedConfig) -> dict:
    setup = rc.setup
    return {
        "algebra_dimension": setup.algebra.dimension,
        "horizontal_dim": setup.horizontal_dim,
        "gauge_dim": len(setup.splitting.gauge),
        "fiber_dim": setup.fiber_dim,
        "sqrt_constants": list(setup.field.radicands),
        "params": list(setup.ring.params),
        "radicals": list(setup.ring.radical_names),
        "letters": sorted(rc.letters),
        "contractions": sorted(rc.contractions),
    }


def _conventions(rc: RealizedConfig) -> dict:
    return {
        "b_convention": rc.setup.b_convention,
        "warnings": list(rc.setup.warnings),
    }


def run_config(
    rc: RealizedConfig,
    source: str,
    tasks: list[TaskSpec],
    ov: Overrides,
) -> ReportDocument:
    reports = [run_task(rc, t, ov) for t in tasks]
    return ReportDocument(
        source=source,
        subject=_subject(rc),
        conventions=_conventions(rc),
        tasks=tuple(reports),
    )


# -- argument handling -------------------------------------------------------


def _parse_bounds_flag(text: str) -> tuple[int, int]:
    parts = text.split(",")
    try:
        lo, hi = (int(p) for p in parts)
    except ValueError:
        raise UsageError(
            f"--laurent-bounds wants two integers lo,hi; got {text!r}"
        ) from None
    if lo > hi:
        raise UsageError(f"--laurent-bounds: lo {lo} exceeds hi {hi}")
    return hi, lo


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="equiform",
        description="exact invariant-form calculus on associated bundles",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    kinds = [
        "run",
        "validate",
        "generate",
        "dim_table",
        "d_table",
        "verify_closed",
        "verify_equation",
        "express",
    ]
    for kind in kinds:
        p = sub.add_parser(kind)
        p.add_argument("--config", required=True, help="path or bundled name")
        p.add_argument("--task", help="only the task with this name")
        p.add_argument("--max-length", type=int, dest="max_length")
        p.add_argument("--max-degree", type=int, dest="max_degree")
        p.add_argument("--laurent-bounds", dest="laurent_bounds")
        p.add_argument("--output", help="write the report to this file")
        p.add_argument(
            "--format", choices=("text", "json"), default="text", dest="fmt"
        )
    return parser


def _select_tasks(
    command: str, declared: tuple[TaskSpec, ...], task_name: str | None, ov: Overrides
) -> list[TaskSpec]:
    tasks = list(declared)
    if task_name is not None:
        tasks = [t for t in tasks if t.name == task_name]
        if not tasks:
            known = ", ".join(t.name for t in declared) or "none"
            raise UsageError(f"no task named {task_name!r} (declared: {known})")
    if command != "run":
        tasks = [t for t in tasks if t.kind == command]
        if not tasks and task_name is not None:
            raise UsageError(f"task {task_name!r} is not a {command} task")
    if not tasks:
        if command in ("generate", "dim_table"):
            tasks = [TaskSpec(kind=command, name=command)]
        elif command == "d_table" and ov.max_degree is not None:
            tasks = [TaskSpec(kind=command, name=command)]
        else:
            msg = f"config declares no {command} task"
            raise UsageError(
                msg + (" (give --max-degree)" if command == "d_table" else "")
            )
    return tasks


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        source, text = resolve_config(args.config)
        document = parse_config(text)
        rc = realize_config(document)
        ov = Overrides(
            max_length=args.max_length,
            max_degree=args.max_degree,
            bounds=(
                _parse_bounds_flag(args.laurent_bounds)
                if args.laurent_bounds
                else None
            ),
        )
        if args.command == "validate":
            report = ReportDocument(
                source=source,
                subject=_subject(rc),
                conventions=_conventions(rc),
                tasks=(),
            )
        else:
            tasks = _select_tasks(args.command, document.tasks, args.task, ov)
            report = run_config(rc, source, tasks, ov)
    except (ConfigError, UsageError) as e:
        print(f"equiform: {e}", file=sys.stderr)
        return 2
    except SetupError as e:
        print("equiform: setup rejected", file=sys.stderr)
        for issue in e.issues:
            print(f"  - {issue}", file=sys.stderr)
        return 2

    rendered = report.to_json() if args.fmt == "json" else report.render_text()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(rendered)
    else:
        sys.stdout.write(rendered)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
