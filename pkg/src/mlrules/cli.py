"""Command-line entry point: train, predict, evaluate and benchmark."""

from __future__ import annotations

import argparse
import os
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from .dataset import (ArffParseError, Dataset, LabelBindingError, LabelSpec,
                      LabelXmlError, bind_labels, parse_arff, parse_label_xml)
from .head_search import (AUTO, DECOMPOSABLE_MERGE, EXHAUSTIVE, PRUNED_BFS,
                          IncompatibleStrategyError, SearchConfig, find_best_head)
from .induction import InductionConfig, candidate_conditions
from .metrics import Metric
from .model import (EvaluationReport, ModelFormatError, evaluate_model,
                    learn_model, parse_model, predict_dataset, render_rule,
                    serialize_model)
from .rules import coverage_mask

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_INCOMPATIBLE = 4

_METRIC_NAMES = {
    "precision": Metric.precision,
    "hamming": Metric.hamming,
    "f-measure": Metric.f_measure,
    "subset-accuracy": Metric.subset_accuracy,
}

_STRATEGY_NAMES = {
    "auto": AUTO,
    "exhaustive": EXHAUSTIVE,
    "pruned": PRUNED_BFS,
    "pruned_bfs": PRUNED_BFS,
    "decomposable": DECOMPOSABLE_MERGE,
}


class CliError(Exception):
    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_PARSE) from exc


def _parse_label_spec(text: str) -> LabelSpec:
    kind, sep, arg = text.partition(":")
    if not sep:
        raise CliError(f"label spec must be xml:<path>, last:<k> or first:<k>, got {text!r}",
                       EXIT_USAGE)
    if kind == "xml":
        return LabelSpec.from_names(parse_label_xml(_read_text(arg)))
    if kind in ("last", "first"):
        try:
            k = int(arg)
        except ValueError:
            raise CliError(f"invalid label count {arg!r}", EXIT_USAGE) from None
        return LabelSpec.last(k) if kind == "last" else LabelSpec.first(k)
    raise CliError(f"unknown label spec kind {kind!r}", EXIT_USAGE)


def _load_dataset(data_path: str, labels: str) -> Dataset:
    spec = _parse_label_spec(labels)
    try:
        return bind_labels(parse_arff(_read_text(data_path)), spec)
    except (ArffParseError, LabelBindingError, LabelXmlError) as exc:
        raise CliError(f"cannot parse {data_path}: {exc}", EXIT_PARSE) from exc


def _make_metric(name: str, beta: str) -> Metric:
    factory = _METRIC_NAMES[name]
    if name == "f-measure":
        try:
            return factory(Fraction(beta))
        except (ValueError, ZeroDivisionError):
            raise CliError(f"invalid beta {beta!r}", EXIT_USAGE) from None
    return factory()


def _make_search_config(args, strategy: Optional[str] = None) -> SearchConfig:
    return SearchConfig(
        allow_negative=args.negative_heads,
        strategy=_STRATEGY_NAMES[strategy or args.strategy],
        single_label=getattr(args, "single_label_heads", False),
    )


def render_report(report: EvaluationReport) -> str:
    """Stable key/value rendering, 4 fractional digits."""
    lines = [
        f"micro_precision {report.micro_precision:.4f}",
        f"micro_recall {report.micro_recall:.4f}",
        f"micro_f1 {report.micro_f1:.4f}",
        f"hamming_accuracy {report.hamming_accuracy:.4f}",
        f"subset_accuracy {report.subset_accuracy:.4f}",
        f"macro_f1 {report.macro_f1:.4f}",
        f"rule_count {report.rule_count}",
        f"avg_head_size {report.avg_head_size:.4f}",
        f"avg_body_length {report.avg_body_length:.4f}",
    ]
    for name, c in report.per_label:
        lines.append(f"label_confusion {name} tp={c.tp} fp={c.fp} tn={c.tn} fn={c.fn}")
    return "\n".join(lines) + "\n"


def _cmd_train(args) -> int:
    d = _load_dataset(args.data, args.labels)
    metric = _make_metric(args.metric, args.beta)
    cfg = InductionConfig(metric=metric, search=_make_search_config(args),
                          min_coverage=args.min_coverage,
                          max_conditions=args.max_conditions)
    model = learn_model(d, cfg, tau=args.tau, max_rules=args.max_rules)
    _atomic_write(args.model_out, serialize_model(model))
    report = evaluate_model(model, d)
    summary = "\n".join(render_rule(r, model) for r in model.rules)
    summary = (summary + "\n\n" if summary else "") + render_report(report)
    if args.summary_out:
        _atomic_write(args.summary_out, summary)
    print(summary, end="")
    return EXIT_OK


def _load_model(path: str):
    try:
        return parse_model(_read_text(path))
    except ModelFormatError as exc:
        raise CliError(f"cannot parse model {path}: {exc}", EXIT_PARSE) from exc


def _cmd_predict(args) -> int:
    model = _load_model(args.model)
    d = _load_dataset(args.data, args.labels)
    preds = predict_dataset(model, d)
    text = "\n".join(",".join(str(int(b)) for b in row) for row in preds) + "\n"
    if args.output:
        _atomic_write(args.output, text)
    else:
        print(text, end="")
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    model = _load_model(args.model)
    d = _load_dataset(args.data, args.labels)
    text = render_report(evaluate_model(model, d))
    if args.output:
        _atomic_write(args.output, text)
    else:
        print(text, end="")
    return EXIT_OK


def _synthetic_dataset(seed: int, m: int, n: int) -> Dataset:
    """Random dataset for benchmarking: one numeric and one nominal attribute."""
    from .dataset import AttributeSchema
    rng = np.random.default_rng(seed)
    attrs = (AttributeSchema("x", "numeric"),
             AttributeSchema("c", "nominal", ("p", "q")))
    rows = tuple(
        (float(round(rng.uniform(0, 10), 3)), ("p", "q")[int(rng.integers(2))])
        for _ in range(m))
    y = rng.integers(0, 2, size=(m, n)).astype(np.uint8)
    names = tuple(f"l{i + 1}" for i in range(n))
    return Dataset(attrs, names, rows, y)


def _benchmark_bodies(d: Dataset, all_bodies: bool):
    bodies = [()]
    if all_bodies:
        bodies.extend((c,) for c in candidate_conditions(d, np.ones(d.m, dtype=bool)))
    return [b for b in bodies if coverage_mask(b, d).any()]


def _cmd_benchmark(args) -> int:
    if args.data:
        if not args.labels:
            raise CliError("benchmark with --data requires --labels", EXIT_USAGE)
        d = _load_dataset(args.data, args.labels)
    else:
        d = _synthetic_dataset(args.seed, args.synthetic_examples, args.synthetic_labels)
    metric = _make_metric(args.metric, args.beta)
    strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
    for s in strategies:
        if s not in _STRATEGY_NAMES or s == "auto":
            raise CliError(f"unknown benchmark strategy {s!r}", EXIT_USAGE)
        if _STRATEGY_NAMES[s] == DECOMPOSABLE_MERGE and not metric.decomposable:
            raise CliError(f"strategy {s!r} is incompatible with metric {metric.kind}",
                           EXIT_INCOMPATIBLE)

    lines = ["body\tstrategy\tevaluated\tpruned\tbest_h\twall_s"]
    for body in _benchmark_bodies(d, args.all_bodies):
        cov = coverage_mask(body, d)
        body_text = ", ".join(c.render(d.attributes[c.attribute].name) for c in body) or "true"
        seen_h = None
        for s in strategies:
            cfg = _make_search_config(args, strategy=s)
            start = time.perf_counter()
            out = find_best_head(cov, d, metric, cfg)
            wall = time.perf_counter() - start
            if seen_h is None:
                seen_h = out.best_h
            elif out.best_h != seen_h:
                raise CliError(
                    f"strategy disagreement on body [{body_text}]: "
                    f"{s} found {out.best_h}, expected {seen_h}", EXIT_RUNTIME)
            lines.append(f"{body_text}\t{s}\t{out.evaluated_count}\t{out.pruned_count}"
                         f"\t{out.best_h}\t{wall:.6f}")
        # single-label mode timing for the single- vs multi-label comparison
        cfg = SearchConfig(allow_negative=args.negative_heads, single_label=True)
        start = time.perf_counter()
        out = find_best_head(cov, d, metric, cfg)
        wall = time.perf_counter() - start
        lines.append(f"{body_text}\tsingle_label\t{out.evaluated_count}\t{out.pruned_count}"
                     f"\t{out.best_h}\t{wall:.6f}")
    text = "\n".join(lines) + "\n"
    if args.output:
        _atomic_write(args.output, text)
    print(text, end="")
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser, with_labels: bool = True) -> None:
    parser.add_argument("--data", required=False, help="ARFF data file")
    if with_labels:
        parser.add_argument("--labels", default=None,
                            help="label spec: xml:<path>, last:<k> or first:<k>")


def _add_search_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--metric", choices=sorted(_METRIC_NAMES), default="precision")
    parser.add_argument("--beta", default="1/2", help="F-measure beta (fraction or decimal)")
    parser.add_argument("--strategy", choices=sorted(_STRATEGY_NAMES), default="auto")
    neg = parser.add_mutually_exclusive_group()
    neg.add_argument("--negative-heads", dest="negative_heads", action="store_true",
                     default=True, help="allow negative head assignments (default)")
    neg.add_argument("--no-negative-heads", dest="negative_heads", action="store_false")
    parser.add_argument("--single-label-heads", action="store_true",
                        help="restrict the head search to single labels")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mlrules",
                                     description="Multi-label rule learner")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="learn a rule list")
    _add_common(p)
    _add_search_flags(p)
    p.add_argument("--min-coverage", type=int, default=1)
    p.add_argument("--max-conditions", type=int, default=None)
    p.add_argument("--tau", type=float, default=1.0,
                   help="predicted-label fraction at which an example is removed")
    p.add_argument("--max-rules", type=int, default=1000)
    p.add_argument("--model-out", required=True)
    p.add_argument("--summary-out", default=None)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict", help="predict label vectors")
    _add_common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("evaluate", help="evaluate a model on a dataset")
    _add_common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("benchmark", help="compare head-search strategies")
    _add_common(p)
    _add_search_flags(p)
    p.add_argument("--strategies", default="exhaustive,pruned,decomposable")
    p.add_argument("--all-bodies", action="store_true",
                   help="benchmark every single-condition body, not just the most general rule")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--synthetic-examples", type=int, default=50)
    p.add_argument("--synthetic-labels", type=int, default=6)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_benchmark)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("train", "predict", "evaluate") and not args.data:
        parser.error(f"{args.command} requires --data")
    if getattr(args, "labels", None) is None and args.command != "benchmark":
        parser.error(f"{args.command} requires --labels")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except IncompatibleStrategyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCOMPATIBLE
    except Exception as exc:  # surface as runtime failure, not a traceback
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
