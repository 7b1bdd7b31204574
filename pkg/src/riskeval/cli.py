"""Command-line front end.

Subcommands:
  synth    rebuild the synthetic-population worked example end to end
  eval     single-model measures for a grouped or individual-level file
  compare  two-model comparison from a joint table, grouped pair + joint,
           or a cross-decile count table
  convert  annual incidence + mortality rates to a T-year absolute risk

Every run is deterministic: no timestamps, fixed 12-significant-digit float
formatting, sorted JSON keys. Exit codes: 0 success, 2 input or validation
error, 3 internal invariant violation.

JSON report schema (schema_version 1): a top-level object with
  schema_version: 1
  kind: "metrics" | "comparison" | "subgroup_gain" | "metrics_matrix"
and the report payload. Float leaves are rounded to 12 significant digits.
With --percent, every float leaf gains a sibling "<name>_pct" rounded
half-even to 0.1 percentage points; CSV reports gain matching *_pct columns.
"""

import argparse
import json
import sys
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path

from .comparison import (
    compare,
    cross_classified_bias,
    subgroup_precision_gain,
    transfer_calibration,
)
from .errors import (
    InternalInvariantError,
    MeanMismatch,
    ParameterOutOfRange,
    ParseError,
    RiskEvalError,
)
from .ingestion import (
    CROSS_DECILE_HEADER,
    GROUPED_HEADER,
    INDIVIDUALS_HEADER,
    JOINT_HEADER,
    bin_individuals,
    load_cross_decile,
    load_grouped,
    load_individuals,
    load_joint,
    ten_year_risk,
    write_grouped,
    write_joint,
)
from .metrics import MetricsReport, attributes_diagram, evaluate
from .synthetic import (
    COVARIATES,
    build_population,
    cross_classify,
    project_model,
    risk_distribution,
)
from .tables import format_label, perfect_model_table

METRIC_FIELDS = (
    "population_mean",
    "bias_sq",
    "precision_loss",
    "brier",
    "prevalence_variance",
    "ro_correlation",
    "integrated_discrimination",
    "concordance",
)
COMPARISON_FIELDS = (
    "population_mean",
    "brier_difference",
    "bias_sq_difference",
    "precision_difference",
    "idi",
    "concordance_difference",
)
SUBGROUP_FIELDS = (
    "risk",
    "mass",
    "prevalence_low",
    "prevalence_high",
    "variance",
    "sd",
)


@dataclass(frozen=True)
class RunConfig:
    """Parsed and validated flags for one CLI run."""

    subcommand: str
    paths: tuple[Path, ...]
    alphas: tuple[float, ...]
    subsets: tuple[tuple[str, ...], ...]
    bins: tuple[str, int]
    mortality: float | None
    horizon: float | None
    out_format: str
    out_dir: Path
    percent: bool


def percent_round(x: float) -> float:
    """Half-even percent rounding to one decimal place."""
    return float((Decimal(repr(float(x))) * 100).quantize(Decimal("0.1"), ROUND_HALF_EVEN))


def round12(x: float) -> float:
    return float(format_label(x))


def _with_percent(pairs, percent: bool):
    """(name, value) pairs plus *_pct twins when percent view is on."""
    out = list(pairs)
    if percent:
        out += [(f"{name}_pct", percent_round(value)) for name, value in pairs]
    return out


class Writer:
    """Collects output files and writes them at the end of the run."""

    def __init__(self, out_dir: Path, out_format: str, percent: bool):
        self.out_dir = out_dir
        self.out_format = out_format
        self.percent = percent
        self.pending: list[tuple[Path, str]] = []

    def add_text(self, name: str, text: str) -> None:
        self.pending.append((self.out_dir / name, text))

    def add_report(self, name: str, kind: str, payload_pairs, rows=None) -> None:
        """One report in the configured format.

        payload_pairs are scalar (name, value) entries; rows, when given, is
        (row_field_names, list of row dicts) for tabular reports.
        """
        pairs = _with_percent(payload_pairs, self.percent)
        if rows is not None:
            fields, row_dicts = rows
            pct_fields = [f for f in fields if f in _PCT_COLUMNS] if self.percent else []
        if self.out_format == "json":
            payload = {"schema_version": 1, "kind": kind}
            payload.update((k, round12(v) if isinstance(v, float) else v) for k, v in pairs)
            if rows is not None:
                payload["rows"] = [
                    {
                        **{
                            f: round12(row[f]) if isinstance(row[f], float) else row[f]
                            for f in fields
                        },
                        **{f"{f}_pct": percent_round(row[f]) for f in pct_fields},
                    }
                    for row in row_dicts
                ]
            self.add_text(f"{name}.json", json.dumps(payload, indent=2, sort_keys=True) + "\n")
            return
        lines = []
        if rows is not None:
            lines.append(",".join(list(fields) + [f"{f}_pct" for f in pct_fields]))
            for row in row_dicts:
                values = [row[f] for f in fields]
                values += [percent_round(row[f]) for f in pct_fields]
                lines.append(",".join(_format_value(v) for v in values))
            if pairs:
                lines.append("")
        if pairs:
            lines.append("metric,value")
            lines += [f"{k},{_format_value(v)}" for k, v in pairs]
        self.add_text(f"{name}.csv", "\n".join(lines) + "\n")

    def flush(self) -> list[Path]:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for path, text in sorted(self.pending, key=lambda item: str(item[0])):
            path.write_text(text, encoding="utf-8")
            written.append(path)
        return written


# Report fields that carry a fraction and so get a percent twin; keys,
# labels, and the alpha parameter do not.
_PCT_COLUMNS = (
    set(METRIC_FIELDS) | set(COMPARISON_FIELDS) | set(SUBGROUP_FIELDS) | {"total_gain"}
)


def _format_value(v) -> str:
    if isinstance(v, float):
        return format_label(v)
    return str(v)


def _metrics_pairs(report: MetricsReport):
    return [(f, getattr(report, f)) for f in METRIC_FIELDS]


def _subgroup_rows(report):
    fields = ("group",) + SUBGROUP_FIELDS
    rows = [
        {
            "group": r.key,
            "risk": r.risk,
            "mass": r.mass,
            "prevalence_low": r.prevalence_low,
            "prevalence_high": r.prevalence_high,
            "variance": r.variance,
            "sd": r.sd,
        }
        for r in report.rows
    ]
    return fields, rows


def _attributes_csv(table) -> str:
    lines = ["risk,prevalence,mass"]
    lines += [
        f"{format_label(r)},{format_label(p)},{format_label(m)}"
        for r, p, m in attributes_diagram(table)
    ]
    return "\n".join(lines) + "\n"


def _subset_label(subset: tuple[str, ...]) -> str:
    return "".join(subset)


def parse_subset(text: str) -> tuple[str, ...]:
    names, rest = [], text.strip()
    while rest:
        if len(rest) < 2 or rest[0] != "z" or rest[1] not in "0123":
            raise ParameterOutOfRange(f"cannot parse covariate subset {text!r}")
        names.append(rest[:2])
        rest = rest[2:]
    if len(set(names)) != len(names) or not names:
        raise ParameterOutOfRange(f"covariate subset {text!r} must list distinct covariates")
    return tuple(n for n in COVARIATES if n in names)


def parse_bins(text: str) -> tuple[str, int]:
    if text == "unique":
        return ("unique-values", 0)
    if text == "deciles":
        return ("quantiles", 10)
    if text.startswith("quantiles:"):
        try:
            k = int(text.split(":", 1)[1])
        except ValueError:
            raise ParameterOutOfRange(f"cannot parse bin count in {text!r}") from None
        return ("quantiles", k)
    raise ParameterOutOfRange(
        f"unknown binning {text!r}; use unique, deciles, or quantiles:K"
    )


def _sniff_header(path: Path) -> list[str]:
    try:
        with open(path, encoding="utf-8") as fh:
            first = fh.readline()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return [h.strip() for h in first.strip().split(",")]


def cmd_synth(config: RunConfig) -> int:
    writer = Writer(config.out_dir, config.out_format, config.percent)
    populations = {a: build_population(a) for a in config.alphas}
    tables = {}  # (alpha, subset) -> grouped table
    matrix_rows = []
    matrix_fields = ("alpha", "model") + METRIC_FIELDS
    for alpha, pop in populations.items():
        alabel = format_label(alpha)
        dist = risk_distribution(pop)
        writer.add_text(
            f"risk_distribution_alpha{alabel}.csv",
            "risk,mass\n"
            + "".join(f"{format_label(p)},{format_label(f)}\n" for p, f in dist.points),
        )
        models = [(_subset_label(s), project_model(pop, s)) for s in config.subsets]
        models.append(("perfect", perfect_model_table(dist)))
        for name, table in models:
            if name != "perfect":
                writer.add_text(
                    f"model_alpha{alabel}_{name}.csv",
                    "risk,mass,prevalence\n"
                    + "".join(
                        f"{format_label(g.risk)},{format_label(g.mass)},{format_label(g.prevalence)}\n"
                        for g in table.groups
                    ),
                )
            report = evaluate(table)
            row = {"alpha": alpha, "model": name}
            row.update((f, getattr(report, f)) for f in METRIC_FIELDS)
            matrix_rows.append(row)
        for subset in config.subsets:
            tables[(alpha, subset)] = dict(models)[_subset_label(subset)]
        if len(config.subsets) >= 2:
            s1, s2 = config.subsets[0], config.subsets[1]
            joint = cross_classify(pop, s1, s2)
            comp = compare(tables[(alpha, s1)], tables[(alpha, s2)])
            writer.add_report(
                f"comparison_alpha{alabel}",
                "comparison",
                [(f, getattr(comp, f)) for f in COMPARISON_FIELDS],
            )
            gain = subgroup_precision_gain(joint)
            writer.add_report(
                f"subgroup_gain_alpha{alabel}",
                "subgroup_gain",
                [("population_mean", gain.population_mean), ("total_gain", gain.total_gain)],
                rows=_subgroup_rows(gain),
            )
    if len(config.alphas) >= 2:
        source_alpha, target_alpha = config.alphas[0], config.alphas[1]
        for subset in config.subsets:
            transferred = transfer_calibration(
                tables[(source_alpha, subset)], tables[(target_alpha, subset)]
            )
            writer.add_text(
                f"transfer_{_subset_label(subset)}_alpha{format_label(source_alpha)}"
                f"_to_alpha{format_label(target_alpha)}.csv",
                _attributes_csv(transferred),
            )
    else:
        print("note: transfer tables need two alpha values; skipped")
    writer.add_report(
        "metrics_matrix",
        "metrics_matrix",
        [],
        rows=(matrix_fields, matrix_rows),
    )
    for path in writer.flush():
        print(f"wrote {path}")
    return 0


def cmd_eval(config: RunConfig) -> int:
    path = config.paths[0]
    header = _sniff_header(path)
    if header[: len(INDIVIDUALS_HEADER)] == INDIVIDUALS_HEADER:
        records = load_individuals(path)
        scheme, k = config.bins
        table, _ = bin_individuals(records, scheme=scheme, k=k)
    else:
        table = load_grouped(path)
        if table.declared_calibrated:
            print(
                "warning: prevalence column missing; risks taken as prevalences "
                "(declared-calibrated)",
                file=sys.stderr,
            )
    report = evaluate(table)
    writer = Writer(config.out_dir, config.out_format, config.percent)
    writer.add_report("metrics", "metrics", _metrics_pairs(report))
    writer.add_text("attributes.csv", _attributes_csv(table))
    for out in writer.flush():
        print(f"wrote {out}")
    return 0


def cmd_compare(config: RunConfig) -> int:
    if len(config.paths) == 1:
        path = config.paths[0]
        header = _sniff_header(path)
        if header == CROSS_DECILE_HEADER:
            if config.mortality is None or config.horizon is None:
                raise ParameterOutOfRange(
                    "cross-decile input needs --mortality and --horizon"
                )
            joint = load_cross_decile(path, config.mortality, config.horizon)
        elif header == JOINT_HEADER:
            joint = load_joint(path)
        else:
            raise ParseError(
                f"{path}: expected header {','.join(JOINT_HEADER)} or "
                f"{','.join(CROSS_DECILE_HEADER)}"
            )
        table1, table2 = joint.marginal(1), joint.marginal(2)
    else:
        table1, table2 = load_grouped(config.paths[0]), load_grouped(config.paths[1])
        joint = load_joint(config.paths[2])
        for t in (table1, table2):
            gap = abs(t.population_mean - joint.population_mean)
            if gap > 1e-9 * max(abs(t.population_mean), abs(joint.population_mean)):
                raise MeanMismatch(
                    f"grouped table mean {t.population_mean!r} does not match "
                    f"joint table mean {joint.population_mean!r}"
                )
    comp = compare(table1, table2)
    gain = subgroup_precision_gain(joint)
    risks1 = {g.key: g.risk for g in table1.groups}
    risks2 = {g.key: g.risk for g in table2.groups}
    cell_rows = cross_classified_bias(joint, risks1, risks2)
    writer = Writer(config.out_dir, config.out_format, config.percent)
    writer.add_report(
        "comparison", "comparison", [(f, getattr(comp, f)) for f in COMPARISON_FIELDS]
    )
    writer.add_report(
        "subgroup_gain",
        "subgroup_gain",
        [("population_mean", gain.population_mean), ("total_gain", gain.total_gain)],
        rows=_subgroup_rows(gain),
    )
    writer.add_text(
        "cell_bias.csv",
        "group1,group2,mass,prevalence,risk1,risk2,bias1,bias2\n"
        + "".join(
            f"{c.key1},{c.key2},{format_label(c.mass)},{format_label(c.prevalence)},"
            f"{format_label(c.risk1)},{format_label(c.risk2)},"
            f"{format_label(c.bias1)},{format_label(c.bias2)}\n"
            for c in cell_rows
        ),
    )
    for out in writer.flush():
        print(f"wrote {out}")
    return 0


def cmd_convert(incidence: float, mortality: float, horizon: float) -> int:
    risk = ten_year_risk(incidence, mortality, horizon)
    print(f"risk over {format_label(horizon)} years: "
          f"{format_label(risk)} ({percent_round(risk)}%)")
    return 0


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    paths = tuple(Path(p) for p in getattr(args, "paths", []))
    for p in paths:
        if not p.exists():
            raise ParseError(f"input file {p} does not exist")
    alphas: tuple[float, ...] = ()
    if getattr(args, "alpha", None) is not None:
        try:
            alphas = tuple(float(a) for a in str(args.alpha).split(","))
        except ValueError:
            raise ParameterOutOfRange(f"cannot parse --alpha {args.alpha!r}") from None
        for a in alphas:
            if not 0.0 <= a <= 1.0:
                raise ParameterOutOfRange(f"alpha {a} outside [0, 1]")
    if getattr(args, "incidence", None) is not None:
        alphas = (args.incidence,)
    subsets: tuple[tuple[str, ...], ...] = ()
    if getattr(args, "models", None):
        subsets = tuple(parse_subset(s) for s in args.models.split(","))
        if len(set(subsets)) != len(subsets):
            raise ParameterOutOfRange(f"--models {args.models!r} repeats a subset")
    return RunConfig(
        subcommand=args.command,
        paths=paths,
        alphas=alphas,
        subsets=subsets,
        bins=parse_bins(getattr(args, "bins", "unique")),
        mortality=getattr(args, "mortality", None),
        horizon=getattr(args, "horizon", None),
        out_format=getattr(args, "format", "csv"),
        out_dir=Path(getattr(args, "out", "out")),
        percent=bool(getattr(args, "percent", False)),
    )


def dispatch(args: argparse.Namespace) -> int:
    if args.command == "convert":
        return cmd_convert(args.incidence, args.mortality, args.horizon)
    config = _config_from_args(args)
    if config.subcommand == "synth":
        return cmd_synth(config)
    if config.subcommand == "eval":
        return cmd_eval(config)
    if len(config.paths) not in (1, 3):
        raise ParseError("compare takes one table path or GROUPED1 GROUPED2 JOINT")
    return cmd_compare(config)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riskeval",
        description="Evaluate and compare probabilistic risk models for binary outcomes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output_flags(p):
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--percent", action="store_true", help="add 0.1pp percent views")

    p = sub.add_parser("synth", help="rebuild the synthetic worked example")
    p.add_argument("--alpha", default="0.2,0.8", help="comma-separated alpha values")
    p.add_argument("--models", default="z0z1,z0z1z2", help="comma-separated covariate subsets")
    add_output_flags(p)

    p = sub.add_parser("eval", help="evaluate one model file")
    p.add_argument("paths", nargs=1, metavar="PATH")
    p.add_argument("--bins", default="unique", help="unique | deciles | quantiles:K")
    add_output_flags(p)

    p = sub.add_parser("compare", help="compare two models")
    p.add_argument(
        "paths",
        nargs="+",
        metavar="PATH",
        help="joint table, cross-decile table, or GROUPED1 GROUPED2 JOINT",
    )
    p.add_argument("--mortality", type=float, default=None)
    p.add_argument("--horizon", type=float, default=None)
    add_output_flags(p)

    p = sub.add_parser("convert", help="annual rates to T-year risk")
    p.add_argument("incidence", type=float)
    p.add_argument("mortality", type=float)
    p.add_argument("horizon", type=float)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return dispatch(args)
    except InternalInvariantError as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return 3
    except RiskEvalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
