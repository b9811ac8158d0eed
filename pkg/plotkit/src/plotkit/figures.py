"""Render benchmark figures from aggregate CSV files.

The input contract is the harness's aggregate CSV (schema_version 1): one
row per (algorithm, parameters, instance, protocol) with the summary
columns. These scripts never recompute statistics; they draw the columns
as-is. Rendering is deterministic: rows are sorted by an explicit key,
the style is pinned, and image metadata is stripped, so the same CSV
always produces the same bytes.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

SUPPORTED_SCHEMA_VERSIONS = {1}

REQUIRED_COLUMNS = [
    "schema_version",
    "algorithm",
    "params_json",
    "instance_label",
    "protocol",
    "mean_regret",
    "std_regret",
    "failure_probability",
    "n_trials",
]

FIGURE_KINDS = ("regret_bars", "horizon_bars", "pareto_scatter")

# Pinned style: every run of the same spec must produce identical bytes.
STYLE = {
    "figure.figsize": (8.0, 4.5),
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.hashsalt": "plotkit",
}

BAR_COLOR = "#4878d0"
EDGE_COLOR = "#2b4a86"


class PlotKitError(Exception):
    """Base class for plotkit failures."""


class SchemaMismatch(PlotKitError):
    """The CSV does not satisfy the aggregate schema contract."""


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: input CSVs, figure kind, grouping column, output path."""

    inputs: tuple[str, ...]
    kind: str
    group: str = "params_json"
    out: str = "figure.png"

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise PlotKitError(
                f"kind must be one of {FIGURE_KINDS}, got {self.kind!r}"
            )
        if not self.inputs:
            raise PlotKitError("at least one input CSV is required")


def load_rows(path: str, extra_columns: tuple[str, ...] = ()) -> list[dict]:
    """Read one aggregate CSV, validating the schema contract."""
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for column in [*REQUIRED_COLUMNS, *extra_columns]:
            if column not in header:
                raise SchemaMismatch(
                    f"{path}: missing required column {column!r}"
                )
        rows = list(reader)
    for row in rows:
        version = int(row["schema_version"])
        if version not in SUPPORTED_SCHEMA_VERSIONS:
            raise SchemaMismatch(
                f"{path}: unsupported schema_version {version}"
            )
        row["_source"] = path
    return rows


def _params(row: dict) -> dict:
    try:
        return json.loads(row["params_json"])
    except (ValueError, TypeError):
        return {}


def _sort_key(row: dict, group: str):
    """Deterministic row order: exploration parameter first, then the
    other tuning knobs, then the raw group label."""
    p = _params(row)
    gamma = p.get("gamma")
    knob = p.get("a", p.get("alpha", p.get("eta")))
    return (
        row["algorithm"],
        gamma is None,
        gamma if gamma is not None else 0.0,
        knob is None,
        knob if knob is not None else 0.0,
        str(row.get(group, "")),
    )


def _group_label(row: dict, group: str) -> str:
    if group == "params_json":
        p = _params(row)
        if p:
            return row["algorithm"] + "(" + ",".join(
                f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}"
                for k, v in sorted(p.items())
            ) + ")"
    return str(row.get(group, ""))


_HORIZON_RE = re.compile(r"T=(\d+)")


def _horizon(row: dict) -> int:
    m = _HORIZON_RE.search(row["protocol"])
    if not m:
        raise SchemaMismatch(
            f"{row['_source']}: protocol {row['protocol']!r} carries no "
            f"fixed-budget horizon"
        )
    return int(m.group(1))


def _new_axes():
    fig, ax = plt.subplots()
    return fig, ax


def _save(fig, out: str) -> None:
    # Strip writer metadata so identical figures yield identical bytes.
    fig.savefig(out, metadata={"Software": None} if out.endswith(".png") else {})
    plt.close(fig)


def _render_regret_bars(rows: list[dict], group: str, out: str) -> None:
    labels = [_group_label(r, group) for r in rows]
    means = [float(r["mean_regret"]) for r in rows]
    stds = [float(r["std_regret"]) for r in rows]
    fig, ax = _new_axes()
    x = range(len(rows))
    ax.bar(
        x, means, yerr=stds, capsize=4,
        color=BAR_COLOR, edgecolor=EDGE_COLOR,
    )
    ax.set_xticks(list(x))
    ax.set_xticklabels(labels, rotation=20, ha="right")
    ax.set_ylabel("mean regret")
    ax.set_title("Mean regret with standard-deviation whiskers")
    fig.tight_layout()
    _save(fig, out)


def _render_horizon_bars(rows: list[dict], group: str, out: str) -> None:
    by_group: dict[str, list[dict]] = {}
    order: list[str] = []
    for row in rows:
        label = _group_label(row, group)
        if label not in by_group:
            by_group[label] = []
            order.append(label)
        by_group[label].append(row)
    horizons = sorted({_horizon(r) for r in rows})
    index = {h: i for i, h in enumerate(horizons)}
    fig, ax = _new_axes()
    width = 0.8 / max(len(order), 1)
    for g, label in enumerate(order):
        entries = sorted(by_group[label], key=_horizon)
        xs = [index[_horizon(r)] + g * width for r in entries]
        ax.bar(
            xs,
            [float(r["mean_regret"]) for r in entries],
            yerr=[float(r["std_regret"]) for r in entries],
            width=width, capsize=3, label=label,
        )
    ax.set_xticks([i + 0.4 - width / 2 for i in range(len(horizons))])
    ax.set_xticklabels([str(h) for h in horizons])
    ax.set_xlabel("budget T")
    ax.set_ylabel("mean regret")
    ax.set_title("Mean regret across budgets")
    ax.legend()
    fig.tight_layout()
    _save(fig, out)


def _render_pareto_scatter(rows: list[dict], group: str, out: str) -> None:
    fig, ax = _new_axes()
    for row in rows:
        x = float(row["mean_regret"])
        y = float(row["failure_probability"])
        ax.plot([x], [y], marker="o", color=BAR_COLOR)
        gamma = _params(row).get("gamma")
        note = (
            f"gamma={gamma:g}" if gamma is not None else _group_label(row, group)
        )
        ax.annotate(note, (x, y), textcoords="offset points", xytext=(6, 4))
    ax.set_xlabel("mean regret")
    ax.set_ylabel("failure probability")
    ax.set_title("Regret / failure-probability trade-off")
    fig.tight_layout()
    _save(fig, out)


def render(spec: FigureSpec) -> str:
    """Draw the requested figure; returns the output path."""
    rows: list[dict] = []
    for path in spec.inputs:
        rows.extend(load_rows(path))
    if spec.group not in REQUIRED_COLUMNS:
        for row in rows:
            if spec.group not in row:
                raise SchemaMismatch(
                    f"{row['_source']}: missing required column {spec.group!r}"
                )
    rows.sort(key=lambda r: _sort_key(r, spec.group))
    with plt.rc_context(STYLE):
        if spec.kind == "regret_bars":
            _render_regret_bars(rows, spec.group, spec.out)
        elif spec.kind == "horizon_bars":
            _render_horizon_bars(rows, spec.group, spec.out)
        else:
            _render_pareto_scatter(rows, spec.group, spec.out)
    return spec.out
