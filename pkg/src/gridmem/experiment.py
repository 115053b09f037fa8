"""Recognition experiment harness: folds, bank filling, metrics, sweeps.

A sweep crosses quantization levels with cross-validation folds. For every
(level, fold) cell a fresh bank is filled from the training folds and every
test record is submitted to every register; each (register, record) pair is
an independent binary decision, so a record accepted by several registers
counts for each of them. Reports are deterministic given (dataset, levels,
k, seed, pairing) regardless of scheduling.
"""

from __future__ import annotations

import csv
import io
import logging
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import PairingError, ShapeError, StratificationError
from .features import Dataset, QuantizationSpec, cues_from_dataset
from .grids import Grid
from .memory import MemoryRegister, RegisterBank, recognize, register_cue
from .ops import entropy

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FoldPlan:
    """Stratified record -> fold assignment."""

    k: int
    seed: int
    assignment: np.ndarray  # (n_records,) fold ids in 0..k-1

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignment != fold)


def make_folds(ds: Dataset, k: int, seed: int) -> FoldPlan:
    """Assign each record to one of k folds, stratified by label."""
    if k < 2:
        raise ValueError(f"need k >= 2 folds, got {k}")
    counts = ds.label_counts()
    for label in sorted(counts):
        if counts[label] < k:
            raise StratificationError(
                f"label {label!r} has {counts[label]} records, fewer than k={k}"
            )
    rng = np.random.default_rng(seed)
    labels = np.array(ds.labels)
    assignment = np.full(ds.n_records, -1, dtype=int)
    for label in sorted(counts):
        idx = np.flatnonzero(labels == label)
        assignment[rng.permutation(idx)] = np.arange(len(idx)) % k
    arr = assignment
    arr.setflags(write=False)
    return FoldPlan(k=k, seed=seed, assignment=arr)


def label_groups(labels, pairing=None) -> tuple[tuple[str, ...], ...]:
    """Register label groups: singletons per sorted label, or the given pairing.

    Every label present must be covered by the pairing; groups must not
    overlap. Group order follows the pairing when given, else sorted labels.
    """
    present = {str(l) for l in labels}
    if pairing is None:
        return tuple((label,) for label in sorted(present))
    groups: list[tuple[str, ...]] = []
    seen: set[str] = set()
    for group in pairing:
        members = tuple(str(l) for l in group)
        if not members:
            raise PairingError("empty label group in pairing")
        for member in members:
            if member in seen:
                raise PairingError(f"label {member!r} appears in two groups")
            seen.add(member)
        groups.append(members)
    uncovered = present - seen
    if uncovered:
        raise PairingError(f"labels not covered by pairing: {sorted(uncovered)}")
    return tuple(groups)


def _fill_from_cues(labels: Sequence[str], cues: Sequence[Grid],
                    groups: Sequence[tuple[str, ...]],
                    spec: QuantizationSpec) -> RegisterBank:
    registers = {g: MemoryRegister.blank(g, spec.n_features, spec.levels)
                 for g in groups}
    owner = {label: g for g in groups for label in g}
    for label, cue in zip(labels, cues):
        group = owner[label]
        registers[group] = register_cue(registers[group], cue)
    return RegisterBank(registers[g] for g in groups)


def fill_bank(ds: Dataset, fold_plan: FoldPlan, test_fold: int,
              spec: QuantizationSpec, pairing=None, *, _cues=None) -> RegisterBank:
    """Fill one register per label group from all records outside test_fold."""
    if spec.n_features != ds.n_features:
        raise ShapeError(
            f"dataset has {ds.n_features} features, spec declares {spec.n_features}"
        )
    if not 0 <= test_fold < fold_plan.k:
        raise ValueError(f"test_fold {test_fold} out of range 0..{fold_plan.k - 1}")
    cues = _cues if _cues is not None else cues_from_dataset(ds, spec)
    groups = label_groups(ds.labels, pairing)
    train = fold_plan.train_indices(test_fold)
    return _fill_from_cues([ds.labels[i] for i in train],
                           [cues[i] for i in train], groups, spec)


@dataclass(frozen=True)
class MetricsRow:
    level: int
    fold: int
    register_labels: tuple[str, ...]
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    entropy: float


def _safe_ratio(num: int, den: int, what: str, where: str) -> float:
    if den == 0:
        log.info("%s undefined (0/0) for %s; reporting 1 by convention", what, where)
        return 1.0
    return num / den


def _tally(bank: RegisterBank, labels: Sequence[str], cues: Sequence[Grid],
           level: int, fold: int):
    """Metrics rows plus (true_label, group) acceptance counts for one cell."""
    rows: list[MetricsRow] = []
    accept_counts: Counter = Counter()
    totals = Counter(labels)
    for reg in bank:
        group = tuple(sorted(reg.labels))
        tp = fp = fn = tn = 0
        for label, cue in zip(labels, cues):
            accepted = recognize(reg, cue)
            positive = label in reg.labels
            if accepted:
                accept_counts[(label, group)] += 1
            if accepted and positive:
                tp += 1
            elif accepted:
                fp += 1
            elif positive:
                fn += 1
            else:
                tn += 1
        where = f"register {','.join(group)} (level {level}, fold {fold})"
        rows.append(MetricsRow(
            level=level, fold=fold, register_labels=group,
            tp=tp, fp=fp, fn=fn, tn=tn,
            precision=_safe_ratio(tp, tp + fp, "precision", where),
            recall=_safe_ratio(tp, tp + fn, "recall", where),
            entropy=entropy(reg.content),
        ))
    return rows, accept_counts, totals


def evaluate_fold(bank: RegisterBank, ds: Dataset, fold_plan: FoldPlan,
                  test_fold: int, spec: QuantizationSpec,
                  *, _cues=None) -> list[MetricsRow]:
    """Submit every test-fold record to every register and tally metrics."""
    if bank.n_cols != ds.n_features or bank.m_rows != spec.levels:
        raise ShapeError(
            f"bank shape {bank.n_cols}x{bank.m_rows} does not match "
            f"{ds.n_features} features at {spec.levels} levels"
        )
    cues = _cues if _cues is not None else cues_from_dataset(ds, spec)
    test = fold_plan.test_indices(test_fold)
    rows, _, _ = _tally(bank, [ds.labels[i] for i in test],
                        [cues[i] for i in test], spec.levels, test_fold)
    return rows


@dataclass(frozen=True)
class LevelAggregate:
    level: int
    mean_precision: float
    mean_recall: float
    mean_entropy: float


@dataclass(frozen=True)
class ConfusionRow:
    level: int
    true_label: str
    register_labels: tuple[str, ...]
    accept_count: int
    total: int


@dataclass(frozen=True)
class ExperimentReport:
    rows: tuple[MetricsRow, ...]
    aggregates: tuple[LevelAggregate, ...]
    confusion: tuple[ConfusionRow, ...]
    config: dict

    def rows_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["level", "fold", "labels", "tp", "fp", "fn", "tn",
                    "precision", "recall", "entropy"])
        for r in self.rows:
            w.writerow([r.level, r.fold, ",".join(r.register_labels),
                        r.tp, r.fp, r.fn, r.tn,
                        f"{r.precision:.6f}", f"{r.recall:.6f}",
                        f"{r.entropy:.6f}"])
        return out.getvalue()

    def aggregates_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["level", "mean_precision", "mean_recall", "mean_entropy"])
        for a in self.aggregates:
            w.writerow([a.level, f"{a.mean_precision:.6f}",
                        f"{a.mean_recall:.6f}", f"{a.mean_entropy:.6f}"])
        return out.getvalue()

    def confusion_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["level", "true_label", "register_labels",
                    "accept_count", "total"])
        for c in self.confusion:
            w.writerow([c.level, c.true_label, ",".join(c.register_labels),
                        c.accept_count, c.total])
        return out.getvalue()

    def aggregate_table(self) -> str:
        lines = [f"{'level':>6}  {'precision':>10}  {'recall':>10}  {'entropy':>10}"]
        for a in self.aggregates:
            lines.append(f"{a.level:>6}  {a.mean_precision:>10.6f}  "
                         f"{a.mean_recall:>10.6f}  {a.mean_entropy:>10.6f}")
        return "\n".join(lines) + "\n"


def _aggregate_level(level: int, cell_rows: Sequence[list[MetricsRow]]) -> LevelAggregate:
    """Unweighted mean over registers within each fold, then over folds."""
    fold_p = [float(np.mean([r.precision for r in rows])) for rows in cell_rows]
    fold_r = [float(np.mean([r.recall for r in rows])) for rows in cell_rows]
    fold_e = [float(np.mean([r.entropy for r in rows])) for rows in cell_rows]
    return LevelAggregate(level, float(np.mean(fold_p)), float(np.mean(fold_r)),
                          float(np.mean(fold_e)))


def _confusion_rows(level: int, accept_counts: Counter, totals: Counter,
                    groups: Sequence[tuple[str, ...]]) -> list[ConfusionRow]:
    return [
        ConfusionRow(level, label, group,
                     accept_counts.get((label, group), 0), totals[label])
        for label in sorted(totals)
        for group in groups
    ]


def run_sweep(ds: Dataset, levels: Sequence[int], k: int = 10, seed: int = 0,
              pairing=None, max_workers: int | None = None) -> ExperimentReport:
    """Cross every level with every fold; deterministic for a fixed seed."""
    if not levels:
        raise ValueError("need at least one quantization level")
    plan = make_folds(ds, k, seed)
    groups = label_groups(ds.labels, pairing)
    specs = [ds.quantization_spec(int(L)) for L in levels]
    cues_by_level = [cues_from_dataset(ds, spec) for spec in specs]

    def run_cell(cell):
        li, fold = cell
        spec, cues = specs[li], cues_by_level[li]
        bank = fill_bank(ds, plan, fold, spec, pairing, _cues=cues)
        test = plan.test_indices(fold)
        return _tally(bank, [ds.labels[i] for i in test],
                      [cues[i] for i in test], spec.levels, fold)

    cells = [(li, fold) for li in range(len(levels)) for fold in range(k)]
    if max_workers is not None and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = dict(zip(cells, pool.map(run_cell, cells)))
    else:
        results = {cell: run_cell(cell) for cell in cells}

    rows: list[MetricsRow] = []
    aggregates: list[LevelAggregate] = []
    confusion: list[ConfusionRow] = []
    for li, spec in enumerate(specs):
        cell_rows = [results[(li, fold)][0] for fold in range(k)]
        acc: Counter = Counter()
        tot: Counter = Counter()
        for fold in range(k):
            _, cell_acc, cell_tot = results[(li, fold)]
            acc.update(cell_acc)
            tot.update(cell_tot)
        for fold_rows in cell_rows:
            rows.extend(fold_rows)
        aggregates.append(_aggregate_level(spec.levels, cell_rows))
        confusion.extend(_confusion_rows(spec.levels, acc, tot, groups))

    config = {
        "mode": "kfold", "levels": [int(L) for L in levels], "folds": k,
        "seed": seed, "pairing": None if pairing is None else
        [list(g) for g in label_groups(ds.labels, pairing)],
        "n_records": ds.n_records, "n_features": ds.n_features,
        "lo": ds.lo, "hi": ds.hi,
    }
    return ExperimentReport(tuple(rows), tuple(aggregates), tuple(confusion),
                            config)


def run_fixed_split(train_ds: Dataset, test_ds: Dataset, levels: Sequence[int],
                    pairing=None) -> ExperimentReport:
    """Fill banks from the whole training set, evaluate the whole test set.

    Reported with a single pseudo-fold 0 per level.
    """
    if not levels:
        raise ValueError("need at least one quantization level")
    if train_ds.n_features != test_ds.n_features:
        raise ShapeError(
            f"train has {train_ds.n_features} features, test {test_ds.n_features}"
        )
    if (train_ds.lo, train_ds.hi) != (test_ds.lo, test_ds.hi):
        raise ValueError(
            "train and test files declare different feature ranges: "
            f"[{train_ds.lo}, {train_ds.hi}] vs [{test_ds.lo}, {test_ds.hi}]"
        )
    groups = label_groups(train_ds.labels, pairing)
    rows: list[MetricsRow] = []
    aggregates: list[LevelAggregate] = []
    confusion: list[ConfusionRow] = []
    for L in levels:
        spec = train_ds.quantization_spec(int(L))
        train_cues = cues_from_dataset(train_ds, spec)
        test_cues = cues_from_dataset(test_ds, spec)
        bank = _fill_from_cues(train_ds.labels, train_cues, groups, spec)
        cell_rows, acc, tot = _tally(bank, list(test_ds.labels), test_cues,
                                     spec.levels, 0)
        rows.extend(cell_rows)
        aggregates.append(_aggregate_level(spec.levels, [cell_rows]))
        confusion.extend(_confusion_rows(spec.levels, acc, tot, groups))
    config = {
        "mode": "fixed-split", "levels": [int(L) for L in levels],
        "pairing": None if pairing is None else [list(g) for g in groups],
        "n_train": train_ds.n_records, "n_test": test_ds.n_records,
        "n_features": train_ds.n_features, "lo": train_ds.lo, "hi": train_ds.hi,
    }
    return ExperimentReport(tuple(rows), tuple(aggregates), tuple(confusion),
                            config)


REPORT_FILES = ("rows.csv", "aggregates.csv", "confusion.csv")


def write_report(report: ExperimentReport, out_dir) -> None:
    from ._files import atomic_write_text

    os.makedirs(out_dir, exist_ok=True)
    atomic_write_text(os.path.join(out_dir, "rows.csv"), report.rows_csv())
    atomic_write_text(os.path.join(out_dir, "aggregates.csv"),
                      report.aggregates_csv())
    atomic_write_text(os.path.join(out_dir, "confusion.csv"),
                      report.confusion_csv())
