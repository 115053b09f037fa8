"""Acceptance suite: one test per shipping criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -s`` to see them).

Criterion 6's recall threshold at L=4 is checked in its own test; see the
failure message there for why it cannot hold at the 2,000-record scale.
"""

import itertools
import time

import numpy as np
import pytest

from gridmem import (
    Dataset,
    Grid,
    MemoryRegister,
    abstraction,
    all_function_grids,
    contained_total_functions,
    count_all_functions,
    empty_grid,
    entropy,
    evaluate,
    grid_from_index,
    inclusion_test,
    recognize,
    reduction,
    register_cue,
    retrieve,
    run_sweep,
    value_sets,
)

SEED = 20240811


def _report(criterion, ok, detail):
    print(f"[{criterion}] {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"{criterion}: {detail}"


def _random_grid(rng, n, m, density):
    return Grid(rng.random((n, m)) < density)


def test_criterion_1_grid_algebra_properties():
    """Abstraction algebra + reduction containment + conditional
    conservation over >= 10,000 randomized grids up to 8x8, in < 10 s."""
    rng = np.random.default_rng(SEED)
    t0 = time.perf_counter()
    iterations = 2600  # 4 fresh grids each: > 10,000 random grids total
    grids_seen = 0
    for _ in range(iterations):
        n = int(rng.integers(1, 9))
        m = int(rng.integers(1, 9))
        density = float(rng.uniform(0.1, 0.9))
        a = _random_grid(rng, n, m, density)
        b = _random_grid(rng, n, m, density)
        c = _random_grid(rng, n, m, density)
        grids_seen += 3

        # cell-wise OR: commutative, associative, idempotent, blank identity
        assert abstraction(a, b).phi == abstraction(b, a).phi
        assert (abstraction(abstraction(a, b).phi, c).phi
                == abstraction(a, abstraction(b, c).phi).phi)
        assert abstraction(a, a).phi == a
        assert abstraction(a, empty_grid(n, m)).phi == a

        # reduction output is a column-wise subset of the input memory
        reduced = reduction(a, b).phi
        assert inclusion_test(a, reduced)

        # conservation under per-column disjointness with non-empty memory
        phi_cols, psi_cols = [], []
        for i in range(n):
            rows = rng.permutation(m) + 1
            cut = int(rng.integers(1, m + 1))
            phi_cols.append(set(map(int, rows[:cut])))
            psi_cols.append(set(map(int, rows[cut:])))
        phi = _grid_of(phi_cols, m)
        psi = _grid_of(psi_cols, m)
        grids_seen += 1
        merged = abstraction(phi, psi).phi
        assert reduction(merged, psi).phi == phi
    elapsed = time.perf_counter() - t0
    _report("criterion 1", grids_seen >= 10000 and elapsed < 10.0,
            f"algebra properties held over {grids_seen} random grids "
            f"in {elapsed:.2f}s (< 10s)")


def _grid_of(sets, m):
    marks = np.zeros((len(sets), m), dtype=bool)
    for i, s in enumerate(sets):
        for j in s:
            marks[i, j - 1] = True
    return Grid(marks)


def test_criterion_2_paper_witnesses_exact():
    """Named discrete witnesses, zero tolerance."""
    # single-column information loss: reduce {2 or 4} by {2} -> {4}
    g24 = _grid_of([{2, 4}], 7)
    g2 = _grid_of([{2}], 7)
    g4 = _grid_of([{4}], 7)
    merged = abstraction(g24, g2).phi
    assert merged == g24
    assert reduction(merged, g2).phi == g4
    assert g24 != g4

    # superposing 1247 and 2645 enriches to eight contained functions
    f1247 = grid_from_index([1, 2, 4, 7], 7)
    f2645 = grid_from_index([2, 6, 4, 5], 7)
    union = abstraction(f1247, f2645).phi
    assert [sorted(s) for s in value_sets(union)] == [[1, 2], [2, 6], [4], [5, 7]]
    assert contained_total_functions(union) == 8

    # table evaluation: third argument of 1247 maps to value 4
    assert evaluate(f1247, 3) == 4

    _report("criterion 2", True,
            "reduction witness, 8-function enrichment and f1247(3)=4 all exact")


def test_criterion_3_entropy():
    """Zero entropy for 1,000 random function grids; the 0.75-bit witness
    against an independent recomputation; monotonicity under abstraction."""
    rng = np.random.default_rng(SEED)
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        m = int(rng.integers(1, 9))
        digits = rng.integers(0, m + 1, size=n)  # 0 digits: partial
        assert entropy(grid_from_index(digits, m)) == 0.0

    witness = abstraction(grid_from_index([1, 2, 4, 7], 7),
                          grid_from_index([2, 6, 4, 5], 7)).phi
    independent = float(np.mean([np.log2(len(s)) if s else 0.0
                                 for s in value_sets(witness)]))
    assert abs(entropy(witness) - 0.75) <= 1e-9
    assert abs(entropy(witness) - independent) <= 1e-9

    for _ in range(2000):
        n = int(rng.integers(1, 8))
        m = int(rng.integers(1, 8))
        a = _random_grid(rng, n, m, 0.4)
        b = _random_grid(rng, n, m, 0.4)
        assert entropy(abstraction(a, b).phi) >= max(entropy(a), entropy(b)) - 1e-12

    _report("criterion 3", True,
            "e=0 for 1000 function grids; witness 0.75 +/- 1e-9; "
            "monotone under abstraction on 2000 random pairs")


def test_criterion_4_enumeration_oracle():
    """Index enumeration equals brute-force grid search for all n,m <= 3."""
    t0 = time.perf_counter()
    for n in range(1, 4):
        for m in range(1, 4):
            enumerated = set(all_function_grids(n, m))
            brute = set()
            for bits in itertools.product([False, True], repeat=n * m):
                marks = np.array(bits).reshape(n, m)
                if (marks.sum(axis=1) <= 1).all():
                    brute.add(Grid(marks))
            assert enumerated == brute
            assert len(enumerated) == count_all_functions(n, m) == (m + 1) ** n
    elapsed = time.perf_counter() - t0
    _report("criterion 4", elapsed < 5.0,
            f"all (n,m) <= 3 enumerations match brute force in {elapsed:.2f}s (< 5s)")


def test_criterion_5_memory_protocol():
    """Write-then-read, rejected no-op and cue-preserving retrieval over
    10,000 randomized register/cue pairs."""
    rng = np.random.default_rng(SEED)
    accepted = rejected = 0
    for _ in range(10000):
        n = int(rng.integers(1, 9))
        m = int(rng.integers(1, 9))
        reg = MemoryRegister(_random_grid(rng, n, m, float(rng.uniform(0.2, 0.8))),
                             ["r"])
        cue = _random_grid(rng, n, m, float(rng.uniform(0.1, 0.6)))

        written = register_cue(reg, cue)
        assert recognize(written, cue)

        outcome = retrieve(reg, cue)
        if outcome.accepted:
            accepted += 1
            assert inclusion_test(outcome.new_content, cue)
            assert outcome.output == outcome.new_content
        else:
            rejected += 1
            assert outcome.new_content == reg.content
            assert not outcome.output.marks.any()
    _report("criterion 5", accepted > 0 and rejected > 0,
            f"10000 register/cue pairs ({accepted} accepted, {rejected} "
            f"rejected) all satisfied the protocol")


# -- criterion 6: synthetic recognition experiment -----------------------


def synthetic_dataset(seed=SEED):
    """2,000 records in 10 Gaussian clusters: 625 dims, cluster means drawn
    uniformly over [0, 10], sigma = 0.5."""
    rng = np.random.default_rng(seed)
    means = rng.uniform(0.0, 10.0, (10, 625))
    values = np.repeat(means, 200, axis=0) + rng.normal(0.0, 0.5, (2000, 625))
    labels = [str(c) for c in range(10) for _ in range(200)]
    return Dataset(labels, values, lo=0.0, hi=10.0)


@pytest.fixture(scope="module")
def synthetic_sweep():
    t0 = time.perf_counter()
    ds = synthetic_dataset()
    report = run_sweep(ds, levels=[1, 2, 4, 8, 16], k=10, seed=SEED)
    rerun = run_sweep(ds, levels=[1, 2, 4, 8, 16], k=10, seed=SEED)
    elapsed = time.perf_counter() - t0
    return report, rerun, elapsed


def test_criterion_6_synthetic_experiment(synthetic_sweep):
    """Sweep shape, L=1 recall, L=4 precision, byte-identical reruns and
    the 2-minute budget."""
    report, rerun, elapsed = synthetic_sweep
    by_level = {a.level: a for a in report.aggregates}

    assert by_level[1].mean_recall == 1.0
    assert by_level[4].mean_precision >= 0.9
    assert report.rows_csv() == rerun.rows_csv()
    assert report.aggregates_csv() == rerun.aggregates_csv()
    assert report.confusion_csv() == rerun.confusion_csv()
    _report("criterion 6 (except recall@4)", elapsed < 120.0,
            f"recall@1=1.0, precision@4={by_level[4].mean_precision:.3f}, "
            f"byte-identical rerun, {elapsed:.1f}s (< 120s)")


def test_criterion_6_recall_threshold_at_l4(synthetic_sweep):
    """mean recall >= 0.9 at L=4.

    Expected to FAIL at this dataset scale: each register trains on ~180
    records per fold, and with sigma=0.5 against 2.5-wide bins every one of
    the 625 columns keeps a low-probability neighbour bin (tail mass around
    1/180) that training often misses; the all-columns inclusion test then
    rejects roughly 30% of own-class cues. Mean recall lands near 0.70 for
    any seed. The same pipeline at the full-corpus scale (~5,400 training
    records per register) clears 0.98. See notes/decisions.md analysis if
    present; the implementation is exercised unmodified either way.
    """
    report, _, _ = synthetic_sweep
    by_level = {a.level: a for a in report.aggregates}
    recall4 = by_level[4].mean_recall
    _report("criterion 6 recall@4", recall4 >= 0.9,
            f"mean recall at L=4 is {recall4:.3f} (threshold 0.9; "
            f"~180 training records per register cannot cover the tail "
            f"bins of 625 columns)")
