"""Entropic associative memory on binary mark grids.

Functions and indeterminate relations live in the same carrier, an
``n x m`` boolean grid: superposition (cell-wise OR) writes, the inclusion
test recognizes, and column-wise set difference retrieves at the cost of
information loss measured by a per-column entropy. On top of the algebra
sit memory registers, quantized feature cues, an experiment harness and a
pair of scikit-learn style estimators.
"""

from .errors import (
    NotAFunctionError,
    PairingError,
    ParseError,
    ShapeError,
    StratificationError,
)
from .estimator import CueQuantizer, GridRecognizer
from .experiment import (
    ExperimentReport,
    FoldPlan,
    MetricsRow,
    evaluate_fold,
    fill_bank,
    label_groups,
    make_folds,
    run_fixed_split,
    run_sweep,
    write_report,
)
from .features import (
    Dataset,
    FeatureRecord,
    QuantizationSpec,
    cue_from_record,
    cues_from_dataset,
    dataset_from_text,
    dataset_to_text,
    load_dataset,
    quantize_value,
    quantize_values,
    save_dataset,
)
from .grids import (
    Grid,
    all_function_grids,
    contained_total_functions,
    count_all_functions,
    determinate_arguments,
    empty_grid,
    evaluate,
    grid_from_index,
    grid_from_text,
    grid_to_text,
    index_from_grid,
    is_function,
    is_total,
    load_grid,
    save_grid,
    value_sets,
)
from .memory import (
    MemoryRegister,
    RegisterBank,
    RetrievalOutcome,
    bank_from_text,
    bank_recognize,
    bank_to_text,
    load_bank,
    recognize,
    register_cue,
    register_from_text,
    register_to_text,
    retrieve,
    save_bank,
)
from .ops import GridPair, abstraction, entropy, inclusion_test, reduction

__version__ = "0.1.0"

__all__ = [
    "Grid", "GridPair", "MemoryRegister", "RegisterBank", "RetrievalOutcome",
    "Dataset", "FeatureRecord", "QuantizationSpec",
    "FoldPlan", "MetricsRow", "ExperimentReport",
    "CueQuantizer", "GridRecognizer",
    "empty_grid", "grid_from_index", "index_from_grid", "is_function",
    "is_total", "evaluate", "value_sets", "determinate_arguments",
    "contained_total_functions", "count_all_functions", "all_function_grids",
    "grid_to_text", "grid_from_text", "load_grid", "save_grid",
    "abstraction", "inclusion_test", "reduction", "entropy",
    "register_cue", "recognize", "retrieve", "bank_recognize",
    "register_to_text", "register_from_text", "bank_to_text", "bank_from_text",
    "load_bank", "save_bank",
    "quantize_value", "quantize_values", "cue_from_record", "cues_from_dataset",
    "load_dataset", "save_dataset", "dataset_to_text", "dataset_from_text",
    "make_folds", "label_groups", "fill_bank", "evaluate_fold", "run_sweep",
    "run_fixed_split", "write_report",
    "NotAFunctionError", "PairingError", "ParseError", "ShapeError",
    "StratificationError",
]
