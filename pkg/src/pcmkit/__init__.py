"""Pairwise-comparison matrix toolkit: prioritization, inconsistency indices,
Monte Carlo error studies and ATI-based PCM acceptance."""

from .acceptance import (
    AcceptanceVerdict,
    QuantileRow,
    QuantileTable,
    UnsupportedOrderError,
    assess_pcm,
    builtin_table,
    locate_class,
    table_from_records,
)
from .core import (
    SAATY_SCALE,
    Pcm,
    PcmFormatError,
    PriorityVector,
    SaatyScale,
    is_consistent,
    is_reciprocal,
    mpr_from_pv,
    read_pcm,
    round_pcm,
    round_to_scale,
    write_pcm,
)
from .indices import (
    IndexReport,
    Triad,
    compute_ati,
    compute_cr,
    compute_gi,
    compute_ki,
    compute_report,
    compute_si,
    enumerate_triads,
    estimate_asi,
    triad_inconsistency,
)
from .loss import avg_absolute_error, avg_relative_error
from .prioritize import ConvergenceError, RevResult, gm_estimate, rev_estimate
from .simulate import (
    BigErrorModel,
    CorrelationSummary,
    ErrorModel,
    MsobeResult,
    SimRecord,
    default_error_models,
    perturb_entry,
    random_pv,
    read_records_csv,
    read_records_jsonl,
    run_mse_sf,
    run_msobe_sf,
    run_nee_sf,
    write_records_csv,
    write_records_jsonl,
)
from .stats import (
    ClassPartition,
    ClassSummary,
    DegenerateDataError,
    PartitionError,
    make_partition,
    pearson,
    quantile,
    spearman,
    summarize_classes,
)

__version__ = "0.1.0"
