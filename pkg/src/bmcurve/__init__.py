"""Bit-merging curve cost modeling, learning, and block-access simulation."""

__version__ = "0.1.0"

from .curve import (
    BmcSpec,
    CurveError,
    curve_decode,
    curve_value,
    curve_value_array,
    parse_bmc,
    render_bmc,
    standard_curve,
)
from .global_cost import GlobalCostAccumulator, global_cost_closed, global_cost_naive, init_global
from .learner import LearnerConfig, apply_swap, learn_bmc, reward, valid_actions
from .local_cost import (
    PatternTableSet,
    build_pattern_tables,
    combined_cost,
    count_drop,
    count_rise,
    drop_vector_for,
    edges_via_tables,
    local_cost_from_tables,
)
from .oracle import (
    all_bmcs,
    enumerate_sections,
    exhaustive_best_bmc,
    naive_edge_count,
    naive_global_cost,
    naive_section_count,
)
from .simulator import (
    OrderedIndex,
    SimReport,
    build_index,
    compare_curves,
    hilbert_index,
    hilbert_order,
    run_query,
)
from .workload import (
    Dataset,
    RangeQuery,
    Workload,
    cell_count,
    gen_dataset,
    gen_queries,
    load_points,
)
