"""Rate regions and hybrid code simulation for compound quantum MACs."""

from .qmatrix import (
    DensityMatrix,
    DimensionMismatchError,
    PureState,
    entanglement_fidelity,
    fidelity,
    hermitian_eig,
    maximally_entangled,
    maximally_mixed,
    partial_trace,
    purify,
    tensor,
    trace_norm,
)
from .channels import (
    BudgetExceededError,
    ChannelFormatError,
    ChoiMatrix,
    CompoundSet,
    CptpError,
    CqChannel,
    KrausChannel,
    apply_channel,
    build_net,
    choi_matrix,
    diamond_distance_bounds,
    load_compound_json,
    tensor_power,
)
from .entropic import (
    CqqState,
    alicki_fannes_bound,
    coherent_information,
    coherent_information_b_cx,
    effective_cqq_state,
    holevo_fano_rate_bound,
    mutual_information_x_c,
    quantum_mutual_information,
    von_neumann_entropy,
)
from .regions import (
    RateRegion,
    Rect,
    compound_rect,
    contains,
    fatten,
    intersect,
    one_shot_region,
    scale,
    timeshare_closure,
    union,
)
from .optimizer import (
    InputAnsatz,
    SpectralDecomposition,
    decompose_tensor_power,
    empirical_approximation,
    pareto_trace,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
