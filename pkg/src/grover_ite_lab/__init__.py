"""Grover search as a product-formula approximation of imaginary-time flow."""

__version__ = "0.1.0"

from .search_core import (  # noqa: F401
    ReducedState,
    SearchInstance,
    apply_projector,
    embed_state,
    make_initial,
    make_perp,
    make_solution,
    reduce_state,
)
from .ite_flow import (  # noqa: F401
    FlowPoint,
    commutator_flow_state,
    duration_from_tau,
    exact_commutator_exponential,
    ite_state,
    optimal_duration,
    synth_linear_step,
)
from .geometry import (  # noqa: F401
    GeodesicSpec,
    fs_distance,
    gci_error_bound,
    geodesic_point,
    instance_fs_distance,
    measured_gci_error,
    operator_norm,
    query_bound,
    su_geodesic_length,
)
from .pf_compiler import (  # noqa: F401
    AngleSchedule,
    FiveCopies,
    Generator,
    GroupCommutator,
    JeanKoseleff,
    Pulse,
    ThirdOrder,
    TwoCopies,
    compile_formula,
    fit_order,
    measure_formula_error,
    schedule_unitary,
)
from .grover_engine import (  # noqa: F401
    NamedSchedule,
    diffusion,
    fixed_point_angles,
    grover_iterate,
    oracle,
    run_schedule,
    success_probability,
)
from .qsp_engine import (  # noqa: F401
    AchievabilityReport,
    ChebyshevPoly,
    QspPhases,
    check_achievability,
    convert_convention,
    fit_ite_phases,
    fit_phases,
    fixed_point_via_sign,
    grover_to_qsp,
    jacobi_anger,
    qsp_matrix,
    qsp_to_grover,
    qsp_value,
    sign_poly,
    target_ite_component,
)
