"""Opinion dynamics on weighted influence networks.

Models: French-DeGroot, Abelson (linear and nonlinear), Taylor and
Friedkin-Johnsen.  Verdicts about convergence, consensus and stability are
read off the influence graph; fixed points and centralities come from exact
linear solves.
"""
from .analysis import (
    CentralityResult,
    ConvergenceVerdict,
    PDependencePartition,
    StabilityVerdict,
    abelson_limit,
    abelson_social_power,
    abelson_verdict,
    analyze,
    classify_p_dependence,
    containment_certificate,
    containment_check,
    degroot_limit,
    degroot_verdict,
    fj_final,
    fj_stability_and_final,
    fj_verdict,
    french_social_power,
    influence_centrality,
    nash_residual,
    pagerank,
    taylor_final,
    taylor_stability_and_final,
    taylor_verdict,
)
from .dynamics import (
    Abelson,
    DeGroot,
    FriedkinJohnsen,
    Taylor,
    Trajectory,
    abelson_simulate_linear,
    abelson_simulate_nonlinear,
    degroot_simulate,
    fj_simulate,
    simulate,
    taylor_simulate,
)
from .exceptions import (
    AmbiguityError,
    ConvergenceError,
    DimensionError,
    DomainError,
    ExpmOverflowError,
    NonFiniteStateError,
    OpinionDynamicsError,
    RefusalError,
    SingularMatrixError,
)
from .formats import load_network, load_trajectory, render_network, save_report, save_trajectory
from .graph import (
    DirectedWeightedGraph,
    component_period,
    graph_from_matrix,
    reachable_from,
    roots_and_quasi_strong,
    source_nodes,
    strong_components,
)
from .matrices import (
    as_stochastic,
    is_stochastic,
    laplacian_left_null,
    laplacian_of,
    left_fixed_vector,
    m_matrix_solve,
    matrix_exponential,
    spectral_radius,
)

__version__ = "0.1.0"
