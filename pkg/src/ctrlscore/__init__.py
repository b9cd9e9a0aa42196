"""Controllability scores of linear time-varying network systems."""

from .centrality import CentralityTable, control_energy_centralities, generalized_scores
from .datadriven import (
    TrajectoryBundle,
    check_spanning,
    generate_trajectories,
    gramians_datadriven,
    read_trajectories,
    write_trajectories,
)
from .errors import (
    AssumptionViolation,
    CtrlScoreError,
    NotControllableError,
    NumericalError,
    ValidationError,
)
from .gramian import (
    GramianSet,
    assemble,
    compute_gramians,
    gramians_legendre,
    gramians_lyapunov,
    gramians_quadrature,
    load_gramians,
    min_control_energy,
    save_gramians,
)
from .networks import builtin_system, network_spec
from .optimize import (
    Certificate,
    Objective,
    SolveReport,
    armijo_step,
    objective_gradient,
    objective_value,
    project_simplex,
    solve,
    uniqueness_certificate,
)
from .sysmodel import (
    AnalyticMatrix,
    ConstantMatrix,
    NetworkSpec,
    Segment,
    TemporalSystem,
    aggregate,
    build_system,
    evaluate_A,
    load_network,
    parse_network,
    serialize_network,
)
from .transition import matrix_exponential, propagate_adjoint, propagate_state

__version__ = "0.1.0"
