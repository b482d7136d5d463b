"""Quantum-walk search for a graph attached to one spoke of a star."""

from .errors import (
    AmbiguousMatch,
    FitDivergence,
    GraphError,
    NoMatch,
    ParseError,
    PhaseDegeneracy,
    QWalkError,
    TrialsExhausted,
    UnresolvedFamily,
)
from .graph_model import (
    AnomalyGraphSpec,
    CustomUnitary,
    EdgeBasis,
    GroverCoin,
    Reflect,
    StarGraph,
    Transmit,
    build_graph,
    parse_graph_file,
    write_graph_file,
)
from .operators import WalkUnitary, build_limit_operator, build_perturbation, build_step_operator
from .spectral import (
    Activity,
    Branch,
    SpectralClassification,
    analyze,
    classify_spectrum,
    compute_spectrum,
    coupling_constant_limit,
    perturbative_pair_prediction,
    tune_phase,
)
from .walk import (
    evolve,
    find_optimal_m,
    initial_state,
    optimal_step_count,
    sample_measurement,
    search_until_found,
    success_probability,
)

__version__ = "0.1.0"
