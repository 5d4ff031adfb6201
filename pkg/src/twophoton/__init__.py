"""Two-photon polarization entanglement: exact states, measurements and detector streams."""

from .qstate import (
    CANONICAL, H, L, R, V, Arm, ContractViolation, LocalOperator,
    PolarizationBasis, TwoPhotonState, apply_history, apply_local, change_basis,
    compose, compose_history, equal_up_to_global_phase, make_singlet, overlap,
    pol_vector,
)
from .optics import (
    AnalyzerSetting, RetarderSpec, canonical_basis, circular_basis,
    elliptical_basis, explicit_basis, linear_basis, paper_qwp,
    random_local_unitary, retarder,
)
from .measure import (
    EntanglementReport, JointDistribution, NoSignalingReport, SampleRecord,
    chsh, correlation, entanglement_report, joint_distribution, marginal,
    recover_correlation_bases, sample, sample_counts, verify_no_signaling,
)
from .coincidence import (
    CoincidenceEstimate, CoincidenceResult, EmptyResultError, PairSourceSpec,
    TagStream, estimate_statistics, generate_streams, match_coincidences,
    read_tag_stream, write_tag_stream,
)
from .scenario import Scenario, ScenarioError, emit, parse_scenario, run_scenario

__version__ = "0.1.0"
