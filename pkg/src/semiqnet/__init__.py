"""Semi-quantum layered-network protocol simulator and analysis toolkit."""

__version__ = "0.1.0"

from .network import Layer, NetworkSpec, Participant, load_network, save_network, validate
from .qudit import (
    QuditState,
    UnitaryMatrix,
    apply_unitary,
    attach_ancilla,
    basis_state,
    make_state,
    measure_computational,
    outcome_distribution,
    project_onto,
    tensor,
)
from .synthesis import (
    ProtocolKind,
    ResourceState,
    alpha_reference,
    binary_to_decimal,
    ghz_reference,
    plus_product_reference,
    schmidt_vector,
    synthesize,
)
from .protocol import (
    Action,
    AliceChoice,
    SessionConfig,
    Transcript,
    derive_keys,
    detect_eavesdropping,
    make_session,
    run_round,
    run_decoy_round,
    run_session,
    run_sqkd07,
    sift,
    sift_sqkd07,
)
from .adversary import (
    AttackKind,
    EveStrategy,
    LyingPolicy,
    entangle_measure,
    eve_guess,
    intercept_resend,
    lying_participant,
    parse_attack,
    two_way_entangle,
)
from .analysis import (
    confidentiality,
    cumulative_detection,
    eve_tradeoff_curve,
    exact_detection,
    sampled_detection,
    sifted_rate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
