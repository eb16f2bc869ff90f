"""Two-copy embedding of streaming verifier circuits."""
from .analysis import (
    ResidualProfile, change_of_basis, cheating_state, conjugated_chain_error, find_fooling_null,
    flux_unitary, full_support_profile, honest_profile, kitaev_gap_constant, propagation_extract_check,
    residual_G, residual_profile, round_proof_gates, walk_matrix,
)
from .circuit import (
    COMPUTE, PROOF_COMPUTE, PROOF_COPY, PROOF_UNCOMPUTE, Step, StreamingCircuit, identity_chain, toy_circuit,
)
from .hamiltonian import (
    EmbeddedHamiltonian, build_flux_hamiltonian, build_kitaev_terms, history_state, row_nnz_bound, row_oracle,
    side_state, thresholds,
)
from .verifier import (
    SeparableOperator, grid_minimum, minimize_product_energy, mip_embedding_params, asymptotic_weights,
    product_energy, qma2_acceptance, sampled_acceptance, swap_test,
)
