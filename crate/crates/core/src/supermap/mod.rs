//! Superchannels between multimeters: construction, application,
//! verification and realization.

mod construct;
pub mod instances;
mod realization;
mod spanning;
mod superchannel;

pub use construct::{
    classical_simulation_map, classical_simulation_realization, compatibility_preserving_map,
    compatibility_preserving_realization, compression_map, compression_realization, quantum_ancilla_example_map,
    quantum_ancilla_from_realization, quantum_ancilla_realization, trash_and_prepare_map,
    trash_and_prepare_realization,
};
pub use realization::{
    from_classical_realization, from_general_realization, realize, ClassicalRealization, GeneralRealization,
};
pub use spanning::{affine_spanning_multimeters, hermitian_basis, spanning_set_size};
pub use superchannel::{
    action_distance, apply, mix, project_to_multimeter_span, verify_multimeter_superchannel, Shape, Superchannel,
    VerifyReport,
};
