//! Quantum objects: POVMs, multimeters, CP maps and instruments, with Choi
//! calculus, Stinespring dilation and Radon–Nikodym extraction.

mod condprob;
mod cpmap;
mod povm;
mod stinespring;

pub(crate) use condprob::unflatten;
pub use condprob::CondProb;
pub use cpmap::{choi_of_map, dual_apply, map_of_choi, CpMap, Instrument};
pub(crate) use povm::decode_blocks;
pub use povm::{
    check_state, mm_index, multimeter_apply, multimeter_choi, multimeter_of_choi, postprocess_povm, Multimeter, Povm,
};
pub use stinespring::{radon_nikodym, stinespring, StinespringDilation};
