//! Convex feasibility engines: LP feasibility for classical simulability and
//! postprocessing, alternating projections for joint measurability, and
//! direct verification of compression relations.

mod compression;
mod dykstra;
mod lp;
mod simulate;

pub use compression::verify_compression;
pub use dykstra::{joint_measurement_feasibility, joint_measurement_feasibility_with, JointMeasurement};
pub use lp::{lp_feasible, FeasibilityCert, FeasibilityStatus, LpProblem};
pub use simulate::{is_classically_simulable, is_postprocessing_of, simulate, Simulation};
