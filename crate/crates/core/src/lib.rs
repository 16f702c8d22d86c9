//! Structure and intrinsic decoherence budget of a linear trapped-ion array.
//!
//! The crate is generic over the real scalar (see [`Scalar`]); the `*64`
//! aliases below fix it to `f64`, which is what the SI decoherence numbers
//! need.

pub mod constants;
pub mod continuum;
pub mod decoherence;
pub mod error;
pub mod ion_array;
pub(crate) mod linalg;
pub mod scalar;
pub mod spin;
pub mod sums;

pub use constants::{trap_length_scale, IonSpecies, PhysicalConstants};
pub use continuum::ContinuumModel;
pub use error::{Error, Result};
pub use ion_array::{solve_equilibrium, IonArray, Seed, SolverOptions, Spacings, TrapConfig};
pub use scalar::Scalar;

/// Library version, for run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type PhysicalConstants64 = PhysicalConstants<f64>;
pub type IonSpecies64 = IonSpecies<f64>;
pub type TrapConfig64 = TrapConfig<f64>;
pub type IonArray64 = IonArray<f64>;
pub type SolverOptions64 = SolverOptions<f64>;
pub type TransitionSpec64 = decoherence::TransitionSpec<f64>;
pub type DecoherenceReport64 = decoherence::DecoherenceReport<f64>;
pub type SpinState64 = spin::SpinState<f64>;
pub type TransverseDrive64 = spin::TransverseDrive<f64>;

pub type IonArray32 = IonArray<f32>;
pub type SpinState32 = spin::SpinState<f32>;
