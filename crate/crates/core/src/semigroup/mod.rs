//! Transition kernels, Lévy densities and semigroup actions for the Gaussian
//! and symmetric α-stable models on R and R².

pub mod bessel;
pub mod checks;
pub mod model;
pub mod spectral;
pub mod testfn;

pub use model::{ModelKind, ModelSpec, SemigroupModel};
pub use spectral::{apply_generator, apply_semigroup, Action, SpectralField};
pub use testfn::TestFunctionSpec;
