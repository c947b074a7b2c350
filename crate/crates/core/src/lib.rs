pub mod bf_asymptotics;
pub mod dispersion;
pub mod error;
pub mod exec;
pub mod ffh;
pub mod flatspec;
pub mod harness;
pub mod hf_asymptotics;
pub mod linalg;
pub mod qnewton;
pub mod stokes;

pub use dispersion::{DispersionModel, Family, Smoothness};
pub use error::{Error, Result};
pub use exec::Execution;
pub use flatspec::{find_collisions, flat_eigenvalue, Collision, CollisionSearch};
pub use hf_asymptotics::{IsolaKind, IsolaModel, QuartetCoeffs};
pub use stokes::{stokes_expand, stokes_numeric, StokesWave, WaveSource};
pub use ffh::{SpectrumSlice, UnstablePoint};
pub use qnewton::EigenPair;
pub use bf_asymptotics::{LemniscateModel, LemniscatePoint};
