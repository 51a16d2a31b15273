//! Multiplicative compounds of matrices and matrix pencils, Drazin inverses,
//! and the analysis of linear difference-algebraic equations (DAEs)
//!
//! ```text
//!     B x(j+1) = A x(j)
//! ```
//!
//! together with their k-compound systems `B^(k) y(j+1) = A^(k) y(j)`, whose
//! solutions track the k-parallelotopes spanned by bundles of solutions.
//!
//! Conventions:
//! - tuple entries ([`KTuple`]) are 1-based, ranks into `Q(k, n)` are 0-based;
//! - all matrices are dense and complex ([`Matrix`]), even for real input;
//! - infinite generalized eigenvalues are kept in homogeneous form ([`GenEig`]).

pub mod combinat;
pub mod compound;
pub mod dae;
pub mod drazin;
mod error;
pub mod linalg;
pub mod matrix;
mod options;
pub mod pencil;

pub use combinat::{binomial, KIndexer, KTuple};
pub use compound::{
    compound_rank, compound_scale, conjugate_transpose, kcompound, minor, volume, wedge,
    CompoundMatrix,
};
pub use dae::{
    analyze, compound_consistency_dim, compound_singular_witness, is_consistent, kcompound_dae,
    propagate, stable_subspace_bound, step_time_varying, volume_trace, CompoundConsistency,
    Consistency, DaeAnalysis, DaeSystem, StabilityVerdict, StableSubspace, TimeVaryingStep,
    Trajectory, VolumeTrace,
};
pub use drazin::{drazin_index, drazin_inverse, drazin_inverse_with_scale, DrazinResult};
pub use error::{Error, Result};
pub use matrix::{Matrix, C64};
pub use options::{Options, RankTol, ShiftLadder};
pub use pencil::{
    compound_eigenpair, compound_regularity, eigenvector, generalized_eigenvalues, gsd, is_regular,
    kcompound_pencil, match_spectra, GenEig, GsdResult, Pencil, RegularityReport,
};
