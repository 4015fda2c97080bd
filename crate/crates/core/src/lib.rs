//! Projector-overlap geometry of measurement contexts and the
//! state-dependent contextuality witnesses built on top of it.
//!
//! A context is a triple of commuting-neighbour observables; its left and
//! right joint-eigenspace families give the overlap matrix `T`, whose total
//! `E` and collision entropy `S2 = -log2 E` are properties of the
//! configuration alone. The witnesses module evaluates `χ`, the contextual
//! fraction, the entropic cycle inequalities and the commutator witness `D`
//! on a given state.
//!
//! ```
//! use ctxgeom::{analysis::s2_total, build_kcbs};
//!
//! let kcbs = build_kcbs().unwrap();
//! let bits = s2_total(&kcbs).unwrap();
//! assert!((bits - 2.726565).abs() < 1e-6);
//! ```

pub mod analysis;
pub mod error;
pub mod linalg;
pub mod overlap;
pub mod projectors;
pub mod scenarios;
pub mod states;
pub mod witnesses;

pub use error::{Error, Result};
pub use linalg::{hermitian_eig, ComplexMatrix, Eigen, HermitianOperator, StateVector, C64};
pub use overlap::{context_invariants, overlap_matrix, ContextInvariants, OverlapMatrix};
pub use projectors::{
    coarse_grain, joint_eigenprojectors, Label, LabeledProjector, ProjectorFamily,
};
pub use scenarios::{
    build_chsh, build_kcbs, build_ncycle, ChshConfig, Context, CorrelatorBounds, NCycleConfig,
    Scenario, ScenarioParams,
};
pub use states::{kcbs_mixing_state, named_state, sweep_state, DensityMatrix};
pub use witnesses::{witness_report, WitnessReport};
