//! Exceptional quantum subgroups and quantum modules of the affine fusion
//! categories of B2 and G2, computed from conformal embeddings.
//!
//! The pipeline follows the natural staging of the problem:
//!
//! 1. [`fusionring`] — integrable weights, Kac-Peterson S/T, Verlinde fusion
//!    matrices and quantum dimensions;
//! 2. [`invariants`] — the type-I modular invariant of each embedding and its
//!    counting data;
//! 3. [`splitting`] — the modular splitting equation, producing the family of
//!    toric matrices;
//! 4. [`symmetries`] — the intertwining equations, chiral generators and the
//!    Ocneanu graph;
//! 5. [`modcat`] — extraction of each module category: annular and essential
//!    matrices, quantum dimensions, graph algebras and block dimensions.
//!
//! Transcendental arithmetic runs at a configurable working precision
//! ([`scalars`]); every quantity the pipeline branches on is an integer and
//! is certified by tolerance-checked rounding.

pub mod cache;
pub mod canon;
pub mod dioph;
pub mod fusionring;
pub mod golden;
pub mod intmat;
pub mod invariants;
pub mod liedata;
pub mod modcat;
pub mod par;
pub mod pipeline;
pub mod rat;
pub mod report;
pub mod scalars;
pub mod splitting;
pub mod symmetries;
pub mod verify;

pub use liedata::{AlgebraKind, Weight};
pub use scalars::{Precision, ToleranceProfile};

/// Run-wide numeric context: precision plus tolerances, immutable for the
/// duration of a computation and recorded in all outputs.
#[derive(Clone, Copy, Debug)]
pub struct Context {
    pub prec: Precision,
    pub tol: ToleranceProfile,
}

impl Context {
    pub fn new(prec: Precision, tol: ToleranceProfile) -> Self {
        Context { prec, tol }
    }

    pub fn with_digits(digits: u32) -> Self {
        Context {
            prec: Precision::decimal(digits),
            tol: ToleranceProfile::default(),
        }
    }
}

impl Default for Context {
    fn default() -> Self {
        Context {
            prec: Precision::default(),
            tol: ToleranceProfile::default(),
        }
    }
}
