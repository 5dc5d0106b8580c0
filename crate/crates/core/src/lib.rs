//! Exact classification of points of `P^{n-1}(F_q)` as on, external or
//! internal to smooth quadrics (`n` odd, `q` odd), joint censuses for pairs
//! of quadrics, and the quadratic character sums that govern them.
//!
//! ```
//! use quadric_core::{classify_algebraic, FieldSpec, PointClass, ProjectivePoint, QuadraticForm};
//!
//! let f7 = FieldSpec::prime(7).unwrap();
//! let conic = QuadraticForm::parse_line("3 7 1 0 0 1 0 -1", &f7).unwrap();
//! let origin = ProjectivePoint::normalize(&f7, &[f7.zero(), f7.zero(), f7.one()]).unwrap();
//! assert_eq!(classify_algebraic(&conic, &origin).unwrap(), PointClass::Internal);
//! ```

pub mod classify;
pub mod counting;
pub mod error;
pub mod field;
pub mod forms;
pub mod linalg;
pub mod projective;
pub mod report;
pub mod selftest;

pub use classify::{
    classify_algebraic, classify_geometric, classify_tangent_count, hyperplane_section_form, tangent_count,
    AlgebraicClassifier, HyperplaneSection, PointClass,
};
pub use counting::{
    katz_bound, lemma32_bound, random_smooth_quadric, rl_bound, sample_pair, sample_smooth_quadric, sweep,
    within_bound, CharSumReport, CharSums, Engine, JointCountReport, PairAnalysis, PairReport, QuadricPair,
    RLBoundParams, SweepConfig,
};
pub use error::{Error, Result};
pub use field::{ArithOp, CharTable, CharValue, FieldElement, FieldSpec, QuadraticCharacter};
pub use forms::{Diagonalization, QuadraticForm, WittClass, WittKind};
pub use linalg::Matrix;
pub use projective::{
    enumerate_points, lines_through, points_on_line, PointCursor, ProjectiveLine, ProjectivePoint, ProjectiveSpace,
};
pub use report::{ReportRow, SweepSummary};
