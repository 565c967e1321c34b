//! Splitting functions, Frobenius series, block operators and classical L-functions.
mod fiber;
mod frobenius;
mod operator;
mod poly;
mod spec;
mod splitting;

pub use fiber::FiberEvaluator;
pub use frobenius::{build_frobenius_series, frobenius_box};
pub use operator::{
    classical_l, fredholm_determinant, l_from_fredholm, trace_formula_check, BlockOperator, TraceReport,
};
pub use poly::TorusPolynomial;
pub use spec::{EntryDocument, SigmaModuleSpec, SpecDocument, TermDocument};
pub use splitting::{artin_hasse_root, generic_splitting, splitting_defect, theta_splitting, SplittingFunction, SplittingKind};
