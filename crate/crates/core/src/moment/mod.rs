//! Moment maps `[phi]_kappa`, the L-functions `L^{(s)}` and the unit-root L-function.
mod basis;
mod checks;
mod lfunctions;
mod system;

pub use basis::MomentBasis;
pub use checks::{
    binomial_identity_check, operator_limit_check, semigroup_check, sym_check, BinomialIdentityReport, LimitSample,
};
pub use lfunctions::{
    assembly_exponent, fiber_unit_root, l_s_compute, moment_l_euler, one_unit_power, unit_root_l_assemble,
    unit_root_l_euler, wedge_matrix, FiberEigenData, MomentFamily,
};
pub use system::{moment_mul, MomentElement, MomentMode, MomentSystem};

#[cfg(test)]
mod tests;
