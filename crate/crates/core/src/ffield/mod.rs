//! Finite fields F_{p^k}, the tower F_q ⊂ F_{q^m}, torus points and closed points.

mod field;
pub(crate) mod fp_poly;
mod tower;

pub use field::{FiniteField, MAX_FIELD_ORDER};
pub(crate) use tower::frobenius_logs;
pub use tower::{ClosedPoint, FieldTower, TorusPoint};
