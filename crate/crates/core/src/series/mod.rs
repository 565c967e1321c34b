//! Box-truncated multivariate series and truncated T-series.

mod multi;
mod tseries;

pub use multi::MultiSeries;
pub use tseries::{Comparison, TSeries};
