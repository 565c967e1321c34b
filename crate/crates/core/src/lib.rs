pub mod dwork;
pub mod error;
pub mod ffield;
pub mod linalg;
pub mod moment;
pub mod oracle;
pub mod padic;
pub mod series;

pub use error::{Error, Result};
